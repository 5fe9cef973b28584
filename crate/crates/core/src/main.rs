//! Command-line front end: tabulate the balanced line counts, replay the
//! named reduction chains, query the rank oracle, and search for or
//! re-check emptiness certificates.
//!
//! Exit codes: 0 when the requested claim is verified (or the command has
//! nothing to verify), 1 for usage errors — including asking to search
//! from a scheme whose surplus is negative — and 2 when a claim could not
//! be certified.

use std::fmt::Display;
use std::path::PathBuf;
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};

use linepost::calculus2::{p2_descent, p2_first_start, p2_second_start, run_plane_chain};
use linepost::calculus3::{
    base_case_chain, base_case_start, initial_chain, reduction_lemma_moves, reduction_lemma_start,
    run_chain, SpecMove,
};
use linepost::model::{main_theorem_scheme, Scheme, SpaceScheme, SubStar};
use linepost::oracle::{verify_empty, OracleConfig, OracleError, Verdict, DEFAULT_PRIME};
use linepost::search::{search_certificate, verify_certificate, Certificate, SearchError, SearchPolicy};

#[derive(Parser)]
#[command(name = "linepost", version, about = "Postulation of general lines: calculus, oracle, and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the balanced configurations degree by degree.
    Numerology {
        /// Largest degree to include.
        #[arg(long, value_name = "D")]
        max: u64,
    },
    /// Replay a named reduction chain step by step.
    Chain {
        /// Which chain to replay.
        #[arg(long, value_enum)]
        case: ChainCase,
        /// Reduction level, for the lemma and plane descents.
        #[arg(long)]
        k: Option<u64>,
        /// Start degree, for the opening chain.
        #[arg(long)]
        d: Option<u64>,
        /// Certify every claim along the chain and re-check the result.
        #[arg(long)]
        verify: bool,
        /// Write the certificate here (requires --verify, space chains only).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Ask the oracle whether a scheme imposes independent conditions.
    Verify {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Search for a reduction certificate and write it out.
    Search {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Write the certificate here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate file from scratch.
    Check {
        /// Certificate JSON produced by `search` or `chain --verify`.
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChainCase {
    /// The degree-9 chain down to a single line.
    Hh9,
    /// One level of the space reduction (needs --k).
    Lemma,
    /// The opening moves from a balanced scheme (needs --d).
    Initial,
    /// Plane descent, first family (needs --k).
    P2First,
    /// Plane descent, second family (needs --k).
    P2Second,
}

#[derive(Args)]
struct SchemeArgs {
    /// Use the balanced line configuration for the given degree.
    #[arg(long)]
    main_theorem: bool,
    /// Describe a space scheme explicitly.
    #[arg(long)]
    p3: bool,
    /// Describe a plane scheme explicitly.
    #[arg(long)]
    p2: bool,
    /// Degree of the forms.
    #[arg(long, allow_negative_numbers = true)]
    d: i64,
    /// General lines (with --p3).
    #[arg(long, default_value_t = 0, requires = "p3")]
    lines: u64,
    /// Crosses: pairs of meeting lines (with --p3).
    #[arg(long, default_value_t = 0, requires = "p3")]
    crosses: u64,
    /// Double points (with --p2).
    #[arg(long, default_value_t = 0, requires = "p2")]
    dbl: u64,
    /// Length-two point schemes (with --p2).
    #[arg(long, default_value_t = 0, requires = "p2")]
    len2: u64,
    /// Simple general points (with --p2).
    #[arg(long, default_value_t = 0, requires = "p2")]
    points: u64,
    /// Marked points available to later lines (with --p2).
    #[arg(long, default_value_t = 0, requires = "p2")]
    marked: u64,
    /// Collinear points on one transversal line.
    #[arg(long, default_value_t = 0, conflicts_with = "main_theorem")]
    collinear: u64,
    /// Sub-star parameters, written A,B.
    #[arg(long, value_name = "A,B", default_value = "0,0", value_parser = parse_substar, conflicts_with = "main_theorem")]
    substar: (u64, u64),
}

#[derive(Args)]
struct OracleArgs {
    /// Prime modulus for the first attempt.
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Base seed for coordinate sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attempts before giving up; retries switch prime and seed.
    #[arg(long, default_value_t = 3)]
    retries: u32,
}

impl OracleArgs {
    fn config(&self) -> OracleConfig {
        OracleConfig {
            prime: self.prime,
            seed: self.seed,
            retries: self.retries,
        }
    }
}

fn parse_substar(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected A,B, got `{s}`"))?;
    let a = a.trim().parse::<u64>().map_err(|e| format!("bad A: {e}"))?;
    let b = b.trim().parse::<u64>().map_err(|e| format!("bad B: {e}"))?;
    Ok((a, b))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            exit(code);
        }
    };
    let code = match cli.command {
        Command::Numerology { max } => cmd_numerology(max),
        Command::Chain {
            case,
            k,
            d,
            verify,
            out,
        } => cmd_chain(case, k, d, verify, out),
        Command::Verify { scheme, oracle } => cmd_verify(&scheme, &oracle),
        Command::Search { scheme, oracle, out } => cmd_search(&scheme, &oracle, out),
        Command::Check { file } => cmd_check(&file),
    };
    exit(code);
}

fn usage(msg: impl Display) -> i32 {
    eprintln!("error: {msg}");
    1
}

fn fail(msg: impl Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn build_scheme(args: &SchemeArgs) -> Result<Scheme, String> {
    let modes = [args.main_theorem, args.p3, args.p2];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return Err("exactly one of --main-theorem, --p3, --p2 is required".into());
    }
    if args.main_theorem {
        if args.d < 1 {
            return Err("--main-theorem needs a degree of at least 1".into());
        }
        return Ok(Scheme::Space(main_theorem_scheme(args.d as u64)));
    }
    let (a, b) = args.substar;
    if args.p3 {
        if args.d < 0 {
            return Err("--p3 needs a nonnegative degree".into());
        }
        let scheme = SpaceScheme::new(args.d as u64, args.lines, args.crosses, (a, b), args.collinear)
            .map_err(|e| e.to_string())?;
        return Ok(Scheme::Space(scheme));
    }
    let substar = SubStar::new(a, b).map_err(|e| e.to_string())?;
    Ok(Scheme::Plane(linepost::model::PlaneScheme {
        d: args.d,
        double_points: args.dbl,
        length2: args.len2,
        substar,
        points: args.points,
        collinear: args.collinear,
        marked: args.marked,
    }))
}

fn cmd_numerology(max: u64) -> i32 {
    println!(
        "{:>4} {:>3} {:>2} {:>6} {:>7} {:>11} {:>10} {:>8}",
        "d", "k", "e", "lines", "points", "conditions", "dimension", "surplus"
    );
    for d in 1..=max {
        let b = main_theorem_scheme(d);
        let scheme = Scheme::Space(b);
        println!(
            "{:>4} {:>3} {:>2} {:>6} {:>7} {:>11} {:>10} {:>8}",
            d,
            d / 3,
            d % 3,
            b.lines,
            b.collinear,
            scheme.virtual_conditions(),
            scheme.dim_forms(),
            b.surplus()
        );
    }
    0
}

/// All lemma levels from `from_k` down to 4, then the explicit base chain.
fn lemma_tail(from_k: u64) -> Vec<SpecMove> {
    let mut moves = Vec::new();
    let mut k = from_k;
    while k >= 4 {
        moves.extend(reduction_lemma_moves(k).expect("level is at least 4"));
        k -= 1;
    }
    moves.extend(base_case_chain());
    moves
}

/// The opening chain continued through every lemma level to the bottom.
/// The opening lands mid-level, so the first lemma level is entered with
/// its leading move(s) already spent.
fn initial_full_chain(d: u64) -> Result<Vec<SpecMove>, String> {
    let mut moves = initial_chain(d).map_err(|e| e.to_string())?;
    let k = d / 3;
    let spent = if d % 3 == 2 { 1 } else { 2 };
    moves.extend(
        reduction_lemma_moves(k)
            .map_err(|e| e.to_string())?
            .into_iter()
            .skip(spent),
    );
    moves.extend(lemma_tail(k - 1));
    Ok(moves)
}

fn cmd_chain(
    case: ChainCase,
    k: Option<u64>,
    d: Option<u64>,
    verify: bool,
    out: Option<PathBuf>,
) -> i32 {
    if out.is_some() && !verify {
        return usage("--out requires --verify");
    }
    let need_k = |k: Option<u64>| k.ok_or("this case needs --k");
    let need_d = |d: Option<u64>| d.ok_or("this case needs --d");
    match case {
        ChainCase::Hh9 | ChainCase::Lemma | ChainCase::Initial => {
            let (start, shown, forced): (SpaceScheme, Vec<SpecMove>, Vec<SpecMove>) = match case {
                ChainCase::Hh9 => {
                    if k.is_some() || d.is_some() {
                        return usage("hh9 takes neither --k nor --d");
                    }
                    let chain = base_case_chain().to_vec();
                    (base_case_start(), chain.clone(), chain)
                }
                ChainCase::Lemma => {
                    let k = match need_k(k) {
                        Ok(k) => k,
                        Err(e) => return usage(e),
                    };
                    let shown = match reduction_lemma_moves(k) {
                        Ok(m) => m.to_vec(),
                        Err(e) => return usage(e),
                    };
                    (reduction_lemma_start(k), shown, lemma_tail(k))
                }
                ChainCase::Initial => {
                    let d = match need_d(d) {
                        Ok(d) => d,
                        Err(e) => return usage(e),
                    };
                    let shown = match initial_chain(d) {
                        Ok(m) => m,
                        Err(e) => return usage(e),
                    };
                    let forced = match initial_full_chain(d) {
                        Ok(m) => m,
                        Err(e) => return usage(e),
                    };
                    (main_theorem_scheme(d), shown, forced)
                }
                _ => unreachable!(),
            };
            let steps = match run_chain(&start, &shown) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            println!("start: {start}");
            for (i, step) in steps.iter().enumerate() {
                println!("{:>3}. {}", i + 1, step.mv);
                println!("     trace:    {}", step.trace);
                println!("     residual: {}", step.after);
            }
            if let Some(last) = steps.last() {
                println!("end:  {}", last.after);
            }
            if !verify {
                return 0;
            }
            certify_space_chain(&start, forced, out)
        }
        ChainCase::P2First | ChainCase::P2Second => {
            if out.is_some() {
                return usage("--out applies to space chains; use `search` for plane schemes");
            }
            let k = match need_k(k) {
                Ok(k) => k,
                Err(e) => return usage(e),
            };
            let family = if case == ChainCase::P2First { 1 } else { 2 };
            let start = match if family == 1 {
                p2_first_start(k)
            } else {
                p2_second_start(k)
            } {
                Ok(s) => s,
                Err(e) => return usage(e),
            };
            let moves = match p2_descent(family, k) {
                Ok(m) => m,
                Err(e) => return usage(e),
            };
            let steps = match run_plane_chain(&start, &moves) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            println!("start: {start}");
            for (i, step) in steps.iter().enumerate() {
                println!("{:>3}. {}", i + 1, step.mv);
                println!("     after: {}", step.after);
            }
            if let Some(last) = steps.last() {
                println!("end:  {}", last.after);
            }
            if !verify {
                return 0;
            }
            let mut schemes = vec![start];
            schemes.extend(steps.iter().map(|s| s.after));
            let cfg = OracleConfig::default();
            for v in &schemes {
                if v.d < 0 {
                    println!("verify {v}: nothing to do at negative degree");
                    continue;
                }
                match verify_empty(&Scheme::Plane(*v), &cfg) {
                    Ok(Verdict::Verified {
                        prime,
                        seed,
                        rank,
                        cols,
                    }) => println!("verify {v}: rank {rank} of {cols} over F_{prime} (seed {seed})"),
                    Ok(Verdict::Inconclusive {
                        best_rank,
                        cols,
                        attempts,
                    }) => {
                        return fail(format!(
                            "{v} stayed inconclusive: best rank {best_rank} of {cols} after {attempts} attempts"
                        ));
                    }
                    Err(e) => return fail(e),
                }
            }
            0
        }
    }
}

fn certify_space_chain(start: &SpaceScheme, forced: Vec<SpecMove>, out: Option<PathBuf>) -> i32 {
    let policy = SearchPolicy {
        forced,
        ..SearchPolicy::default()
    };
    let cert = match search_certificate(&Scheme::Space(*start), &policy) {
        Ok(c) => c,
        Err(e) => return fail(format!("chain could not be certified: {e}")),
    };
    if let Err(e) = verify_certificate(&cert) {
        return fail(format!("certificate failed its own re-check: {e}"));
    }
    println!("certificate: {} nodes, re-checked OK", cert.nodes.len());
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, cert.to_json_string()) {
            return fail(format!("cannot write {}: {e}", path.display()));
        }
        println!("wrote {}", path.display());
    }
    0
}

fn cmd_verify(scheme: &SchemeArgs, oracle: &OracleArgs) -> i32 {
    let scheme = match build_scheme(scheme) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    match verify_empty(&scheme, &oracle.config()) {
        Ok(Verdict::Verified {
            prime,
            seed,
            rank,
            cols,
        }) => {
            println!("{scheme}");
            println!("verified: rank {rank} of {cols} over F_{prime} (seed {seed})");
            0
        }
        Ok(Verdict::Inconclusive {
            best_rank,
            cols,
            attempts,
        }) => {
            println!("{scheme}");
            println!("inconclusive: best rank {best_rank} of {cols} after {attempts} attempts");
            2
        }
        Err(e @ OracleError::NotPrime(_)) => usage(e),
        Err(e) => fail(e),
    }
}

fn cmd_search(scheme: &SchemeArgs, oracle: &OracleArgs, out: Option<PathBuf>) -> i32 {
    let scheme = match build_scheme(scheme) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let policy = SearchPolicy {
        oracle: oracle.config(),
        ..SearchPolicy::default()
    };
    match search_certificate(&scheme, &policy) {
        Ok(cert) => {
            let json = cert.to_json_string();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, json) {
                        return fail(format!("cannot write {}: {e}", path.display()));
                    }
                    println!("certificate: {} nodes -> {}", cert.nodes.len(), path.display());
                }
                None => print!("{json}"),
            }
            0
        }
        Err(e @ SearchError::NegativeSurplus { .. }) => usage(e),
        Err(SearchError::Oracle(e @ OracleError::NotPrime(_))) => usage(e),
        Err(e) => fail(e),
    }
}

fn cmd_check(file: &PathBuf) -> i32 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", file.display())),
    };
    let cert = match Certificate::from_json_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match verify_certificate(&cert) {
        Ok(()) => {
            println!(
                "certificate verified: root {}, {} nodes",
                cert.root,
                cert.nodes.len()
            );
            0
        }
        Err(e) => fail(e),
    }
}
