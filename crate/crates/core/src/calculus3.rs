//! The specialization calculus in projective 3-space.
//!
//! A combined move `S(l, s, h, c)` degenerates part of a [`SpaceScheme`]
//! into a fixed plane H:
//!
//! * `l` lines move entirely into H;
//! * `s` pairs of lines collapse into sundials (cross + embedded point) with
//!   vertices on H;
//! * `h` crosses put one of their two lines into H ("half-crosses");
//! * `c` crosses put both lines into H;
//! * the starred variant additionally pushes the scheme's collinear points
//!   onto a line of H.
//!
//! Applying a move splits the emptiness claim in two by the Castelnuovo
//! argument: a trace claim inside H at the same degree and a residual claim
//! in 3-space one degree lower.  The bookkeeping is exact; the geometry
//! behind it (which intersections of the degenerated lines survive into the
//! residual) is tested independently by the oracle module.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{SpaceScheme, SubStar, TraceScheme};
use crate::numstr;

/// A combined specialization move.  The counts consume the scheme's
/// inventory: `lines + 2*sundials` general lines and `half_crosses +
/// crosses` crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpecMove {
    #[serde(with = "numstr::u64str")]
    pub lines: u64,
    #[serde(with = "numstr::u64str")]
    pub sundials: u64,
    #[serde(with = "numstr::u64str")]
    pub half_crosses: u64,
    #[serde(with = "numstr::u64str")]
    pub crosses: u64,
    pub star: bool,
}

impl SpecMove {
    pub fn new(lines: u64, sundials: u64, half_crosses: u64, crosses: u64) -> Self {
        SpecMove {
            lines,
            sundials,
            half_crosses,
            crosses,
            star: false,
        }
    }

    /// The starred variant: also specialize all collinear points into H.
    pub fn starred(lines: u64, sundials: u64, half_crosses: u64, crosses: u64) -> Self {
        SpecMove {
            star: true,
            ..SpecMove::new(lines, sundials, half_crosses, crosses)
        }
    }

    /// Number of lines of H the move creates (each full cross contributes
    /// two, each half-cross one).
    pub fn plane_lines(&self) -> u64 {
        self.lines + 2 * self.crosses + self.half_crosses
    }
}

impl fmt::Display for SpecMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S{}({},{},{},{})",
            if self.star { "*" } else { "" },
            self.lines,
            self.sundials,
            self.half_crosses,
            self.crosses
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CalculusError {
    #[error("move {mv} is not feasible on {scheme}")]
    Infeasible { scheme: SpaceScheme, mv: SpecMove },
    #[error("chain step {index}: move {mv} is not feasible on {scheme}")]
    InfeasibleAt {
        index: usize,
        scheme: SpaceScheme,
        mv: SpecMove,
    },
    #[error("the reduction move table requires k >= 4 (got k = {k})")]
    LemmaRange { k: u64 },
    #[error("the opening chain requires degree >= 12 (got d = {d})")]
    InitialRange { d: u64 },
}

/// A move is feasible when the scheme has the inventory it consumes, the
/// degree can still drop, and the star flag has collinear points to act on.
pub fn feasible(b: &SpaceScheme, m: &SpecMove) -> bool {
    b.d >= 1
        && b.lines >= m.lines + 2 * m.sundials
        && b.crosses >= m.crosses + m.half_crosses
        && (!m.star || b.collinear > 0)
}

/// One applied move: the scheme before, the trace left in H, and the
/// residual scheme one degree lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub before: SpaceScheme,
    pub mv: SpecMove,
    pub trace: TraceScheme,
    pub after: SpaceScheme,
}

/// Split a scheme along a move into (trace, residual).
///
/// Trace: the moved lines (plus two per full cross, one per half-cross)
/// become lines of H; each sundial leaves a double point at its vertex;
/// each untouched cross meets H in a length-2 scheme at its vertex; each
/// untouched line meets H in a point; the pre-existing sub-star already
/// lives in H and moves to the trace wholesale.
///
/// Residual: untouched lines and crosses survive (sundials as crosses,
/// half-crosses contributing their line not in H); the lines now in H leave
/// behind their pairwise intersection points — a sub-star on `plane_lines`
/// lines omitting the `c` cross vertices, which were intersections already
/// before the degeneration.
pub fn apply_move(
    b: &SpaceScheme,
    m: &SpecMove,
) -> Result<(TraceScheme, SpaceScheme), CalculusError> {
    if !feasible(b, m) {
        return Err(CalculusError::Infeasible {
            scheme: *b,
            mv: *m,
        });
    }
    let trace = TraceScheme {
        d: b.d,
        lines: m.plane_lines(),
        double_points: m.sundials,
        length2: b.crosses - m.crosses - m.half_crosses,
        substar: b.substar,
        points: b.lines - m.lines - 2 * m.sundials,
        collinear: if m.star { b.collinear } else { 0 },
    };
    // 2c <= l + 2c + h always holds, so the sub-star constructor cannot fail.
    let residual_substar = SubStar::new(m.plane_lines(), m.crosses)
        .expect("cross vertices always fit the residual sub-star");
    let after = SpaceScheme {
        d: b.d - 1,
        lines: b.lines - m.lines + m.half_crosses - 2 * m.sundials,
        crosses: b.crosses - m.crosses + m.sundials - m.half_crosses,
        substar: residual_substar,
        collinear: if m.star { 0 } else { b.collinear },
    };
    Ok((trace, after))
}

/// Fold `apply_move` over a move list, reporting the first infeasible step
/// with its index.
pub fn run_chain(
    start: &SpaceScheme,
    moves: &[SpecMove],
) -> Result<Vec<ChainStep>, CalculusError> {
    let mut steps = Vec::with_capacity(moves.len());
    let mut current = *start;
    for (index, mv) in moves.iter().enumerate() {
        let (trace, after) = apply_move(&current, mv).map_err(|_| CalculusError::InfeasibleAt {
            index,
            scheme: current,
            mv: *mv,
        })?;
        steps.push(ChainStep {
            before: current,
            mv: *mv,
            trace,
            after,
        });
        current = after;
    }
    Ok(steps)
}

/// Start scheme of the three-step reduction at level `k >= 1`:
/// a balanced mix of lines, crosses and a sub-star at degree 3k.
pub fn reduction_lemma_start(k: u64) -> SpaceScheme {
    assert!(k >= 1, "reduction level must be positive");
    let (lines, crosses, substar) = if k % 2 == 1 {
        (
            (k * (k + 5) + 4) / 2,
            (k * k - 1) / 2,
            SubStar::new(k + 1, (k + 1) / 2).unwrap(),
        )
    } else {
        (
            (k * (k + 5) + 2) / 2,
            k * k / 2,
            SubStar::new(k + 1, k / 2).unwrap(),
        )
    };
    SpaceScheme {
        d: 3 * k,
        lines,
        crosses,
        substar,
        collinear: 0,
    }
}

/// The three moves taking `reduction_lemma_start(k)` to
/// `reduction_lemma_start(k-1)`.  The tables need `k >= 4`: below that the
/// first odd-case move would ask for a negative line count.
pub fn reduction_lemma_moves(k: u64) -> Result<[SpecMove; 3], CalculusError> {
    if k < 4 {
        return Err(CalculusError::LemmaRange { k });
    }
    Ok(if k % 2 == 1 {
        [
            SpecMove::new((k - 5) / 2, 0, (k - 1) / 2, 2),
            SpecMove::new(0, 3, 1, (k - 1) / 2),
            SpecMove::new(0, (k + 1) / 2, 1, (k - 1) / 2),
        ]
    } else {
        [
            SpecMove::new(k / 2 - 1, 0, k / 2, 1),
            SpecMove::new(0, 1, 0, k / 2),
            SpecMove::new(0, k / 2, 0, k / 2),
        ]
    })
}

/// The base configuration below the reduction range: 14 lines, 4 crosses
/// and a (4,2) sub-star at degree 9 (`reduction_lemma_start(3)`).
pub fn base_case_start() -> SpaceScheme {
    reduction_lemma_start(3)
}

/// The eight hand-tuned moves discharging the degree-9 base configuration
/// down to one line and two points on a plane at degree 1.
pub fn base_case_chain() -> [SpecMove; 8] {
    [
        SpecMove::new(3, 0, 1, 0),
        SpecMove::new(1, 0, 0, 1),
        SpecMove::new(0, 2, 1, 1),
        SpecMove::new(0, 0, 1, 1),
        SpecMove::new(2, 1, 0, 0),
        SpecMove::new(2, 0, 0, 0),
        SpecMove::new(1, 1, 0, 0),
        SpecMove::new(0, 0, 1, 1),
    ]
}

/// Opening moves taking `main_theorem_scheme(d)` (d >= 12) to an entry
/// scheme of the reduction at level k = floor(d/3): the second intermediate
/// for d ≡ 0, 1 (mod 3), the first intermediate for d ≡ 2 (mod 3).
///
/// The general tables below assume k >= 5 in the d ≡ 1, 2 branches — at
/// k = 4 they would consume more crosses than the intermediate schemes
/// hold.  Degrees 13 and 14 therefore use dedicated three-step chains that
/// land on the same entry schemes (each step checked balanced by the replay
/// tests).
pub fn initial_chain(d: u64) -> Result<Vec<SpecMove>, CalculusError> {
    if d < 12 {
        return Err(CalculusError::InitialRange { d });
    }
    let (k, e) = (d / 3, d % 3);
    let odd = k % 2 == 1;
    Ok(match (e, odd) {
        (0, true) => vec![
            SpecMove::new(k + 1, k * (k - 1) / 2, 0, 0),
            SpecMove::new(0, 1, 1, (k - 1) / 2),
        ],
        (0, false) => vec![
            SpecMove::new(k + 1, k * (k - 1) / 2, 0, 0),
            SpecMove::new(0, 0, 0, k / 2),
        ],
        (1, true) => vec![
            SpecMove::new(k + 2, k * (k - 3) / 2, 0, 0),
            SpecMove::new(0, 1, 1, (k - 1) / 2),
            SpecMove::new(0, (3 * k + 1) / 2, 1, (k - 1) / 2),
        ],
        (1, false) if k == 4 => vec![
            SpecMove::new(6, 2, 0, 0),
            SpecMove::new(4, 0, 0, 0),
            SpecMove::new(0, 4, 0, 2),
        ],
        (1, false) => vec![
            SpecMove::new(k + 2, k * (k - 3) / 2, 0, 0),
            SpecMove::new(0, 0, 0, k / 2),
            SpecMove::new(0, 3 * k / 2, 0, k / 2),
        ],
        (2, true) => vec![
            SpecMove::starred(k + 2, k * (k - 3) / 2 - 1, 0, 0),
            SpecMove::new(0, k + 2, 1, (k - 1) / 2),
            SpecMove::new(k - 3, (k - 1) / 2, 0, 2),
        ],
        (2, false) if k == 4 => vec![
            SpecMove::starred(6, 1, 0, 0),
            SpecMove::new(4, 5, 0, 0),
            SpecMove::new(3, 0, 0, 1),
        ],
        (2, false) => vec![
            SpecMove::starred(k + 2, k * (k - 3) / 2 - 1, 0, 0),
            SpecMove::new(0, k + 1, 0, k / 2),
            SpecMove::new(k - 1, k / 2, 0, 1),
        ],
        _ => unreachable!(),
    })
}

/// The reduction-chain scheme the opening chain must land on: replaying the
/// level-k reduction, d ≡ 2 (mod 3) enters after its first move, the other
/// residues after its second.
pub fn initial_chain_entry(d: u64) -> Result<SpaceScheme, CalculusError> {
    if d < 12 {
        return Err(CalculusError::InitialRange { d });
    }
    let k = d / 3;
    let steps = run_chain(&reduction_lemma_start(k), &reduction_lemma_moves(k)?)
        .expect("reduction moves are feasible for k >= 4");
    let index = if d % 3 == 2 { 0 } else { 1 };
    Ok(steps[index].after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::main_theorem_scheme;
    use proptest::prelude::*;

    fn b(d: u64, lines: u64, crosses: u64, star: (u64, u64)) -> SpaceScheme {
        SpaceScheme::new(d, lines, crosses, star, 0).unwrap()
    }

    fn t(
        d: u64,
        lines: u64,
        dbl: u64,
        len2: u64,
        star: (u64, u64),
        pts: u64,
    ) -> TraceScheme {
        TraceScheme {
            d,
            lines,
            double_points: dbl,
            length2: len2,
            substar: SubStar::new(star.0, star.1).unwrap(),
            points: pts,
            collinear: 0,
        }
    }

    #[test]
    fn feasibility_checks() {
        let base = base_case_start();
        assert!(feasible(&base, &SpecMove::new(3, 0, 1, 0)));
        assert!(!feasible(&base, &SpecMove::new(0, 0, 5, 0)));
        assert!(feasible(&b(2, 0, 2, (1, 0)), &SpecMove::new(0, 0, 1, 1)));
        // Star moves need collinear points.
        assert!(!feasible(&base, &SpecMove::starred(1, 0, 0, 0)));
        assert!(feasible(
            &main_theorem_scheme(5),
            &SpecMove::starred(2, 1, 0, 0)
        ));
        // Degree must stay nonnegative after the move.
        assert!(!feasible(&b(0, 3, 0, (0, 0)), &SpecMove::new(1, 0, 0, 0)));
    }

    #[test]
    fn empty_move_splits_cleanly() {
        let before = b(7, 5, 3, (4, 1));
        let (trace, after) = apply_move(&before, &SpecMove::new(0, 0, 0, 0)).unwrap();
        assert_eq!(trace, t(7, 0, 0, 3, (4, 1), 5));
        assert_eq!(after, b(6, 5, 3, (0, 0)));
    }

    #[test]
    fn base_chain_replays_every_block() {
        // Every (trace, residual) pair of the degree-9 descent, frozen.
        let steps = run_chain(&base_case_start(), &base_case_chain()).unwrap();
        let expected: [(TraceScheme, SpaceScheme); 8] = [
            (t(9, 4, 0, 3, (4, 2), 11), b(8, 12, 3, (4, 0))),
            (t(8, 3, 0, 2, (4, 0), 11), b(7, 11, 2, (3, 1))),
            (t(7, 3, 2, 0, (3, 1), 7), b(6, 8, 2, (3, 1))),
            (t(6, 3, 0, 0, (3, 1), 8), b(5, 9, 0, (3, 1))),
            (t(5, 2, 1, 0, (3, 1), 5), b(4, 5, 1, (2, 0))),
            (t(4, 2, 0, 1, (2, 0), 3), b(3, 3, 1, (2, 0))),
            (t(3, 1, 1, 1, (2, 0), 0), b(2, 0, 2, (1, 0))),
            (t(2, 3, 0, 0, (1, 0), 0), b(1, 1, 0, (3, 1))),
        ];
        assert_eq!(steps.len(), 8);
        for (i, step) in steps.iter().enumerate() {
            assert_eq!(step.trace, expected[i].0, "trace at step {i}");
            assert_eq!(step.after, expected[i].1, "residual at step {i}");
        }
    }

    #[test]
    fn reduction_start_small_values() {
        assert_eq!(reduction_lemma_start(5), b(15, 27, 12, (6, 3)));
        assert_eq!(reduction_lemma_start(4), b(12, 19, 8, (5, 2)));
        assert_eq!(reduction_lemma_start(3), b(9, 14, 4, (4, 2)));
        for k in 1..=40 {
            assert_eq!(reduction_lemma_start(k).surplus(), 0, "k={k}");
        }
    }

    #[test]
    fn reduction_moves_tables() {
        assert_eq!(
            reduction_lemma_moves(5).unwrap(),
            [
                SpecMove::new(0, 0, 2, 2),
                SpecMove::new(0, 3, 1, 2),
                SpecMove::new(0, 3, 1, 2),
            ]
        );
        assert_eq!(
            reduction_lemma_moves(4).unwrap(),
            [
                SpecMove::new(1, 0, 2, 1),
                SpecMove::new(0, 1, 0, 2),
                SpecMove::new(0, 2, 0, 2),
            ]
        );
        assert_eq!(
            reduction_lemma_moves(3),
            Err(CalculusError::LemmaRange { k: 3 })
        );
    }

    #[test]
    fn reduction_replay_k5_blocks() {
        let steps = run_chain(
            &reduction_lemma_start(5),
            &reduction_lemma_moves(5).unwrap(),
        )
        .unwrap();
        assert_eq!(steps[0].trace, t(15, 6, 0, 8, (6, 3), 27));
        assert_eq!(steps[0].after, b(14, 29, 8, (6, 2)));
        assert_eq!(steps[1].trace, t(14, 5, 3, 5, (6, 2), 23));
        assert_eq!(steps[1].after, b(13, 24, 8, (5, 2)));
        assert_eq!(steps[2].trace, t(13, 5, 3, 5, (5, 2), 18));
        assert_eq!(steps[2].after, reduction_lemma_start(4));
    }

    #[test]
    fn reduction_replay_k4_blocks() {
        let steps = run_chain(
            &reduction_lemma_start(4),
            &reduction_lemma_moves(4).unwrap(),
        )
        .unwrap();
        assert_eq!(steps[0].trace, t(12, 5, 0, 5, (5, 2), 18));
        assert_eq!(steps[0].after, b(11, 20, 5, (5, 1)));
        assert_eq!(steps[1].trace, t(11, 4, 1, 3, (5, 1), 18));
        assert_eq!(steps[1].after, b(10, 18, 4, (4, 2)));
        assert_eq!(steps[2].trace, t(10, 4, 2, 2, (4, 2), 14));
        assert_eq!(steps[2].after, reduction_lemma_start(3));
    }

    #[test]
    fn six_steps_drop_two_levels() {
        let mut scheme = reduction_lemma_start(7);
        for k in [7, 6] {
            let steps = run_chain(&scheme, &reduction_lemma_moves(k).unwrap()).unwrap();
            scheme = steps.last().unwrap().after;
        }
        assert_eq!(scheme, reduction_lemma_start(5));
    }

    #[test]
    fn opening_chain_degree_12() {
        let moves = initial_chain(12).unwrap();
        assert_eq!(
            moves,
            vec![SpecMove::new(5, 6, 0, 0), SpecMove::new(0, 0, 0, 2)]
        );
        let steps = run_chain(&main_theorem_scheme(12), &moves).unwrap();
        assert_eq!(steps[0].after, b(11, 18, 6, (5, 0)));
        assert_eq!(steps[1].after, b(10, 18, 4, (4, 2)));
        assert_eq!(steps[1].after, initial_chain_entry(12).unwrap());
    }

    #[test]
    fn opening_chain_degree_13_and_14() {
        // The k = 4 repairs: the general tables are infeasible here, the
        // replacements land on the same entry schemes.
        for d in [13, 14] {
            let steps = run_chain(&main_theorem_scheme(d), &initial_chain(d).unwrap()).unwrap();
            assert_eq!(
                steps.last().unwrap().after,
                initial_chain_entry(d).unwrap(),
                "d={d}"
            );
        }
        let first = run_chain(&main_theorem_scheme(13), &initial_chain(13).unwrap()).unwrap();
        assert_eq!(first[0].mv, SpecMove::new(6, 2, 0, 0));
        assert_eq!(first[0].after, b(12, 30, 2, (6, 0)));
        let star = run_chain(&main_theorem_scheme(14), &initial_chain(14).unwrap()).unwrap();
        assert_eq!(star[0].mv, SpecMove::starred(6, 1, 0, 0));
        assert_eq!(star[0].trace.collinear, 5);
        assert_eq!(star[0].after.collinear, 0);
    }

    #[test]
    fn opening_chain_rejects_small_degrees() {
        assert_eq!(initial_chain(11), Err(CalculusError::InitialRange { d: 11 }));
        assert_eq!(
            initial_chain_entry(9),
            Err(CalculusError::InitialRange { d: 9 })
        );
    }

    #[test]
    fn run_chain_reports_failing_index() {
        let err = run_chain(
            &b(9, 2, 0, (0, 0)),
            &[SpecMove::new(1, 0, 0, 0), SpecMove::new(0, 0, 1, 0)],
        )
        .unwrap_err();
        assert!(matches!(err, CalculusError::InfeasibleAt { index: 1, .. }));
        assert_eq!(run_chain(&b(5, 3, 0, (0, 0)), &[]).unwrap(), vec![]);
    }

    proptest! {
        #[test]
        fn curve_degree_is_conserved(
            d in 1u64..60,
            lines in 0u64..40,
            crosses in 0u64..20,
            bb in 0u64..6,
            a_extra in 0u64..6,
            l_raw in 0u64..40,
            s_raw in 0u64..20,
            h_raw in 0u64..20,
            c_raw in 0u64..20,
        ) {
            // Derive a feasible move from the raw draws instead of
            // rejecting: consume at most the available inventory.
            let l = l_raw % (lines + 1);
            let s = s_raw % ((lines - l) / 2 + 1);
            let h = h_raw % (crosses + 1);
            let c = c_raw % (crosses - h + 1);
            let scheme =
                SpaceScheme::new(d, lines, crosses, (2 * bb + a_extra, bb), 0).unwrap();
            let mv = SpecMove::new(l, s, h, c);
            prop_assert!(feasible(&scheme, &mv));
            let (trace, after) = apply_move(&scheme, &mv).unwrap();
            prop_assert_eq!(
                scheme.curve_degree(),
                after.curve_degree() + trace.lines
            );
            // The residual sub-star is always well formed by construction.
            prop_assert!(2 * after.substar.b() <= after.substar.a());
        }
    }
}
