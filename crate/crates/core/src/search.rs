//! Reduction search and replayable emptiness certificates.
//!
//! [`search_certificate`] grows a reduction tree over a claim: space-level
//! moves split a claim into a trace obligation and a residual, traces are
//! stripped to zero-dimensional plane claims, and plane claims are either
//! certified directly by the oracle, split further line by line, or closed
//! analytically (negative degree has no forms at all).  Candidate moves are
//! filtered so both children keep nonnegative surplus — a child with
//! negative surplus could never impose enough conditions, so the branch is
//! dead.
//!
//! The resulting [`Certificate`] is a flat preorder array of nodes with
//! explicit child indices and records every intermediate scheme, so an
//! independent walker ([`verify_certificate`]) can recompute each
//! transition, re-run each recorded oracle matrix, and accept or reject
//! without trusting the searcher.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus2::{
    on_line_length, plane_feasible, plane_step, strip_lines, PlaneMove, PlaneTarget,
};
use crate::calculus3::{apply_move, feasible, SpecMove};
use crate::model::{PlaneScheme, Scheme, SpaceScheme, TraceScheme};
use crate::numstr;
use crate::oracle::{condition_matrix, verify_empty, OracleConfig, OracleError, Verdict};

pub const CERT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{scheme} has surplus {surplus} < 0: it can never impose enough conditions")]
    NegativeSurplus { scheme: Scheme, surplus: i64 },
    #[error("no reduction found for {scheme}")]
    Exhausted { scheme: Scheme },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("certificate parse error: {0}")]
    Parse(String),
    #[error("unsupported certificate format version {0}")]
    Version(u32),
    #[error("node index {index} out of bounds ({len} nodes)")]
    IndexOutOfBounds { index: u64, len: u64 },
    #[error("node {index} reachable along two paths")]
    Revisited { index: u64 },
    #[error("{count} of {len} nodes are unreachable from the root")]
    Unreachable { count: u64, len: u64 },
    #[error("node {index}: {problem}")]
    Node { index: u64, problem: String },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Search tuning.  `leaf_degree` is the degree at or below which space
/// claims go straight to the oracle; `forced` is a move prefix the space
/// search must follow before choosing its own moves.
#[derive(Debug, Clone)]
pub struct SearchPolicy {
    pub max_depth: u32,
    pub branching_cap: usize,
    pub leaf_degree: u64,
    pub plane_search: bool,
    pub forced: Vec<SpecMove>,
    pub oracle: OracleConfig,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            max_depth: 128,
            branching_cap: 8,
            leaf_degree: 3,
            plane_search: true,
            forced: Vec::new(),
            oracle: OracleConfig::default(),
        }
    }
}

/// One node of a certificate tree, stored flat; child links are indices
/// into the node array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertNode {
    /// A space-level specialization: the claim for the scheme at hand
    /// follows from the trace obligation plus the residual claim.
    Specialize3 {
        #[serde(rename = "move")]
        mv: SpecMove,
        trace: TraceScheme,
        #[serde(with = "numstr::u64str")]
        obligation: u64,
        residual: SpaceScheme,
        #[serde(with = "numstr::u64str")]
        next: u64,
    },
    /// Remove the honest lines of a trace, one degree each.
    StripLines {
        from: TraceScheme,
        to: PlaneScheme,
        #[serde(with = "numstr::u64str")]
        next: u64,
    },
    /// Split one line off a plane claim.
    PlaneStep {
        #[serde(rename = "move")]
        mv: PlaneMove,
        after: PlaneScheme,
        #[serde(with = "numstr::u64str")]
        next: u64,
    },
    /// A full-rank condition matrix over F_prime with the recorded seed.
    OracleLeaf {
        scheme: Scheme,
        #[serde(with = "numstr::u64str")]
        prime: u64,
        #[serde(with = "numstr::u64str")]
        seed: u64,
        #[serde(with = "numstr::u64str")]
        rank: u64,
        #[serde(with = "numstr::u64str")]
        cols: u64,
    },
    /// A claim that needs no computation.
    AnalyticLeaf { reason: AnalyticReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticReason {
    /// Negative degree: the space of forms is already zero.
    NegativeDegree,
    /// At least dim-many unconstrained points in the plane: general points
    /// impose independent conditions.
    KnownBaseFact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertConfig {
    #[serde(with = "numstr::u64str")]
    pub prime: u64,
    #[serde(with = "numstr::u64str")]
    pub seed: u64,
}

/// A self-contained, replayable proof that the root claim holds.  All
/// integers serialize as decimal strings and keys keep declaration order,
/// so serialization is canonical and round-trips byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "numstr::u32str")]
    pub format_version: u32,
    pub config: CertConfig,
    pub root: Scheme,
    pub nodes: Vec<CertNode>,
}

impl Certificate {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates always serialize");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self, CertificateError> {
        serde_json::from_str(s).map_err(|e| CertificateError::Parse(e.to_string()))
    }
}

/// Feasible moves whose two children both keep nonnegative surplus, in
/// ascending order of trace surplus (fewer lines moved into the plane is
/// cheaper), capped.
pub fn enumerate_moves(b: &SpaceScheme, cap: usize) -> Vec<SpecMove> {
    let mut ranked: Vec<(i64, u64, u64, u64, u64, bool, SpecMove)> = Vec::new();
    for star in [false, true] {
        if star && b.collinear == 0 {
            continue;
        }
        for lines in 0..=b.lines {
            for sundials in 0..=(b.lines - lines) / 2 {
                for half in 0..=b.crosses {
                    for crosses in 0..=(b.crosses - half) {
                        let mv = SpecMove {
                            lines,
                            sundials,
                            half_crosses: half,
                            crosses,
                            star,
                        };
                        if !feasible(b, &mv) {
                            continue;
                        }
                        let Ok((trace, residual)) = apply_move(b, &mv) else {
                            continue;
                        };
                        if residual.surplus() < 0 || strip_lines(&trace).surplus() < 0 {
                            continue;
                        }
                        ranked.push((
                            trace.surplus(),
                            sundials,
                            half,
                            crosses,
                            lines,
                            star,
                            mv,
                        ));
                    }
                }
            }
        }
    }
    ranked.sort_by_key(|&(sur, s, h, c, l, star, _)| (sur, s, h, c, l, star));
    ranked.into_iter().take(cap).map(|r| r.6).collect()
}

/// Line-splitting candidates that exactly (or minimally) fill the target
/// line and keep the child at nonnegative surplus, capped.
pub fn enumerate_plane_moves(v: &PlaneScheme, cap: usize) -> Vec<PlaneMove> {
    if v.d < 0 {
        return Vec::new();
    }
    let need = v.d as u64 + 1;
    let targets = [
        PlaneTarget::SubStarLineWithOmitted,
        PlaneTarget::SubStarLineWithoutOmitted,
        PlaneTarget::LineThroughMarkedPoint,
        PlaneTarget::GeneralLine,
    ];
    let mut ranked: Vec<(u64, usize, u64, u64, PlaneMove)> = Vec::new();
    for (t_idx, &target) in targets.iter().enumerate() {
        let probe = PlaneMove::new(target, 0, 0, 0);
        let Some(base) = on_line_length(v, &probe) else {
            continue;
        };
        for dbl in 0..=v.double_points {
            for len2 in 0..=v.length2 {
                let fixed = base + 2 * dbl + 2 * len2;
                // Top up with simple points to exactly d + 1 if possible.
                let pts = need.saturating_sub(fixed);
                if pts > v.points {
                    continue;
                }
                let mv = PlaneMove::new(target, dbl, len2, pts);
                if !plane_feasible(v, &mv) {
                    continue;
                }
                let after = plane_step(v, &mv).expect("feasible plane move applies");
                if after.surplus() < 0 {
                    continue;
                }
                let overshoot = fixed.max(need) - need;
                ranked.push((overshoot, t_idx, dbl, len2, mv));
            }
        }
    }
    ranked.sort_by_key(|&(over, t, dbl, len2, _)| (over, t, dbl, len2));
    ranked.into_iter().take(cap).map(|r| r.4).collect()
}

struct Searcher<'a> {
    policy: &'a SearchPolicy,
    nodes: Vec<CertNode>,
}

impl Searcher<'_> {
    fn oracle_leaf(&mut self, scheme: &Scheme) -> Result<Option<u64>, SearchError> {
        if scheme.surplus() < 0 {
            return Ok(None);
        }
        match verify_empty(scheme, &self.policy.oracle)? {
            Verdict::Verified {
                prime,
                seed,
                rank,
                cols,
            } => {
                let idx = self.nodes.len() as u64;
                self.nodes.push(CertNode::OracleLeaf {
                    scheme: *scheme,
                    prime,
                    seed,
                    rank,
                    cols,
                });
                Ok(Some(idx))
            }
            Verdict::Inconclusive { .. } => Ok(None),
        }
    }

    fn solve_space(
        &mut self,
        b: &SpaceScheme,
        forced: &[SpecMove],
        depth: u32,
    ) -> Result<Option<u64>, SearchError> {
        if depth > self.policy.max_depth || b.surplus() < 0 {
            return Ok(None);
        }
        let scheme = Scheme::Space(*b);
        let at_leaf_degree = forced.is_empty() && b.d <= self.policy.leaf_degree;
        if at_leaf_degree {
            if let Some(idx) = self.oracle_leaf(&scheme)? {
                return Ok(Some(idx));
            }
        }
        let moves: Vec<SpecMove> = match forced.split_first() {
            Some((first, _)) => {
                if feasible(b, first) {
                    vec![*first]
                } else {
                    return Ok(None);
                }
            }
            None => enumerate_moves(b, self.policy.branching_cap),
        };
        let rest = if forced.is_empty() { forced } else { &forced[1..] };
        for mv in moves {
            let (trace, residual) = apply_move(b, &mv).expect("enumerated moves are feasible");
            let idx = self.nodes.len();
            self.nodes.push(CertNode::Specialize3 {
                mv,
                trace,
                obligation: 0,
                residual,
                next: 0,
            });
            let Some(obligation) = self.solve_trace(&trace, depth + 1)? else {
                self.nodes.truncate(idx);
                continue;
            };
            let Some(next) = self.solve_space(&residual, rest, depth + 1)? else {
                self.nodes.truncate(idx);
                continue;
            };
            if let CertNode::Specialize3 {
                obligation: o,
                next: n,
                ..
            } = &mut self.nodes[idx]
            {
                *o = obligation;
                *n = next;
            }
            return Ok(Some(idx as u64));
        }
        // No chain worked: fall back to a direct rank computation.
        if !at_leaf_degree && forced.is_empty() {
            return self.oracle_leaf(&scheme);
        }
        Ok(None)
    }

    fn solve_trace(&mut self, t: &TraceScheme, depth: u32) -> Result<Option<u64>, SearchError> {
        let to = strip_lines(t);
        let idx = self.nodes.len();
        self.nodes.push(CertNode::StripLines {
            from: *t,
            to,
            next: 0,
        });
        let Some(next) = self.solve_plane(&to, depth + 1)? else {
            self.nodes.truncate(idx);
            return Ok(None);
        };
        if let CertNode::StripLines { next: n, .. } = &mut self.nodes[idx] {
            *n = next;
        }
        Ok(Some(idx as u64))
    }

    fn solve_plane(&mut self, v: &PlaneScheme, depth: u32) -> Result<Option<u64>, SearchError> {
        if v.d < 0 {
            let idx = self.nodes.len() as u64;
            self.nodes.push(CertNode::AnalyticLeaf {
                reason: AnalyticReason::NegativeDegree,
            });
            return Ok(Some(idx));
        }
        if v.surplus() < 0 || depth > self.policy.max_depth {
            return Ok(None);
        }
        if let Some(idx) = self.oracle_leaf(&Scheme::Plane(*v))? {
            return Ok(Some(idx));
        }
        if !self.policy.plane_search {
            return Ok(None);
        }
        for mv in enumerate_plane_moves(v, self.policy.branching_cap) {
            let after = plane_step(v, &mv).expect("enumerated plane moves apply");
            let idx = self.nodes.len();
            self.nodes.push(CertNode::PlaneStep { mv, after, next: 0 });
            let Some(next) = self.solve_plane(&after, depth + 1)? else {
                self.nodes.truncate(idx);
                continue;
            };
            if let CertNode::PlaneStep { next: n, .. } = &mut self.nodes[idx] {
                *n = next;
            }
            return Ok(Some(idx as u64));
        }
        Ok(None)
    }

    fn solve(&mut self, scheme: &Scheme, depth: u32) -> Result<Option<u64>, SearchError> {
        match scheme {
            Scheme::Space(b) => {
                let forced = self.policy.forced.clone();
                self.solve_space(b, &forced, depth)
            }
            Scheme::Trace(t) => self.solve_trace(t, depth),
            Scheme::Plane(v) => self.solve_plane(v, depth),
        }
    }
}

/// Search for a full reduction of the claim and package it as a
/// certificate.  Fails up front if the claim is arithmetically hopeless
/// (negative surplus), and with [`SearchError::Exhausted`] if no tree is
/// found within the policy's bounds.
pub fn search_certificate(
    root: &Scheme,
    policy: &SearchPolicy,
) -> Result<Certificate, SearchError> {
    let surplus = root.surplus();
    if surplus < 0 {
        return Err(SearchError::NegativeSurplus {
            scheme: *root,
            surplus,
        });
    }
    let mut searcher = Searcher {
        policy,
        nodes: Vec::new(),
    };
    let found = searcher.solve(root, 0)?;
    let Some(idx) = found else {
        return Err(SearchError::Exhausted { scheme: *root });
    };
    debug_assert_eq!(idx, 0, "root node is first in preorder");
    Ok(Certificate {
        format_version: CERT_FORMAT_VERSION,
        config: CertConfig {
            prime: policy.oracle.prime,
            seed: policy.oracle.seed,
        },
        root: *root,
        nodes: searcher.nodes,
    })
}

/// Does the analytic base fact apply: only unconstrained points, at least
/// as many as the dimension of the space of curves?
pub fn known_base_fact_applies(v: &PlaneScheme) -> bool {
    v.d >= 0
        && v.double_points == 0
        && v.length2 == 0
        && v.substar.point_count() == 0
        && v.collinear == 0
        && v.points + v.marked >= Scheme::Plane(*v).dim_forms()
}

fn node_err(index: u64, problem: impl Into<String>) -> CertificateError {
    CertificateError::Node {
        index,
        problem: problem.into(),
    }
}

/// Re-check a certificate from scratch: walk the tree from node 0,
/// recompute every transition field for field, re-check the surplus
/// accounting, and replay every oracle leaf with its recorded prime and
/// seed.  Every node must be visited exactly once.
pub fn verify_certificate(cert: &Certificate) -> Result<(), CertificateError> {
    if cert.format_version != CERT_FORMAT_VERSION {
        return Err(CertificateError::Version(cert.format_version));
    }
    let len = cert.nodes.len() as u64;
    let mut visited = vec![false; cert.nodes.len()];
    let mut stack: Vec<(u64, Scheme)> = vec![(0, cert.root)];
    while let Some((index, expected)) = stack.pop() {
        if index >= len {
            return Err(CertificateError::IndexOutOfBounds { index, len });
        }
        if std::mem::replace(&mut visited[index as usize], true) {
            return Err(CertificateError::Revisited { index });
        }
        match &cert.nodes[index as usize] {
            CertNode::Specialize3 {
                mv,
                trace,
                obligation,
                residual,
                next,
            } => {
                let Scheme::Space(b) = expected else {
                    return Err(node_err(index, format!("expected {expected}, found a space move")));
                };
                if !feasible(&b, mv) {
                    return Err(node_err(index, format!("{mv} is not feasible on {b}")));
                }
                let (t, r) = apply_move(&b, mv).expect("feasible move applies");
                if t != *trace {
                    return Err(node_err(index, format!("trace mismatch: recomputed {t}, stored {trace}")));
                }
                if r != *residual {
                    return Err(node_err(
                        index,
                        format!("residual mismatch: recomputed {r}, stored {residual}"),
                    ));
                }
                // Conservation: the move splits the surplus between the
                // residual and the stripped trace.  (The strip identity
                // needs the stripped degree ≥ −2, where the dimension
                // formula is still polynomial.)
                if t.d as i64 - t.lines as i64 >= -2 {
                    let split = r.surplus() + strip_lines(&t).surplus();
                    if b.surplus() != split {
                        return Err(node_err(
                            index,
                            format!(
                                "surplus not conserved: {} against {split}",
                                b.surplus()
                            ),
                        ));
                    }
                }
                stack.push((*obligation, Scheme::Trace(t)));
                stack.push((*next, Scheme::Space(r)));
            }
            CertNode::StripLines { from, to, next } => {
                let Scheme::Trace(t) = expected else {
                    return Err(node_err(index, format!("expected {expected}, found a strip node")));
                };
                if t != *from {
                    return Err(node_err(index, format!("strip source mismatch: {t} against {from}")));
                }
                let stripped = strip_lines(&t);
                if stripped != *to {
                    return Err(node_err(
                        index,
                        format!("strip result mismatch: recomputed {stripped}, stored {to}"),
                    ));
                }
                stack.push((*next, Scheme::Plane(stripped)));
            }
            CertNode::PlaneStep { mv, after, next } => {
                let Scheme::Plane(v) = expected else {
                    return Err(node_err(index, format!("expected {expected}, found a plane step")));
                };
                if !plane_feasible(&v, mv) {
                    return Err(node_err(index, format!("{mv} is not feasible on {v}")));
                }
                let a = plane_step(&v, mv).expect("feasible plane step applies");
                if a != *after {
                    return Err(node_err(
                        index,
                        format!("plane step mismatch: recomputed {a}, stored {after}"),
                    ));
                }
                // The line soaks up its length; anything beyond d + 1 is
                // surplus spent.
                let len = on_line_length(&v, mv).expect("feasible move has a line") as i64;
                if a.surplus() != v.surplus() - (len - (v.d + 1)) {
                    return Err(node_err(index, "plane surplus law violated".to_string()));
                }
                stack.push((*next, Scheme::Plane(a)));
            }
            CertNode::OracleLeaf {
                scheme,
                prime,
                seed,
                rank,
                cols,
            } => {
                if *scheme != expected {
                    return Err(node_err(
                        index,
                        format!("leaf scheme mismatch: walked to {expected}, stored {scheme}"),
                    ));
                }
                if scheme.degree() < 0 {
                    return Err(node_err(index, "oracle leaf at negative degree".to_string()));
                }
                if *cols != scheme.dim_forms() || rank != cols {
                    return Err(node_err(
                        index,
                        format!("leaf claims rank {rank} of {cols}, dimension is {}", scheme.dim_forms()),
                    ));
                }
                let matrix = condition_matrix(scheme, *prime, *seed)?;
                let replayed = matrix.rank();
                if replayed != *rank {
                    return Err(node_err(
                        index,
                        format!("replayed rank {replayed} does not match recorded {rank}"),
                    ));
                }
            }
            CertNode::AnalyticLeaf { reason } => match reason {
                AnalyticReason::NegativeDegree => {
                    if expected.degree() >= 0 {
                        return Err(node_err(
                            index,
                            format!("degree {} is not negative", expected.degree()),
                        ));
                    }
                }
                AnalyticReason::KnownBaseFact => {
                    let Scheme::Plane(v) = expected else {
                        return Err(node_err(index, "base fact applies to plane schemes only".to_string()));
                    };
                    if !known_base_fact_applies(&v) {
                        return Err(node_err(index, format!("base fact does not apply to {v}")));
                    }
                }
            },
        }
    }
    let unreachable = visited.iter().filter(|&&x| !x).count() as u64;
    if unreachable > 0 {
        return Err(CertificateError::Unreachable {
            count: unreachable,
            len,
        });
    }
    Ok(())
}
