//! The specialization calculus inside the plane.
//!
//! A trace claim with honest lines reduces to a zero-dimensional one by
//! peeling the lines off ([`strip_lines`]): each line absorbs a degree.  The
//! remaining configuration is then attacked line by line: a [`PlaneMove`]
//! picks a line (a sub-star line, a general one, or one through a marked
//! point) and specializes part of the inventory onto it until the line is
//! forced inside every curve — the restriction to the line must have length
//! at least d + 1.  Splitting the line off leaves the same kind of claim one
//! degree lower.
//!
//! Two pre-tuned descent families walk the stripped reduction traces down to
//! degree-4 base configurations, two levels at a time.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PlaneScheme, SubStar, TraceScheme};
use crate::numstr;

/// Remove the honest lines from a trace: the degree drops by one per line
/// while the zero-dimensional part carries over unchanged.
pub fn strip_lines(t: &TraceScheme) -> PlaneScheme {
    PlaneScheme {
        d: t.d as i64 - t.lines as i64,
        double_points: t.double_points,
        length2: t.length2,
        substar: t.substar,
        points: t.points,
        collinear: t.collinear,
        marked: 0,
    }
}

/// Which line a plane move specializes onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneTarget {
    /// A sub-star line whose intersection with its disjoint partner is one
    /// of the omitted points: it carries a − 2 sub-star points, and removing
    /// it consumes the omitted pair.
    SubStarLineWithOmitted,
    /// A sub-star line not involved in any omitted pair: it carries the full
    /// a − 1 intersection points.
    SubStarLineWithoutOmitted,
    /// A fresh general line of the plane.
    GeneralLine,
    /// A general line through one marked point left behind by an earlier
    /// double-point specialization.
    LineThroughMarkedPoint,
}

impl fmt::Display for PlaneTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaneTarget::SubStarLineWithOmitted => "sub-star line (omitted pair)",
            PlaneTarget::SubStarLineWithoutOmitted => "sub-star line (full)",
            PlaneTarget::GeneralLine => "general line",
            PlaneTarget::LineThroughMarkedPoint => "line through marked point",
        })
    }
}

/// One line-splitting step: the target line plus the double points,
/// length-2 subschemes and simple points specialized onto it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneMove {
    pub target: PlaneTarget,
    #[serde(with = "numstr::u64str")]
    pub double_points: u64,
    #[serde(with = "numstr::u64str")]
    pub length2: u64,
    #[serde(with = "numstr::u64str")]
    pub points: u64,
}

impl PlaneMove {
    pub fn new(target: PlaneTarget, double_points: u64, length2: u64, points: u64) -> Self {
        PlaneMove {
            target,
            double_points,
            length2,
            points,
        }
    }
}

impl fmt::Display for PlaneMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "split[{}; dbl={}, len2={}, pts={}]",
            self.target, self.double_points, self.length2, self.points
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaneError {
    #[error("move {mv} is not feasible on {scheme}")]
    Infeasible { scheme: PlaneScheme, mv: PlaneMove },
    #[error("plane step {index}: move {mv} is not feasible on {scheme}")]
    InfeasibleAt {
        index: usize,
        scheme: PlaneScheme,
        mv: PlaneMove,
    },
    #[error("the plane descent tables require odd k >= 3 (got k = {k})")]
    RoundRange { k: u64 },
}

/// Points the target line carries before anything is specialized onto it,
/// or `None` when the scheme has no such line.
fn target_points(v: &PlaneScheme, target: PlaneTarget) -> Option<u64> {
    let (a, b) = (v.substar.a(), v.substar.b());
    match target {
        // 2b of the a lines meet a disjoint partner in an omitted point.
        PlaneTarget::SubStarLineWithOmitted => (b >= 1).then(|| a - 2),
        PlaneTarget::SubStarLineWithoutOmitted => (a > 2 * b).then(|| a - 1),
        PlaneTarget::GeneralLine => Some(0),
        PlaneTarget::LineThroughMarkedPoint => (v.marked >= 1).then_some(1),
    }
}

/// Length of the restriction of the scheme to the target line after the
/// move: double points and length-2 subschemes cut length 2, points
/// length 1.  `None` when the target does not exist.
pub fn on_line_length(v: &PlaneScheme, m: &PlaneMove) -> Option<u64> {
    target_points(v, m.target)
        .map(|tp| tp + 2 * m.double_points + 2 * m.length2 + m.points)
}

/// A move is feasible when the inventory suffices and the line soaks up at
/// least d + 1 conditions, forcing it into every curve of degree d.
pub fn plane_feasible(v: &PlaneScheme, m: &PlaneMove) -> bool {
    v.d >= 0
        && v.double_points >= m.double_points
        && v.length2 >= m.length2
        && v.points >= m.points
        && on_line_length(v, m).is_some_and(|len| len >= (v.d as u64) + 1)
}

/// One applied plane move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneChainStep {
    pub before: PlaneScheme,
    pub mv: PlaneMove,
    pub after: PlaneScheme,
}

/// Split the target line off: the degree drops by one, specialized
/// inventory is consumed, and each specialized double point leaves a marked
/// reduced point behind.
pub fn plane_step(v: &PlaneScheme, m: &PlaneMove) -> Result<PlaneScheme, PlaneError> {
    if !plane_feasible(v, m) {
        return Err(PlaneError::Infeasible {
            scheme: *v,
            mv: *m,
        });
    }
    let (a, b) = (v.substar.a(), v.substar.b());
    let (substar, marked) = match m.target {
        PlaneTarget::SubStarLineWithOmitted => (SubStar::new(a - 1, b - 1), v.marked),
        PlaneTarget::SubStarLineWithoutOmitted => (SubStar::new(a - 1, b), v.marked),
        PlaneTarget::GeneralLine => (Ok(v.substar), v.marked),
        PlaneTarget::LineThroughMarkedPoint => (Ok(v.substar), v.marked - 1),
    };
    Ok(PlaneScheme {
        d: v.d - 1,
        double_points: v.double_points - m.double_points,
        length2: v.length2 - m.length2,
        substar: substar.expect("removing a sub-star line keeps the invariant"),
        points: v.points - m.points,
        collinear: v.collinear,
        marked: marked + m.double_points,
    })
}

/// Fold `plane_step` over a move list, reporting the first infeasible step.
pub fn run_plane_chain(
    start: &PlaneScheme,
    moves: &[PlaneMove],
) -> Result<Vec<PlaneChainStep>, PlaneError> {
    let mut steps = Vec::with_capacity(moves.len());
    let mut current = *start;
    for (index, mv) in moves.iter().enumerate() {
        let after = plane_step(&current, mv).map_err(|_| PlaneError::InfeasibleAt {
            index,
            scheme: current,
            mv: *mv,
        })?;
        steps.push(PlaneChainStep {
            before: current,
            mv: *mv,
            after,
        });
        current = after;
    }
    Ok(steps)
}

fn check_level(k: u64) -> Result<(), PlaneError> {
    if k < 3 || k % 2 == 0 {
        return Err(PlaneError::RoundRange { k });
    }
    Ok(())
}

/// Start of the first descent family at odd level k >= 3: the stripped
/// trace of the final reduction move one level up, a balanced scheme at
/// degree 2k − 1.
pub fn p2_first_start(k: u64) -> Result<PlaneScheme, PlaneError> {
    check_level(k)?;
    Ok(PlaneScheme {
        d: (2 * k - 1) as i64,
        double_points: 0,
        length2: k * (k - 1) / 2 - 2,
        substar: SubStar::new(k + 1, (k + 1) / 2).unwrap(),
        points: (k * k + 4 * k + 9) / 2,
        collinear: 0,
        marked: 0,
    })
}

/// The moves taking `p2_first_start(k)` to `p2_first_start(k - 2)`; at
/// k = 3 a single move reaches the base configuration of fifteen general
/// points at degree 4.
pub fn p2_first_round(k: u64) -> Result<Vec<PlaneMove>, PlaneError> {
    check_level(k)?;
    use PlaneTarget::*;
    Ok(if k == 3 {
        vec![PlaneMove::new(SubStarLineWithOmitted, 0, 1, 2)]
    } else {
        vec![
            PlaneMove::new(SubStarLineWithOmitted, 0, 0, k + 1),
            PlaneMove::new(SubStarLineWithoutOmitted, 0, 0, k),
            PlaneMove::new(GeneralLine, 0, k - 1, 0),
            PlaneMove::new(GeneralLine, 0, k - 2, 1),
        ]
    })
}

/// Start of the second descent family at odd level k >= 3: the stripped
/// trace entering the final reduction move, at degree 2k − 2.
pub fn p2_second_start(k: u64) -> Result<PlaneScheme, PlaneError> {
    check_level(k)?;
    Ok(PlaneScheme {
        d: (2 * k - 2) as i64,
        double_points: (k + 1) / 2,
        length2: k * (k - 3) / 2,
        substar: SubStar::new(k, (k - 1) / 2).unwrap(),
        points: k * (k + 3) / 2 - 2,
        collinear: 0,
        marked: 0,
    })
}

/// The moves taking `p2_second_start(k)` to `p2_second_start(k - 2)`.  At
/// k = 3 the start — two double points and nine general points at degree
/// 4 — is already a base configuration and the round is empty.
pub fn p2_second_round(k: u64) -> Result<Vec<PlaneMove>, PlaneError> {
    check_level(k)?;
    use PlaneTarget::*;
    Ok(if k == 3 {
        vec![]
    } else {
        vec![
            PlaneMove::new(GeneralLine, 1, k - 2, 1),
            PlaneMove::new(LineThroughMarkedPoint, 0, k - 3, 3),
            PlaneMove::new(SubStarLineWithoutOmitted, 0, 0, k - 2),
            PlaneMove::new(SubStarLineWithOmitted, 0, 0, k - 1),
        ]
    })
}

/// Concatenated rounds from level k down to the degree-4 base of the given
/// family (1 or 2).
pub fn p2_descent(family: u8, k: u64) -> Result<Vec<PlaneMove>, PlaneError> {
    check_level(k)?;
    let round = match family {
        1 => p2_first_round,
        2 => p2_second_round,
        _ => panic!("plane descent family must be 1 or 2"),
    };
    let mut moves = Vec::new();
    let mut level = k;
    loop {
        moves.extend(round(level)?);
        if level == 3 {
            return Ok(moves);
        }
        level -= 2;
    }
}
