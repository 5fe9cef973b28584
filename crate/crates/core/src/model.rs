//! Scheme descriptors and exact condition counting.
//!
//! Everything downstream manipulates three kinds of configuration:
//!
//! * [`SpaceScheme`] — a union of general lines, crosses (two lines meeting
//!   at a point) and optionally some collinear points in projective 3-space,
//!   plus the point set of a [`SubStar`] lying in a plane.
//! * [`TraceScheme`] — the part of a specialized configuration that lies
//!   inside the chosen plane: lines of the plane, double points, length-two
//!   subschemes, sub-star points, simple points.
//! * [`PlaneScheme`] — a trace after its lines have been removed; a pure
//!   zero-dimensional plane configuration at a lower degree.
//!
//! Each descriptor knows how many linear conditions it imposes, virtually, on
//! forms of its degree, and its `surplus` = conditions − dim.  A configuration
//! can only impose independent conditions that kill every form when the
//! surplus is non-negative; the whole calculus is surplus bookkeeping.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numstr;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    /// A sub-star omits one intersection point per disjoint pair of its
    /// lines, so it can omit at most ⌊a/2⌋ points.
    #[error("invalid sub-star ({a},{b}): need 2*{b} <= {a}")]
    InvalidSubStar { a: u64, b: u64 },
}

/// Exact binomial coefficient; panics on u64 overflow (far beyond any degree
/// this crate handles).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc holds C(n-k+i, i) before the update.
        acc = acc * u128::from(n - k + 1 + i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// Which projective space a scheme lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ambient {
    Space,
    Plane,
}

impl Ambient {
    /// Dimension of the space of forms of the given degree; zero for
    /// negative degrees, where only the zero form exists.
    pub fn dim_forms(self, d: i64) -> u64 {
        if d < 0 {
            return 0;
        }
        let d = d as u64;
        match self {
            Ambient::Space => binomial(d + 3, 3),
            Ambient::Plane => binomial(d + 2, 2),
        }
    }
}

pub fn dim_forms_space(d: i64) -> u64 {
    Ambient::Space.dim_forms(d)
}

pub fn dim_forms_plane(d: i64) -> u64 {
    Ambient::Plane.dim_forms(d)
}

/// Conditions a line imposes on degree-d forms (in either ambient space).
pub fn line_conditions(d: u64) -> u64 {
    d + 1
}

/// Conditions a cross — two lines meeting at a point — imposes: one shy of
/// two disjoint lines, because the rows at the shared point coincide.
pub fn cross_conditions(d: u64) -> u64 {
    2 * d + 1
}

/// Conditions a sundial imposes.  A sundial is the flat limit of two skew
/// lines coming together: a cross plus an embedded point at the vertex
/// remembering the direction the lines collapsed along.  The embedded point
/// restores the condition the cross lost.
pub fn sundial_conditions(d: u64) -> u64 {
    2 * d + 2
}

/// A double point in the plane kills the value and both first derivatives.
pub const DOUBLE_POINT_CONDITIONS: u64 = 3;

/// A length-two subscheme kills the value and one directional derivative.
pub const LENGTH_TWO_CONDITIONS: u64 = 2;

/// The points cut out by `a` general lines of a plane, minus `b` of the
/// pairwise intersection points.  The omitted points come from disjoint line
/// pairs, hence the invariant `2b <= a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubStar {
    a: u64,
    b: u64,
}

impl SubStar {
    pub fn new(a: u64, b: u64) -> Result<Self, ModelError> {
        if 2 * b > a {
            return Err(ModelError::InvalidSubStar { a, b });
        }
        Ok(SubStar { a, b })
    }

    /// Number of defining lines.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Number of omitted intersection points.
    pub fn b(&self) -> u64 {
        self.b
    }

    /// Number of actual points: all pairwise intersections minus the
    /// omitted ones.
    pub fn point_count(&self) -> u64 {
        binomial(self.a, 2) - self.b
    }

    pub fn is_empty(&self) -> bool {
        self.a <= 1
    }
}

impl fmt::Display for SubStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

#[derive(Serialize, Deserialize)]
struct SubStarWire {
    #[serde(with = "numstr::u64str")]
    a: u64,
    #[serde(with = "numstr::u64str")]
    b: u64,
}

impl Serialize for SubStar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SubStarWire {
            a: self.a,
            b: self.b,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubStar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = SubStarWire::deserialize(d)?;
        SubStar::new(w.a, w.b).map_err(D::Error::custom)
    }
}

/// Lines, crosses and collinear points in 3-space, plus the points of a
/// sub-star in a plane.  Conditions are counted against forms of degree `d`
/// in four variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceScheme {
    #[serde(with = "numstr::u64str")]
    pub d: u64,
    #[serde(with = "numstr::u64str")]
    pub lines: u64,
    #[serde(with = "numstr::u64str")]
    pub crosses: u64,
    pub substar: SubStar,
    #[serde(with = "numstr::u64str")]
    pub collinear: u64,
}

impl SpaceScheme {
    pub fn new(
        d: u64,
        lines: u64,
        crosses: u64,
        substar: (u64, u64),
        collinear: u64,
    ) -> Result<Self, ModelError> {
        Ok(SpaceScheme {
            d,
            lines,
            crosses,
            substar: SubStar::new(substar.0, substar.1)?,
            collinear,
        })
    }

    pub fn virtual_conditions(&self) -> u64 {
        self.lines * line_conditions(self.d)
            + self.crosses * cross_conditions(self.d)
            + self.substar.point_count()
            + self.collinear
    }

    pub fn surplus(&self) -> i64 {
        self.virtual_conditions() as i64 - dim_forms_space(self.d as i64) as i64
    }

    /// Total degree of the curve part: each line contributes 1, each cross 2.
    pub fn curve_degree(&self) -> u64 {
        self.lines + 2 * self.crosses
    }
}

impl fmt::Display for SpaceScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "space(d={}, lines={}, crosses={}, substar={}",
            self.d, self.lines, self.crosses, self.substar
        )?;
        if self.collinear > 0 {
            write!(f, ", collinear={}", self.collinear)?;
        }
        write!(f, ")")
    }
}

/// The part of a specialized configuration lying inside the plane: honest
/// lines of the plane plus a zero-dimensional tail.  Conditions are counted
/// against plane curves of degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceScheme {
    #[serde(with = "numstr::u64str")]
    pub d: u64,
    #[serde(with = "numstr::u64str")]
    pub lines: u64,
    #[serde(with = "numstr::u64str")]
    pub double_points: u64,
    #[serde(with = "numstr::u64str")]
    pub length2: u64,
    pub substar: SubStar,
    #[serde(with = "numstr::u64str")]
    pub points: u64,
    #[serde(with = "numstr::u64str")]
    pub collinear: u64,
}

impl TraceScheme {
    pub fn virtual_conditions(&self) -> u64 {
        self.lines * line_conditions(self.d)
            + DOUBLE_POINT_CONDITIONS * self.double_points
            + LENGTH_TWO_CONDITIONS * self.length2
            + self.substar.point_count()
            + self.points
            + self.collinear
    }

    pub fn surplus(&self) -> i64 {
        self.virtual_conditions() as i64 - dim_forms_plane(self.d as i64) as i64
    }
}

impl fmt::Display for TraceScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trace(d={}, lines={}, dbl={}, len2={}, substar={}, pts={}",
            self.d, self.lines, self.double_points, self.length2, self.substar, self.points
        )?;
        if self.collinear > 0 {
            write!(f, ", collinear={}", self.collinear)?;
        }
        write!(f, ")")
    }
}

/// A zero-dimensional plane configuration: what remains of a trace once its
/// lines are removed, one degree per line.  The degree is signed — removing
/// more lines than the degree allows is the trivially-empty case.  Marked
/// points are the reduced points left behind by double points whose line was
/// removed; a later step may pass a line through one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneScheme {
    #[serde(with = "numstr::i64str")]
    pub d: i64,
    #[serde(with = "numstr::u64str")]
    pub double_points: u64,
    #[serde(with = "numstr::u64str")]
    pub length2: u64,
    pub substar: SubStar,
    #[serde(with = "numstr::u64str")]
    pub points: u64,
    #[serde(with = "numstr::u64str")]
    pub collinear: u64,
    #[serde(with = "numstr::u64str")]
    pub marked: u64,
}

impl PlaneScheme {
    pub fn virtual_conditions(&self) -> u64 {
        DOUBLE_POINT_CONDITIONS * self.double_points
            + LENGTH_TWO_CONDITIONS * self.length2
            + self.substar.point_count()
            + self.points
            + self.collinear
            + self.marked
    }

    pub fn surplus(&self) -> i64 {
        self.virtual_conditions() as i64 - dim_forms_plane(self.d) as i64
    }
}

impl fmt::Display for PlaneScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "plane(d={}, dbl={}, len2={}, substar={}, pts={}",
            self.d, self.double_points, self.length2, self.substar, self.points
        )?;
        if self.collinear > 0 {
            write!(f, ", collinear={}", self.collinear)?;
        }
        if self.marked > 0 {
            write!(f, ", marked={}", self.marked)?;
        }
        write!(f, ")")
    }
}

/// Any of the three descriptor kinds, as stored in certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Space(SpaceScheme),
    Trace(TraceScheme),
    Plane(PlaneScheme),
}

impl Scheme {
    pub fn ambient(&self) -> Ambient {
        match self {
            Scheme::Space(_) => Ambient::Space,
            Scheme::Trace(_) | Scheme::Plane(_) => Ambient::Plane,
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Scheme::Space(s) => s.d as i64,
            Scheme::Trace(t) => t.d as i64,
            Scheme::Plane(v) => v.d,
        }
    }

    pub fn virtual_conditions(&self) -> u64 {
        match self {
            Scheme::Space(s) => s.virtual_conditions(),
            Scheme::Trace(t) => t.virtual_conditions(),
            Scheme::Plane(v) => v.virtual_conditions(),
        }
    }

    /// Dimension of the space of forms this scheme imposes conditions on.
    pub fn dim_forms(&self) -> u64 {
        self.ambient().dim_forms(self.degree())
    }

    pub fn surplus(&self) -> i64 {
        self.virtual_conditions() as i64 - self.dim_forms() as i64
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Space(s) => s.fmt(f),
            Scheme::Trace(t) => t.fmt(f),
            Scheme::Plane(v) => v.fmt(f),
        }
    }
}

/// The critical configuration of degree `d >= 1`: the unique number of
/// general lines (plus, when d ≡ 2 mod 3, a batch of collinear points) whose
/// virtual conditions exactly exhaust the forms of degree `d`.  Writing
/// d = 3k + e with e in {0,1,2}:
///
/// * lines     = k(3k + 5 + 2e)/2 + 1 + e
/// * collinear = k + 1 if e = 2, else 0
///
/// The product k(3k + 5 + 2e) is always even, so the division is exact.
pub fn main_theorem_scheme(d: u64) -> SpaceScheme {
    assert!(d >= 1, "degree must be positive");
    let (k, e) = (d / 3, d % 3);
    let lines = (3 * k + 5 + 2 * e) * k / 2 + 1 + e;
    let collinear = if e == 2 { k + 1 } else { 0 };
    SpaceScheme {
        d,
        lines,
        crosses: 0,
        substar: SubStar::new(0, 0).unwrap(),
        collinear,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent reference for the form-space dimensions, written as direct
    // falling-factorial products rather than through `binomial`.
    fn dim3_ref(d: u64) -> u64 {
        ((d + 3) * (d + 2) * (d + 1)) / 6
    }

    fn dim2_ref(d: u64) -> u64 {
        ((d + 2) * (d + 1)) / 2
    }

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(15, 3), 455);
        assert_eq!(binomial(4, 7), 0);
        assert_eq!(binomial(303, 3), 4_590_551);
    }

    #[test]
    fn dim_forms_matches_reference() {
        for d in 0..=400i64 {
            assert_eq!(dim_forms_space(d), dim3_ref(d as u64));
            assert_eq!(dim_forms_plane(d), dim2_ref(d as u64));
        }
        assert_eq!(dim_forms_space(-1), 0);
        assert_eq!(dim_forms_plane(-3), 0);
    }

    #[test]
    fn substar_validation() {
        assert!(SubStar::new(4, 2).is_ok());
        assert!(SubStar::new(5, 2).is_ok());
        assert_eq!(
            SubStar::new(3, 2),
            Err(ModelError::InvalidSubStar { a: 3, b: 2 })
        );
        assert_eq!(SubStar::new(4, 2).unwrap().point_count(), 4);
        assert_eq!(SubStar::new(0, 0).unwrap().point_count(), 0);
        assert_eq!(SubStar::new(2, 1).unwrap().point_count(), 0);
    }

    #[test]
    fn substar_rejects_bad_wire_value() {
        let bad: Result<SubStar, _> = serde_json::from_str(r#"{"a":"3","b":"2"}"#);
        assert!(bad.is_err());
        let good: SubStar = serde_json::from_str(r#"{"a":"4","b":"2"}"#).unwrap();
        assert_eq!(good, SubStar::new(4, 2).unwrap());
    }

    #[test]
    fn base_configuration_is_balanced() {
        // 14 lines, 4 crosses and a (4,2) sub-star at degree 9 exhaust the
        // 220-dimensional space of degree-9 forms exactly.
        let b = SpaceScheme::new(9, 14, 4, (4, 2), 0).unwrap();
        assert_eq!(b.virtual_conditions(), 220);
        assert_eq!(b.surplus(), 0);
        assert_eq!(b.curve_degree(), 22);
    }

    #[test]
    fn main_theorem_scheme_small_values() {
        let cases = [
            (1, 2, 0),
            (2, 3, 1),
            (3, 5, 0),
            (4, 7, 0),
            (5, 9, 2),
            (9, 22, 0),
            (12, 35, 0),
            (300, 15_251, 0),
        ];
        for (d, lines, collinear) in cases {
            let s = main_theorem_scheme(d);
            assert_eq!((s.lines, s.collinear), (lines, collinear), "d={d}");
            assert_eq!(s.crosses, 0);
            assert!(s.substar.is_empty());
        }
    }

    #[test]
    fn main_theorem_scheme_is_always_balanced() {
        for d in 1..=300 {
            let s = main_theorem_scheme(d);
            assert_eq!(
                s.virtual_conditions(),
                dim3_ref(d),
                "virtual conditions off at d={d}"
            );
            assert_eq!(s.surplus(), 0);
        }
    }

    #[test]
    fn plane_scheme_conditions() {
        // Stripped trace from the first degree-9 specialization.
        let v = PlaneScheme {
            d: 5,
            double_points: 0,
            length2: 3,
            substar: SubStar::new(4, 2).unwrap(),
            points: 11,
            collinear: 0,
            marked: 0,
        };
        assert_eq!(v.virtual_conditions(), 21);
        assert_eq!(v.surplus(), 0);

        let w = PlaneScheme {
            d: 9,
            double_points: 0,
            length2: 8,
            substar: SubStar::new(6, 3).unwrap(),
            points: 27,
            collinear: 0,
            marked: 0,
        };
        assert_eq!(w.surplus(), 0);
    }

    #[test]
    fn negative_degree_has_zero_forms() {
        let v = PlaneScheme {
            d: -1,
            double_points: 0,
            length2: 0,
            substar: SubStar::new(3, 1).unwrap(),
            points: 2,
            collinear: 0,
            marked: 0,
        };
        assert_eq!(Scheme::Plane(v).dim_forms(), 0);
        assert_eq!(v.surplus(), v.virtual_conditions() as i64);
    }

    #[test]
    fn scheme_display_is_compact() {
        let s = Scheme::Space(SpaceScheme::new(5, 9, 0, (0, 0), 2).unwrap());
        assert_eq!(
            s.to_string(),
            "space(d=5, lines=9, crosses=0, substar=(0,0), collinear=2)"
        );
        let t = TraceScheme {
            d: 9,
            lines: 4,
            double_points: 0,
            length2: 3,
            substar: SubStar::new(4, 2).unwrap(),
            points: 11,
            collinear: 0,
        };
        assert_eq!(
            t.to_string(),
            "trace(d=9, lines=4, dbl=0, len2=3, substar=(4,2), pts=11)"
        );
    }

    proptest! {
        #[test]
        fn dim_recursion_holds(d in 0i64..200) {
            // Forms of degree d in 4 variables split by divisibility by one
            // coordinate: dim3(d) = dim3(d-1) + dim2(d).
            prop_assert_eq!(
                dim_forms_space(d),
                dim_forms_space(d - 1) + dim_forms_plane(d)
            );
        }

        #[test]
        fn substar_point_count_bounds(a in 0u64..200, b in 0u64..100) {
            prop_assume!(2 * b <= a);
            let s = SubStar::new(a, b).unwrap();
            prop_assert!(s.point_count() <= binomial(a, 2));
            prop_assert_eq!(s.point_count() + b, binomial(a, 2));
        }

        #[test]
        fn scheme_json_round_trip(
            d in 0u64..40,
            lines in 0u64..40,
            crosses in 0u64..20,
            a in 0u64..20,
            b in 0u64..10,
            collinear in 0u64..10,
        ) {
            prop_assume!(2 * b <= a);
            let s = Scheme::Space(SpaceScheme::new(d, lines, crosses, (a, b), collinear).unwrap());
            let json = serde_json::to_string(&s).unwrap();
            let back: Scheme = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(s, back);
        }
    }
}
