//! Random realizations of scheme descriptors as concrete point/line
//! configurations over a prime field, and their condition matrices.
//!
//! Emptiness of a linear system is an open condition: if one realization
//! imposes independent conditions, the generic one does.  A full-rank
//! matrix over F_p therefore certifies the claim (it is the reduction of an
//! integral matrix whose rank can only drop mod p), while a rank-deficient
//! sample proves nothing and is retried — certificates are one-sided.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::PrimeField;
use super::matrix::{MatFp, MonomialBasis, PowTable};
use super::OracleError;
use crate::calculus3::{feasible, SpecMove};
use crate::model::{PlaneScheme, Scheme, SpaceScheme, SubStar, TraceScheme};

const SAMPLE_BUDGET: u32 = 64;

/// Deterministic point sampler with global deduplication: every scheme
/// point is distinct projectively, so coincidences cannot silently merge
/// conditions.
struct Sampler {
    field: PrimeField,
    rng: ChaCha8Rng,
    used4: HashSet<[u64; 4]>,
    used3: HashSet<[u64; 3]>,
}

impl Sampler {
    fn new(field: PrimeField, seed: u64) -> Self {
        Sampler {
            field,
            rng: ChaCha8Rng::seed_from_u64(seed),
            used4: HashSet::new(),
            used3: HashSet::new(),
        }
    }

    fn scalar(&mut self) -> u64 {
        self.rng.random_range(0..self.field.modulus())
    }

    fn nonzero_scalar(&mut self) -> u64 {
        self.rng.random_range(1..self.field.modulus())
    }

    /// A fresh point of 3-space, distinct from everything sampled so far.
    fn point4(&mut self) -> Result<[u64; 4], OracleError> {
        for _ in 0..SAMPLE_BUDGET {
            let p = [self.scalar(), self.scalar(), self.scalar(), self.scalar()];
            if p == [0; 4] {
                continue;
            }
            if self.try_register4(p) {
                return Ok(p);
            }
        }
        Err(OracleError::ResamplingExhausted)
    }

    /// A fresh point of the plane H = {x3 = 0}.
    fn point4_in_h(&mut self) -> Result<[u64; 4], OracleError> {
        for _ in 0..SAMPLE_BUDGET {
            let p = [self.scalar(), self.scalar(), self.scalar(), 0];
            if p == [0; 4] {
                continue;
            }
            if self.try_register4(p) {
                return Ok(p);
            }
        }
        Err(OracleError::ResamplingExhausted)
    }

    fn point3(&mut self) -> Result<[u64; 3], OracleError> {
        for _ in 0..SAMPLE_BUDGET {
            let p = [self.scalar(), self.scalar(), self.scalar()];
            if p == [0; 3] {
                continue;
            }
            if self.try_register3(p) {
                return Ok(p);
            }
        }
        Err(OracleError::ResamplingExhausted)
    }

    /// A direction vector; directions are not scheme points and need no
    /// deduplication.
    fn dir4(&mut self) -> [u64; 4] {
        loop {
            let v = [self.scalar(), self.scalar(), self.scalar(), self.scalar()];
            if v != [0; 4] {
                return v;
            }
        }
    }

    /// A direction transverse to H (nonzero x3 component).
    fn dir4_off_h(&mut self) -> [u64; 4] {
        [
            self.scalar(),
            self.scalar(),
            self.scalar(),
            self.nonzero_scalar(),
        ]
    }

    fn dir3(&mut self) -> [u64; 3] {
        loop {
            let v = [self.scalar(), self.scalar(), self.scalar()];
            if v != [0; 3] {
                return v;
            }
        }
    }

    /// Register a derived point (an intersection, a piercing point); fails
    /// if it collides with an existing one, which marks the whole sample as
    /// degenerate.
    fn register4(&mut self, p: [u64; 4]) -> Result<[u64; 4], OracleError> {
        if p == [0; 4] || !self.try_register4(p) {
            return Err(OracleError::ResamplingExhausted);
        }
        Ok(p)
    }

    fn register3(&mut self, p: [u64; 3]) -> Result<[u64; 3], OracleError> {
        if p == [0; 3] || !self.try_register3(p) {
            return Err(OracleError::ResamplingExhausted);
        }
        Ok(p)
    }

    fn try_register4(&mut self, p: [u64; 4]) -> bool {
        let key = normalize(self.field, p);
        self.used4.insert(key)
    }

    fn try_register3(&mut self, p: [u64; 3]) -> bool {
        let p4 = [p[0], p[1], p[2], 0];
        let k = normalize(self.field, p4);
        self.used3.insert([k[0], k[1], k[2]])
    }
}

/// Scale so the first nonzero coordinate becomes 1: a canonical
/// representative of the projective point.
fn normalize(f: PrimeField, p: [u64; 4]) -> [u64; 4] {
    let Some(i) = p.iter().position(|&x| x != 0) else {
        return p;
    };
    let inv = f.inv(p[i]);
    [
        f.mul(p[0], inv),
        f.mul(p[1], inv),
        f.mul(p[2], inv),
        f.mul(p[3], inv),
    ]
}

fn cross3(f: PrimeField, a: [u64; 3], b: [u64; 3]) -> [u64; 3] {
    [
        f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
        f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
        f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
    ]
}

/// a + t*b, coordinatewise.
fn comb4(f: PrimeField, a: [u64; 4], b: [u64; 4], t: u64) -> [u64; 4] {
    let mut out = [0u64; 4];
    for i in 0..4 {
        out[i] = f.add(a[i], f.mul(t, b[i]));
    }
    out
}

fn comb3(f: PrimeField, a: [u64; 3], b: [u64; 3], t: u64) -> [u64; 3] {
    let mut out = [0u64; 3];
    for i in 0..3 {
        out[i] = f.add(a[i], f.mul(t, b[i]));
    }
    out
}

fn embed(p: [u64; 3]) -> [u64; 4] {
    [p[0], p[1], p[2], 0]
}

fn drop_h(p: [u64; 4]) -> [u64; 3] {
    debug_assert_eq!(p[3], 0, "point not on H");
    [p[0], p[1], p[2]]
}

/// Two independent points spanning the plane line with normal `n`.
fn complement_basis(f: PrimeField, n: [u64; 3]) -> ([u64; 3], [u64; 3]) {
    if n[0] != 0 {
        ([f.neg(n[1]), n[0], 0], [f.neg(n[2]), 0, n[0]])
    } else if n[1] != 0 {
        ([1, 0, 0], [0, f.neg(n[2]), n[1]])
    } else {
        ([1, 0, 0], [0, 1, 0])
    }
}

/// A realized element of a 3-space configuration.
enum El3 {
    Point([u64; 4]),
    Deriv { at: [u64; 4], dir: [u64; 4] },
    Line([u64; 4], [u64; 4]),
    Cross { v: [u64; 4], u1: [u64; 4], u2: [u64; 4] },
    Sundial { v: [u64; 4], u1: [u64; 4], u2: [u64; 4], w: [u64; 4] },
}

/// A realized element of a plane configuration.
enum El2 {
    Point([u64; 3]),
    Line([u64; 3], [u64; 3]),
    DoublePoint([u64; 3]),
    Length2 { at: [u64; 3], dir: [u64; 3] },
}

/// d+1 evaluation rows along the line through `p` and `q`: the points
/// p + t*q for t = 0..d-1, plus q itself.
fn line_rows4(m: &mut MatFp, basis: &MonomialBasis, f: PrimeField, p: [u64; 4], q: [u64; 4], d: u64) {
    m.push_eval_row(basis, &PowTable::new(f, &q, d));
    for t in 0..d {
        m.push_eval_row(basis, &PowTable::new(f, &comb4(f, p, q, t), d));
    }
}

fn line_rows3(m: &mut MatFp, basis: &MonomialBasis, f: PrimeField, p: [u64; 3], q: [u64; 3], d: u64) {
    m.push_eval_row(basis, &PowTable::new(f, &q, d));
    for t in 0..d {
        m.push_eval_row(basis, &PowTable::new(f, &comb3(f, p, q, t), d));
    }
}

fn space_matrix(els: &[El3], f: PrimeField, d: u64) -> MatFp {
    let basis = MonomialBasis::space(d);
    let mut m = MatFp::new(f, basis.len());
    for el in els {
        match *el {
            El3::Point(p) => m.push_eval_row(&basis, &PowTable::new(f, &p, d)),
            El3::Deriv { at, dir } => m.push_deriv_row(&basis, &PowTable::new(f, &at, d), &dir),
            El3::Line(p, q) => line_rows4(&mut m, &basis, f, p, q, d),
            El3::Cross { v, u1, u2 } => {
                line_rows4(&mut m, &basis, f, v, u1, d);
                line_rows4(&mut m, &basis, f, v, u2, d);
            }
            El3::Sundial { v, u1, u2, w } => {
                line_rows4(&mut m, &basis, f, v, u1, d);
                line_rows4(&mut m, &basis, f, v, u2, d);
                m.push_deriv_row(&basis, &PowTable::new(f, &v, d), &w);
            }
        }
    }
    m
}

fn plane_matrix(els: &[El2], f: PrimeField, d: u64) -> MatFp {
    let basis = MonomialBasis::plane(d);
    let mut m = MatFp::new(f, basis.len());
    for el in els {
        match *el {
            El2::Point(p) => m.push_eval_row(&basis, &PowTable::new(f, &p, d)),
            El2::Line(p, q) => line_rows3(&mut m, &basis, f, p, q, d),
            El2::DoublePoint(p) => {
                // Value plus all three partials: rank 3 in characteristic
                // above the degree (Euler), and still sound at degree 0.
                let pows = PowTable::new(f, &p, d);
                m.push_eval_row(&basis, &pows);
                for i in 0..3 {
                    let mut dir = [0u64; 3];
                    dir[i] = 1;
                    m.push_deriv_row(&basis, &pows, &dir);
                }
            }
            El2::Length2 { at, dir } => {
                let pows = PowTable::new(f, &at, d);
                m.push_eval_row(&basis, &pows);
                m.push_deriv_row(&basis, &pows, &dir);
            }
        }
    }
    m
}

/// The points of a sub-star: `a` random plane lines (as normals), all
/// pairwise intersections except those of the first `b` disjoint pairs.
fn substar_points3(smp: &mut Sampler, star: SubStar) -> Result<Vec<[u64; 3]>, OracleError> {
    let f = smp.field;
    let a = star.a() as usize;
    let b = star.b() as usize;
    let normals: Vec<[u64; 3]> = (0..a)
        .map(|_| smp.point3())
        .collect::<Result<_, _>>()?;
    let mut pts = Vec::new();
    for i in 0..a {
        for j in (i + 1)..a {
            let omitted = j == i + 1 && i % 2 == 0 && i / 2 < b;
            if omitted {
                continue;
            }
            pts.push(smp.register3(cross3(f, normals[i], normals[j]))?);
        }
    }
    Ok(pts)
}

/// Points on a fresh general line of 3-space (the carrier itself is not
/// part of the scheme).
fn collinear_points4(smp: &mut Sampler, count: u64) -> Result<Vec<[u64; 4]>, OracleError> {
    let f = smp.field;
    let a = smp.point4()?;
    let q = smp.point4()?;
    let mut pts = Vec::new();
    'next: for _ in 0..count {
        for _ in 0..SAMPLE_BUDGET {
            let p = comb4(f, a, q, smp.scalar());
            if smp.try_register4(p) {
                pts.push(p);
                continue 'next;
            }
        }
        return Err(OracleError::ResamplingExhausted);
    }
    Ok(pts)
}

fn collinear_points3(smp: &mut Sampler, count: u64) -> Result<Vec<[u64; 3]>, OracleError> {
    let f = smp.field;
    let a = smp.point3()?;
    let q = smp.point3()?;
    let mut pts = Vec::new();
    'next: for _ in 0..count {
        for _ in 0..SAMPLE_BUDGET {
            let p = comb3(f, a, q, smp.scalar());
            if smp.try_register3(p) {
                pts.push(p);
                continue 'next;
            }
        }
        return Err(OracleError::ResamplingExhausted);
    }
    Ok(pts)
}

fn realize_space(b: &SpaceScheme, smp: &mut Sampler) -> Result<Vec<El3>, OracleError> {
    let mut els = Vec::new();
    for _ in 0..b.lines {
        els.push(El3::Line(smp.point4()?, smp.point4()?));
    }
    for _ in 0..b.crosses {
        els.push(El3::Cross {
            v: smp.point4()?,
            u1: smp.point4()?,
            u2: smp.point4()?,
        });
    }
    for p in substar_points3(smp, b.substar)? {
        els.push(El3::Point(embed(p)));
    }
    if b.collinear > 0 {
        for p in collinear_points4(smp, b.collinear)? {
            els.push(El3::Point(p));
        }
    }
    Ok(els)
}

/// The zero-dimensional tail shared by trace and plane configurations.
fn plane_tail(
    smp: &mut Sampler,
    double_points: u64,
    length2: u64,
    star: SubStar,
    points: u64,
    collinear: u64,
    marked: u64,
) -> Result<Vec<El2>, OracleError> {
    let mut els = Vec::new();
    for _ in 0..double_points {
        els.push(El2::DoublePoint(smp.point3()?));
    }
    for _ in 0..length2 {
        els.push(El2::Length2 {
            at: smp.point3()?,
            dir: smp.dir3(),
        });
    }
    for p in substar_points3(smp, star)? {
        els.push(El2::Point(p));
    }
    for _ in 0..(points + marked) {
        els.push(El2::Point(smp.point3()?));
    }
    if collinear > 0 {
        for p in collinear_points3(smp, collinear)? {
            els.push(El2::Point(p));
        }
    }
    Ok(els)
}

fn realize_trace(t: &TraceScheme, smp: &mut Sampler) -> Result<Vec<El2>, OracleError> {
    let mut els = Vec::new();
    for _ in 0..t.lines {
        els.push(El2::Line(smp.point3()?, smp.point3()?));
    }
    els.extend(plane_tail(
        smp,
        t.double_points,
        t.length2,
        t.substar,
        t.points,
        t.collinear,
        0,
    )?);
    Ok(els)
}

fn realize_plane(v: &PlaneScheme, smp: &mut Sampler) -> Result<Vec<El2>, OracleError> {
    plane_tail(
        smp,
        v.double_points,
        v.length2,
        v.substar,
        v.points,
        v.collinear,
        v.marked,
    )
}

/// Build the condition matrix of a random realization of the scheme.  The
/// degree must be nonnegative (negative degrees have no forms to begin
/// with) and the field must have more elements than the degree so that
/// derivative rows behave.
pub fn condition_matrix(scheme: &Scheme, prime: u64, seed: u64) -> Result<MatFp, OracleError> {
    let field = PrimeField::new(prime).ok_or(OracleError::NotPrime(prime))?;
    let d = scheme.degree();
    assert!(d >= 0, "negative-degree schemes have no condition matrix");
    let d = d as u64;
    if prime <= d {
        return Err(OracleError::PrimeTooSmall { prime, degree: d });
    }
    let mut smp = Sampler::new(field, seed);
    Ok(match scheme {
        Scheme::Space(b) => space_matrix(&realize_space(b, &mut smp)?, field, d),
        Scheme::Trace(t) => plane_matrix(&realize_trace(t, &mut smp)?, field, d),
        Scheme::Plane(v) => plane_matrix(&realize_plane(v, &mut smp)?, field, d),
    })
}

/// Measured ranks of the building blocks at one degree, against which the
/// virtual condition counts are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calibration {
    pub line: u64,
    pub cross: u64,
    pub sundial: u64,
    pub two_skew: u64,
    pub double_point: u64,
    pub length2: u64,
}

/// Realize each building block in isolation and measure its rank.
pub fn calibrate(d: u64, prime: u64, seed: u64) -> Result<Calibration, OracleError> {
    let field = PrimeField::new(prime).ok_or(OracleError::NotPrime(prime))?;
    if prime <= d {
        return Err(OracleError::PrimeTooSmall { prime, degree: d });
    }
    let mut smp = Sampler::new(field, seed);
    let line = space_matrix(
        &[El3::Line(smp.point4()?, smp.point4()?)],
        field,
        d,
    )
    .rank();
    let cross = space_matrix(
        &[El3::Cross {
            v: smp.point4()?,
            u1: smp.point4()?,
            u2: smp.point4()?,
        }],
        field,
        d,
    )
    .rank();
    let sundial = space_matrix(
        &[El3::Sundial {
            v: smp.point4()?,
            u1: smp.point4()?,
            u2: smp.point4()?,
            w: smp.dir4(),
        }],
        field,
        d,
    )
    .rank();
    let two_skew = space_matrix(
        &[
            El3::Line(smp.point4()?, smp.point4()?),
            El3::Line(smp.point4()?, smp.point4()?),
        ],
        field,
        d,
    )
    .rank();
    let double_point = plane_matrix(&[El2::DoublePoint(smp.point3()?)], field, d).rank();
    let length2 = plane_matrix(
        &[El2::Length2 {
            at: smp.point3()?,
            dir: smp.dir3(),
        }],
        field,
        d,
    )
    .rank();
    Ok(Calibration {
        line,
        cross,
        sundial,
        two_skew,
        double_point,
        length2,
    })
}

/// The three condition matrices of one realized specialization, sharing
/// geometry: the specialized scheme at degree d, its residual at d − 1 and
/// its trace in H at degree d.
pub struct SpecializedTriple {
    pub whole: MatFp,
    pub residual: MatFp,
    pub trace: MatFp,
}

/// Realize the degeneration of `b` along the feasible move `m` with shared
/// geometry, so that the rank inequality
/// `rank(whole) >= rank(residual) + rank(trace)` is meaningful.
///
/// The flat limit of the lines moving into H keeps an embedded point at
/// each new pairwise intersection (transverse direction), which is exactly
/// what feeds the residual its sub-star points; intersections that existed
/// before the move — the vertices of fully specialized crosses — stay
/// reduced and are the omitted points.
pub fn realize_specialized(
    b: &SpaceScheme,
    m: &SpecMove,
    prime: u64,
    seed: u64,
) -> Result<SpecializedTriple, OracleError> {
    assert!(feasible(b, m), "move must be feasible");
    let field = PrimeField::new(prime).ok_or(OracleError::NotPrime(prime))?;
    let d = b.d;
    if prime <= d {
        return Err(OracleError::PrimeTooSmall { prime, degree: d });
    }
    let f = field;
    let mut smp = Sampler::new(field, seed);
    let mut whole: Vec<El3> = Vec::new();
    let mut residual: Vec<El3> = Vec::new();
    let mut trace: Vec<El2> = Vec::new();

    // The lines of H created by the move: cross pairs first, then plainly
    // moved lines, then the half-cross lines.
    let mm = m.plane_lines() as usize;
    let n_cross_pairs = m.crosses as usize;
    let normals: Vec<[u64; 3]> = (0..mm)
        .map(|_| smp.point3())
        .collect::<Result<_, _>>()?;
    for n in &normals {
        let (p, q) = complement_basis(f, *n);
        whole.push(El3::Line(embed(p), embed(q)));
        trace.push(El2::Line(p, q));
    }
    // Pairwise intersections: embedded transverse points in the limit,
    // hence simple residual points — except at the pre-existing cross
    // vertices, which are registered for distinctness but carry no rows.
    for i in 0..mm {
        for j in (i + 1)..mm {
            let x = smp.register4(embed(cross3(f, normals[i], normals[j])))?;
            let cross_vertex = j == i + 1 && i % 2 == 0 && i / 2 < n_cross_pairs;
            if cross_vertex {
                continue;
            }
            whole.push(El3::Deriv {
                at: x,
                dir: smp.dir4_off_h(),
            });
            residual.push(El3::Point(x));
        }
    }
    // Sundials: vertex on H; the embedded direction sticks out of the
    // plane of the two lines, leaving a full double point in the trace and
    // a cross in the residual.
    for _ in 0..m.sundials {
        let v = smp.point4_in_h()?;
        let (u1, u2) = (smp.point4()?, smp.point4()?);
        let w = smp.dir4();
        whole.push(El3::Sundial { v, u1, u2, w });
        residual.push(El3::Cross { v, u1, u2 });
        trace.push(El2::DoublePoint(drop_h(v)));
    }
    // Half-crosses: the H-line is already among the normals; its partner
    // passes through a fresh point of that line.
    for t in 0..m.half_crosses as usize {
        let n = normals[2 * n_cross_pairs + m.lines as usize + t];
        let (p, q) = complement_basis(f, n);
        let mut vertex = None;
        for _ in 0..SAMPLE_BUDGET {
            let cand = embed(comb3(f, p, q, smp.scalar()));
            if smp.try_register4(cand) {
                vertex = Some(cand);
                break;
            }
        }
        let v = vertex.ok_or(OracleError::ResamplingExhausted)?;
        let u = smp.point4()?;
        whole.push(El3::Line(v, u));
        residual.push(El3::Line(v, u));
    }
    // Untouched crosses ride along with their vertex specialized onto H:
    // the trace sees the vertex plus the direction H cuts on the plane of
    // the cross.
    for _ in 0..(b.crosses - m.crosses - m.half_crosses) {
        let v = smp.point4_in_h()?;
        let (u1, u2) = (smp.point4()?, smp.point4()?);
        whole.push(El3::Cross { v, u1, u2 });
        residual.push(El3::Cross { v, u1, u2 });
        // u2[3]*u1 - u1[3]*u2 has vanishing x3: the tangent of the trace.
        let mut tangent = [0u64; 4];
        for i in 0..4 {
            tangent[i] = f.sub(f.mul(u2[3], u1[i]), f.mul(u1[3], u2[i]));
        }
        if tangent == [0; 4] {
            return Err(OracleError::ResamplingExhausted);
        }
        trace.push(El2::Length2 {
            at: drop_h(v),
            dir: drop_h(tangent),
        });
    }
    // Untouched lines pierce H in one point each.
    for _ in 0..(b.lines - m.lines - 2 * m.sundials) {
        let (a, q) = (smp.point4()?, smp.point4()?);
        whole.push(El3::Line(a, q));
        residual.push(El3::Line(a, q));
        let mut piercing = [0u64; 4];
        for i in 0..4 {
            piercing[i] = f.sub(f.mul(q[3], a[i]), f.mul(a[3], q[i]));
        }
        let piercing = smp.register4(piercing)?;
        trace.push(El2::Point(drop_h(piercing)));
    }
    // The pre-existing sub-star lives in H and moves to the trace whole.
    for p in substar_points3(&mut smp, b.substar)? {
        whole.push(El3::Point(embed(p)));
        trace.push(El2::Point(p));
    }
    // Collinear points: pushed onto a line of H by a starred move (trace),
    // untouched on a general carrier otherwise (residual).
    if b.collinear > 0 {
        if m.star {
            let n = smp.point3()?;
            let (p, q) = complement_basis(f, n);
            'next: for _ in 0..b.collinear {
                for _ in 0..SAMPLE_BUDGET {
                    let cand = comb3(f, p, q, smp.scalar());
                    if smp.try_register3(cand) {
                        whole.push(El3::Point(embed(cand)));
                        trace.push(El2::Point(cand));
                        continue 'next;
                    }
                }
                return Err(OracleError::ResamplingExhausted);
            }
        } else {
            for p in collinear_points4(&mut smp, b.collinear)? {
                whole.push(El3::Point(p));
                residual.push(El3::Point(p));
            }
        }
    }

    Ok(SpecializedTriple {
        whole: space_matrix(&whole, field, d),
        residual: space_matrix(&residual, field, d - 1),
        trace: plane_matrix(&trace, field, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dim_forms_plane, dim_forms_space, main_theorem_scheme};

    const P: u64 = 2_147_483_647;

    #[test]
    fn base_configuration_matrix_shape() {
        let b = SpaceScheme::new(9, 14, 4, (4, 2), 0).unwrap();
        let m = condition_matrix(&Scheme::Space(b), P, 0).unwrap();
        // 14 lines x 10 rows + 4 crosses x 20 rows + 4 sub-star points.
        assert_eq!(m.rows(), 224);
        assert_eq!(m.cols(), 220);
        assert_eq!(m.rank(), 220);
    }

    #[test]
    fn small_critical_schemes_have_full_rank() {
        for d in [1u64, 2, 3, 4] {
            let s = Scheme::Space(main_theorem_scheme(d));
            let m = condition_matrix(&s, P, 7).unwrap();
            assert_eq!(m.rank(), dim_forms_space(d as i64), "d={d}");
        }
    }

    #[test]
    fn deficient_scheme_has_deficient_rank() {
        // Two lines cannot cut down all cubics.
        let b = SpaceScheme::new(3, 2, 0, (0, 0), 0).unwrap();
        let m = condition_matrix(&Scheme::Space(b), P, 1).unwrap();
        assert_eq!(m.rank(), 8);
        assert!(m.rank() < m.cols() as u64);
    }

    #[test]
    fn plane_scheme_fifteen_points() {
        let v = PlaneScheme {
            d: 4,
            double_points: 0,
            length2: 0,
            substar: SubStar::new(3, 1).unwrap(),
            points: 13,
            collinear: 0,
            marked: 0,
        };
        let m = condition_matrix(&Scheme::Plane(v), P, 3).unwrap();
        assert_eq!(m.cols() as u64, dim_forms_plane(4));
        assert_eq!(m.rank(), 15);
    }

    #[test]
    fn collinear_points_saturate_at_degree_plus_one() {
        // 7 points on a line impose only d+1 = 5 conditions at degree 4.
        let v = PlaneScheme {
            d: 4,
            double_points: 0,
            length2: 0,
            substar: SubStar::new(0, 0).unwrap(),
            points: 0,
            collinear: 7,
            marked: 0,
        };
        let m = condition_matrix(&Scheme::Plane(v), P, 5).unwrap();
        assert_eq!(m.rank(), 5);
    }

    #[test]
    fn calibration_small_degrees() {
        for d in 1..=6u64 {
            let c = calibrate(d, P, d).unwrap();
            assert_eq!(c.line, d + 1);
            assert_eq!(c.cross, 2 * d + 1);
            assert_eq!(c.sundial, 2 * d + 2);
            assert_eq!(c.two_skew, c.sundial);
            assert_eq!(c.double_point, 3);
            assert_eq!(c.length2, 2);
        }
    }

    #[test]
    fn specialized_triple_respects_rank_inequality() {
        let b = SpaceScheme::new(9, 14, 4, (4, 2), 0).unwrap();
        let m = SpecMove::new(3, 0, 1, 0);
        let t = realize_specialized(&b, &m, P, 11).unwrap();
        assert_eq!(t.whole.cols() as u64, dim_forms_space(9));
        assert_eq!(t.residual.cols() as u64, dim_forms_space(8));
        assert_eq!(t.trace.cols() as u64, dim_forms_plane(9));
        assert!(t.whole.rank() >= t.residual.rank() + t.trace.rank());
    }

    #[test]
    fn specialized_starred_move_keeps_collinear_in_trace() {
        let b = main_theorem_scheme(5); // 9 lines + 2 collinear points
        let mv = SpecMove::starred(2, 1, 0, 0);
        let t = realize_specialized(&b, &mv, P, 2).unwrap();
        // Trace: 2 lines x 6 rows + 1 double point x 4 rows + 5 piercing
        // points + 2 collinear points.
        assert_eq!(t.trace.rows(), 12 + 4 + 5 + 2);
        assert!(t.whole.rank() >= t.residual.rank() + t.trace.rank());
    }

    #[test]
    fn sampler_never_repeats_projective_points() {
        let f = PrimeField::new(101).unwrap();
        let mut smp = Sampler::new(f, 0);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..50 {
            let p = normalize(f, smp.point4().unwrap());
            assert!(seen.insert(p));
        }
    }
}
