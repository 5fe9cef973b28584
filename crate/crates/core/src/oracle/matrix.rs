//! Dense condition matrices over a prime field and their exact rank.
//!
//! Columns are indexed by the monomials of a fixed degree; rows are linear
//! conditions on the coefficient vector of a form: evaluation at a point,
//! or a directional derivative at a point.

use super::field::PrimeField;

/// The monomials of degree `d` in `nvars` variables (3 or 4), in a fixed
/// lexicographic order on exponent vectors.
pub struct MonomialBasis {
    nvars: usize,
    exps: Vec<[u16; 4]>,
}

impl MonomialBasis {
    pub fn space(d: u64) -> Self {
        Self::build(4, d)
    }

    pub fn plane(d: u64) -> Self {
        Self::build(3, d)
    }

    fn build(nvars: usize, d: u64) -> Self {
        assert!(d <= u16::MAX as u64, "degree too large for a dense basis");
        let d = d as u16;
        let mut exps = Vec::new();
        let mut e = [0u16; 4];
        gen_exps(nvars, d, 0, &mut e, &mut exps);
        MonomialBasis { nvars, exps }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
}

fn gen_exps(nvars: usize, left: u16, i: usize, e: &mut [u16; 4], out: &mut Vec<[u16; 4]>) {
    if i == nvars - 1 {
        e[i] = left;
        out.push(*e);
        e[i] = 0;
        return;
    }
    for v in (0..=left).rev() {
        e[i] = v;
        gen_exps(nvars, left - v, i + 1, e, out);
    }
    e[i] = 0;
}

/// Powers of each coordinate of one point, up to the working degree.
pub struct PowTable {
    pows: [Vec<u64>; 4],
}

impl PowTable {
    pub fn new(field: PrimeField, point: &[u64], d: u64) -> Self {
        let mut pows: [Vec<u64>; 4] = Default::default();
        for (i, col) in pows.iter_mut().enumerate() {
            let x = point.get(i).copied().unwrap_or(0) % field.modulus();
            let mut v = Vec::with_capacity(d as usize + 1);
            let mut acc = 1u64;
            v.push(acc);
            for _ in 0..d {
                acc = field.mul(acc, x);
                v.push(acc);
            }
            *col = v;
        }
        PowTable { pows }
    }
}

/// A row-major matrix over F_p with incremental row construction.
pub struct MatFp {
    field: PrimeField,
    cols: usize,
    data: Vec<u64>,
}

impl MatFp {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        MatFp {
            field,
            cols,
            data: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
    }

    /// Row asserting the form vanishes at the point behind `pows`.
    pub fn push_eval_row(&mut self, basis: &MonomialBasis, pows: &PowTable) {
        debug_assert_eq!(basis.len(), self.cols);
        let f = self.field;
        for e in &basis.exps {
            let mut v = 1u64;
            for i in 0..basis.nvars {
                v = f.mul(v, pows.pows[i][e[i] as usize]);
            }
            self.data.push(v);
        }
    }

    /// Row asserting the directional derivative along `dir` vanishes at the
    /// point behind `pows`.
    pub fn push_deriv_row(&mut self, basis: &MonomialBasis, pows: &PowTable, dir: &[u64]) {
        debug_assert_eq!(basis.len(), self.cols);
        let f = self.field;
        for e in &basis.exps {
            let mut v = 0u64;
            for i in 0..basis.nvars {
                if e[i] == 0 {
                    continue;
                }
                let di = dir.get(i).copied().unwrap_or(0) % f.modulus();
                if di == 0 {
                    continue;
                }
                // d/dx_i of the monomial, evaluated: e_i * x_i^(e_i - 1) * rest.
                let mut t = f.mul(di, e[i] as u64 % f.modulus());
                for j in 0..basis.nvars {
                    let pw = if j == i { e[j] - 1 } else { e[j] };
                    t = f.mul(t, pows.pows[j][pw as usize]);
                }
                v = f.add(v, t);
            }
            self.data.push(v);
        }
    }

    /// Exact rank by Gaussian elimination on a scratch copy.
    pub fn rank(&self) -> u64 {
        let rows = self.rows();
        let cols = self.cols;
        if rows == 0 || cols == 0 {
            return 0;
        }
        let f = self.field;
        let mut a = self.data.clone();
        let mut r = 0usize;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
                continue;
            };
            if p != r {
                for j in c..cols {
                    a.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(a[r * cols + c]);
            for i in (r + 1)..rows {
                let x = a[i * cols + c];
                if x == 0 {
                    continue;
                }
                let factor = f.mul(x, inv);
                a[i * cols + c] = 0;
                for j in (c + 1)..cols {
                    let t = f.mul(factor, a[r * cols + j]);
                    a[i * cols + j] = f.sub(a[i * cols + j], t);
                }
            }
            r += 1;
            if r == rows {
                break;
            }
        }
        r as u64
    }
}
