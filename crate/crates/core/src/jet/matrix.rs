use crate::error::{Error, Result};
use crate::scalar::Coefficient;

use super::{Jet, MultiIndex};

/// Dense matrix of jets sharing one variable space.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix<C> {
    rows: usize,
    cols: usize,
    entries: Vec<Jet<C>>,
}

impl<C: Coefficient> JetMatrix<C> {
    pub fn new(rows: usize, cols: usize, entries: Vec<Jet<C>>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix from {} entries",
                entries.len()
            )));
        }
        let nv = entries[0].num_vars();
        if let Some(bad) = entries.iter().find(|e| e.num_vars() != nv) {
            return Err(Error::VarCountMismatch {
                left: nv,
                right: bad.num_vars(),
            });
        }
        Ok(JetMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet<C>) -> Self {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, entries).expect("consistent entries")
    }

    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<Jet<C>>,
    ) -> Result<Self> {
        let entries = (0..rows * cols)
            .map(|k| f(k / cols, k % cols))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize, num_vars: usize, trunc: u32) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Jet::one(num_vars, trunc)
            } else {
                Jet::zero(num_vars, trunc)
            }
        })
    }

    pub fn zeros(rows: usize, cols: usize, num_vars: usize, trunc: u32) -> Self {
        Self::from_fn(rows, cols, |_, _| Jet::zero(num_vars, trunc))
    }

    /// 1×1 matrix wrapping `f`.
    pub fn scalar(f: Jet<C>) -> Self {
        JetMatrix {
            rows: 1,
            cols: 1,
            entries: vec![f],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Jet<C> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Jet<C>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Jet<C>> {
        self.entries
    }

    pub fn num_vars(&self) -> usize {
        self.entries[0].num_vars()
    }

    pub fn trunc_degree(&self) -> u32 {
        self.entries.iter().map(|e| e.trunc_degree()).min().unwrap()
    }

    pub fn map(&self, f: impl FnMut(&Jet<C>) -> Jet<C>) -> Self {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl FnMut(&Jet<C>) -> Result<Jet<C>>) -> Result<Self> {
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn truncate(&self, trunc: u32) -> Self {
        self.map(|e| e.truncate(trunc))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn same_shape(&self, o: &Self, what: &str) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{what} of {}x{} and {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o, "sum")?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o, "difference")?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let nv = self.num_vars();
        let trunc = self.trunc_degree().min(o.trunc_degree());
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = Jet::zero(nv, trunc);
            for k in 0..self.cols {
                acc = &acc + &self.get(i, k).mul_truncated(o.get(k, j), trunc);
            }
            acc
        }))
    }

    pub fn scale(&self, f: &Jet<C>) -> Self {
        self.map(|e| e * f)
    }

    pub fn scale_coeff(&self, c: &C) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn trace(&self) -> Result<Jet<C>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("trace of a non-square matrix".into()));
        }
        let mut acc = Jet::zero(self.num_vars(), self.trunc_degree());
        for i in 0..self.rows {
            acc = &acc + self.get(i, i);
        }
        Ok(acc)
    }

    /// Constant terms, row-major.
    pub fn constant_matrix(&self) -> Vec<C> {
        self.entries.iter().map(|e| e.constant_term()).collect()
    }

    /// Exact (or `tol`-close) equality with the identity matrix.
    pub fn is_identity(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let nv = self.num_vars();
        (0..self.rows).all(|i| {
            (0..self.cols).all(|j| {
                let e = self.get(i, j);
                let target = if i == j {
                    Jet::one(nv, e.trunc_degree())
                } else {
                    Jet::zero(nv, e.trunc_degree())
                };
                e.approx_eq(&target, tol)
            })
        })
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.rows == o.rows
            && self.cols == o.cols
            && self.entries.iter().zip(&o.entries).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max)
    }

    /// Determinant. Cofactor expansion up to 3×3, pivoted elimination above.
    pub fn det(&self) -> Result<Jet<C>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        match n {
            1 => Ok(self.get(0, 0).clone()),
            2 => Ok(&(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0))),
            3 => {
                let m = |i, j| self.get(i, j);
                let t0 = &(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1));
                let t1 = &(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0));
                let t2 = &(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0));
                Ok(&(&(m(0, 0) * &t0) - &(m(0, 1) * &t1)) + &(m(0, 2) * &t2))
            }
            _ => self.det_by_elimination().or_else(|_| Ok(self.det_by_cofactors())),
        }
    }

    fn det_by_cofactors(&self) -> Jet<C> {
        let n = self.rows;
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut acc = Jet::zero(self.num_vars(), self.trunc_degree());
        for j in 0..n {
            let minor = Self::from_fn(n - 1, n - 1, |r, c| {
                self.get(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = self.get(0, j) * &minor.det_by_cofactors();
            acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    fn det_by_elimination(&self) -> Result<Jet<C>> {
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Jet::one(self.num_vars(), self.trunc_degree());
        for col in 0..n {
            let p = pick_pivot(&a, col).ok_or_else(|| Error::SingularMatrix {
                context: "determinant".into(),
            })?;
            if p != col {
                a.swap_rows(p, col);
                det = -&det;
            }
            let pivot = a.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.invert_unit()?;
            for r in col + 1..n {
                let factor = a.get(r, col) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let upd = a.get(r, c) - &(&factor * a.get(col, c));
                    *a.get_mut(r, c) = upd;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Inverse by Gauss–Jordan elimination on jets. `context` names the
    /// matrix in the error raised when its constant term is singular.
    pub fn inverse(&self, context: &str) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square `{context}`"
            )));
        }
        let n = self.rows;
        let nv = self.num_vars();
        let trunc = self.trunc_degree();
        let mut a = self.clone();
        let mut inv = Self::identity(n, nv, trunc);
        for col in 0..n {
            let p = pick_pivot(&a, col).ok_or_else(|| Error::SingularMatrix {
                context: context.to_string(),
            })?;
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pinv = a.get(col, col).invert_unit()?;
            for c in 0..n {
                let v = a.get(col, c) * &pinv;
                *a.get_mut(col, c) = v;
                let w = inv.get(col, c) * &pinv;
                *inv.get_mut(col, c) = w;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(r, c) - &(&factor * a.get(col, c));
                    *a.get_mut(r, c) = v;
                    let w = inv.get(r, c) - &(&factor * inv.get(col, c));
                    *inv.get_mut(r, c) = w;
                }
            }
        }
        Ok(inv)
    }

    pub fn compose(&self, args: &[Jet<C>]) -> Result<Self> {
        self.try_map(|e| e.compose(args))
    }

    pub fn relabel(&self, num_vars: usize, map: &[usize]) -> Self {
        self.map(|e| e.relabel(num_vars, map))
    }

    pub fn differentiate(&self, var: usize) -> Self {
        self.map(|e| e.differentiate(var))
    }

    /// Entry-wise conjugate transpose of the coefficient table combined with
    /// the block swap of [`Jet::hermitian_mirror`]. A matrix jet in `(x, x̄)`
    /// is Hermitian-valued exactly when it is fixed by this map.
    pub fn hermitian_mirror(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).hermitian_mirror())
    }

    pub fn to_float(&self) -> JetMatrix<num_complex::Complex64> {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.to_float()).collect(),
        }
    }

    /// Adds `c` to the constant term of every diagonal entry.
    pub fn shift_diagonal(&self, c: &C) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.get_mut(i, i).add_term(MultiIndex::zero(), c);
        }
        out
    }
}

fn pick_pivot<C: Coefficient>(a: &JetMatrix<C>, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in col..a.rows {
        let w = a.get(r, col).constant_term().pivot_weight();
        if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
            best = Some((r, w));
            if C::EXACT {
                break;
            }
        }
    }
    best.map(|(r, _)| r)
}

/// Inverse of a dense `n×n` coefficient matrix (row-major).
pub(crate) fn invert_scalar<C: Coefficient>(n: usize, m: &[C]) -> Option<Vec<C>> {
    let mut a = m.to_vec();
    let mut inv: Vec<C> = (0..n * n)
        .map(|k| if k / n == k % n { C::one() } else { C::zero() })
        .collect();
    for col in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for r in col..n {
            let w = a[r * n + col].pivot_weight();
            if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((r, w));
            }
        }
        let (p, _) = best?;
        for c in 0..n {
            a.swap(p * n + c, col * n + c);
            inv.swap(p * n + c, col * n + c);
        }
        let pinv = a[col * n + col].inv()?;
        for c in 0..n {
            a[col * n + c] *= &pinv;
            inv[col * n + c] *= &pinv;
        }
        for r in 0..n {
            if r == col || a[r * n + col].is_zero() {
                continue;
            }
            let f = a[r * n + col].clone();
            for c in 0..n {
                let t = f.mul_ref(&a[col * n + c]);
                a[r * n + c] -= &t;
                let t = f.mul_ref(&inv[col * n + c]);
                inv[r * n + c] -= &t;
            }
        }
    }
    Some(inv)
}

/// Determinant of a dense `n×n` coefficient matrix (row-major).
pub(crate) fn det_scalar<C: Coefficient>(n: usize, m: &[C]) -> C {
    let mut a = m.to_vec();
    let mut det = C::one();
    for col in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for r in col..n {
            let w = a[r * n + col].pivot_weight();
            if w > 0.0 && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((r, w));
            }
        }
        let Some((p, _)) = best else {
            return C::zero();
        };
        if p != col {
            for c in 0..n {
                a.swap(p * n + c, col * n + c);
            }
            det = -det;
        }
        let pivot = a[col * n + col].clone();
        det *= &pivot;
        let pinv = pivot.inv().expect("nonzero pivot");
        for r in col + 1..n {
            let f = a[r * n + col].mul_ref(&pinv);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul_ref(&a[col * n + c]);
                a[r * n + c] -= &t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn sample(nv: usize, trunc: u32, seed: i64) -> JetMatrix<Q> {
        JetMatrix::from_fn(3, 3, |i, j| {
            let mut e = Jet::constant(nv, trunc, q(if i == j { 2 } else { 0 } + seed % 3, 1));
            for v in 0..nv {
                let c = q(((i * 7 + j * 3 + v * 5) as i64 + seed) % 5 - 2, 3);
                e = &e + &Jet::var(nv, trunc, v).scale(&c);
            }
            e
        })
    }

    #[test]
    fn identity_has_unit_determinant() {
        assert_eq!(JetMatrix::<Q>::identity(2, 3, 4).det().unwrap(), Jet::one(3, 4));
    }

    #[test]
    fn one_by_one_det_is_entry() {
        let f = &Jet::<Q>::one(2, 3) + &Jet::var(2, 3, 1);
        assert_eq!(JetMatrix::scalar(f.clone()).det().unwrap(), f);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = sample(2, 5, 1);
        let inv = m.inverse("sample").unwrap();
        assert!(m.mul(&inv).unwrap().is_identity(0.0));
        assert!(inv.mul(&m).unwrap().is_identity(0.0));
        let d = m.det().unwrap() * inv.det().unwrap();
        assert_eq!(d, Jet::one(2, 5));
    }

    #[test]
    fn elimination_matches_cofactors() {
        let m = JetMatrix::from_fn(4, 4, |i, j| {
            let base = sample(2, 4, (i + j) as i64);
            base.get(i % 3, j % 3).clone()
        });
        let m = m.shift_diagonal(&q(3, 1));
        assert_eq!(m.det_by_elimination().unwrap(), m.det_by_cofactors());
    }

    #[test]
    fn singular_constant_term_is_named() {
        let m = JetMatrix::from_fn(2, 2, |i, _| Jet::<Q>::var(1, 3, 0).scale(&q(i as i64 + 1, 1)));
        match m.inverse("H(0)") {
            Err(Error::SingularMatrix { context }) => assert_eq!(context, "H(0)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scalar_helpers() {
        let m = vec![q(2, 1), q(1, 1), q(1, 1), q(3, 1)];
        assert_eq!(det_scalar(2, &m), q(5, 1));
        let inv = invert_scalar(2, &m).unwrap();
        assert_eq!(inv, vec![q(3, 5), q(-1, 5), q(-1, 5), q(2, 5)]);
        assert!(invert_scalar(2, &[q(1, 1), q(2, 1), q(2, 1), q(4, 1)]).is_none());
    }
}
