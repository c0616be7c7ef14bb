//! The operator `S = exp(D_θ·D_y / k)` on `k⁻¹`-expansions and the
//! amplitude recursion producing `b₀ … b_N`.
//!
//! Amplitudes are matrix jets in `(x, y, θ')`; the untwisted case uses
//! `1×1` matrices. With `Δ` the amplitude base and `z = z(x, y, θ')`,
//!
//! ```text
//! c_m(x, θ') = −Σ_{l=1..m} (D_θ·D_y)^l / l! · (b_{m−l}(x, z)·Δ)|_{y=x}
//! b_m(x, z)  = c_m(x, θ'(x, x, z))
//! ```
//!
//! Each application of `D_θ·D_y` costs two degrees, so `b_m` is valid to
//! `D_work − 2m` where `D_work` is the validity degree of `Δ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{polarize, PolarizedPhase, PotentialJet};
use crate::jet::{Jet, JetMatrix, MultiIndex};
use crate::kuranishi::{
    delta0, invert_theta, restrict_diagonal, theta_map, AmplitudeBase, ThetaMap, ZOfTheta,
};
use crate::scalar::Coefficient;

/// Degree of `φ` needed for `N` coefficients valid to `degree`.
pub fn required_potential_degree(order: usize, degree: u32) -> u32 {
    working_degree(order, degree) + 2
}

/// `D_work = D_out + 2(N + 1)`.
pub fn working_degree(order: usize, degree: u32) -> u32 {
    degree + 2 * (order as u32 + 1)
}

/// Rejects `(N, D_out)` whose working degree the jet representation cannot hold.
pub fn check_budget(order: usize, degree: u32) -> Result<()> {
    let available = MultiIndex::MAX_EXPONENT - 2;
    let required = (degree as u64 + 2 * (order as u64 + 1)).min(u32::MAX as u64) as u32;
    if required > available {
        return Err(Error::DegreeBudget { required, available });
    }
    Ok(())
}

/// Formal series `Σ_m a_m k^{−m}`; `coeffs[m]` is the coefficient of `k^{−m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KExpansion<C> {
    pub coeffs: Vec<Jet<C>>,
}

impl<C: Coefficient> KExpansion<C> {
    pub fn new(coeffs: Vec<Jet<C>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty k-expansion".into()));
        }
        let nv = coeffs[0].num_vars();
        if let Some(bad) = coeffs.iter().find(|c| c.num_vars() != nv) {
            return Err(Error::VarCountMismatch {
                left: nv,
                right: bad.num_vars(),
            });
        }
        Ok(KExpansion { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs[0].num_vars()
    }

    pub fn trunc_degree(&self) -> u32 {
        self.coeffs.iter().map(|c| c.trunc_degree()).min().unwrap_or(0)
    }

    /// Each coefficient restricted to `y = x`, as jets in `(x, θ)`.
    pub fn restrict_diagonal(&self) -> Self {
        KExpansion {
            coeffs: self.coeffs.iter().map(restrict_diagonal).collect(),
        }
    }
}

/// `D_θ·D_y f = Σⱼ ∂_{θⱼ}∂_{yⱼ} f` for a jet in `(x, y, θ)`.
pub fn d_theta_dot_d_y<C: Coefficient>(f: &Jet<C>) -> Jet<C> {
    let n = f.num_vars() / 3;
    let mut out = Jet::zero(f.num_vars(), f.trunc_degree().saturating_sub(2));
    for j in 0..n {
        out = &out + &f.differentiate(n + j).differentiate(2 * n + j);
    }
    out
}

fn d_theta_dot_d_y_matrix<C: Coefficient>(m: &JetMatrix<C>) -> JetMatrix<C> {
    m.map(d_theta_dot_d_y)
}

fn inverse_factorials<C: Coefficient>(up_to: usize) -> Vec<C> {
    let mut out = vec![C::one()];
    for l in 1..=up_to {
        let prev = out[l - 1].clone();
        out.push(prev.mul_ref(&C::from_ratio(1, l as i64)));
    }
    out
}

fn apply_s_signed<C: Coefficient>(a: &KExpansion<C>, sign: i64) -> Result<KExpansion<C>> {
    let order = a.order();
    let needed = 2 * order as u32;
    if !a.coeffs[0].num_vars().is_multiple_of(3) {
        return Err(Error::DimensionMismatch(
            "S acts on jets in (x, y, θ)".into(),
        ));
    }
    if a.trunc_degree() < needed {
        return Err(Error::DegreeBudget {
            required: needed,
            available: a.trunc_degree(),
        });
    }
    let inv_fact = inverse_factorials::<C>(order);
    // powers[j] holds (D_θ·D_y)^l a_j for the current l
    let mut powers: Vec<Jet<C>> = a.coeffs.clone();
    let mut out: Vec<Jet<C>> = a.coeffs.clone();
    for l in 1..=order {
        let mut c = inv_fact[l].clone();
        if sign < 0 && l % 2 == 1 {
            c = -c;
        }
        for j in 0..=order - l {
            powers[j] = d_theta_dot_d_y(&powers[j]);
            out[j + l] = &out[j + l] + &powers[j].scale(&c);
        }
    }
    Ok(KExpansion { coeffs: out })
}

/// `(Sa)_m = Σ_{l=0..m} (D_θ·D_y)^l / l! · a_{m−l}`.
pub fn apply_s<C: Coefficient>(a: &KExpansion<C>) -> Result<KExpansion<C>> {
    apply_s_signed(a, 1)
}

/// `S⁻¹`, the same series with alternating signs.
pub fn apply_s_inverse<C: Coefficient>(a: &KExpansion<C>) -> Result<KExpansion<C>> {
    apply_s_signed(a, -1)
}

/// `k⁻¹∇A` where `∇A = D_θ·A + k(x − y)·A`; `a[j]` is the `j`-th component
/// of the vector expansion `A`. Order `m` of the result is
/// `(x − y)·A_m + D_θ·A_{m−1}`.
pub fn nabla<C: Coefficient>(a: &[KExpansion<C>]) -> Result<KExpansion<C>> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty vector expansion".into()));
    }
    let nv = 3 * n;
    let order = a[0].order();
    for comp in a {
        if comp.num_vars() != nv || comp.order() != order {
            return Err(Error::DimensionMismatch(format!(
                "vector expansion components must share {nv} variables and order {order}"
            )));
        }
    }
    let d = a.iter().map(|c| c.trunc_degree()).min().unwrap();
    let coeffs = (0..=order)
        .map(|m| {
            let mut acc = Jet::zero(nv, d.saturating_sub(1));
            for (j, comp) in a.iter().enumerate() {
                let diff = &Jet::var(nv, d, j) - &Jet::var(nv, d, n + j);
                acc = &acc + &(&diff * &comp.coeffs[m]);
                if m > 0 {
                    acc = &acc + &comp.coeffs[m - 1].differentiate(2 * n + j);
                }
            }
            acc
        })
        .collect();
    Ok(KExpansion { coeffs })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NegligibleReport {
    pub order: usize,
    /// Largest coefficient magnitude of `S(∇A)|_{y=x}` at each order.
    pub residual: Vec<f64>,
}

impl NegligibleReport {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().cloned().fold(0.0, f64::max)
    }
}

/// Applies `S` to `∇A`, restricts to `y = x` and measures what is left.
pub fn verify_negligible<C: Coefficient>(a: &[KExpansion<C>]) -> Result<NegligibleReport> {
    let s = apply_s(&nabla(a)?)?.restrict_diagonal();
    Ok(NegligibleReport {
        order: s.order(),
        residual: s.coeffs.iter().map(|c| c.max_abs_coeff()).collect(),
    })
}

/// The jets entering the recursion, derived from a potential.
#[derive(Clone, Debug)]
pub struct PhaseData<C> {
    pub phi: PotentialJet<C>,
    pub psi: PolarizedPhase<C>,
    pub theta: ThetaMap<C>,
    pub z: ZOfTheta<C>,
    pub delta0: AmplitudeBase<C>,
}

impl<C: Coefficient> PhaseData<C> {
    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// Validity degree of `Δ₀`.
    pub fn working_degree(&self) -> u32 {
        self.delta0.delta0.trunc_degree()
    }
}

/// Polarizes `φ` and builds `θ`, `z(x, y, θ')` and `Δ₀` for `N` coefficients
/// valid to `degree`.
pub fn prepare<C: Coefficient>(
    phi: &PotentialJet<C>,
    order: usize,
    degree: u32,
) -> Result<PhaseData<C>> {
    let need = required_potential_degree(order, degree);
    if phi.degree() < need {
        return Err(Error::DegreeBudget {
            required: need,
            available: phi.degree(),
        });
    }
    Jet::<C>::check_dims(3 * phi.dim(), need)?;
    let phi = phi.truncate(need);
    let psi = polarize(&phi);
    let theta = theta_map(&psi)?;
    let z = invert_theta(&theta)?;
    let delta0 = delta0(&psi, &theta, &z)?;
    Ok(PhaseData {
        phi,
        psi,
        theta,
        z,
        delta0,
    })
}

/// Solved coefficients `b_m(x, z)` as `r×r` matrix jets in `2n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence<C> {
    pub dim: usize,
    pub rank: usize,
    pub b: Vec<JetMatrix<C>>,
    /// Validity degree of each `b_m`.
    pub valid_degrees: Vec<u32>,
}

impl<C: Coefficient> CoefficientSequence<C> {
    pub fn order(&self) -> usize {
        self.b.len() - 1
    }

    /// Scalar coefficient `b_m` of an untwisted sequence.
    pub fn scalar(&self, m: usize) -> &Jet<C> {
        assert_eq!(self.rank, 1, "scalar access on a matrix sequence");
        self.b[m].get(0, 0)
    }

    /// `b_m(x, x̄)`: the coefficient table read in `(x, x̄)` variables.
    pub fn diagonal(&self, m: usize) -> &JetMatrix<C> {
        &self.b[m]
    }

    /// `b_m(0, 0)` for every `m`, row-major per matrix.
    pub fn base_values(&self) -> Vec<Vec<C>> {
        self.b.iter().map(|b| b.constant_matrix()).collect()
    }

    /// Scalar base values of an untwisted sequence.
    pub fn scalar_base_values(&self) -> Vec<C> {
        (0..self.b.len()).map(|m| self.scalar(m).constant_term()).collect()
    }

    /// Whether each `b_m(x, x̄)` is Hermitian-valued, coefficient by coefficient.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.b.iter().all(|b| b.hermitian_mirror().approx_eq(b, tol))
    }

    /// `Σ_m b_m(0, 0) k^{−m}` as a complex matrix (row-major).
    pub fn base_sum(&self, k: f64) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.rank * self.rank];
        for (m, vals) in self.base_values().iter().enumerate() {
            let w = k.powi(-(m as i32));
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += v.to_c64() * w;
            }
        }
        acc
    }
}

/// Runs the recursion for an amplitude base `delta` (matrix-valued, equal to
/// the identity on `y = x`).
pub fn solve_recursion_matrix<C: Coefficient>(
    delta: &JetMatrix<C>,
    z: &ZOfTheta<C>,
    theta: &ThetaMap<C>,
    order: usize,
) -> Result<CoefficientSequence<C>> {
    let n = theta.dim();
    let r = delta.rows();
    let d_work = delta.trunc_degree();
    if d_work < 2 * order as u32 {
        return Err(Error::DegreeBudget {
            required: 2 * order as u32,
            available: d_work,
        });
    }
    let tol = 1e-9;
    let on_diag = delta.relabel(2 * n, &diagonal_map(n));
    if !on_diag.is_identity(tol) {
        return Err(Error::Inconsistent(format!(
            "amplitude base differs from the identity on y = x (deviation {:.3e})",
            on_diag
                .sub(&JetMatrix::identity(r, 2 * n, on_diag.trunc_degree()))?
                .max_abs_coeff()
        )));
    }

    let pull_back: Vec<Jet<C>> = (0..n)
        .map(|i| Jet::var(3 * n, z.trunc_degree(), i))
        .chain(z.z_map.iter().cloned())
        .collect();
    let theta_diag = theta.on_diagonal_shifted();
    let diag_trunc = theta_diag[0].trunc_degree();
    let to_z: Vec<Jet<C>> = (0..n)
        .map(|i| Jet::var(2 * n, diag_trunc, i))
        .chain(theta_diag)
        .collect();
    let inv_fact = inverse_factorials::<C>(order);

    let mut b = vec![JetMatrix::identity(r, 2 * n, d_work)];
    let mut valid = vec![d_work];
    // pending[j] = (D_θ·D_y)^{m−1−j} (b_j(x, z)·Δ) entering step m
    let mut pending: Vec<JetMatrix<C>> = vec![delta.clone()];
    for m in 1..=order {
        let budget = d_work - 2 * m as u32;
        let mut known = JetMatrix::zeros(r, r, 2 * n, budget);
        for (j, p) in pending.iter_mut().enumerate() {
            *p = d_theta_dot_d_y_matrix(p);
            let l = m - j;
            known = known.add(&p.relabel(2 * n, &diagonal_map(n)).scale_coeff(&inv_fact[l]))?;
        }
        let c_m = known.scale_coeff(&-C::one());
        let b_m = c_m.compose(&to_z)?.truncate(budget);
        let next = b_m.compose(&pull_back)?;
        pending.push(next.mul(delta)?.truncate(budget));
        b.push(b_m);
        valid.push(budget);
    }
    Ok(CoefficientSequence {
        dim: n,
        rank: r,
        b,
        valid_degrees: valid,
    })
}

fn diagonal_map(n: usize) -> Vec<usize> {
    (0..n).chain(0..n).chain(n..2 * n).collect()
}

/// Untwisted recursion with `Δ = Δ₀`.
pub fn solve_recursion<C: Coefficient>(
    delta0: &AmplitudeBase<C>,
    z: &ZOfTheta<C>,
    theta: &ThetaMap<C>,
    order: usize,
) -> Result<CoefficientSequence<C>> {
    solve_recursion_matrix(&JetMatrix::scalar(delta0.delta0.clone()), z, theta, order)
}

/// `b₀ … b_N` for a potential, each valid at least to `degree`.
pub fn expand<C: Coefficient>(
    phi: &PotentialJet<C>,
    order: usize,
    degree: u32,
) -> Result<CoefficientSequence<C>> {
    let data = prepare(phi, order, degree)?;
    solve_recursion(&data.delta0, &data.z, &data.theta, order)
}

/// Value of the assembled kernel at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSample {
    pub value: Complex64,
    /// Set when a point lies outside the configured validity radius.
    pub outside_radius: bool,
}

/// Evaluator for `K^{(N)}(x, ȳ) = (k/π)ⁿ Σ b_m(x, ȳ) k^{−m} e^{kψ(x, ȳ)}`.
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    dim: usize,
    k: f64,
    b: Vec<Jet<Complex64>>,
    psi: Jet<Complex64>,
    pub validity_radius: f64,
}

pub fn assemble_kernel<C: Coefficient>(
    seq: &CoefficientSequence<C>,
    psi: &PolarizedPhase<C>,
    k: f64,
    validity_radius: f64,
) -> Result<KernelEvaluator> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if seq.rank != 1 {
        return Err(Error::Unsupported(
            "scalar kernel assembly of a matrix sequence".into(),
        ));
    }
    Ok(KernelEvaluator {
        dim: seq.dim,
        k,
        b: (0..seq.b.len()).map(|m| seq.scalar(m).to_float()).collect(),
        psi: psi.psi().to_float(),
        validity_radius,
    })
}

impl KernelEvaluator {
    fn outside(&self, pts: &[&[Complex64]]) -> bool {
        pts.iter().any(|p| {
            p.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() > self.validity_radius
        })
    }

    fn prefactor(&self) -> f64 {
        (self.k / std::f64::consts::PI).powi(self.dim as i32)
    }

    fn amplitude(&self, point: &[Complex64]) -> Complex64 {
        self.b
            .iter()
            .enumerate()
            .map(|(m, b)| b.eval_c64(point) * self.k.powi(-(m as i32)))
            .sum()
    }

    fn point(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let mut p = x.to_vec();
        p.extend(y.iter().map(|v| v.conj()));
        p
    }

    /// `K^{(N)}(x, ȳ)`.
    pub fn kernel(&self, x: &[Complex64], y: &[Complex64]) -> KernelSample {
        let p = Self::point(x, y);
        let value = self.prefactor() * self.amplitude(&p) * (self.psi.eval_c64(&p) * self.k).exp();
        KernelSample {
            value,
            outside_radius: self.outside(&[x, y]),
        }
    }

    /// `K^{(N)}(x, ȳ) e^{−k(φ(x) + φ(y))/2}`, free of overflow for large `k`.
    pub fn normalized_kernel(&self, x: &[Complex64], y: &[Complex64]) -> KernelSample {
        let p = Self::point(x, y);
        let phi_x = self.psi.eval_c64(&Self::point(x, x)).re;
        let phi_y = self.psi.eval_c64(&Self::point(y, y)).re;
        let phase = self.k * (self.psi.eval_c64(&p) - Complex64::new(0.5 * (phi_x + phi_y), 0.0));
        KernelSample {
            value: self.prefactor() * self.amplitude(&p) * phase.exp(),
            outside_radius: self.outside(&[x, y]),
        }
    }

    /// `B_k^{(N)}(x) = K^{(N)}(x, x̄) e^{−kφ(x)}`.
    pub fn bergman_function(&self, x: &[Complex64]) -> KernelSample {
        let s = self.normalized_kernel(x, x);
        KernelSample {
            value: Complex64::new(s.value.re, 0.0),
            ..s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Model;
    use crate::scalar::GaussianRational as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn degree_budget_formula() {
        assert_eq!(working_degree(3, 2), 10);
        assert_eq!(required_potential_degree(3, 2), 12);
    }

    #[test]
    fn s_of_constant_and_single_mixed_term() {
        let one = KExpansion::new(vec![Jet::<Q>::one(3, 4)]).unwrap();
        assert_eq!(apply_s(&one).unwrap(), one);
        // a = [θy, 0] ⇒ Sa = [θy, 1]
        let ty = &Jet::<Q>::var(3, 4, 2) * &Jet::var(3, 4, 1);
        let a = KExpansion::new(vec![ty.clone(), Jet::zero(3, 4)]).unwrap();
        let s = apply_s(&a).unwrap();
        assert_eq!(s.coeffs[0], ty);
        assert_eq!(s.coeffs[1], Jet::one(3, 2));
    }

    #[test]
    fn s_needs_headroom() {
        let a = KExpansion::new(vec![Jet::<Q>::one(3, 3); 3]).unwrap();
        assert_eq!(
            apply_s(&a).unwrap_err(),
            Error::DegreeBudget {
                required: 4,
                available: 3
            }
        );
    }

    #[test]
    fn s_inverse_undoes_s() {
        let x = Jet::<Q>::var(3, 8, 0);
        let y = Jet::<Q>::var(3, 8, 1);
        let t = Jet::<Q>::var(3, 8, 2);
        let a0 = &(&(&y * &y) * &(&t * &t)) + &(&x * &(&y * &t));
        let a1 = &(&y * &t).pow(3) - &x;
        let a = KExpansion::new(vec![a0, a1, y.pow(2)]).unwrap();
        let back = apply_s_inverse(&apply_s(&a).unwrap()).unwrap();
        for (m, (u, v)) in back.coeffs.iter().zip(&a.coeffs).enumerate() {
            assert_eq!(*u, v.truncate(u.trunc_degree()), "order {m}");
        }
    }

    #[test]
    fn constant_vector_is_negligible() {
        let a = vec![
            KExpansion::new(vec![Jet::<Q>::constant(6, 6, q(3, 1)); 3]).unwrap(),
            KExpansion::new(vec![Jet::<Q>::constant(6, 6, q(-1, 2)); 3]).unwrap(),
        ];
        let rep = verify_negligible(&a).unwrap();
        assert_eq!(rep.residual, vec![0.0; 3]);
        let zero = vec![KExpansion::new(vec![Jet::<Q>::zero(3, 6); 3]).unwrap()];
        assert_eq!(verify_negligible(&zero).unwrap().max_residual(), 0.0);
    }

    #[test]
    fn flat_model_has_trivial_coefficients() {
        let phi = PotentialJet::<Q>::model(Model::Flat, 1, required_potential_degree(3, 2)).unwrap();
        let seq = expand(&phi, 3, 2).unwrap();
        assert_eq!(*seq.scalar(0), Jet::one(2, 10));
        for m in 1..=3 {
            assert!(seq.scalar(m).is_zero());
        }
        assert_eq!(seq.valid_degrees, vec![10, 8, 6, 4]);
    }

    #[test]
    fn fubini_study_base_values() {
        let phi =
            PotentialJet::<Q>::model(Model::FubiniStudy, 1, required_potential_degree(3, 0)).unwrap();
        let seq = expand(&phi, 3, 0).unwrap();
        assert_eq!(seq.scalar_base_values(), vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1)]);
        assert!(seq.is_hermitian(0.0));
    }

    #[test]
    fn fubini_study_plane_matches_projective_plane() {
        // B_k = (k+1)(k+2)/π² = (k/π)²(1 + 3/k + 2/k²)
        let phi =
            PotentialJet::<Q>::model(Model::FubiniStudy, 2, required_potential_degree(3, 0)).unwrap();
        let seq = expand(&phi, 3, 0).unwrap();
        assert_eq!(seq.scalar_base_values(), vec![q(1, 1), q(3, 1), q(2, 1), q(0, 1)]);
    }

    #[test]
    fn fubini_study_b1_is_constant_along_diagonal() {
        // B_k = (k+1)/π everywhere, so b₁(x, x̄) ≡ 1 to its valid degree
        let phi =
            PotentialJet::<Q>::model(Model::FubiniStudy, 1, required_potential_degree(1, 2)).unwrap();
        let seq = expand(&phi, 1, 2).unwrap();
        let b1 = seq.scalar(1);
        let diag: Vec<_> = b1
            .terms()
            .filter(|(k, _)| k.get(0) == k.get(1))
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        assert_eq!(diag.len(), 1);
        assert_eq!(diag[0].1, q(1, 1));
    }

    #[test]
    fn insufficient_potential_degree_is_reported() {
        let phi = PotentialJet::<Q>::model(Model::FubiniStudy, 1, 5).unwrap();
        assert_eq!(
            expand(&phi, 2, 2).unwrap_err(),
            Error::DegreeBudget {
                required: 10,
                available: 5
            }
        );
    }

    #[test]
    fn budget_limits() {
        assert!(check_budget(13, 1).is_ok());
        assert_eq!(
            check_budget(40, 2),
            Err(Error::DegreeBudget {
                required: 84,
                available: 29
            })
        );
    }

    #[test]
    fn assembled_kernel_values() {
        let phi = PotentialJet::<Q>::model(Model::Flat, 1, required_potential_degree(1, 2)).unwrap();
        let psi = polarize(&phi);
        let seq = expand(&phi, 1, 2).unwrap();
        let k = 7.0;
        let ev = assemble_kernel(&seq, &psi, k, 0.5).unwrap();
        let zero = [Complex64::new(0.0, 0.0)];
        let v = ev.kernel(&zero, &zero);
        assert!((v.value.re - k / std::f64::consts::PI).abs() < 1e-13);
        assert!(!v.outside_radius);
        // Gaussian off-diagonal decay
        let x = [Complex64::new(0.1, 0.0)];
        let g = ev.normalized_kernel(&x, &zero);
        let expected = k / std::f64::consts::PI * (-k * 0.01 / 2.0).exp();
        assert!((g.value.norm() - expected).abs() < 1e-13);
        assert!(ev.kernel(&[Complex64::new(0.6, 0.0)], &zero).outside_radius);
        assert!(assemble_kernel(&seq, &psi, 0.0, 1.0).is_err());

        let phi =
            PotentialJet::<Q>::model(Model::FubiniStudy, 1, required_potential_degree(1, 2)).unwrap();
        let seq = expand(&phi, 1, 2).unwrap();
        let ev = assemble_kernel(&seq, &polarize(&phi), 10.0, 0.5).unwrap();
        let b = ev.bergman_function(&zero).value.re;
        assert!((b - 11.0 / std::f64::consts::PI).abs() < 1e-12);
    }
}
