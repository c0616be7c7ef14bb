//! Potentials, polarization and the Hermitian geometry of the Kähler metric.
//!
//! Jets in `2n` variables use the layout `(x₁…xₙ, x̄₁…x̄ₙ)` for potentials and
//! `(x₁…xₙ, z₁…zₙ)` after polarization; the coefficient tables coincide, so
//! substituting `z ↦ x̄` is a relabeling.
//!
//! Form conventions: a `(1,1)`-form `Σ Tᵢⱼ dyᵢ∧dz̄ⱼ` is stored as the `n×n`
//! coefficient matrix `T`. The contraction with the metric form is
//! `ΛT = tr(H⁻¹T)`, so that `Λω = n`. Since `∂̄η = Σ ∂_{zⱼ}ηᵢ dzⱼ∧dyᵢ`, the
//! curvature coefficient matrix is `Θᵢⱼ = −∂_{zⱼ}ηᵢ` and the scalar
//! curvature is `s = Λ Tr Θ`. At a point where `H = I` this is
//! `s = −Σⱼ Tr ∂_{zⱼ}ηⱼ`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetMatrix, MultiIndex};
use crate::scalar::Coefficient;

/// Built-in model potentials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// `|x|²`
    Flat,
    /// `log(1 + |x|²)`
    FubiniStudy,
    /// `|x|² + c|x|⁴`
    RadialQuartic { c: f64 },
}

impl Model {
    pub const DEFAULT_QUARTIC: f64 = 0.1;

    pub fn name(&self) -> &'static str {
        match self {
            Model::Flat => "flat",
            Model::FubiniStudy => "fubini-study",
            Model::RadialQuartic { .. } => "radial-quartic",
        }
    }

    /// `φ` as a function of `t = |x|²`, evaluated in floating point.
    pub fn radial_profile(&self, t: f64) -> f64 {
        self.radial_derivatives(t).0
    }

    /// `(f, f′, f″)` at `t` for the profile `φ = f(|x|²)`.
    pub fn radial_derivatives(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            Model::Flat => (t, 1.0, 0.0),
            Model::FubiniStudy => (t.ln_1p(), 1.0 / (1.0 + t), -1.0 / ((1.0 + t) * (1.0 + t))),
            Model::RadialQuartic { c } => (t + c * t * t, 1.0 + 2.0 * c * t, 2.0 * c),
        }
    }

    /// `φ_{xx̄} = f′ + t f″` in one variable.
    pub fn radial_volume_density(&self, t: f64) -> f64 {
        let (_, f1, f2) = self.radial_derivatives(t);
        f1 + t * f2
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::RadialQuartic { c } => write!(f, "radial-quartic(c={c})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    /// Accepts `flat`, `fubini-study` and `radial-quartic[:c]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        match (name, param) {
            ("flat", None) => Ok(Model::Flat),
            ("fubini-study", None) => Ok(Model::FubiniStudy),
            ("radial-quartic", None) => Ok(Model::RadialQuartic {
                c: Self::DEFAULT_QUARTIC,
            }),
            ("radial-quartic", Some(p)) => p
                .parse::<f64>()
                .map(|c| Model::RadialQuartic { c })
                .map_err(|_| Error::InvalidInput(format!("bad quartic coefficient `{p}`"))),
            _ => Err(Error::InvalidInput(format!("unknown model `{s}`"))),
        }
    }
}

/// Real strictly plurisubharmonic potential jet `φ(x, x̄)` at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialJet<C> {
    dim: usize,
    phi: Jet<C>,
}

/// `|x|²` as a jet in `(x, x̄)`.
fn squared_norm<C: Coefficient>(dim: usize, trunc: u32) -> Jet<C> {
    let nv = 2 * dim;
    let mut t = Jet::zero(nv, trunc);
    for i in 0..dim {
        t = &t + &(&Jet::var(nv, trunc, i) * &Jet::var(nv, trunc, dim + i));
    }
    t
}

impl<C: Coefficient> PotentialJet<C> {
    /// Validates reality and strict plurisubharmonicity at the base point.
    pub fn new(dim: usize, phi: Jet<C>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if phi.num_vars() != 2 * dim {
            return Err(Error::VarCountMismatch {
                left: 2 * dim,
                right: phi.num_vars(),
            });
        }
        if phi.trunc_degree() < 2 {
            return Err(Error::DegreeBudget {
                required: 2,
                available: phi.trunc_degree(),
            });
        }
        check_reality(&phi, 1e-12)?;
        let p = PotentialJet { dim, phi };
        check_positive(dim, &p.levi_form(), "levi form φ_{i j̄}(0)")?;
        Ok(p)
    }

    pub fn model(model: Model, dim: usize, degree: u32) -> Result<Self> {
        Jet::<C>::check_dims(2 * dim, degree)?;
        let t = squared_norm::<C>(dim, degree);
        let phi = match model {
            Model::Flat => t,
            Model::FubiniStudy => (&Jet::one(2 * dim, degree) + &t).log()?,
            Model::RadialQuartic { c } => {
                let c = C::from_c64(Complex64::new(c, 0.0));
                &t + &(&t * &t).scale(&c)
            }
        };
        Self::new(dim, phi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self) -> &Jet<C> {
        &self.phi
    }

    pub fn degree(&self) -> u32 {
        self.phi.trunc_degree()
    }

    /// Same potential with a lower truncation degree.
    pub fn truncate(&self, degree: u32) -> Self {
        PotentialJet {
            dim: self.dim,
            phi: self.phi.truncate(degree),
        }
    }

    /// `φ_{i j̄}(0)`, row-major.
    pub fn levi_form(&self) -> Vec<C> {
        let n = self.dim;
        (0..n * n)
            .map(|k| {
                let key = MultiIndex::unit(k / n).add(MultiIndex::unit(n + k % n));
                self.phi.coeff(&key)
            })
            .collect()
    }

    /// Smallest eigenvalue of the Levi form at the base point.
    pub fn min_levi_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(self.dim, &self.levi_form())
    }

    /// Pulls the potential back along `x = U x'` (`u` row-major `n×n`).
    pub fn linear_change(&self, u: &[C]) -> Result<Self> {
        let n = self.dim;
        if u.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for an {n}x{n} change of coordinates",
                u.len()
            )));
        }
        let nv = 2 * n;
        let d = self.degree();
        let mut args = Vec::with_capacity(nv);
        for conj in [false, true] {
            for i in 0..n {
                let mut a = Jet::zero(nv, d);
                for j in 0..n {
                    let c = if conj { u[i * n + j].conj() } else { u[i * n + j].clone() };
                    let v = if conj { n + j } else { j };
                    a = &a + &Jet::var(nv, d, v).scale(&c);
                }
                args.push(a);
            }
        }
        Self::new(n, self.phi.compose(&args)?)
    }

    /// `φ(x)` from the truncated jet.
    pub fn eval(&self, x: &[Complex64]) -> f64 {
        let mut p = x.to_vec();
        p.extend(x.iter().map(|v| v.conj()));
        self.phi.eval_c64(&p).re
    }

    pub fn to_float(&self) -> PotentialJet<Complex64> {
        PotentialJet {
            dim: self.dim,
            phi: self.phi.to_float(),
        }
    }
}

/// Rejects jets in `(x, x̄)` whose coefficients are not conjugate-symmetric.
pub fn check_reality<C: Coefficient>(phi: &Jet<C>, tol: f64) -> Result<()> {
    let n = phi.num_vars() / 2;
    for (k, c) in phi.terms() {
        let mirror = k.slice(0, n).shift(n).add(k.slice(n, n));
        if !c.approx_eq(&phi.coeff(&mirror).conj(), tol) {
            return Err(Error::NotReal {
                x_exp: k.slice(0, n).exponents(n),
                xbar_exp: k.slice(n, n).exponents(n),
            });
        }
    }
    Ok(())
}

/// Hermitian positive-definiteness of a constant matrix: leading principal
/// minors in exact mode, eigenvalues in float mode.
pub fn check_positive<C: Coefficient>(n: usize, m: &[C], context: &str) -> Result<()> {
    for i in 0..n {
        for j in 0..n {
            if !m[i * n + j].approx_eq(&m[j * n + i].conj(), 1e-12) {
                return Err(Error::NotPositive(format!("{context} is not Hermitian")));
            }
        }
    }
    if C::EXACT {
        for k in 1..=n {
            let minor: Vec<C> = (0..k * k).map(|e| m[(e / k) * n + e % k].clone()).collect();
            if !crate::jet::det_scalar(k, &minor).is_positive_real() {
                return Err(Error::NotPositive(format!(
                    "{context}: leading minor of order {k} is not positive"
                )));
            }
        }
        Ok(())
    } else {
        let lmin = min_hermitian_eigenvalue(n, m);
        if lmin > 0.0 {
            Ok(())
        } else {
            Err(Error::NotPositive(format!(
                "{context}: smallest eigenvalue {lmin:.3e}"
            )))
        }
    }
}

pub(crate) fn min_hermitian_eigenvalue<C: Coefficient>(n: usize, m: &[C]) -> f64 {
    let mat = DMatrix::from_fn(n, n, |i, j| {
        // symmetrize against rounding before the Hermitian solver sees it
        (m[i * n + j].to_c64() + m[j * n + i].to_c64().conj()) * 0.5
    });
    mat.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Holomorphic function `ψ(x, z)` with `ψ(x, x̄) = φ(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedPhase<C> {
    dim: usize,
    psi: Jet<C>,
}

pub fn polarize<C: Coefficient>(phi: &PotentialJet<C>) -> PolarizedPhase<C> {
    PolarizedPhase {
        dim: phi.dim,
        psi: phi.phi.clone(),
    }
}

impl<C: Coefficient> PolarizedPhase<C> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn psi(&self) -> &Jet<C> {
        &self.psi
    }

    /// `ψ(x, x̄)` as a jet in `(x, x̄)`.
    pub fn restrict_to_diagonal(&self) -> Jet<C> {
        self.psi.clone()
    }

    pub fn eval(&self, x: &[Complex64], z: &[Complex64]) -> Complex64 {
        let mut p = x.to_vec();
        p.extend_from_slice(z);
        self.psi.eval_c64(&p)
    }
}

/// `Hᵢⱼ = ψ_{yᵢ zⱼ}(y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet<C> {
    h: JetMatrix<C>,
}

impl<C: Coefficient> MetricJet<C> {
    pub fn matrix(&self) -> &JetMatrix<C> {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn inverse(&self) -> Result<JetMatrix<C>> {
        self.h.inverse("H(0)").map_err(|e| match e {
            Error::SingularMatrix { .. } => {
                Error::NotPositive("metric H(0) is singular".into())
            }
            other => other,
        })
    }
}

pub fn hermitian_metric<C: Coefficient>(psi: &PolarizedPhase<C>) -> MetricJet<C> {
    let n = psi.dim;
    MetricJet {
        h: JetMatrix::from_fn(n, n, |i, j| psi.psi.differentiate(i).differentiate(n + j)),
    }
}

/// `η = H⁻¹∂H = Σ ηⱼ dyⱼ`, one matrix per holomorphic direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionJet<C> {
    pub eta: Vec<JetMatrix<C>>,
}

pub fn connection<C: Coefficient>(h: &MetricJet<C>) -> Result<ConnectionJet<C>> {
    let h_inv = h.inverse()?;
    let eta = (0..h.dim())
        .map(|j| h_inv.mul(&h.h.differentiate(j)))
        .collect::<Result<_>>()?;
    Ok(ConnectionJet { eta })
}

/// Coefficient matrix of `Tr ∂̄η` in the `dyᵢ∧dz̄ⱼ` basis.
pub fn trace_curvature_form<C: Coefficient>(eta: &ConnectionJet<C>) -> Result<JetMatrix<C>> {
    let n = eta.eta.len();
    let traces = eta
        .eta
        .iter()
        .map(|e| e.trace())
        .collect::<Result<Vec<_>>>()?;
    Ok(JetMatrix::from_fn(n, n, |i, j| -&traces[i].differentiate(n + j)))
}

/// `ΛT = tr(H⁻¹T)` for a `(1,1)`-form coefficient matrix `T`.
pub fn contract<C: Coefficient>(t: &JetMatrix<C>, h: &MetricJet<C>) -> Result<Jet<C>> {
    let n = h.dim();
    if t.rows() != n || t.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "contracting a {}x{} form against an {n}x{n} metric",
            t.rows(),
            t.cols()
        )));
    }
    h.inverse()?.mul(t)?.trace()
}

/// Contraction of a matrix-valued `(1,1)`-form given as `n×n` blocks of
/// `r×r` matrices; `forms[i][j]` is the coefficient of `dyᵢ∧dz̄ⱼ`.
pub fn contract_matrix_valued<C: Coefficient>(
    forms: &[Vec<JetMatrix<C>>],
    h: &MetricJet<C>,
) -> Result<JetMatrix<C>> {
    let n = h.dim();
    if forms.len() != n || forms.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("form block layout".into()));
    }
    let h_inv = h.inverse()?;
    let first = &forms[0][0];
    let mut acc = JetMatrix::zeros(first.rows(), first.cols(), first.num_vars(), first.trunc_degree());
    for i in 0..n {
        for j in 0..n {
            acc = acc.add(&forms[i][j].scale(h_inv.get(j, i)))?;
        }
    }
    Ok(acc)
}

/// Scalar curvature jet `s(y, z)`; its constant term is `s` at the base point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCurvatureJet<C> {
    pub s: Jet<C>,
}

impl<C: Coefficient> ScalarCurvatureJet<C> {
    pub fn at_base(&self) -> C {
        self.s.constant_term()
    }
}

pub fn scalar_curvature<C: Coefficient>(h: &MetricJet<C>) -> Result<ScalarCurvatureJet<C>> {
    let eta = connection(h)?;
    let t = trace_curvature_form(&eta)?;
    Ok(ScalarCurvatureJet { s: contract(&t, h)? })
}

/// Scalar curvature at the base point straight from a potential.
pub fn scalar_curvature_at_base<C: Coefficient>(phi: &PotentialJet<C>) -> Result<C> {
    if phi.degree() < 4 {
        return Err(Error::DegreeBudget {
            required: 4,
            available: phi.degree(),
        });
    }
    let psi = polarize(&phi.truncate(4));
    Ok(scalar_curvature(&hermitian_metric(&psi))?.at_base())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("flat".parse::<Model>().unwrap(), Model::Flat);
        assert_eq!(
            "radial-quartic:0.25".parse::<Model>().unwrap(),
            Model::RadialQuartic { c: 0.25 }
        );
        assert!("sphere".parse::<Model>().is_err());
    }

    #[test]
    fn flat_polarizes_to_dot_product() {
        let phi = PotentialJet::<Q>::model(Model::Flat, 2, 4).unwrap();
        let psi = polarize(&phi);
        assert_eq!(psi.psi().len(), 2);
        assert_eq!(psi.psi().coeff_of(&[1, 0, 1, 0]), q(1, 1));
        assert_eq!(psi.restrict_to_diagonal(), *phi.phi());
        let h = hermitian_metric(&psi);
        assert!(h.matrix().is_identity(0.0));
        let eta = connection(&h).unwrap();
        assert!(eta.eta.iter().all(|e| e.max_abs_coeff() == 0.0));
        assert!(scalar_curvature(&h).unwrap().s.is_zero());
    }

    #[test]
    fn quartic_substitution() {
        // |x|² + x²x̄²/4 in one variable
        let x = Jet::<Q>::var(2, 4, 0);
        let xb = Jet::<Q>::var(2, 4, 1);
        let t = &x * &xb;
        let phi = &t + &(&t * &t).scale(&q(1, 4));
        let psi = polarize(&PotentialJet::new(1, phi).unwrap());
        assert_eq!(psi.psi().coeff_of(&[2, 2]), q(1, 4));
        assert_eq!(psi.psi().coeff_of(&[1, 1]), q(1, 1));
    }

    #[test]
    fn fubini_study_metric_and_connection() {
        let d = 8;
        let psi = polarize(&PotentialJet::<Q>::model(Model::FubiniStudy, 1, d).unwrap());
        let h = hermitian_metric(&psi);
        // H = (1 + yz)^{-2}
        let y = Jet::<Q>::var(2, d - 2, 0);
        let z = Jet::<Q>::var(2, d - 2, 1);
        let one_plus = &Jet::one(2, d - 2) + &(&y * &z);
        let expected_h = (&one_plus * &one_plus).invert_unit().unwrap();
        assert_eq!(*h.matrix().get(0, 0), expected_h);
        // η = −2z / (1 + yz)
        let eta = connection(&h).unwrap();
        let expected_eta =
            (&z.truncate(d - 3) * &one_plus.truncate(d - 3).invert_unit().unwrap()).scale(&q(-2, 1));
        assert_eq!(*eta.eta[0].get(0, 0), expected_eta);
    }

    #[test]
    fn fubini_study_scalar_curvature() {
        // s(0) = n(n+1)
        for (n, s) in [(1usize, 2i64), (2, 6)] {
            let phi = PotentialJet::<Q>::model(Model::FubiniStudy, n, 4).unwrap();
            assert_eq!(scalar_curvature_at_base(&phi).unwrap(), q(s, 1));
        }
    }

    #[test]
    fn contraction_of_metric_is_dimension() {
        let phi = PotentialJet::<Q>::model(Model::FubiniStudy, 2, 6).unwrap();
        let h = hermitian_metric(&polarize(&phi));
        let lw = contract(h.matrix(), &h).unwrap();
        assert_eq!(lw, Jet::constant(4, lw.trunc_degree(), q(2, 1)));
        let zero = JetMatrix::zeros(2, 2, 4, 4);
        assert!(contract(&zero, &h).unwrap().is_zero());
        assert!(contract(&JetMatrix::zeros(3, 3, 4, 4), &h).is_err());
    }

    #[test]
    fn reality_violation_names_the_pair() {
        let x = Jet::<Q>::var(2, 4, 0);
        let xb = Jet::<Q>::var(2, 4, 1);
        let phi = &(&x * &xb) + &(&x * &x).scale(&q(1, 2));
        match PotentialJet::new(1, phi) {
            Err(Error::NotReal { x_exp, xbar_exp }) => {
                assert_eq!((x_exp, xbar_exp), (vec![2], vec![0]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_psh_potential_is_rejected() {
        let x = Jet::<Q>::var(2, 4, 0);
        let xb = Jet::<Q>::var(2, 4, 1);
        let phi = (&x * &xb).scale(&q(-1, 1));
        assert!(matches!(PotentialJet::new(1, phi), Err(Error::NotPositive(_))));
        let float = Jet::<Complex64>::var(2, 4, 0).scale(&Complex64::new(0.0, 0.0));
        assert!(matches!(PotentialJet::new(1, float), Err(Error::NotPositive(_))));
    }

    #[test]
    fn diagonal_restriction_of_metric_is_levi_hessian() {
        let phi = PotentialJet::<Q>::model(Model::RadialQuartic { c: 0.1 }, 2, 6).unwrap();
        let h = hermitian_metric(&polarize(&phi));
        for i in 0..2 {
            for j in 0..2 {
                let direct = phi.phi().differentiate(i).differentiate(2 + j);
                assert_eq!(*h.matrix().get(i, j), direct);
            }
        }
    }
}
