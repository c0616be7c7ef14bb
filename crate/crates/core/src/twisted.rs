//! Sections of `L^k ⊗ E` for a Hermitian bundle metric `G`.
//!
//! The amplitude base becomes `Δ_G = Δ₀ · G(x, z)⁻¹ G(y, z)` at
//! `z = z(x, y, θ')`, and the recursion runs on `r×r` matrix jets with
//! `b_m` multiplied from the left. The assembled kernel is
//! `(k/π)ⁿ e^{kψ(x, ȳ)} B(x, ȳ) G(x, ȳ)⁻¹`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{
    check_positive, contract_matrix_valued, hermitian_metric, polarize, scalar_curvature, MetricJet, PolarizedPhase,
    PotentialJet,
};
use crate::jet::{Jet, JetMatrix};
use crate::kuranishi::{AmplitudeBase, ThetaMap, ZOfTheta};
use crate::recursion::{prepare, solve_recursion_matrix, CoefficientSequence, PhaseData};
use crate::scalar::Coefficient;

/// Hermitian positive `r×r` matrix jet `G(x, x̄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleMetricJet<C> {
    dim: usize,
    g: JetMatrix<C>,
}

impl<C: Coefficient> BundleMetricJet<C> {
    pub fn new(dim: usize, g: JetMatrix<C>) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::DimensionMismatch("bundle metric must be square".into()));
        }
        if g.num_vars() != 2 * dim {
            return Err(Error::VarCountMismatch {
                left: 2 * dim,
                right: g.num_vars(),
            });
        }
        if !g.hermitian_mirror().approx_eq(&g, 1e-12) {
            return Err(Error::NotReal {
                x_exp: Vec::new(),
                xbar_exp: Vec::new(),
            });
        }
        check_positive(g.rows(), &g.constant_matrix(), "bundle metric G(0)")?;
        Ok(BundleMetricJet { dim, g })
    }

    /// `G = I` of rank `r`.
    pub fn trivial(dim: usize, rank: usize, degree: u32) -> Self {
        BundleMetricJet {
            dim,
            g: JetMatrix::identity(rank, 2 * dim, degree),
        }
    }

    pub fn rank(&self) -> usize {
        self.g.rows()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &JetMatrix<C> {
        &self.g
    }

    pub fn degree(&self) -> u32 {
        self.g.trunc_degree()
    }
}

/// Rank-one metric `G = μₙ/ωₙ` on the trivial bundle, turning a weighted
/// volume form into a twist.
pub fn volume_twist<C: Coefficient>(dim: usize, mu_over_omega: Jet<C>) -> Result<BundleMetricJet<C>> {
    if !mu_over_omega.constant_term().is_positive_real() {
        return Err(Error::NotPositive(
            "volume density ratio must be positive at the base point".into(),
        ));
    }
    BundleMetricJet::new(dim, JetMatrix::scalar(mu_over_omega))
}

/// `Δ_G = Δ₀ · G(x, z)⁻¹ G(y, z)` at `z = z(x, y, θ')`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedAmplitude<C> {
    pub delta_g: JetMatrix<C>,
}

pub fn delta_g<C: Coefficient>(
    delta0: &AmplitudeBase<C>,
    g: &BundleMetricJet<C>,
    z: &ZOfTheta<C>,
) -> Result<TwistedAmplitude<C>> {
    let n = g.dim;
    let nv = 3 * n;
    let dz = z.trunc_degree();
    let args = |offset: usize| -> Vec<Jet<C>> {
        (offset..offset + n)
            .map(|i| Jet::var(nv, dz, i))
            .chain(z.z_map.iter().cloned())
            .collect()
    };
    let gx = g.g.compose(&args(0))?;
    let gy = g.g.compose(&args(n))?;
    let gx_inv = gx.inverse("bundle metric G(0)")?;
    let delta_g = gx_inv.mul(&gy)?.scale(&delta0.delta0);
    Ok(TwistedAmplitude { delta_g })
}

pub fn solve_recursion_twisted<C: Coefficient>(
    delta_g: &TwistedAmplitude<C>,
    z: &ZOfTheta<C>,
    theta: &ThetaMap<C>,
    order: usize,
) -> Result<CoefficientSequence<C>> {
    solve_recursion_matrix(&delta_g.delta_g, z, theta, order)
}

/// Matrix coefficients for the twist of `φ` by `G`, valid to `degree`.
pub fn expand_twisted<C: Coefficient>(
    phi: &PotentialJet<C>,
    g: &BundleMetricJet<C>,
    order: usize,
    degree: u32,
) -> Result<CoefficientSequence<C>> {
    let data = prepare(phi, order, degree)?;
    expand_twisted_with(&data, g, order)
}

pub fn expand_twisted_with<C: Coefficient>(
    data: &PhaseData<C>,
    g: &BundleMetricJet<C>,
    order: usize,
) -> Result<CoefficientSequence<C>> {
    if g.dim != data.dim() {
        return Err(Error::DimensionMismatch(format!(
            "bundle metric over dimension {} on a base of dimension {}",
            g.dim,
            data.dim()
        )));
    }
    if g.degree() < data.working_degree() {
        return Err(Error::DegreeBudget {
            required: data.working_degree(),
            available: g.degree(),
        });
    }
    let dg = delta_g(&data.delta0, g, &data.z)?;
    solve_recursion_twisted(&dg, &data.z, &data.theta, order)
}

/// Connection `η_E = G⁻¹∂G` and curvature `Θ_E = ∂̄η_E` of a bundle metric.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleCurvature<C> {
    /// `eta[j] = G⁻¹∂_{yⱼ}G`.
    pub eta: Vec<JetMatrix<C>>,
    /// `theta[i][j]`, the coefficient of `dyᵢ∧dz̄ⱼ`, equal to `−∂_{zⱼ}ηᵢ`.
    pub theta: Vec<Vec<JetMatrix<C>>>,
}

pub fn bundle_curvature<C: Coefficient>(g: &BundleMetricJet<C>) -> Result<BundleCurvature<C>> {
    let n = g.dim;
    let g_inv = g.g.inverse("bundle metric G(0)")?;
    let eta: Vec<JetMatrix<C>> = (0..n)
        .map(|j| g_inv.mul(&g.g.differentiate(j)))
        .collect::<Result<_>>()?;
    let theta = eta
        .iter()
        .map(|e| {
            (0..n)
                .map(|j| e.differentiate(n + j).scale_coeff(&-C::one()))
                .collect()
        })
        .collect();
    Ok(BundleCurvature { eta, theta })
}

/// `ΛΘ_E` as an `r×r` matrix jet.
pub fn contracted_bundle_curvature<C: Coefficient>(
    g: &BundleMetricJet<C>,
    h: &MetricJet<C>,
) -> Result<JetMatrix<C>> {
    contract_matrix_valued(&bundle_curvature(g)?.theta, h)
}

/// `(s/2)I + ΛΘ_E` at the base point, the expected value of `b₁(0, 0)`.
pub fn predicted_b1<C: Coefficient>(phi: &PotentialJet<C>, g: &BundleMetricJet<C>) -> Result<Vec<C>> {
    let r = g.rank();
    let h = hermitian_metric(&polarize(&phi.truncate(4)));
    let s = scalar_curvature(&h)?.at_base();
    let half = s.mul_ref(&C::from_ratio(1, 2));
    let g2 = BundleMetricJet {
        dim: g.dim,
        g: g.g.truncate(2),
    };
    let lt = contracted_bundle_curvature(&g2, &h)?.constant_matrix();
    Ok((0..r * r)
        .map(|e| {
            let mut v = lt[e].clone();
            if e / r == e % r {
                v += &half;
            }
            v
        })
        .collect())
}

/// Evaluator for `(k/π)ⁿ e^{kψ(x, ȳ)} B(x, ȳ) G(x, ȳ)⁻¹`.
#[derive(Clone, Debug)]
pub struct TwistedKernelEvaluator {
    dim: usize,
    rank: usize,
    k: f64,
    b: Vec<JetMatrix<Complex64>>,
    g: JetMatrix<Complex64>,
    psi: Jet<Complex64>,
}

pub fn assemble_twisted_kernel<C: Coefficient>(
    seq: &CoefficientSequence<C>,
    psi: &PolarizedPhase<C>,
    g: &BundleMetricJet<C>,
    k: f64,
) -> Result<TwistedKernelEvaluator> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if seq.rank != g.rank() {
        return Err(Error::DimensionMismatch("sequence and bundle ranks differ".into()));
    }
    Ok(TwistedKernelEvaluator {
        dim: seq.dim,
        rank: seq.rank,
        k,
        b: seq.b.iter().map(|b| b.to_float()).collect(),
        g: g.g.to_float(),
        psi: psi.psi().to_float(),
    })
}

fn eval_matrix(m: &JetMatrix<Complex64>, p: &[Complex64]) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).eval_c64(p))
}

impl TwistedKernelEvaluator {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `K(x, ȳ) e^{−k(φ(x) + φ(y))/2}` as a row-major `r×r` matrix.
    pub fn normalized_kernel(&self, x: &[Complex64], y: &[Complex64]) -> Result<Vec<Complex64>> {
        let point = |a: &[Complex64], b: &[Complex64]| {
            let mut p = a.to_vec();
            p.extend(b.iter().map(|v| v.conj()));
            p
        };
        let p = point(x, y);
        let mut amp = nalgebra::DMatrix::<Complex64>::zeros(self.rank, self.rank);
        for (m, b) in self.b.iter().enumerate() {
            amp += eval_matrix(b, &p) * Complex64::new(self.k.powi(-(m as i32)), 0.0);
        }
        let g_inv = eval_matrix(&self.g, &p)
            .try_inverse()
            .ok_or_else(|| Error::SingularMatrix {
                context: "G(x, ȳ)".into(),
            })?;
        let phi_x = self.psi.eval_c64(&point(x, x)).re;
        let phi_y = self.psi.eval_c64(&point(y, y)).re;
        let phase = (self.psi.eval_c64(&p) - Complex64::new(0.5 * (phi_x + phi_y), 0.0)) * self.k;
        let pre = (self.k / std::f64::consts::PI).powi(self.dim as i32);
        let k = amp * g_inv * (phase.exp() * pre);
        Ok(k.transpose().iter().cloned().collect())
    }
}
