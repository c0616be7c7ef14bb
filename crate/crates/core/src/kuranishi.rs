//! Division map `θ(x, y, z)`, its inverse in `z`, the amplitude base `Δ₀`,
//! and a sampling check of the good-contour inequality.
//!
//! Jets in `3n` variables use the block layout `(x, y, z)` or `(x, y, θ)`.
//! Compositions need zero constant terms, so the `z`-inverse is taken for
//! the shifted map `θ' = θ − θ(0,0,0)`; derivatives in `θ` and `θ'` agree.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{PolarizedPhase, PotentialJet};
use crate::jet::{invert_map_with_params, Jet, JetMatrix, MultiIndex};
use crate::scalar::Coefficient;

fn binomial(n: u32, k: u32) -> i64 {
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// All `a ≤ g` componentwise, over the first `n` slots.
fn sub_indices(g: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(g.len())];
    for &gi in g {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=gi).map(move |a| {
                    let mut p = prefix.clone();
                    p.push(a);
                    p
                })
            })
            .collect();
    }
    out
}

/// `θᵢ(x, y, z) = ∫₀¹ ∂_{xᵢ}ψ(tx + (1−t)y, z) dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMap<C> {
    dim: usize,
    theta: Vec<Jet<C>>,
}

impl<C: Coefficient> ThetaMap<C> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Jet<C>] {
        &self.theta
    }

    pub fn trunc_degree(&self) -> u32 {
        self.theta[0].trunc_degree()
    }

    /// `θ(0, 0, 0)`, nonzero only when `φ` has linear terms.
    pub fn base_value(&self) -> Vec<C> {
        self.theta.iter().map(|t| t.constant_term()).collect()
    }

    /// `θ' = θ − θ(0,0,0)`.
    pub fn shifted(&self) -> Vec<Jet<C>> {
        self.theta
            .iter()
            .map(|t| {
                let mut s = t.clone();
                s.add_term(MultiIndex::zero(), &-t.constant_term());
                s
            })
            .collect()
    }

    /// Restriction `y ↦ x`, a jet in `(x, z)`.
    pub fn on_diagonal(&self) -> Vec<Jet<C>> {
        let n = self.dim;
        let map: Vec<usize> = (0..n).chain(0..n).chain(n..2 * n).collect();
        self.theta.iter().map(|t| t.relabel(2 * n, &map)).collect()
    }

    /// `θ'(x, x, z)` as jets in `(x, z)`.
    pub fn on_diagonal_shifted(&self) -> Vec<Jet<C>> {
        self.on_diagonal()
            .into_iter()
            .map(|mut t| {
                let c = t.constant_term();
                t.add_term(MultiIndex::zero(), &-c);
                t
            })
            .collect()
    }

    /// `θ·(x − y) − ψ(x, z) + ψ(y, z)`; vanishes identically.
    pub fn division_defect(&self, psi: &PolarizedPhase<C>) -> Result<Jet<C>> {
        let n = self.dim;
        let nv = 3 * n;
        let d = self.trunc_degree() + 1;
        let mut lhs = Jet::zero(nv, d);
        for (i, t) in self.theta.iter().enumerate() {
            let diff = &Jet::var(nv, d, i) - &Jet::var(nv, d, n + i);
            lhs = &lhs + &(&t.with_trunc(d) * &diff);
        }
        let px: Vec<usize> = (0..n).chain(2 * n..3 * n).collect();
        let py: Vec<usize> = (n..2 * n).chain(2 * n..3 * n).collect();
        let psi = psi.psi().truncate(d);
        Ok(&(&lhs - &psi.relabel(nv, &px)) + &psi.relabel(nv, &py))
    }
}

/// Exact termwise Beta integration of the segment average of `∂ψ`.
pub fn theta_map<C: Coefficient>(psi: &PolarizedPhase<C>) -> Result<ThetaMap<C>> {
    let n = psi.dim();
    let nv = 3 * n;
    let src = psi.psi();
    if src.trunc_degree() == 0 {
        return Err(Error::DegreeBudget {
            required: 1,
            available: 0,
        });
    }
    let d = src.trunc_degree() - 1;
    Jet::<C>::check_dims(nv, d)?;
    let theta = (0..n)
        .map(|i| {
            let grad = src.differentiate(i);
            let mut acc: Vec<(MultiIndex, C)> = Vec::new();
            for (key, c) in grad.terms() {
                let g = key.slice(0, n).exponents(n);
                let beta = key.slice(n, n).shift(2 * n);
                let total: u32 = g.iter().sum();
                for a in sub_indices(&g) {
                    let big_a: u32 = a.iter().sum();
                    let num: i64 = g.iter().zip(&a).map(|(&gj, &aj)| binomial(gj, aj)).product();
                    let den = (total as i64 + 1) * binomial(total, big_a);
                    let mut k = beta;
                    for j in 0..n {
                        k = k.with(j, a[j]).with(n + j, g[j] - a[j]);
                    }
                    acc.push((k, c.mul_ref(&C::from_ratio(num, den))));
                }
            }
            Jet::from_terms(nv, d, acc)
        })
        .collect();
    Ok(ThetaMap { dim: n, theta })
}

/// `z(x, y, θ')`: inverse of `z ↦ θ'(x, y, z)` with `x, y` as parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ZOfTheta<C> {
    pub z_map: Vec<Jet<C>>,
}

impl<C: Coefficient> ZOfTheta<C> {
    pub fn trunc_degree(&self) -> u32 {
        self.z_map[0].trunc_degree()
    }

    /// Arguments `(x, y, z(x, y, θ'))` for composing `(x, y, z)`-jets.
    pub fn substitution(&self) -> Vec<Jet<C>> {
        let nv = self.z_map[0].num_vars();
        let d = self.trunc_degree();
        let n = nv / 3;
        (0..2 * n)
            .map(|i| Jet::var(nv, d, i))
            .chain(self.z_map.iter().cloned())
            .collect()
    }
}

pub fn invert_theta<C: Coefficient>(theta: &ThetaMap<C>) -> Result<ZOfTheta<C>> {
    let z_map = invert_map_with_params(&theta.shifted(), 2 * theta.dim).map_err(|e| match e {
        Error::SingularJacobian => Error::NotPositive("θ_z(0) = ψ_xz(0) is singular".into()),
        other => other,
    })?;
    Ok(ZOfTheta { z_map })
}

/// `Δ₀(x, y, θ') = det ψ_yz(y, z) / det θ_z(x, y, z)` at `z = z(x, y, θ')`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeBase<C> {
    pub delta0: Jet<C>,
}

/// Restricts a `(x, y, θ)` jet to `y = x`, giving a jet in `(x, θ)`.
pub fn restrict_diagonal<C: Coefficient>(f: &Jet<C>) -> Jet<C> {
    let n = f.num_vars() / 3;
    let map: Vec<usize> = (0..n).chain(0..n).chain(n..2 * n).collect();
    f.relabel(2 * n, &map)
}

pub fn delta0<C: Coefficient>(
    psi: &PolarizedPhase<C>,
    theta: &ThetaMap<C>,
    z: &ZOfTheta<C>,
) -> Result<AmplitudeBase<C>> {
    let n = psi.dim();
    let nv = 3 * n;
    let dz = z.trunc_degree();
    let h = JetMatrix::from_fn(n, n, |i, j| psi.psi().differentiate(i).differentiate(n + j));
    let yz: Vec<Jet<C>> = (n..2 * n)
        .map(|i| Jet::var(nv, dz, i))
        .chain(z.z_map.iter().cloned())
        .collect();
    let num = h.compose(&yz)?.det()?;
    let theta_z = JetMatrix::from_fn(n, n, |i, j| theta.components()[i].differentiate(2 * n + j));
    let den = theta_z.compose(&z.substitution())?.det()?;
    let delta0 = &num * &den.invert_unit()?;

    let tol = 1e-9;
    let diag = restrict_diagonal(&delta0);
    if !diag.approx_eq(&Jet::one(2 * n, diag.trunc_degree()), tol) {
        return Err(Error::Inconsistent(format!(
            "Δ₀ restricted to y = x differs from 1 (max coefficient deviation {:.3e})",
            (&diag - &Jet::one(2 * n, diag.trunc_degree())).max_abs_coeff()
        )));
    }
    Ok(AmplitudeBase { delta0 })
}

/// Outcome of the structural identities for one potential.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `θ·(x − y) = ψ(x, z) − ψ(y, z)`.
    pub division: bool,
    /// `Δ₀(x, x, θ') = 1`.
    pub delta0_diagonal: bool,
    /// `θ'(x, y, z(x, y, θ')) = θ'`.
    pub theta_after_z: bool,
    /// `z(x, y, θ'(x, y, z)) = z`.
    pub z_after_theta: bool,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.division && self.delta0_diagonal && self.theta_after_z && self.z_after_theta
    }
}

/// Checks the division, diagonal and round-trip identities coefficientwise,
/// with tolerance `tol` in float mode (ignored in exact mode).
pub fn check_identities<C: Coefficient>(phi: &PotentialJet<C>, tol: f64) -> Result<IdentityReport> {
    let psi = crate::geometry::polarize(phi);
    let theta = theta_map(&psi)?;
    let z = invert_theta(&theta)?;
    let n = psi.dim();
    let nv = 3 * n;
    let defect = theta.division_defect(&psi)?;
    let division = defect.approx_eq(&Jet::zero(defect.num_vars(), defect.trunc_degree()), tol);

    let d = delta0(&psi, &theta, &z)?;
    let diag = restrict_diagonal(&d.delta0);
    let delta0_diagonal = diag.approx_eq(&Jet::one(2 * n, diag.trunc_degree()), tol);

    let shifted = theta.shifted();
    let subst = z.substitution();
    let mut theta_after_z = true;
    for (i, t) in shifted.iter().enumerate() {
        let back = t.compose(&subst)?;
        theta_after_z &= back.approx_eq(&Jet::var(nv, back.trunc_degree(), 2 * n + i), tol);
    }
    let dz = z.trunc_degree();
    let forward: Vec<Jet<C>> = (0..2 * n)
        .map(|i| Jet::var(nv, dz, i))
        .chain(shifted.iter().map(|t| t.truncate(t.trunc_degree().min(dz))))
        .collect();
    let mut z_after_theta = true;
    for (i, zi) in z.z_map.iter().enumerate() {
        let back = zi.compose(&forward)?;
        z_after_theta &= back.approx_eq(&Jet::var(nv, back.trunc_degree(), 2 * n + i), tol);
    }
    Ok(IdentityReport {
        division,
        delta0_diagonal,
        theta_after_z,
        z_after_theta,
    })
}

/// Settings for [`good_contour_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ContourCheckConfig {
    pub radius: f64,
    /// Defaults to half the smallest Levi eigenvalue.
    pub delta: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ContourCheckConfig {
    fn default() -> Self {
        ContourCheckConfig {
            radius: 0.3,
            delta: None,
            samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ContourReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest value of either inequality's left side minus right side.
    pub max_slack: f64,
    pub witness: Witness,
    pub radius: f64,
    pub delta: f64,
    pub seed: u64,
}

fn sample_ball(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Complex64> {
    loop {
        let v: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-r..r)).collect();
        if v.iter().map(|t| t * t).sum::<f64>() < r * r {
            return v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        }
    }
}

/// Samples pairs `x, y` in the ball of radius `r` and evaluates, with
/// `z = ȳ`,
/// `2Re θ·(x−y) + δ|x−y|² + φ(y) − φ(x)` and
/// `2Re ψ(x, ȳ) − φ(x) − φ(y) + δ|x−y|²`;
/// a positive value of either is a violation.
pub fn good_contour_check(
    phi: &PotentialJet<Complex64>,
    psi: &PolarizedPhase<Complex64>,
    theta: &ThetaMap<Complex64>,
    config: &ContourCheckConfig,
) -> ContourReport {
    let n = phi.dim();
    let delta = config.delta.unwrap_or_else(|| 0.5 * phi.min_levi_eigenvalue());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pairs: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..config.samples)
        .map(|_| {
            let x = sample_ball(&mut rng, n, config.radius);
            let y = sample_ball(&mut rng, n, config.radius);
            (x, y)
        })
        .collect();
    let slacks: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| {
            let yb: Vec<Complex64> = y.iter().map(|v| v.conj()).collect();
            let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum();
            let (px, py) = (phi.eval(x), phi.eval(y));
            let mut point = x.clone();
            point.extend_from_slice(y);
            point.extend_from_slice(&yb);
            let pairing: Complex64 = theta
                .components()
                .iter()
                .enumerate()
                .map(|(i, t)| t.eval_c64(&point) * (x[i] - y[i]))
                .sum();
            let s_theta = 2.0 * pairing.re + delta * dist2 + py - px;
            let s_psi = 2.0 * psi.eval(x, &yb).re - px - py + delta * dist2;
            s_theta.max(s_psi)
        })
        .collect();
    let tol = 1e-12;
    let violations = slacks.iter().filter(|&&s| s > tol).count();
    let (arg, max_slack) = slacks
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let as_pairs = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
    let witness = match pairs.get(arg) {
        Some((x, y)) => Witness {
            x: as_pairs(x),
            y: as_pairs(y),
        },
        None => Witness {
            x: Vec::new(),
            y: Vec::new(),
        },
    };
    ContourReport {
        samples: config.samples,
        violations,
        max_slack: if slacks.is_empty() { 0.0 } else { max_slack },
        witness,
        radius: config.radius,
        delta,
        seed: config.seed,
    }
}
