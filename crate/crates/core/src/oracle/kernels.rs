//! Finite-`k` Bergman kernels for radial weights.
//!
//! For a radial weight the monomials are orthogonal, so the kernel is
//! `K_k(x, y) = Σ_α x^α ȳ^α / ‖x^α‖²` and only the norms are needed. All
//! norms are held as logarithms.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::{log_sum_exp, CompositeRule};
use crate::error::{Error, Result};
use crate::geometry::Model;

/// `ln m!` for `m = 0..=up_to`.
pub fn ln_factorials(up_to: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(0.0);
    for m in 1..=up_to {
        out.push(out[m - 1] + (m as f64).ln());
    }
    out
}

/// Multi-indices in `n` variables with total degree at most `d`.
pub fn indices_up_to(n: usize, d: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in indices_up_to(n - 1, d - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

/// Monomial basis with known norms for the weight `e^{−kφ}`, `φ = f(|x|²)`.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteKKernel {
    pub model: String,
    pub dim: usize,
    pub k: f64,
    basis: Vec<Vec<u32>>,
    log_norms: Vec<f64>,
    #[serde(skip)]
    profile: Model,
    /// Relative change of the norms under panel doubling, when computed by quadrature.
    pub drift: Option<f64>,
}

impl FiniteKKernel {
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn log_norms(&self) -> &[f64] {
        &self.log_norms
    }

    pub fn profile(&self) -> Model {
        self.profile
    }

    pub fn basis_norms(&self) -> Vec<f64> {
        self.log_norms.iter().map(|l| l.exp()).collect()
    }

    fn log_abs_powers(&self, x: &[Complex64], alpha: &[u32]) -> Option<f64> {
        let mut acc = 0.0;
        for (xi, &a) in x.iter().zip(alpha) {
            if a > 0 {
                if xi.norm() == 0.0 {
                    return None;
                }
                acc += a as f64 * xi.norm().ln();
            }
        }
        Some(acc)
    }

    fn phi(&self, x: &[Complex64]) -> f64 {
        self.profile.radial_profile(x.iter().map(|v| v.norm_sqr()).sum())
    }

    /// `ln B_k(x)`.
    pub fn log_bergman_function(&self, x: &[Complex64]) -> f64 {
        let terms = self.basis.iter().zip(&self.log_norms).filter_map(|(a, ln)| {
            self.log_abs_powers(x, a).map(|l| 2.0 * l - ln)
        });
        log_sum_exp(terms) - self.k * self.phi(x)
    }

    /// `B_k(x) = K_k(x, x) e^{−kφ(x)}`.
    pub fn bergman_function(&self, x: &[Complex64]) -> f64 {
        self.log_bergman_function(x).exp()
    }

    /// `K_k(x, y) e^{−k(φ(x) + φ(y))/2}`.
    pub fn normalized_kernel(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let shift = -0.5 * self.k * (self.phi(x) + self.phi(y));
        let terms: Vec<(f64, f64)> = self
            .basis
            .iter()
            .zip(&self.log_norms)
            .filter_map(|(a, ln)| {
                let lx = self.log_abs_powers(x, a)?;
                let ly = self.log_abs_powers(y, a)?;
                let phase: f64 = a
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| e as f64 * (x[i].arg() - y[i].arg()))
                    .sum();
                Some((lx + ly - ln + shift, phase))
            })
            .collect();
        let m = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = terms
            .iter()
            .map(|(l, p)| Complex64::from_polar((l - m).exp(), *p))
            .sum();
        s * m.exp()
    }
}

/// CPⁿ with the Fubini–Study weight: `‖x^α‖² = πⁿ α! (k − |α|)! / (k + n)!`.
pub fn exact_cpn_kernel(n: usize, k: u32) -> FiniteKKernel {
    let lf = ln_factorials(k as usize + n);
    let basis = indices_up_to(n, k as usize);
    let log_norms = basis
        .iter()
        .map(|a| {
            let s: usize = a.iter().map(|&e| e as usize).sum();
            n as f64 * std::f64::consts::PI.ln()
                + a.iter().map(|&e| lf[e as usize]).sum::<f64>()
                + lf[k as usize - s]
                - lf[k as usize + n]
        })
        .collect();
    FiniteKKernel {
        model: format!("CP{n}"),
        dim: n,
        k: k as f64,
        basis,
        log_norms,
        profile: Model::FubiniStudy,
        drift: None,
    }
}

pub fn exact_cp1_kernel(k: u32) -> FiniteKKernel {
    exact_cpn_kernel(1, k)
}

/// Radial weight `e^{−k f(|x|²)}` against `density(|x|²)·φ_{xx̄} dA` in one variable.
#[derive(Clone)]
pub struct RadialWeight {
    pub profile: Model,
    pub density_name: String,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight")
            .field("profile", &self.profile)
            .field("density", &self.density_name)
            .finish()
    }
}

impl RadialWeight {
    pub fn new(profile: Model) -> Self {
        RadialWeight {
            profile,
            density_name: "1".into(),
            density: Arc::new(|_| 1.0),
        }
    }

    /// Multiplies the volume form by `density(|x|²)`.
    pub fn with_density(
        mut self,
        name: impl Into<String>,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.density_name = name.into();
        self.density = Arc::new(density);
        self
    }

    pub fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureConfig {
    /// Disc radius `R`.
    pub radius: f64,
    /// Highest monomial degree; defaults to `3k + 30`.
    pub basis_degree: Option<usize>,
    pub panels: usize,
    pub order: usize,
    /// Largest tolerated relative drift of the norms under panel doubling.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            radius: 4.0,
            basis_degree: None,
            panels: 64,
            order: 20,
            tolerance: 1e-10,
        }
    }
}

fn radial_log_norms(weight: &RadialWeight, k: f64, rule: &CompositeRule, degree: usize) -> Vec<f64> {
    // ln of w·r·e^{−kf}·vol·density and ln r² at every node
    let (base, log_r2): (Vec<f64>, Vec<f64>) = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&r, &w)| {
            let t = r * r;
            let (f, _, _) = weight.profile.radial_derivatives(t);
            let vol = weight.profile.radial_volume_density(t) * weight.density(t);
            (w.ln() + r.ln() - k * f + vol.ln(), t.ln())
        })
        .unzip();
    let two_pi = (2.0 * std::f64::consts::PI).ln();
    (0..=degree)
        .into_par_iter()
        .map(|j| {
            two_pi + log_sum_exp(base.iter().zip(&log_r2).map(|(b, l)| b + j as f64 * l))
        })
        .collect()
}

/// Norms of `1, x, …, x^M` on the disc of radius `R` by composite
/// Gauss–Legendre quadrature, checked against a run with twice the panels.
pub fn quadrature_kernel(weight: &RadialWeight, k: f64, config: &QuadratureConfig) -> Result<FiniteKKernel> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if config.radius.is_nan() || config.radius <= 0.0 || config.panels == 0 || config.order == 0 {
        return Err(Error::InvalidInput("quadrature radius, panels and order must be positive".into()));
    }
    let degree = config.basis_degree.unwrap_or(3 * k.ceil() as usize + 30);
    let coarse = CompositeRule::new(0.0, config.radius, config.panels, config.order);
    let fine = CompositeRule::new(0.0, config.radius, 2 * config.panels, config.order);
    let a = radial_log_norms(weight, k, &coarse, degree);
    let b = radial_log_norms(weight, k, &fine, degree);
    let drift = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).exp_m1().abs())
        .fold(0.0, f64::max);
    if drift.is_nan() || drift > config.tolerance {
        return Err(Error::QuadratureUnresolved {
            drift,
            tolerance: config.tolerance,
        });
    }
    Ok(FiniteKKernel {
        model: format!("{}·density({})", weight.profile, weight.density_name),
        dim: 1,
        k,
        basis: (0..=degree as u32).map(|j| vec![j]).collect(),
        log_norms: b,
        profile: weight.profile,
        drift: Some(drift),
    })
}

/// `∫ B_k ω` over CP¹ in the affine chart, via `|x| = tan t`.
pub fn total_mass_cp1(kernel: &FiniteKKernel, panels: usize) -> f64 {
    let rule = CompositeRule::new(0.0, std::f64::consts::FRAC_PI_2, panels, 20);
    2.0 * std::f64::consts::PI
        * rule.integrate(|t| {
            let x = [Complex64::new(t.tan(), 0.0)];
            kernel.bergman_function(&x) * t.sin() * t.cos()
        })
}
