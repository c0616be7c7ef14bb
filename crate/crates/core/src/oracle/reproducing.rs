//! Numerical reproducing integral over the contour `z = ȳ` in one variable:
//!
//! `I₀(x) = (k/π) ∫_{|y|<1} e^{kθ·(x−y)} u(y) χ(|y|) θ_z dA(y)`,
//!
//! compared with `u(x)`. The residual `|u(x) − I₀| e^{−kφ(x)/2}` must decay
//! exponentially in `k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::fit_line;
use super::kernels::FiniteKKernel;
use super::quadrature::CompositeRule;
use crate::error::{Error, Result};
use crate::geometry::Model;

/// `1` on `[0, ½]`, quintic smoothstep down to `0` at `1`.
pub fn chi(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let s = 2.0 * (1.0 - r);
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// Residuals at or below this level are treated as exact cancellation.
pub const RESIDUAL_FLOOR: f64 = 1e-13;

/// Polynomial `u(y) = Σ c_j y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn monomial(j: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); j + 1];
        coeffs[j] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn eval(&self, y: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproducingConfig {
    /// Gauss–Legendre nodes per radial panel.
    pub radial_order: usize,
    /// Panels on each of `[0, ½]` and `[½, 1]`.
    pub radial_panels: usize,
    pub angular_nodes: usize,
}

impl Default for ReproducingConfig {
    fn default() -> Self {
        ReproducingConfig {
            radial_order: 24,
            radial_panels: 4,
            angular_nodes: 128,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproducingResult {
    pub k: f64,
    pub integral: [f64; 2],
    pub residual: f64,
}

/// `(kθ·(x−y), θ_z)` on `z = ȳ` for the models with closed-form `θ`.
fn contour_integrand(model: Model, k: f64, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64)> {
    let yb = y.conj();
    match model {
        Model::Flat => Ok((k * yb * (x - y), Complex64::new(1.0, 0.0))),
        Model::FubiniStudy => {
            let a = 1.0 + x * yb;
            let b = 1.0 + y * yb;
            Ok((k * (a / b).ln(), 1.0 / (a * b)))
        }
        other => Err(Error::Unsupported(format!(
            "reproducing check needs a closed-form θ; got {other}"
        ))),
    }
}

/// `I₀(x)` and the weighted residual for one `k`.
pub fn reproducing_check(
    u: &Polynomial,
    model: Model,
    x: Complex64,
    k: f64,
    config: &ReproducingConfig,
) -> Result<ReproducingResult> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    if x.norm() >= 0.5 {
        return Err(Error::InvalidInput(format!("x = {x} lies outside the inner ball")));
    }
    let mut radial = CompositeRule::new(0.0, 0.5, config.radial_panels, config.radial_order);
    let outer = CompositeRule::new(0.5, 1.0, config.radial_panels, config.radial_order);
    radial.nodes.extend(outer.nodes);
    radial.weights.extend(outer.weights);
    let m = config.angular_nodes;
    let mut total = Complex64::new(0.0, 0.0);
    for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
        let mut ring = Complex64::new(0.0, 0.0);
        for a in 0..m {
            let y = Complex64::from_polar(r, 2.0 * PI * a as f64 / m as f64);
            let (phase, jac) = contour_integrand(model, k, x, y)?;
            ring += phase.exp() * jac * u.eval(y);
        }
        total += ring * (w * r * chi(r) * 2.0 * PI / m as f64);
    }
    let integral = total * (k / PI);
    let phi_x = model.radial_profile(x.norm_sqr());
    let residual = (u.eval(x) - integral).norm() * (-0.5 * k * phi_x).exp();
    Ok(ReproducingResult {
        k,
        integral: [integral.re, integral.im],
        residual,
    })
}

/// Residuals over a `k` sweep with an exponential-rate fit.
#[derive(Clone, Debug, Serialize)]
pub struct ReproducingSweep {
    pub points: Vec<ReproducingResult>,
    /// Every residual sits at the rounding floor.
    pub at_floor: bool,
    /// Strictly decreasing residuals.
    pub monotone: bool,
    /// `−d ln(residual)/dk` from a least-squares fit.
    pub rate: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl ReproducingSweep {
    /// Decay at rate at least `min_rate`, or exact cancellation throughout.
    pub fn decays(&self, min_rate: f64) -> bool {
        self.at_floor || (self.monotone && self.rate.is_some_and(|r| r >= min_rate))
    }
}

pub fn reproducing_sweep(
    u: &Polynomial,
    model: Model,
    x: Complex64,
    ks: &[f64],
    config: &ReproducingConfig,
) -> Result<ReproducingSweep> {
    let points = ks
        .iter()
        .map(|&k| reproducing_check(u, model, x, k, config))
        .collect::<Result<Vec<_>>>()?;
    let at_floor = points.iter().all(|p| p.residual <= RESIDUAL_FLOOR);
    let monotone = points.windows(2).all(|w| w[1].residual < w[0].residual);
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.residual > 0.0)
        .map(|p| (p.k, p.residual.ln()))
        .unzip();
    let fit = fit_line(&xs, &ys);
    Ok(ReproducingSweep {
        points,
        at_floor,
        monotone,
        rate: fit.map(|f| -f.slope),
        fit_residual: fit.map(|f| f.residual),
    })
}

/// `∫ K(x, y) y^j e^{−kφ(y)} φ_{yȳ} dA(y)` over the disc of radius `radius`.
pub fn kernel_applied_to_monomial(
    kernel: &FiniteKKernel,
    j: usize,
    x: Complex64,
    radius: f64,
    config: &ReproducingConfig,
) -> Complex64 {
    let rule = CompositeRule::new(0.0, radius, 8 * config.radial_panels, config.radial_order);
    let m = config.angular_nodes.max(2 * j + 8);
    let model = kernel.profile();
    let mut total = Complex64::new(0.0, 0.0);
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = r * r;
        // e^{−kφ(y)/2} is absorbed by the normalized kernel; the other half stays here
        let radial = w * r * (-0.5 * kernel.k * model.radial_profile(t)).exp() * model.radial_volume_density(t);
        for a in 0..m {
            let y = Complex64::from_polar(r, 2.0 * PI * a as f64 / m as f64);
            let kxy = kernel.normalized_kernel(&[x], &[y]);
            total += kxy * y.powu(j as u32) * radial * (2.0 * PI / m as f64);
        }
    }
    total * (0.5 * kernel.k * model.radial_profile(x.norm_sqr())).exp()
}
