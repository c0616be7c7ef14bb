//! On-diagonal comparison of the truncated expansion `B_k^{(N)}(0)` with an
//! oracle `B_k(0)` over a range of `k`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fit_line;
use super::kernels::{exact_cpn_kernel, quadrature_kernel, QuadratureConfig, RadialWeight};
use crate::error::{Error, Result};
use crate::geometry::{Model, PotentialJet};
use crate::recursion::{expand, required_potential_degree};
use crate::scalar::{Coefficient, GaussianRational};

/// Relative errors at or below this level are excluded from the slope fit.
pub const ERROR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub quadrature: QuadratureConfig,
    /// Radii along the first axis where `B_k/kⁿ` is sampled.
    pub sample_radii: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            quadrature: QuadratureConfig::default(),
            sample_radii: vec![0.0, 0.25, 0.5, 1.0],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub k: u32,
    pub oracle: f64,
    pub expansion: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// Largest `B_k(x)/kⁿ` over the sample radii.
    pub max_ratio: f64,
    /// Quadrature drift under panel doubling, for quadrature oracles.
    pub drift: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub model: String,
    pub dim: usize,
    pub order: usize,
    /// `b_m(0)` used by the expansion.
    pub base_values: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Fitted `d ln(rel_error) / d ln k`.
    pub slope: Option<f64>,
    pub fit_residual: Option<f64>,
    pub max_ratio: f64,
    pub max_drift: Option<f64>,
    pub runtime_seconds: f64,
}

impl SweepResult {
    /// `k,oracle_value,expansion_value,rel_error` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,oracle_value,expansion_value,rel_error\n");
        for p in &self.points {
            writeln!(out, "{},{:e},{:e},{:e}", p.k, p.oracle, p.expansion, p.rel_error).unwrap();
        }
        out
    }
}

/// `(B_k(0), max_x B_k(x)/kⁿ, drift)` from the model's oracle.
fn oracle_values(model: Model, dim: usize, k: u32, config: &SweepConfig) -> Result<(f64, f64, Option<f64>)> {
    let kn = (k as f64).powi(dim as i32);
    let points: Vec<Vec<Complex64>> = config
        .sample_radii
        .iter()
        .map(|&r| {
            let mut x = vec![Complex64::new(0.0, 0.0); dim];
            x[0] = Complex64::new(r, 0.0);
            x
        })
        .collect();
    let kernel = match model {
        Model::Flat => {
            let b = (k as f64 / PI).powi(dim as i32);
            return Ok((b, b / kn, None));
        }
        Model::FubiniStudy => exact_cpn_kernel(dim, k),
        Model::RadialQuartic { .. } if dim == 1 => {
            quadrature_kernel(&RadialWeight::new(model), k as f64, &config.quadrature)?
        }
        Model::RadialQuartic { .. } => {
            return Err(Error::Unsupported(format!(
                "no oracle for {model} in dimension {dim}"
            )))
        }
    };
    let b0 = kernel.bergman_function(&vec![Complex64::new(0.0, 0.0); dim]);
    let max_ratio = points
        .iter()
        .map(|x| kernel.bergman_function(x) / kn)
        .fold(b0 / kn, f64::max);
    Ok((b0, max_ratio, kernel.drift))
}

/// Relative error of `B_k^{(N)}(0)` against the oracle for each `k`.
pub fn expansion_error_sweep(
    model: Model,
    dim: usize,
    order: usize,
    ks: &[u32],
    config: &SweepConfig,
) -> Result<SweepResult> {
    let start = Instant::now();
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidInput("k values must be positive and nonempty".into()));
    }
    let phi = PotentialJet::<GaussianRational>::model(
        model,
        dim,
        required_potential_degree(order, 0),
    )?;
    let seq = expand(&phi, order, 0)?;
    let base_values: Vec<f64> = seq.scalar_base_values().iter().map(|c| c.to_c64().re).collect();
    let points = ks
        .par_iter()
        .map(|&k| {
            let (oracle, max_ratio, drift) = oracle_values(model, dim, k, config)?;
            let kf = k as f64;
            let expansion = (kf / PI).powi(dim as i32) * seq.base_sum(kf)[0].re;
            let abs_error = (oracle - expansion).abs();
            Ok(SweepPoint {
                k,
                oracle,
                expansion,
                abs_error,
                rel_error: abs_error / oracle,
                max_ratio,
                drift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.rel_error > ERROR_FLOOR)
        .map(|p| ((p.k as f64).ln(), p.rel_error.ln()))
        .unzip();
    let fit = fit_line(&xs, &ys);
    let max_drift = points.iter().filter_map(|p| p.drift).reduce(f64::max);
    Ok(SweepResult {
        model: model.to_string(),
        dim,
        order,
        base_values,
        max_ratio: points.iter().map(|p| p.max_ratio).fold(0.0, f64::max),
        points,
        slope: fit.map(|f| f.slope),
        fit_residual: fit.map(|f| f.residual),
        max_drift,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp1_first_order_is_exact() {
        let ks: Vec<u32> = (1..=100).step_by(9).collect();
        let r = expansion_error_sweep(Model::FubiniStudy, 1, 1, &ks, &SweepConfig::default()).unwrap();
        assert!(r.points.iter().all(|p| p.rel_error < 1e-12));
        assert!(r.slope.is_none());
    }

    #[test]
    fn cp1_leading_order_slope() {
        let ks: Vec<u32> = (10..=100).step_by(10).collect();
        let r = expansion_error_sweep(Model::FubiniStudy, 1, 0, &ks, &SweepConfig::default()).unwrap();
        for p in &r.points {
            assert!((p.rel_error - 1.0 / (p.k as f64 + 1.0)).abs() < 1e-12);
        }
        assert!((r.slope.unwrap() + 1.0).abs() < 0.1);
        assert!(r.fit_residual.unwrap() < 0.1);
    }

    #[test]
    fn flat_is_exact_at_every_order() {
        let r = expansion_error_sweep(Model::Flat, 2, 2, &[5, 10], &SweepConfig::default()).unwrap();
        assert!(r.points.iter().all(|p| p.rel_error < 1e-14));
        assert!((r.max_ratio - 1.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn radial_quartic_second_order() {
        let ks: Vec<u32> = (10..=40).step_by(10).collect();
        let r = expansion_error_sweep(Model::RadialQuartic { c: 0.1 }, 1, 2, &ks, &SweepConfig::default()).unwrap();
        assert!(r.slope.unwrap() <= -2.5, "{:?}", r.slope);
        assert!(r.max_drift.unwrap() < 1e-10);
        assert_eq!(r.to_csv().lines().count(), 5);
    }

    #[test]
    fn quartic_needs_dimension_one() {
        let err = expansion_error_sweep(Model::RadialQuartic { c: 0.1 }, 2, 0, &[10], &SweepConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
