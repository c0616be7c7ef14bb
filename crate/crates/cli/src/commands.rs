use std::path::Path;

use bergman_core::geometry::{polarize, scalar_curvature_at_base};
use bergman_core::io::{
    coefficient_json, coefficient_value, envelope, parse_bundle, parse_potential, potential_json, sequence_json,
    to_pretty, JsonCoefficient,
};
use bergman_core::kuranishi::{check_identities, good_contour_check, theta_map, ContourCheckConfig};
use bergman_core::oracle::sweep::{expansion_error_sweep, SweepConfig};
use bergman_core::random::{random_bundle_metric, rng};
use bergman_core::recursion::{assemble_kernel, check_budget, required_potential_degree};
use bergman_core::twisted::{expand_twisted, predicted_b1};
use bergman_core::{BundleMetricJet, Coefficient, Error, GaussianRational, PotentialJet};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::{resolve_output, write_artifact, Common, ContourArgs, ExpandArgs, Failure, Mode, TwistArgs, ValidateArgs};

impl Common {
    fn mode_or(&self, default: Mode) -> Mode {
        self.mode.unwrap_or(default)
    }

    fn config_json(&self, command: &str, mode: Mode) -> Value {
        json!({
            "command": command,
            "model": self.model.map(|m| m.to_string()),
            "file": self.file.as_ref().map(|p| p.display().to_string()),
            "n": self.n,
            "order": self.order,
            "degree": self.degree,
            "mode": mode.name(),
            "seed": self.seed,
            "validity_radius": self.radius,
        })
    }

    fn check(&self) -> Result<(), Failure> {
        if self.model.is_none() && self.file.is_none() {
            return Err(Failure::Config("one of --model or --file is required".into()));
        }
        if self.n == 0 || self.n > 6 {
            return Err(Failure::Config(format!("--n must be between 1 and 6, got {}", self.n)));
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Failure::Config("--radius must be positive".into()));
        }
        Ok(())
    }

    fn potential<C: Coefficient>(&self, degree: u32) -> Result<PotentialJet<C>, Failure> {
        self.check()?;
        check_budget(self.order, self.degree)?;
        match (&self.model, &self.file) {
            (Some(model), _) => Ok(PotentialJet::model(*model, self.n, degree)?),
            (None, Some(path)) => Ok(parse_potential(&read(path)?, degree)?),
            (None, None) => unreachable!("checked above"),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn emit(common: &Common, default_name: &str, value: &Value) -> Result<(), Failure> {
    write_artifact(resolve_output(common.output.as_deref(), default_name).as_deref(), &to_pretty(value))
}

fn parse_point(values: &[f64], n: usize) -> Result<Vec<Complex64>, Failure> {
    if values.is_empty() {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    if values.len() != 2 * n {
        return Err(Failure::Config(format!(
            "--point needs {} numbers (re,im per coordinate), got {}",
            2 * n,
            values.len()
        )));
    }
    Ok(values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

pub fn expand(args: &ExpandArgs) -> Result<(), Failure> {
    match args.common.mode_or(Mode::Exact) {
        Mode::Exact => expand_in::<GaussianRational>(args, Mode::Exact),
        Mode::Float => expand_in::<Complex64>(args, Mode::Float),
    }
}

fn expand_in<C: JsonCoefficient>(args: &ExpandArgs, mode: Mode) -> Result<(), Failure> {
    let c = &args.common;
    let phi = c.potential::<C>(required_potential_degree(c.order, c.degree))?;
    let seq = bergman_core::expand(&phi, c.order, c.degree)?;
    let mut result = sequence_json(&seq, c.degree);
    if let Some(k) = args.k {
        let x = parse_point(&args.point, phi.dim())?;
        let sample = assemble_kernel(&seq, &polarize(&phi), k, c.radius)?.bergman_function(&x);
        result["bergman_function"] = json!({
            "k": k,
            "point": x.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "value": sample.value.re,
            "outside_validity_radius": sample.outside_radius,
        });
    }
    let mut config = c.config_json("expand", mode);
    config["k"] = json!(args.k);
    emit(c, "expand.json", &envelope(config, result))
}

/// `a:b:s` → `a, a+s, …, ≤ b`.
pub fn parse_k_range(text: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::Config(format!("--k-range expects start:end:step with positive integers, got `{text}`"));
    let parts: Vec<u32> = text
        .split(':')
        .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (a, b, s) = match parts.as_slice() {
        [a, b] => (*a, *b, 1),
        [a, b, s] => (*a, *b, *s),
        _ => return Err(bad()),
    };
    if a == 0 || s == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(s as usize).collect())
}

pub fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let c = &args.common;
    c.check()?;
    if c.mode == Some(Mode::Exact) {
        return Err(Failure::Config("validate uses quadrature oracles and requires --mode float".into()));
    }
    let Some(model) = c.model else {
        return Err(Failure::Config("validate needs a built-in --model with a known oracle".into()));
    };
    check_budget(c.order, 0)?;
    let ks = parse_k_range(&args.k_range)?;
    let sweep = expansion_error_sweep(model, c.n, c.order, &ks, &SweepConfig::default())?;
    let csv_path = resolve_output(c.output.as_deref(), "validate.csv");
    let summary_path = args
        .summary
        .clone()
        .or_else(|| csv_path.as_ref().map(|p| p.with_extension("json")));
    write_artifact(csv_path.as_deref(), &sweep.to_csv())?;
    let mut config = c.config_json("validate", Mode::Float);
    config["k_range"] = json!(args.k_range);
    let summary = envelope(config, serde_json::to_value(&sweep).expect("sweep serializes"));
    match summary_path {
        Some(p) => write_artifact(Some(&p), &to_pretty(&summary)),
        None => {
            eprint!("{}", to_pretty(&summary));
            Ok(())
        }
    }
}

pub fn geometry(c: &Common) -> Result<(), Failure> {
    match c.mode_or(Mode::Exact) {
        Mode::Exact => geometry_in::<GaussianRational>(c, Mode::Exact),
        Mode::Float => geometry_in::<Complex64>(c, Mode::Float),
    }
}

fn geometry_in<C: JsonCoefficient>(c: &Common, mode: Mode) -> Result<(), Failure> {
    let phi = c.potential::<C>(c.degree.max(6))?;
    let s = scalar_curvature_at_base(&phi)?;
    let tol = if C::EXACT { 0.0 } else { 1e-10 };
    let identities = check_identities(&phi, tol)?;
    let result = json!({
        "dimension": phi.dim(),
        "levi_form": phi.levi_form().iter().map(coefficient_value).collect::<Vec<_>>(),
        "min_levi_eigenvalue": phi.min_levi_eigenvalue(),
        "scalar_curvature": coefficient_value(&s),
        "scalar_curvature_exact": coefficient_json(&s),
        "predicted_b1": coefficient_value(&s.mul_ref(&C::from_ratio(1, 2))),
        "identities": identities,
        "potential": potential_json(&phi),
    });
    emit(c, "geometry.json", &envelope(c.config_json("geometry", mode), result))?;
    if identities.all_hold() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("structural identities failed: {identities:?}")))
    }
}

pub fn twist(args: &TwistArgs) -> Result<(), Failure> {
    match args.common.mode_or(Mode::Exact) {
        Mode::Exact => twist_in::<GaussianRational>(args, Mode::Exact),
        Mode::Float => twist_in::<Complex64>(args, Mode::Float),
    }
}

fn twist_in<C: JsonCoefficient>(args: &TwistArgs, mode: Mode) -> Result<(), Failure> {
    let c = &args.common;
    let d = required_potential_degree(c.order, c.degree);
    let phi = c.potential::<C>(d)?;
    let g: BundleMetricJet<C> = match (&args.bundle, args.rank) {
        (Some(path), _) => parse_bundle(&read(path)?, d)?,
        (None, Some(rank)) if rank > 0 => random_bundle_metric(&mut rng(c.seed), phi.dim(), rank, d)?,
        (None, Some(_)) => return Err(Failure::Config("--rank must be positive".into())),
        (None, None) => BundleMetricJet::trivial(phi.dim(), 1, d),
    };
    let seq = expand_twisted(&phi, &g, c.order, c.degree)?;
    let mut result = sequence_json(&seq, c.degree);
    if c.order >= 1 {
        let predicted = predicted_b1(&phi, &g)?;
        result["predicted_b1"] = json!(predicted.iter().map(coefficient_value).collect::<Vec<_>>());
        let tol = if C::EXACT { 0.0 } else { 1e-10 };
        let agrees = seq.base_values()[1].iter().zip(&predicted).all(|(a, b)| a.approx_eq(b, tol));
        result["b1_matches_prediction"] = json!(agrees);
    }
    let mut config = c.config_json("twist", mode);
    config["bundle"] = json!(args.bundle.as_ref().map(|p| p.display().to_string()));
    config["rank"] = json!(g.rank());
    emit(c, "twist.json", &envelope(config, result))
}

pub fn contour_check(args: &ContourArgs) -> Result<(), Failure> {
    let c = &args.common;
    if c.mode == Some(Mode::Exact) {
        return Err(Failure::Config("contour-check samples in floating point and requires --mode float".into()));
    }
    let phi = c.potential::<Complex64>(c.degree.max(8))?;
    let psi = polarize(&phi);
    let theta = theta_map(&psi)?;
    let cfg = ContourCheckConfig {
        radius: c.radius,
        delta: args.delta,
        samples: args.samples,
        seed: c.seed,
    };
    if cfg.delta.is_some_and(|d| d.is_nan() || d < 0.0) {
        return Err(Failure::Core(Error::InvalidInput("--delta must be nonnegative".into())));
    }
    let report = good_contour_check(&phi, &psi, &theta, &cfg);
    let mut config = c.config_json("contour-check", Mode::Float);
    config["samples"] = json!(args.samples);
    config["delta"] = json!(args.delta);
    emit(c, "contour-check.json", &envelope(config, serde_json::to_value(&report).expect("report serializes")))?;
    if report.violations == 0 {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} of {} samples violate the contour inequality",
            report.violations, report.samples
        )))
    }
}
