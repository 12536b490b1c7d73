//! Proximity, counting and characteristic functions of explicit meromorphic
//! models, computed by quadrature of `log |f|` over circles.

mod indicators;
mod models;
mod quadrature;

pub use indicators::{
    deficiency_zero, lemma31_ratio, order_indicators, order_indicators_from, DeficiencyReport, Lemma31Point,
    Lemma31Report, OrderIndicators, DEFAULT_WINDOW,
};
pub use models::{
    build_model, builtin_models, log_abs_sin, polynomial_roots, reciprocal, shifted, Constant, DivisorPoint, ExpExp,
    ExpPower, MeromorphicModel, Model, PoleComb, Rational, Reciprocal, Shifted, Sine, BUILTIN_MODELS,
};
pub use quadrature::{circle_mean, QuadOptions, Quadrature};

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::csv_err;

/// Radius inflation so that divisor points on `|z| = r` are counted.
const ON_CIRCLE: f64 = 1e-12;

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation(format!(
            "radius must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

fn on_circle(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

/// Quadrature of `log⁺ |f|` over `|z| = r`.
pub fn proximity_quadrature(model: &dyn MeromorphicModel, r: f64, opts: &QuadOptions) -> Result<Quadrature> {
    check_radius(r)?;
    circle_mean(|t| model.log_modulus(on_circle(r, t)).max(0.0), opts)
}

/// `m(r, f)`, the mean of `log⁺ |f|` over `|z| = r`.
pub fn proximity(model: &dyn MeromorphicModel, r: f64) -> Result<f64> {
    Ok(proximity_quadrature(model, r, &QuadOptions::default())?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divisor {
    Poles,
    Zeros,
}

/// Integrated counting function `N(r)` of the poles or the zeros.
pub fn counting(model: &dyn MeromorphicModel, r: f64, of: Divisor) -> Result<f64> {
    check_radius(r)?;
    let reach = r * (1.0 + ON_CIRCLE);
    let points = match of {
        Divisor::Poles => model.poles(reach),
        Divisor::Zeros => model.zeros(reach),
    };
    let mut total = 0.0;
    for (a, m) in points {
        if m == 0 {
            return Err(Error::domain("divisor multiplicities must be positive"));
        }
        let d = a.norm();
        if d > reach {
            continue;
        }
        total += m as f64 * if d == 0.0 { reach.ln() } else { (reach / d).ln() };
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NevanlinnaSample {
    pub r: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub quad_error: f64,
    pub quad_tolerance: f64,
    pub panels: usize,
}

pub fn characteristic_with(model: &dyn MeromorphicModel, r: f64, opts: &QuadOptions) -> Result<NevanlinnaSample> {
    let q = proximity_quadrature(model, r, opts)?;
    let n = counting(model, r, Divisor::Poles)?;
    Ok(NevanlinnaSample {
        r,
        m: q.value,
        n,
        t: q.value + n,
        quad_error: q.error_estimate,
        quad_tolerance: q.tolerance,
        panels: q.panels,
    })
}

/// `T(r, f) = m(r, f) + N(r, f)`.
pub fn characteristic(model: &dyn MeromorphicModel, r: f64) -> Result<NevanlinnaSample> {
    characteristic_with(model, r, &QuadOptions::default())
}

/// Characteristic samples over a grid, evaluated in parallel.
pub fn characteristic_sweep(
    model: &dyn MeromorphicModel,
    radii: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<NevanlinnaSample>> {
    radii.par_iter().map(|&r| characteristic_with(model, r, opts)).collect()
}

/// CSV with columns `r, m, N, T`.
pub fn write_samples_csv<W: Write>(samples: &[NevanlinnaSample], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["r", "m", "N", "T"]).map_err(csv_err)?;
    for s in samples {
        out.write_record([s.r.to_string(), s.m.to_string(), s.n.to_string(), s.t.to_string()])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn dq_proximity_quadrature(
    model: &dyn MeromorphicModel,
    c: Complex64,
    r: f64,
    opts: &QuadOptions,
) -> Result<Quadrature> {
    check_radius(r)?;
    circle_mean(
        |t| {
            let z = on_circle(r, t);
            (model.log_modulus(z + c) - model.log_modulus(z)).max(0.0)
        },
        opts,
    )
}

/// `m(r, f(z + c)/f(z))`.
pub fn dq_proximity(model: &dyn MeromorphicModel, c: Complex64, r: f64) -> Result<f64> {
    Ok(dq_proximity_quadrature(model, c, r, &QuadOptions::default())?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JensenCheck {
    pub r: f64,
    /// Mean of `log |f|` over `|z| = r`.
    pub circle_mean: f64,
    /// `log |a| + m log r + N(r, 1/f) − N(r, f)` for the leading term
    /// `a z^m` at the origin; reduces to `log |f(0)| + N(r, 1/f) − N(r, f)`
    /// when `f(0)` is finite and nonzero.
    pub predicted: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Compares the circle mean of `log |f|` with Jensen's formula, allowing
/// ten times the quadrature tolerance.
pub fn jensen_check(model: &dyn MeromorphicModel, r: f64, opts: &QuadOptions) -> Result<JensenCheck> {
    check_radius(r)?;
    let (log_a, _) = model
        .origin_expansion()
        .ok_or_else(|| Error::domain(format!("{} has no known expansion at 0", model.label())))?;
    let q = circle_mean(|t| model.log_modulus(on_circle(r, t)), opts)?;
    let zeros = counting(model, r, Divisor::Zeros)?;
    let poles = counting(model, r, Divisor::Poles)?;
    // The counting functions already carry the origin terms `± m log r`.
    let predicted = log_a + zeros - poles;
    let tolerance = 10.0 * q.tolerance;
    Ok(JensenCheck {
        r,
        circle_mean: q.value,
        predicted,
        tolerance,
        passes: (q.value - predicted).abs() <= tolerance,
    })
}

/// `(T(r − |c|, f), T(r, f(z + c)), T(r + |c|, f))`.
pub fn shift_bracket(model: &Model, c: Complex64, r: f64, opts: &QuadOptions) -> Result<(f64, f64, f64)> {
    let a = c.norm();
    if !(r > a) {
        return Err(Error::validation("r must exceed |c|"));
    }
    let moved = shifted(model, c);
    Ok((
        characteristic_with(model.as_ref(), r - a, opts)?.t,
        characteristic_with(moved.as_ref(), r, opts)?.t,
        characteristic_with(model.as_ref(), r + a, opts)?.t,
    ))
}
