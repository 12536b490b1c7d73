use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    characteristic_with, counting, dq_proximity_quadrature, Divisor, MeromorphicModel, NevanlinnaSample, QuadOptions,
};
use crate::error::{Error, Result};
use crate::stats::{fit_line, max_of, min_of, trailing_start};

pub const DEFAULT_WINDOW: f64 = 1.0 / 3.0;
const MIN_SAMPLES: usize = 16;

/// Order estimates from trailing-window extremes of `log T / log r` and
/// `log log T / log r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderIndicators {
    pub sigma: f64,
    pub lambda: f64,
    pub varsigma: f64,
    pub window: f64,
    pub window_start: usize,
    /// Least-squares slope of `log T` against `log r` over the window.
    pub log_t_slope: f64,
    /// Least-squares slope of `log log T` against `log r` over the window,
    /// where `T > e`.
    pub log_log_t_slope: Option<f64>,
}

fn check_samples(r_t: &[(f64, f64)]) -> Result<()> {
    if r_t.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            what: "characteristic samples",
            needed: MIN_SAMPLES,
            have: r_t.len(),
        });
    }
    if r_t.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::domain("characteristic samples must be positive"));
    }
    if r_t.iter().any(|p| !(p.0 > 1.0)) {
        return Err(Error::domain("order estimates need radii above 1"));
    }
    Ok(())
}

/// Order indicators from `(r, T(r))` pairs on an increasing grid.
pub fn order_indicators_from(r_t: &[(f64, f64)], window: f64) -> Result<OrderIndicators> {
    check_samples(r_t)?;
    let start = trailing_start(r_t.len(), window);
    let tail = &r_t[start..];
    let ratio = |p: &(f64, f64)| p.1.ln() / p.0.ln();
    let hyper = |p: &(f64, f64)| {
        let lt = p.1.ln();
        if lt > 1.0 {
            lt.ln() / p.0.ln()
        } else {
            0.0
        }
    };
    let xs: Vec<f64> = tail.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.1.ln()).collect();
    let log_t_slope = fit_line(&xs, &ys)?.slope;
    let (hx, hy): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|p| p.1.ln() > 1.0)
        .map(|p| (p.0.ln(), p.1.ln().ln()))
        .unzip();
    let log_log_t_slope = if hx.len() >= 2 {
        fit_line(&hx, &hy).ok().map(|f| f.slope)
    } else {
        None
    };
    let sigma = max_of(tail.iter().map(ratio)).expect("nonempty");
    let lambda = min_of(tail.iter().map(ratio)).expect("nonempty");
    let varsigma = max_of(tail.iter().map(hyper)).expect("nonempty").max(0.0);
    Ok(OrderIndicators {
        sigma,
        lambda,
        varsigma,
        window,
        window_start: start,
        log_t_slope,
        log_log_t_slope,
    })
}

pub fn order_indicators(samples: &[NevanlinnaSample], window: f64) -> Result<OrderIndicators> {
    let r_t: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.t)).collect();
    order_indicators_from(&r_t, window)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeficiencyReport {
    /// `1 − max N(r, 1/f) / T(r, f)` over the trailing window.
    pub deficiency: f64,
    /// `(r, N(r, 1/f) / T(r, f))` over the whole grid.
    pub ratios: Vec<(f64, f64)>,
    pub window: f64,
    pub window_start: usize,
}

/// Deficiency of the value zero estimated on a grid of radii.
pub fn deficiency_zero(
    model: &dyn MeromorphicModel,
    grid: &[f64],
    window: f64,
    opts: &QuadOptions,
) -> Result<DeficiencyReport> {
    if grid.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            what: "grid radii",
            needed: MIN_SAMPLES,
            have: grid.len(),
        });
    }
    let ratios: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&r| {
            let t = characteristic_with(model, r, opts)?.t;
            if !(t > 0.0) {
                return Err(Error::domain(format!("T(r, f) vanishes at r = {r}")));
            }
            Ok((r, counting(model, r, Divisor::Zeros)? / t))
        })
        .collect::<Result<_>>()?;
    let start = trailing_start(ratios.len(), window);
    let top = max_of(ratios[start..].iter().map(|p| p.1)).expect("nonempty");
    Ok(DeficiencyReport {
        deficiency: 1.0 - top,
        ratios,
        window,
        window_start: start,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma31Point {
    pub r: f64,
    pub dq_proximity: f64,
    #[serde(rename = "T")]
    pub t: f64,
    /// `dq_proximity · (log r)^(ν − ε) / T`.
    pub rho: f64,
    pub log_t: f64,
    /// `r / (log r)^(2 + ν)`.
    pub log_t_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma31Report {
    pub nu: f64,
    pub eps: f64,
    pub window: f64,
    pub points: Vec<Lemma31Point>,
    pub trailing_max: f64,
    /// Slope of `log ρ` against `log r` over the window, where `ρ > 0`.
    pub trend_slope: Option<f64>,
    /// `ρ` vanishes on the window or decreases across it.
    pub decreasing: bool,
    /// `log T` exceeds `r / (log r)^(2 + ν)` somewhere in the window.
    pub hypothesis_violated: bool,
}

/// The normalized difference-quotient proximity along a grid, with the
/// growth hypothesis `log T(r) ≤ r / (log r)^(2 + ν)` checked on the window.
pub fn lemma31_ratio(
    model: &dyn MeromorphicModel,
    c: Complex64,
    nu: f64,
    eps: f64,
    grid: &[f64],
    window: f64,
    opts: &QuadOptions,
) -> Result<Lemma31Report> {
    if !(eps > 0.0 && eps < nu) {
        return Err(Error::validation("need 0 < eps < nu"));
    }
    if grid.len() < 2 {
        return Err(Error::InsufficientData {
            what: "grid radii",
            needed: 2,
            have: grid.len(),
        });
    }
    if grid.iter().any(|&r| !(r > 1.0)) {
        return Err(Error::domain("the ratio needs radii above 1"));
    }
    let points: Vec<Lemma31Point> = grid
        .par_iter()
        .map(|&r| {
            let t = characteristic_with(model, r, opts)?.t;
            if !(t > 0.0) {
                return Err(Error::domain(format!("T(r, f) vanishes at r = {r}")));
            }
            let dq = dq_proximity_quadrature(model, c, r, opts)?.value;
            let lr = r.ln();
            Ok(Lemma31Point {
                r,
                dq_proximity: dq,
                t,
                rho: dq * lr.powf(nu - eps) / t,
                log_t: t.ln(),
                log_t_bound: r / lr.powf(2.0 + nu),
            })
        })
        .collect::<Result<_>>()?;
    let start = trailing_start(points.len(), window);
    let tail = &points[start..];
    let trailing_max = max_of(tail.iter().map(|p| p.rho)).expect("nonempty");
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|p| p.rho > 0.0)
        .map(|p| (p.r.ln(), p.rho.ln()))
        .unzip();
    let trend_slope = if xs.len() >= 2 {
        fit_line(&xs, &ys).ok().map(|f| f.slope)
    } else {
        None
    };
    let decreasing = trailing_max <= 1e-9 || trend_slope.is_some_and(|s| s < 0.0);
    let hypothesis_violated = tail.iter().any(|p| p.log_t > p.log_t_bound);
    Ok(Lemma31Report {
        nu,
        eps,
        window,
        points,
        trailing_max,
        trend_slope,
        decreasing,
        hypothesis_violated,
    })
}
