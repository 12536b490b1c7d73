//! Adaptive Simpson quadrature for means over the circle `θ ∈ [0, 2π)`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadOptions {
    /// Relative tolerance; the absolute target is `tol · max(1, mean |g|)`.
    pub tol: f64,
    pub initial_panels: usize,
    /// Evaluation budget per quadrature.
    pub max_evals: usize,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-6,
            initial_panels: 64,
            max_evals: 4_000_000,
            max_depth: 48,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions {
            tol,
            ..QuadOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::validation("quadrature tolerance must be positive"));
        }
        if self.initial_panels < 1 || self.max_evals < 3 * self.initial_panels {
            return Err(Error::validation("quadrature budget too small"));
        }
        Ok(())
    }
}

/// A circle mean with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    /// Absolute tolerance that was targeted.
    pub tolerance: f64,
    pub panels: usize,
    pub evaluations: usize,
}

const NUDGES: [f64; 4] = [1e-9, -1e-9, 1e-7, -1e-7];

/// `g(θ)`, moved off isolated points where it is not finite.
fn sample<G: Fn(f64) -> f64>(g: &G, theta: f64) -> f64 {
    let v = g(theta);
    if v.is_finite() {
        return v;
    }
    NUDGES
        .iter()
        .map(|d| g(theta + d))
        .find(|v| v.is_finite())
        .unwrap_or(f64::NAN)
}

struct PanelResult {
    integral: f64,
    error: f64,
    panels: usize,
    evals: usize,
    exhausted: bool,
}

fn simpson(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    f: [f64; 3],
    eps: f64,
    opts: &QuadOptions,
    budget: usize,
) -> PanelResult {
    let mut out = PanelResult {
        integral: 0.0,
        error: 0.0,
        panels: 0,
        evals: 0,
        exhausted: false,
    };
    let whole = simpson(b - a, f[0], f[1], f[2]);
    let mut stack = vec![(a, b, f, whole, eps, 0u32)];
    while let Some((a, b, [fa, fm, fb], s, eps, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let fl = sample(g, 0.5 * (a + m));
        let fr = sample(g, 0.5 * (m + b));
        out.evals += 2;
        let left = simpson(m - a, fa, fl, fm);
        let right = simpson(b - m, fm, fr, fb);
        let diff = left + right - s;
        let converged = diff.abs() <= 15.0 * eps;
        if converged || depth >= opts.max_depth || out.evals >= budget || !diff.is_finite() {
            out.integral += left + right + diff / 15.0;
            out.error += diff.abs() / 15.0;
            out.panels += 1;
            out.exhausted |= !converged && out.evals >= budget;
            continue;
        }
        stack.push((m, b, [fm, fr, fb], right, 0.5 * eps, depth + 1));
        stack.push((a, m, [fa, fl, fm], left, 0.5 * eps, depth + 1));
    }
    out
}

/// `(1/2π) ∫_0^{2π} g(θ) dθ`, adaptively refined from uniform panels that
/// are processed in parallel.
pub fn circle_mean<G>(g: G, opts: &QuadOptions) -> Result<Quadrature>
where
    G: Fn(f64) -> f64 + Sync,
{
    opts.validate()?;
    let n = opts.initial_panels;
    let h = TAU / n as f64;
    let nodes: Vec<f64> = (0..2 * n)
        .into_par_iter()
        .map(|i| sample(&g, 0.5 * h * i as f64))
        .collect();
    // Periodic: node 2n is node 0.
    let node = |i: usize| nodes[i % (2 * n)];
    let scale = nodes.iter().map(|v| v.abs()).sum::<f64>() / (2 * n) as f64;
    if !scale.is_finite() {
        return Err(Error::Accuracy {
            estimate: f64::NAN,
            bound: f64::INFINITY,
            tolerance: opts.tol,
        });
    }
    let tolerance = opts.tol * scale.max(1.0);
    let eps = tolerance * h;
    let budget = opts.max_evals / n;
    let parts: Vec<PanelResult> = (0..n)
        .into_par_iter()
        .map(|k| {
            let a = h * k as f64;
            adapt(
                &g,
                a,
                a + h,
                [node(2 * k), node(2 * k + 1), node(2 * k + 2)],
                eps,
                opts,
                budget,
            )
        })
        .collect();
    let integral: f64 = parts.iter().map(|p| p.integral).sum();
    let error: f64 = parts.iter().map(|p| p.error).sum::<f64>() / TAU;
    let q = Quadrature {
        value: integral / TAU,
        error_estimate: error,
        tolerance,
        panels: parts.iter().map(|p| p.panels).sum(),
        evaluations: 2 * n + parts.iter().map(|p| p.evals).sum::<usize>(),
    };
    if !q.value.is_finite() || parts.iter().any(|p| p.exhausted) || error > tolerance {
        return Err(Error::Accuracy {
            estimate: q.value,
            bound: error,
            tolerance,
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_periodic_means() {
        let q = circle_mean(|t| 3.0 + t.cos(), &QuadOptions::default()).unwrap();
        assert!((q.value - 3.0).abs() < 1e-10);
        let q = circle_mean(|t| t.sin().abs(), &QuadOptions::default()).unwrap();
        assert!((q.value - 2.0 / std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn log_singularity_on_the_circle() {
        // mean of log|1 − e^{iθ}| is 0; the integrand is −∞ at θ = 0.
        let q = circle_mean(|t| (2.0 - 2.0 * t.cos()).sqrt().ln(), &QuadOptions::default()).unwrap();
        assert!(q.value.abs() < 1e-5, "{}", q.value);
    }

    #[test]
    fn budget_exhaustion_is_an_accuracy_error() {
        let opts = QuadOptions {
            max_evals: 200,
            tol: 1e-14,
            ..QuadOptions::default()
        };
        let err = circle_mean(|t| (40.0 * t).sin().abs().sqrt(), &opts).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }
}
