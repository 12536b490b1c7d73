use std::f64::consts::E;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{GrowthProfile, ProfileKind, Weight};
use super::sets::{measure, ExceptionalSet, MeasureKind, SetSample};
use super::GrowthParams;
use crate::error::{Error, Result};
use crate::stats::{fit_line, max_of, trailing_start};

/// Trailing slope of linear measure against `log R` above which the
/// measure is reported as unbounded.
pub const UNBOUNDED_SLOPE: f64 = 0.1;

fn evaluate<F>(points: Vec<f64>, f: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    points.into_par_iter().map(|x| Ok((x, f(x)?))).collect()
}

/// Points `x` of the profile grid with `x + shift` still sampled.
fn shiftable(profile: &GrowthProfile, shift: f64, from: f64) -> Vec<f64> {
    profile
        .xs()
        .iter()
        .copied()
        .filter(|&x| x >= from && x + shift <= profile.end())
        .collect()
}

fn check_shift(profile: &GrowthProfile, shift: f64) -> Result<()> {
    if shift >= profile.end() - profile.start() {
        return Err(Error::domain(format!(
            "shift {shift} exceeds the sampled span [{}, {}]",
            profile.start(),
            profile.end()
        )));
    }
    if profile.kind() == ProfileKind::Discrete && shift.fract() != 0.0 {
        return Err(Error::domain("discrete profiles need an integer shift"));
    }
    Ok(())
}

/// The set where `(T(r + s) − T(r)) / T(r) · h(r) ≥ η`, over grid points
/// where `h` is defined and `r + s` is sampled.
pub fn f_eta_set(profile: &GrowthProfile, weight: &Weight, params: &GrowthParams) -> Result<ExceptionalSet> {
    params.validate()?;
    let s = params.s;
    check_shift(profile, s)?;
    let min = weight.min_arg();
    let pts: Vec<f64> = shiftable(profile, s, min).into_iter().filter(|&x| x > min).collect();
    if pts.is_empty() {
        return Err(Error::domain("no grid point has both h(r) and T(r + s) defined"));
    }
    let values = evaluate(pts, |x| {
        let jump = profile.log_t(x + s)? - profile.log_t(x)?;
        Ok(jump.exp_m1() * weight.eval(x)?)
    })?;
    let samples = values
        .into_iter()
        .map(|(x, value)| SetSample {
            x,
            value,
            member: value >= params.eta,
        })
        .collect();
    Ok(ExceptionalSet::from_samples(profile.kind(), profile.xs(), samples))
}

/// Trailing-window behaviour of a series against a target value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trend {
    pub trailing_max: Option<f64>,
    /// Slope of `log |v − target|` against `log r` over the window.
    pub slope: Option<f64>,
    /// The series stays within the tolerance of the target over the
    /// window, or approaches it.
    pub settled: bool,
}

fn trend(series: &[(f64, f64)], target: f64, window: f64, tol: f64, one_sided: bool) -> Trend {
    let start = trailing_start(series.len(), window);
    let tail = &series[start..];
    let trailing_max = max_of(tail.iter().map(|p| p.1));
    let dev = |v: f64| if one_sided { v - target } else { (v - target).abs() };
    let within = tail.iter().all(|p| dev(p.1) <= tol);
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail
        .iter()
        .filter(|p| (p.1 - target).abs() > tol * 1e-3 && p.0 > 0.0)
        .map(|p| (p.0.ln(), (p.1 - target).abs().ln()))
        .unzip();
    let slope = if xs.len() >= 2 {
        fit_line(&xs, &ys).ok().map(|f| f.slope)
    } else {
        None
    };
    Trend {
        trailing_max,
        slope,
        settled: within || slope.map_or(xs.len() < 2, |s| s < 0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationVerdict {
    Consistent,
    AssumptionViolated,
    RelationViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRelationReport {
    pub params: GrowthParams,
    /// `(r, h(r) h(r h(r)) log T(r) / r)`.
    pub assumption: Vec<(f64, f64)>,
    pub assumption_trend: Trend,
    /// `(r, (T(r + s) − T(r)) h(r) / T(r) − ζ)` at points outside the
    /// large-increment set.
    pub residuals: Vec<(f64, f64)>,
    pub residual_trend: Trend,
    pub verdict: RelationVerdict,
}

/// Checks the growth assumption `limsup h(r) h(r h(r)) log T(r) / r = ζ`
/// and the relation `T(r + s) = T(r) + (ζ + o(1)) T(r) / h(r)` off the
/// large-increment set, on the trailing window of the profile grid.
pub fn growth_relation_check(
    profile: &GrowthProfile,
    weight: &Weight,
    params: &GrowthParams,
) -> Result<GrowthRelationReport> {
    params.validate()?;
    if !(params.eta > params.zeta) {
        return Err(Error::validation("eta must exceed zeta"));
    }
    if profile.start() < E {
        return Err(Error::domain(format!(
            "the weight h(r h(r)) needs r0 >= e; profile starts at {}",
            profile.start()
        )));
    }
    let s = params.s;
    check_shift(profile, s)?;
    let pts = shiftable(profile, s, profile.start());
    // (r, A(r), relative increment times h(r))
    let rows: Vec<(f64, f64, f64)> = pts
        .into_par_iter()
        .map(|r| {
            let h = weight.eval(r)?;
            let lt = profile.log_t(r)?;
            let jump = profile.log_t(r + s)? - lt;
            let a = h * weight.eval(r * h)? * lt / r;
            Ok((r, a, jump.exp_m1() * h))
        })
        .collect::<Result<_>>()?;
    let assumption: Vec<(f64, f64)> = rows.iter().map(|&(r, a, _)| (r, a)).collect();
    let residuals: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(_, _, q)| q < params.eta)
        .map(|&(r, _, q)| (r, q - params.zeta))
        .collect();
    let assumption_trend = trend(&assumption, params.zeta, params.window, params.abs_tol, true);
    let residual_trend = trend(&residuals, 0.0, params.window, params.abs_tol, false);
    let verdict = if !assumption_trend.settled {
        RelationVerdict::AssumptionViolated
    } else if !residual_trend.settled {
        RelationVerdict::RelationViolated
    } else {
        RelationVerdict::Consistent
    };
    Ok(GrowthRelationReport {
        params: *params,
        assumption,
        assumption_trend,
        residuals,
        residual_trend,
        verdict,
    })
}

/// Choices of `ξ` for the Borel-type set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiPreset {
    /// `ξ(x) = x^eps`.
    Power { eps: f64 },
    /// `ξ(x) = log x · (log log x)^(1 + eps)`.
    LogTimesLogLog { eps: f64 },
    /// `ξ(x) = (log x)^(1 + eps/3)`.
    LogPower { eps: f64 },
}

impl XiPreset {
    /// Parses `power`, `log-loglog` or `log-power` with the given `eps`.
    pub fn named(name: &str, eps: f64) -> Result<Self> {
        match name {
            "power" => Ok(XiPreset::Power { eps }),
            "log-loglog" => Ok(XiPreset::LogTimesLogLog { eps }),
            "log-power" => Ok(XiPreset::LogPower { eps }),
            other => Err(Error::validation(format!(
                "unknown xi preset `{other}`; expected power, log-loglog or log-power"
            ))),
        }
    }

    /// `ξ(x)` from `log x`; `None` where `ξ` is not positive.
    fn at_log(self, log_x: f64) -> Option<f64> {
        let v = match self {
            XiPreset::Power { eps } => (eps * log_x).exp(),
            XiPreset::LogTimesLogLog { eps } => {
                if log_x <= 1.0 {
                    return None;
                }
                log_x * log_x.ln().powf(1.0 + eps)
            }
            XiPreset::LogPower { eps } => {
                if log_x <= 0.0 {
                    return None;
                }
                log_x.powf(1.0 + eps / 3.0)
            }
        };
        (v > 0.0 && v.is_finite()).then_some(v)
    }
}

impl FromStr for XiPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        XiPreset::named(s, GrowthParams::default().epsilon)
    }
}

/// The set of `r` with `T(u + u / ξ(T(u))) ≥ C T(u)`, `u = r + |c|`,
/// over grid points whose shifted argument stays sampled. The sample
/// values are `log(T(u + u/ξ(T(u))) / T(u))`.
pub fn borel_xi_set(profile: &GrowthProfile, xi: XiPreset, params: &GrowthParams) -> Result<ExceptionalSet> {
    params.validate()?;
    if profile.kind() != ProfileKind::ContinuousSampled {
        return Err(Error::domain("the ξ-set is defined for continuous profiles"));
    }
    let c = params.c_abs;
    let pts = shiftable(profile, c, profile.start());
    let rows: Vec<Option<(f64, f64)>> = pts
        .into_par_iter()
        .map(|r| {
            let u = r + c;
            let lu = profile.log_t(u)?;
            let x = xi
                .at_log(lu)
                .ok_or_else(|| Error::domain(format!("ξ(T(u)) is not positive at r = {r}; start the grid later")))?;
            let target = u + u / x;
            if target > profile.end() {
                return Ok(None);
            }
            Ok(Some((r, profile.log_t(target)? - lu)))
        })
        .collect::<Result<_>>()?;
    let log_c = params.c_const.ln();
    let samples: Vec<SetSample> = rows
        .into_iter()
        .flatten()
        .map(|(x, value)| SetSample {
            x,
            value,
            member: value >= log_c,
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::domain("every shifted argument exits the sampled domain"));
    }
    Ok(ExceptionalSet::from_samples(profile.kind(), profile.xs(), samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum E0Verdict {
    MeasureAppearsBounded,
    MeasureAppearsUnbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E0Report {
    pub params: GrowthParams,
    pub set: ExceptionalSet,
    /// `(R, linear measure of the set within [r0, R])`.
    pub measure_by_r: Vec<(f64, f64)>,
    /// Slope of the measure against `log R` over the trailing window.
    pub trailing_slope: f64,
    pub verdict: E0Verdict,
}

/// The set `{r : T(r + |c|) ≥ C T(r)}` and the growth of its linear measure
/// with the truncation radius.
pub fn e0_linear_measure_scan(profile: &GrowthProfile, params: &GrowthParams) -> Result<E0Report> {
    params.validate()?;
    if !(params.c_abs > 0.0) {
        return Err(Error::validation("|c| must be positive"));
    }
    if profile.start() <= 0.0 {
        return Err(Error::domain("the scan needs a grid in (0, ∞)"));
    }
    let c = params.c_abs;
    check_shift(profile, c)?;
    let pts = shiftable(profile, c, profile.start());
    let values = evaluate(pts, |r| Ok(profile.log_t(r + c)? - profile.log_t(r)?))?;
    let log_c = params.c_const.ln();
    let samples: Vec<SetSample> = values
        .into_iter()
        .map(|(x, value)| SetSample {
            x,
            value,
            member: value >= log_c,
        })
        .collect();
    let (first, last) = (samples[0].x, samples[samples.len() - 1].x);
    let set = ExceptionalSet::from_samples(profile.kind(), profile.xs(), samples);
    let kind = match profile.kind() {
        ProfileKind::ContinuousSampled => MeasureKind::Linear,
        ProfileKind::Discrete => MeasureKind::DiscreteLogarithmic,
    };
    let rows = 64;
    let measure_by_r: Vec<(f64, f64)> = (0..rows)
        .map(|i| {
            let r = first * (last / first).powf(i as f64 / (rows - 1) as f64);
            let r = if i == rows - 1 { last } else { r };
            Ok((r, measure(&set, kind, r)?))
        })
        .collect::<Result<_>>()?;
    let start = trailing_start(measure_by_r.len(), params.window);
    let (xs, ys): (Vec<f64>, Vec<f64>) = measure_by_r[start..].iter().map(|&(r, m)| (r.ln(), m)).unzip();
    let trailing_slope = fit_line(&xs, &ys)?.slope;
    let verdict = if trailing_slope > UNBOUNDED_SLOPE {
        E0Verdict::MeasureAppearsUnbounded
    } else {
        E0Verdict::MeasureAppearsBounded
    };
    Ok(E0Report {
        params: *params,
        set,
        measure_by_r,
        trailing_slope,
        verdict,
    })
}
