use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::orbit::csv_err;
use crate::stats::fit_line;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    ContinuousSampled,
    Discrete,
}

/// Non-decreasing positive samples of `T` on a grid of radii or on
/// consecutive integers.
///
/// Samples are stored as `log T` so that profiles such as `exp(e^r)` stay
/// representable; between samples `log T` is interpolated linearly, which
/// keeps `T` monotone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthProfile {
    kind: ProfileKind,
    xs: Vec<f64>,
    log_t: Vec<f64>,
}

impl GrowthProfile {
    pub fn from_log_samples(kind: ProfileKind, xs: Vec<f64>, log_t: Vec<f64>) -> Result<Self> {
        if xs.len() != log_t.len() {
            return Err(Error::validation("profile abscissae and values differ in length"));
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientData {
                what: "profile samples",
                needed: 2,
                have: xs.len(),
            });
        }
        if xs.iter().chain(&log_t).any(|v| !v.is_finite()) {
            return Err(Error::validation("profile samples must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("profile abscissae must increase strictly"));
        }
        if log_t.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("profile values must be non-decreasing"));
        }
        if kind == ProfileKind::Discrete && (xs[0].fract() != 0.0 || xs.windows(2).any(|w| w[1] - w[0] != 1.0)) {
            return Err(Error::validation("discrete profiles need consecutive integer indices"));
        }
        Ok(GrowthProfile { kind, xs, log_t })
    }

    pub fn from_samples(kind: ProfileKind, xs: Vec<f64>, ts: &[f64]) -> Result<Self> {
        if ts.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::validation("profile values must be positive"));
        }
        GrowthProfile::from_log_samples(kind, xs, ts.iter().map(|t| t.ln()).collect())
    }

    /// Samples `log T` given in closed form on a grid.
    pub fn sample_log(grid: &GridSpec, log_t: impl Fn(f64) -> f64) -> Result<Self> {
        let xs = grid.points();
        let ys = xs.iter().map(|&r| log_t(r)).collect();
        GrowthProfile::from_log_samples(ProfileKind::ContinuousSampled, xs, ys)
    }

    /// Discrete profile `T_n` for `n = n0, …, n1`, given as `log T_n`.
    pub fn discrete_log(n0: i64, n1: i64, log_t: impl Fn(i64) -> f64) -> Result<Self> {
        let xs = (n0..=n1).map(|n| n as f64).collect();
        let ys = (n0..=n1).map(log_t).collect();
        GrowthProfile::from_log_samples(ProfileKind::Discrete, xs, ys)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_t
    }

    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    pub fn end(&self) -> f64 {
        *self.xs.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `log T(x)`; `x` must lie in the sampled domain, and be an index for
    /// discrete profiles.
    pub fn log_t(&self, x: f64) -> Result<f64> {
        if !(x >= self.start() && x <= self.end()) {
            return Err(Error::domain(format!(
                "{x} lies outside the sampled domain [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        match self.kind {
            ProfileKind::Discrete => {
                if x.fract() != 0.0 {
                    return Err(Error::domain(format!("{x} is not an index")));
                }
                Ok(self.log_t[(x - self.start()) as usize])
            }
            ProfileKind::ContinuousSampled => {
                let i = self.xs.partition_point(|&v| v <= x);
                if i == self.xs.len() {
                    return Ok(self.log_t[i - 1]);
                }
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let (y0, y1) = (self.log_t[i - 1], self.log_t[i]);
                Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }

    /// Reads a two-column CSV with a header row, `(r, T)` or `(n, T_n)`.
    pub fn from_csv<R: Read>(reader: R, kind: ProfileKind) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let (mut xs, mut ts) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() < 2 {
                return Err(Error::Parse("profile rows need two columns".into()));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{s}` in profile")))
            };
            xs.push(parse(&rec[0])?);
            ts.push(parse(&rec[1])?);
        }
        GrowthProfile::from_samples(kind, xs, &ts)
    }

    /// Writes `(r, T)` or `(n, T_n)`; `T` overflows to `inf` for huge profiles,
    /// so `log T` is written alongside.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let x = match self.kind {
            ProfileKind::ContinuousSampled => "r",
            ProfileKind::Discrete => "n",
        };
        out.write_record([x, "T", "log_T"]).map_err(csv_err)?;
        for (xv, lt) in self.xs.iter().zip(&self.log_t) {
            out.write_record([xv.to_string(), lt.exp().to_string(), lt.to_string()])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// The increasing weight `h` of the growth lemmas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    /// `h(r) = (log r)^(1 + eps)`, defined for `r > 1`.
    LogPower { eps: f64 },
    /// Piecewise-linear interpolation of user samples `(r, h(r))`.
    Table { points: Vec<(f64, f64)> },
}

impl Default for Weight {
    fn default() -> Self {
        Weight::LogPower { eps: 0.1 }
    }
}

impl Weight {
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::validation("weight table needs at least 2 rows"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1)) {
            return Err(Error::validation("weight table must increase in r and in h"));
        }
        if !(points[0].1 > 0.0) {
            return Err(Error::validation("weight values must be positive"));
        }
        Ok(Weight::Table { points })
    }

    /// Smallest argument for which the weight is defined.
    pub fn min_arg(&self) -> f64 {
        match self {
            Weight::LogPower { .. } => 1.0,
            Weight::Table { points } => points[0].0,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        match self {
            Weight::LogPower { eps } => {
                if !(r > 1.0) {
                    return Err(Error::domain(format!("(log r)^(1+eps) needs r > 1, got {r}")));
                }
                Ok(r.ln().powf(1.0 + eps))
            }
            Weight::Table { points } => {
                let (first, last) = (points[0].0, points[points.len() - 1].0);
                if !(r >= first && r <= last) {
                    return Err(Error::domain(format!(
                        "weight table covers [{first}, {last}], asked for {r}"
                    )));
                }
                let i = points.partition_point(|p| p.0 <= r).min(points.len() - 1).max(1);
                let ((x0, y0), (x1, y1)) = (points[i - 1], points[i]);
                Ok(y0 + (y1 - y0) * (r - x0) / (x1 - x0))
            }
        }
    }

    /// `∫ dt / (t h(t))` over the table range, with the decay exponent of
    /// `1/h` against `log t` fitted over the last third of the table. The
    /// integral converges only if that exponent is below −1; `slow_decay`
    /// flags exponents at or above −1.05. Finite data cannot settle
    /// convergence, so no verdict is given. `None` for presets.
    pub fn integrability(&self) -> Option<Integrability> {
        let Weight::Table { points } = self else {
            return None;
        };
        let mut integral = 0.0;
        for w in points.windows(2) {
            let ((a, ha), (b, hb)) = (w[0], w[1]);
            integral += 0.5 * (1.0 / (a * ha) + 1.0 / (b * hb)) * (b - a);
        }
        let start = crate::stats::trailing_start(points.len(), 1.0 / 3.0);
        let tail: Vec<_> = points[start..].iter().filter(|p| p.0 > 1.0).collect();
        let decay_exponent = if tail.len() >= 2 {
            let xs: Vec<f64> = tail.iter().map(|p| p.0.ln().ln()).collect();
            let ys: Vec<f64> = tail.iter().map(|p| -p.1.ln()).collect();
            fit_line(&xs, &ys).ok().map(|f| f.slope)
        } else {
            None
        };
        Some(Integrability {
            truncated_integral: integral,
            decay_exponent,
            slow_decay: decay_exponent.is_none_or(|e| e >= -1.05),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integrability {
    pub truncated_integral: f64,
    pub decay_exponent: Option<f64>,
    pub slow_decay: bool,
}
