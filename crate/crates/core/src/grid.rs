//! Radius grids written as `a:b:geometric:k` or `a:b:linear:k`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Geometric,
    Linear,
}

/// `count` points from `start` to `end` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub spacing: Spacing,
    pub count: usize,
}

impl GridSpec {
    pub fn new(start: f64, end: f64, spacing: Spacing, count: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || !(start < end) {
            return Err(Error::validation(format!(
                "grid needs finite start < end, got {start}..{end}"
            )));
        }
        if count < 2 {
            return Err(Error::validation("grid needs at least 2 points"));
        }
        if spacing == Spacing::Geometric && start <= 0.0 {
            return Err(Error::validation("geometric grid needs a positive start"));
        }
        Ok(GridSpec {
            start,
            end,
            spacing,
            count,
        })
    }

    pub fn geometric(start: f64, end: f64, count: usize) -> Result<Self> {
        GridSpec::new(start, end, Spacing::Geometric, count)
    }

    pub fn linear(start: f64, end: f64, count: usize) -> Result<Self> {
        GridSpec::new(start, end, Spacing::Linear, count)
    }

    /// Geometric grid with `per_decade` points per factor of ten.
    pub fn per_decade(start: f64, end: f64, per_decade: usize) -> Result<Self> {
        let decades = (end / start).log10();
        let count = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
        GridSpec::geometric(start, end, count)
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut pts: Vec<f64> = (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.end - self.start) * t,
                    Spacing::Geometric => self.start * (self.end / self.start).powf(t),
                }
            })
            .collect();
        pts[0] = self.start;
        pts[self.count - 1] = self.end;
        pts
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, kind, k] = parts[..] else {
            return Err(Error::Parse(format!(
                "grid `{s}` is not of the form a:b:geometric:k or a:b:linear:k"
            )));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in grid `{s}`")))
        };
        let spacing = match kind {
            "geometric" | "geom" => Spacing::Geometric,
            "linear" | "lin" => Spacing::Linear,
            other => return Err(Error::Parse(format!("unknown grid spacing `{other}`"))),
        };
        let count = k
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad point count `{k}` in grid `{s}`")))?;
        GridSpec::new(num(a)?, num(b)?, spacing, count)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.spacing {
            Spacing::Geometric => "geometric",
            Spacing::Linear => "linear",
        };
        write!(f, "{}:{}:{}:{}", self.start, self.end, kind, self.count)
    }
}

impl Serialize for GridSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
