//! Least-squares fits and trailing-window helpers used by the finite-data
//! surrogates for limits, limsups and liminfs.

use serde::Serialize;

use crate::error::{Error, Result};

/// Result of an ordinary least-squares line fit `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "points for a line fit",
            needed: 2,
            have: n,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("line fit over a single abscissa"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        points: n,
    })
}

/// First index of the trailing window covering `fraction` of `len` items.
/// The window always holds at least one item when `len > 0`.
pub fn trailing_start(len: usize, fraction: f64) -> usize {
    let take = ((len as f64) * fraction.clamp(0.0, 1.0)).ceil() as usize;
    len - take.clamp(1.min(len), len)
}

pub fn max_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().fold(None, |m, v| match m {
        None => Some(v),
        Some(m) => Some(m.max(v)),
    })
}

pub fn min_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().fold(None, |m, v| match m {
        None => Some(v),
        Some(m) => Some(m.min(v)),
    })
}
