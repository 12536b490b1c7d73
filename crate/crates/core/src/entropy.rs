//! Iterates of an equation as rational functions of the initial value, and
//! algebraic entropy from their degree sequence.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbit::DiscreteEquation;
use crate::polyrat::{DegreeSequence, RationalFunction};
use crate::stats::{fit_line, trailing_start};

pub const DEFAULT_MAX_DEGREE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolicIterates {
    pub n0: i64,
    /// `iterates[0]` is the identity; `iterates[j + 1] = R(n0 + j, iterates[j])`.
    pub iterates: Vec<RationalFunction>,
    pub degrees: DegreeSequence,
    /// Set to `j` when `d_j` exceeded the degree cap and iteration stopped
    /// with `iterates[j]` as the last entry.
    pub capped_at: Option<usize>,
}

/// Composes the maps `R(n0), R(n0 + 1), …` symbolically, `j_max` times,
/// cancelling common factors at every step.
pub fn symbolic_iterates(eq: &DiscreteEquation, n0: i64, j_max: usize, max_degree: usize) -> Result<SymbolicIterates> {
    if j_max < 1 {
        return Err(Error::validation("J must be at least 1"));
    }
    let mut iterates = vec![RationalFunction::identity()];
    let mut degrees = vec![1usize];
    let mut capped_at = None;
    for j in 0..j_max {
        let n = n0 + j as i64;
        let map = eq.map_at(n).map_err(|e| at_step(e, j))?;
        let prev = iterates.last().expect("nonempty");
        let next = map.compose(prev).map_err(|e| at_step(e, j))?;
        let d = next.degree();
        let bound = map.degree() * degrees[j];
        assert!(d <= bound, "degree {d} of iterate {} exceeds bound {bound}", j + 1);
        iterates.push(next);
        degrees.push(d);
        if d > max_degree {
            capped_at = Some(j + 1);
            break;
        }
    }
    Ok(SymbolicIterates {
        n0,
        iterates,
        degrees: DegreeSequence(degrees),
        capped_at,
    })
}

fn at_step(e: Error, j: usize) -> Error {
    match e {
        Error::Degenerate(msg) => Error::Degenerate(format!("iterate {}: {msg}", j + 1)),
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub entropy: f64,
    /// RMS residual of the fit; 0 for the constant short-circuit.
    pub residual: f64,
    pub window_start: usize,
}

/// Least-squares slope of `log d_j` against `j` over the trailing half.
pub fn algebraic_entropy(degrees: &DegreeSequence) -> Result<EntropyEstimate> {
    let d = degrees.as_slice();
    if d.len() < 4 {
        return Err(Error::InsufficientData {
            what: "degrees",
            needed: 4,
            have: d.len(),
        });
    }
    let start = trailing_start(d.len(), 0.5);
    let tail = &d[start..];
    if tail.contains(&0) {
        return Err(Error::Degenerate("an iterate collapsed to a constant".into()));
    }
    if tail.iter().all(|&v| v == tail[0]) {
        return Ok(EntropyEstimate {
            entropy: 0.0,
            residual: 0.0,
            window_start: start,
        });
    }
    let xs: Vec<f64> = (start..d.len()).map(|j| j as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&v| (v as f64).ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(EntropyEstimate {
        entropy: fit.slope,
        residual: fit.residual,
        window_start: start,
    })
}

/// The JSON artifact of an entropy scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub n0: i64,
    pub degrees: DegreeSequence,
    pub entropy: f64,
    pub capped_at: Option<usize>,
    pub residual: f64,
}

pub fn entropy_report(eq: &DiscreteEquation, n0: i64, j_max: usize, max_degree: usize) -> Result<EntropyReport> {
    let it = symbolic_iterates(eq, n0, j_max, max_degree)?;
    let est = algebraic_entropy(&it.degrees)?;
    Ok(EntropyReport {
        n0,
        degrees: it.degrees,
        entropy: est.entropy,
        capped_at: it.capped_at,
        residual: est.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::ExactRational;
    use crate::orbit::{builtin_equation, iterate_orbit, DEFAULT_BIT_BUDGET};
    use crate::polyrat::{poly_gcd, Polynomial};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn degrees_of(name: &str, j: usize) -> Vec<usize> {
        let b = builtin_equation(name).unwrap();
        symbolic_iterates(&b.equation, b.equation.n0(), j, DEFAULT_MAX_DEGREE)
            .unwrap()
            .degrees
            .0
    }

    #[test]
    fn degree_sequence_examples() {
        assert_eq!(degrees_of("squaring", 5), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(degrees_of("riccati", 10), vec![1; 11]);
        assert_eq!(degrees_of("quadratic-n", 4), vec![1, 2, 4, 8, 16]);

        let b = builtin_equation("quadratic-n").unwrap();
        let it = symbolic_iterates(&b.equation, 1, 4, DEFAULT_MAX_DEGREE).unwrap();
        for f in &it.iterates {
            assert!(poly_gcd(f.numerator(), f.denominator()).unwrap().is_constant());
        }
        assert_eq!(it.iterates[0], RationalFunction::identity());
    }

    #[test]
    fn degree_cap_is_reported() {
        let b = builtin_equation("squaring").unwrap();
        let it = symbolic_iterates(&b.equation, 0, 20, 64).unwrap();
        assert_eq!(it.capped_at, Some(7));
        assert_eq!(*it.degrees.0.last().unwrap(), 128);
    }

    #[test]
    fn degeneracy_names_the_step() {
        // R(0, y) = 1 collapses the generic point; R(1, y) = 1/(y - 1) then
        // has a pole there.
        let eq = DiscreteEquation::new(
            vec![Polynomial::from_ints(&[1])],
            vec![Polynomial::from_ints(&[1, -2]), Polynomial::from_ints(&[0, 1])],
            0,
        )
        .unwrap();
        let err = symbolic_iterates(&eq, 0, 3, DEFAULT_MAX_DEGREE).unwrap_err();
        assert!(matches!(err, Error::Degenerate(m) if m.starts_with("iterate 2")));
    }

    #[test]
    fn entropy_examples() {
        let pow2 = DegreeSequence((0..12).map(|j| 1usize << j).collect());
        assert!((algebraic_entropy(&pow2).unwrap().entropy - LN_2).abs() < 1e-12);

        let ones = DegreeSequence(vec![1; 11]);
        assert_eq!(algebraic_entropy(&ones).unwrap().entropy, 0.0);

        let linear = DegreeSequence((0..=64).map(|j| j + 1).collect());
        assert!(algebraic_entropy(&linear).unwrap().entropy.abs() < 0.1);

        assert!(matches!(
            algebraic_entropy(&DegreeSequence(vec![1, 2, 4])),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn entropy_of_pure_powers() {
        for base in [1usize, 2, 3] {
            let d = DegreeSequence((0..20).map(|j| base.pow(j)).collect());
            let e = algebraic_entropy(&d).unwrap().entropy;
            assert!((e - (base as f64).ln()).abs() < 1e-9, "base {base}: {e}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // Symbolic iterates evaluated at y0 agree with exact numeric orbits.
        #[test]
        fn symbolic_matches_numeric(
            name in prop::sample::select(vec!["squaring", "riccati", "riccati-fib", "quadratic-recip", "shift"]),
            num in -20i64..20, den in 1i64..12,
        ) {
            let b = builtin_equation(name).unwrap();
            let y0 = ExactRational::new(num, den).unwrap();
            let it = symbolic_iterates(&b.equation, 0, 4, DEFAULT_MAX_DEGREE).unwrap();
            let orbit = iterate_orbit(&b.equation, &y0, 0, 4, DEFAULT_BIT_BUDGET).unwrap();
            for (j, v) in orbit.values.iter().enumerate() {
                if let Some(s) = it.iterates[j].eval(&y0) {
                    prop_assert_eq!(&s, v);
                }
            }
        }
    }
}
