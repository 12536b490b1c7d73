use std::fmt;

use serde::{Deserialize, Serialize};

use super::{poly_gcd, Polynomial};
use crate::error::{Error, Result};
use crate::heights::ExactRational;

/// A coprime quotient `numerator / denominator` with monic denominator.
///
/// The normalization makes the representation unique, so equality is
/// structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalFunction {
    /// Cancels the gcd and rescales so the denominator is monic.
    pub fn normalize(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator polynomial"));
        }
        if num.is_zero() {
            return Ok(RationalFunction::constant(ExactRational::zero()));
        }
        let g = poly_gcd(&num, &den)?;
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        let lc = den.leading_coeff().expect("nonzero").clone();
        if lc.is_one() {
            return Ok(RationalFunction {
                numerator: num,
                denominator: den,
            });
        }
        let inv = lc.recip()?;
        Ok(RationalFunction {
            numerator: num.scale(&inv),
            denominator: den.scale(&inv),
        })
    }

    pub fn identity() -> Self {
        RationalFunction {
            numerator: Polynomial::var(),
            denominator: Polynomial::one(),
        }
    }

    pub fn constant(c: ExactRational) -> Self {
        RationalFunction {
            numerator: Polynomial::constant(c),
            denominator: Polynomial::one(),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            denominator: Polynomial::one(),
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    /// `max(deg numerator, deg denominator)`; constants (including zero)
    /// have degree 0.
    pub fn degree(&self) -> usize {
        let dn = self.numerator.degree().unwrap_or(0);
        let dd = self.denominator.degree().unwrap_or(0);
        dn.max(dd)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    /// Value at `x`, or `None` when `x` is a pole.
    pub fn eval(&self, x: &ExactRational) -> Option<ExactRational> {
        let d = self.denominator.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(&self.numerator.eval(x) / &d)
    }

    /// The composition `self ∘ inner`, normalized.
    pub fn compose(&self, inner: &RationalFunction) -> Result<RationalFunction> {
        let d = self.degree();
        if d == 0 {
            return Ok(self.clone());
        }
        // Homogenize: P(A/B) = Σ p_i A^i B^(d-i) / B^d, same for Q; B^d cancels.
        let a_pows = powers(&inner.numerator, d);
        let b_pows = powers(&inner.denominator, d);
        let homog = |p: &Polynomial| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(Polynomial::zero(), |acc, (i, c)| {
                    &acc + &(&a_pows[i] * &b_pows[d - i]).scale(c)
                })
        };
        let num = homog(&self.numerator);
        let den = homog(&self.denominator);
        if den.is_zero() {
            return Err(Error::Degenerate(format!(
                "composition of {self} with {inner} divides by zero"
            )));
        }
        RationalFunction::normalize(num, den)
    }
}

fn powers(p: &Polynomial, d: usize) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(Polynomial::one());
    for i in 1..=d {
        let next = &out[i - 1] * p;
        out.push(next);
    }
    out
}

/// `outer ∘ inner`; the free-function form of [`RationalFunction::compose`].
pub fn substitute(outer: &RationalFunction, inner: &RationalFunction) -> Result<RationalFunction> {
    outer.compose(inner)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_constant() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({})/({})", self.numerator, self.denominator)
        }
    }
}

#[derive(Deserialize)]
struct RawRationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawRationalFunction::deserialize(d)?;
        RationalFunction::normalize(raw.numerator, raw.denominator).map_err(serde::de::Error::custom)
    }
}

/// Degrees `d_j` of successive iterates in the initial condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for DegreeSequence {
    fn from(v: Vec<usize>) -> Self {
        DegreeSequence(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::normalize(p(n), p(d)).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let r = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(r.numerator(), &p(&[1, 1]));
        assert_eq!(r.denominator(), &Polynomial::one());
        assert_eq!(r.degree(), 1);

        let r = rf(&[1, 1], &[4, 2]);
        let half = ExactRational::new(1, 2).unwrap();
        assert_eq!(r.numerator(), &p(&[1, 1]).scale(&half));
        assert_eq!(r.denominator(), &p(&[2, 1]));
        assert_eq!(r.degree(), 1);

        let z = rf(&[0], &[0, 1]);
        assert_eq!(z, RationalFunction::constant(ExactRational::zero()));
        assert!(RationalFunction::normalize(p(&[1]), Polynomial::zero()).is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(rf(&[1, 1], &[2, 0, 1]).degree(), 2);
        assert_eq!(rf(&[0, 0, 1], &[1]).degree(), 2);
        assert_eq!(
            RationalFunction::constant(ExactRational::new(7, 3).unwrap()).degree(),
            0
        );
    }

    #[test]
    fn substitute_examples() {
        let square = rf(&[0, 0, 1], &[1]);
        let inner = rf(&[1, 1], &[0, 1]);
        let c = substitute(&square, &inner).unwrap();
        assert_eq!(c.numerator(), &p(&[1, 2, 1]));
        assert_eq!(c.denominator(), &p(&[0, 0, 1]));
        assert_eq!(c.degree(), 2);

        let mobius = rf(&[1, 1], &[2, 1]);
        assert_eq!(substitute(&mobius, &RationalFunction::identity()).unwrap(), mobius);

        let pole = rf(&[1], &[-1, 1]);
        let one = RationalFunction::constant(ExactRational::one());
        assert!(matches!(substitute(&pole, &one), Err(Error::Degenerate(_))));
    }

    #[test]
    fn composition_cancels_common_factors() {
        // (y^2 - 1)/(y - 1) is y + 1 after cancellation, and composing
        // 1/y with 1/y gives back the identity.
        let inv = rf(&[1], &[0, 1]);
        assert_eq!(inv.compose(&inv).unwrap(), RationalFunction::identity());
    }

    fn small_rf() -> impl Strategy<Value = RationalFunction> {
        (
            proptest::collection::vec(-5i64..5, 1..4),
            proptest::collection::vec(-5i64..5, 1..4),
        )
            .prop_filter_map("nonzero denominator", |(n, d)| {
                RationalFunction::normalize(Polynomial::from_ints(&n), Polynomial::from_ints(&d)).ok()
            })
    }

    // Brute-force oracle: evaluate outer(inner(x)) directly at a point.
    fn brute_eval(outer: &RationalFunction, inner: &RationalFunction, x: &ExactRational) -> Option<ExactRational> {
        outer.eval(&inner.eval(x)?)
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(r in small_rf()) {
            let again = RationalFunction::normalize(r.numerator().clone(), r.denominator().clone()).unwrap();
            prop_assert_eq!(&again, &r);
            let g = poly_gcd(r.numerator(), r.denominator()).unwrap();
            prop_assert!(g.is_constant());
        }

        #[test]
        fn composition_degree_is_submultiplicative(outer in small_rf(), inner in small_rf(), xs in proptest::collection::vec(-20i64..20, 4)) {
            if let Ok(c) = outer.compose(&inner) {
                prop_assert!(c.degree() <= outer.degree() * inner.degree());
                let g = poly_gcd(c.numerator(), c.denominator()).unwrap();
                prop_assert!(g.is_constant());
                for x in xs {
                    let x = ExactRational::new(x, 3).unwrap();
                    if let (Some(a), Some(b)) = (c.eval(&x), brute_eval(&outer, &inner, &x)) {
                        prop_assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn generic_composition_degree_is_multiplicative() {
        // Generic instances: no cancellation, degree equals the product.
        let r = rf(&[3, -1, 2], &[1, 5]);
        let s = rf(&[-2, 0, 0, 1], &[7, 1, 1]);
        assert_eq!(r.compose(&s).unwrap().degree(), 6);
        assert_eq!(s.compose(&r).unwrap().degree(), 6);
    }
}
