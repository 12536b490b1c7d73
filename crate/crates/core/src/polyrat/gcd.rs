//! Polynomial gcd over ℚ via the subresultant remainder sequence on
//! primitive integer polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Polynomial;
use crate::error::{Error, Result};
use crate::heights::ExactRational;

/// Integer polynomial, ascending powers, trailing zeros trimmed.
pub(crate) type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn degree(p: &[BigInt]) -> usize {
    p.len() - 1
}

pub(crate) fn int_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive(mut p: IntPoly) -> IntPoly {
    let g = int_content(&p);
    if g.is_zero() || g.is_one() {
        return p;
    }
    for c in p.iter_mut() {
        *c = &*c / &g;
    }
    p
}

fn bigpow(b: &BigInt, e: usize) -> BigInt {
    num_traits::pow(b.clone(), e)
}

/// `lc(b)^(deg a - deg b + 1) · a mod b`, computed without division.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let n = degree(b);
    let lb = &b[n];
    let mut r: IntPoly = a.to_vec();
    let mut e = degree(a) + 1 - n;
    while !r.is_empty() && degree(&r) >= n {
        let dr = degree(&r);
        let lr = r[dr].clone();
        let shift = dr - n;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = bigpow(lb, e);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

fn div_exact_scalar(p: IntPoly, d: &BigInt) -> IntPoly {
    p.into_iter()
        .map(|c| {
            debug_assert!((&c % d).is_zero());
            c / d
        })
        .collect()
}

/// Primitive gcd of two nonzero integer polynomials.
fn subresultant_gcd(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let (mut a, mut b) = if degree(a) >= degree(b) {
        (primitive(a.to_vec()), primitive(b.to_vec()))
    } else {
        (primitive(b.to_vec()), primitive(a.to_vec()))
    };
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = degree(&a) - degree(&b);
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            return primitive(b);
        }
        if degree(&r) == 0 {
            return vec![BigInt::one()];
        }
        a = b;
        b = div_exact_scalar(r, &(&g * bigpow(&h, delta)));
        g = a[degree(&a)].clone();
        if delta > 0 {
            h = bigpow(&g, delta) / bigpow(&h, delta - 1);
        }
    }
}

/// Monic greatest common divisor over ℚ. Fails when both inputs are zero.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return Err(Error::domain("gcd of two zero polynomials")),
        (true, false) => return Ok(b.monic()),
        (false, true) => return Ok(a.monic()),
        _ => {}
    }
    if a.is_constant() || b.is_constant() {
        return Ok(Polynomial::one());
    }
    let g = subresultant_gcd(&a.primitive_int(), &b.primitive_int());
    let lc = g.last().expect("nonzero gcd").clone();
    let lc = if lc.is_negative() { -lc } else { lc };
    let poly = Polynomial::from_coeffs(g.into_iter().map(ExactRational::from_integer).collect());
    Ok(poly.scale(&ExactRational::from_integer(lc).recip()?).monic())
}
