//! Benchmark inputs shared by the criterion targets.

use dqkit_core::{Polynomial, RationalFunction};

/// `(y^2 + 1) / (y + 2)` composed with itself `depth` times.
pub fn deep_iterate(depth: usize) -> RationalFunction {
    let map = RationalFunction::normalize(Polynomial::from_ints(&[1, 0, 1]), Polynomial::from_ints(&[2, 1]))
        .expect("valid map");
    let mut it = RationalFunction::identity();
    for _ in 0..depth {
        it = map.compose(&it).expect("no collapse");
    }
    it
}

/// A pair of dense integer polynomials sharing the factor `y^2 - 3y + 7`.
pub fn gcd_pair(degree: usize) -> (Polynomial, Polynomial) {
    let common = Polynomial::from_ints(&[7, -3, 1]);
    let a: Vec<i64> = (0..=degree as i64).map(|i| (i * 37 % 23) - 11).collect();
    let b: Vec<i64> = (0..=degree as i64).map(|i| (i * 53 % 29) - 14).collect();
    (
        &Polynomial::from_ints(&a) * &common,
        &Polynomial::from_ints(&b) * &common,
    )
}
