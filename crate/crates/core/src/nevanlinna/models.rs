//! Meromorphic models evaluated through `log |f|`, with their zeros and
//! poles in any disk.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};

/// A point of a zero or pole divisor with its multiplicity.
pub type DivisorPoint = (Complex64, u32);

pub trait MeromorphicModel: Send + Sync {
    fn label(&self) -> String;

    /// `log |f(z)|`, computed without forming `f(z)`; `−∞` at zeros and
    /// `+∞` at poles.
    fn log_modulus(&self, z: Complex64) -> f64;

    /// Zeros in the closed disk `|z| ≤ r`.
    fn zeros(&self, r: f64) -> Vec<DivisorPoint>;

    /// Poles in the closed disk `|z| ≤ r`.
    fn poles(&self, r: f64) -> Vec<DivisorPoint>;

    /// `(log |a|, m)` for the leading term `a z^m` of the Laurent expansion
    /// at the origin, when known.
    fn origin_expansion(&self) -> Option<(f64, i32)>;
}

pub type Model = Arc<dyn MeromorphicModel>;

fn within(points: &[DivisorPoint], r: f64) -> Vec<DivisorPoint> {
    points.iter().copied().filter(|p| p.0.norm() <= r).collect()
}

/// `f ≡ c` with `c ≠ 0`.
#[derive(Clone, Debug)]
pub struct Constant {
    pub value: Complex64,
}

impl MeromorphicModel for Constant {
    fn label(&self) -> String {
        format!("const({})", self.value)
    }
    fn log_modulus(&self, _: Complex64) -> f64 {
        self.value.norm().ln()
    }
    fn zeros(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn poles(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        Some((self.value.norm().ln(), 0))
    }
}

/// `f(z) = k · Π (z − a) / Π (z − b)` with finite, disjoint zero and pole
/// lists.
#[derive(Clone, Debug)]
pub struct Rational {
    pub label: String,
    pub scale: Complex64,
    pub zeros: Vec<DivisorPoint>,
    pub poles: Vec<DivisorPoint>,
}

impl Rational {
    pub fn new(
        label: impl Into<String>,
        scale: Complex64,
        zeros: Vec<DivisorPoint>,
        poles: Vec<DivisorPoint>,
    ) -> Result<Self> {
        if scale.norm() == 0.0 || !scale.is_finite() {
            return Err(Error::validation("rational model needs a finite nonzero scale"));
        }
        if zeros.iter().chain(&poles).any(|p| p.1 == 0) {
            return Err(Error::domain("multiplicities must be positive"));
        }
        if zeros
            .iter()
            .any(|z| poles.iter().any(|p| (z.0 - p.0).norm() <= 1e-12 * (1.0 + z.0.norm())))
        {
            return Err(Error::validation("zeros and poles must be disjoint"));
        }
        Ok(Rational {
            label: label.into(),
            scale,
            zeros,
            poles,
        })
    }

    /// `Σ a_k z^k` from ascending coefficients.
    pub fn polynomial(coeffs: &[Complex64]) -> Result<Self> {
        let (lead, roots) = polynomial_roots(coeffs)?;
        Rational::new(format!("poly(deg {})", roots.len()), lead, roots, Vec::new())
    }

    /// `P/Q` from ascending coefficients; common roots are cancelled.
    pub fn from_coefficients(num: &[Complex64], den: &[Complex64]) -> Result<Self> {
        let (ln, mut zeros) = polynomial_roots(num)?;
        let (ld, mut poles) = polynomial_roots(den)?;
        cancel(&mut zeros, &mut poles);
        Rational::new("rational", ln / ld, zeros, poles)
    }

    pub fn degree(&self) -> u32 {
        let z: u32 = self.zeros.iter().map(|p| p.1).sum();
        let p: u32 = self.poles.iter().map(|p| p.1).sum();
        z.max(p)
    }
}

fn cancel(zeros: &mut Vec<DivisorPoint>, poles: &mut Vec<DivisorPoint>) {
    let mut i = 0;
    while i < zeros.len() {
        let z = zeros[i].0;
        if let Some(j) = poles.iter().position(|p| (p.0 - z).norm() <= 1e-8 * (1.0 + z.norm())) {
            let m = zeros[i].1.min(poles[j].1);
            zeros[i].1 -= m;
            poles[j].1 -= m;
            if poles[j].1 == 0 {
                poles.remove(j);
            }
            if zeros[i].1 == 0 {
                zeros.remove(i);
                continue;
            }
        }
        i += 1;
    }
}

impl MeromorphicModel for Rational {
    fn label(&self) -> String {
        self.label.clone()
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        let mut v = self.scale.norm().ln();
        for &(a, m) in &self.zeros {
            v += m as f64 * (z - a).norm().ln();
        }
        for &(b, m) in &self.poles {
            v -= m as f64 * (z - b).norm().ln();
        }
        v
    }
    fn zeros(&self, r: f64) -> Vec<DivisorPoint> {
        within(&self.zeros, r)
    }
    fn poles(&self, r: f64) -> Vec<DivisorPoint> {
        within(&self.poles, r)
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        let mut log_a = self.scale.norm().ln();
        let mut order = 0i32;
        for &(a, m) in &self.zeros {
            if a.norm() == 0.0 {
                order += m as i32;
            } else {
                log_a += m as f64 * a.norm().ln();
            }
        }
        for &(b, m) in &self.poles {
            if b.norm() == 0.0 {
                order -= m as i32;
            } else {
                log_a -= m as f64 * b.norm().ln();
            }
        }
        Some((log_a, order))
    }
}

/// `f(z) = exp(a z^k)`.
#[derive(Clone, Debug)]
pub struct ExpPower {
    pub a: Complex64,
    pub k: u32,
}

impl MeromorphicModel for ExpPower {
    fn label(&self) -> String {
        if self.k == 1 {
            format!("exp({} z)", self.a)
        } else {
            format!("exp({} z^{})", self.a, self.k)
        }
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        (self.a * z.powu(self.k)).re
    }
    fn zeros(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn poles(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        Some((0.0, 0))
    }
}

/// `f(z) = exp(e^z)`, with `log |f| = e^x cos y`.
#[derive(Clone, Debug)]
pub struct ExpExp;

impl MeromorphicModel for ExpExp {
    fn label(&self) -> String {
        "exp(exp(z))".into()
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        z.re.exp() * z.im.cos()
    }
    fn zeros(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn poles(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        Some((1.0, 0))
    }
}

/// `f(z) = sin z`.
#[derive(Clone, Debug)]
pub struct Sine;

/// `log |sin(x + iy)|` via `|sin z|^2 = (cosh 2y − cos 2x)/2`, written as
/// `|y| − log 2 + ½ log((1 − t)^2 + 4 t sin^2 x)` with `t = e^{−2|y|}`,
/// which neither overflows for large `|y|` nor cancels near the zeros.
pub fn log_abs_sin(z: Complex64) -> f64 {
    let y = z.im.abs();
    let t = (-2.0 * y).exp();
    let one_minus_t = -(-2.0 * y).exp_m1();
    let s = z.re.sin();
    y - LN_2 + 0.5 * (one_minus_t * one_minus_t + 4.0 * t * s * s).ln()
}

impl MeromorphicModel for Sine {
    fn label(&self) -> String {
        "sin(z)".into()
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        log_abs_sin(z)
    }
    fn zeros(&self, r: f64) -> Vec<DivisorPoint> {
        let k = (r / PI).floor() as i64;
        (-k..=k).map(|j| (Complex64::new(j as f64 * PI, 0.0), 1)).collect()
    }
    fn poles(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        Some((0.0, 1))
    }
}

/// `f(z) = Π 1/(1 − z/b)` over the listed poles (`1/z` for `b = 0`).
#[derive(Clone, Debug)]
pub struct PoleComb {
    pub poles: Vec<DivisorPoint>,
}

impl MeromorphicModel for PoleComb {
    fn label(&self) -> String {
        format!("pole-comb({} poles)", self.poles.len())
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|&(b, m)| {
                let v = if b.norm() == 0.0 {
                    z.norm().ln()
                } else {
                    (Complex64::new(1.0, 0.0) - z / b).norm().ln()
                };
                -(m as f64) * v
            })
            .sum()
    }
    fn zeros(&self, _: f64) -> Vec<DivisorPoint> {
        Vec::new()
    }
    fn poles(&self, r: f64) -> Vec<DivisorPoint> {
        within(&self.poles, r)
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        let order = self
            .poles
            .iter()
            .filter(|p| p.0.norm() == 0.0)
            .map(|p| -(p.1 as i32))
            .sum();
        Some((0.0, order))
    }
}

/// `z ↦ f(z + c)`.
pub struct Shifted {
    pub inner: Model,
    pub shift: Complex64,
}

impl MeromorphicModel for Shifted {
    fn label(&self) -> String {
        format!("{}(z + {})", self.inner.label(), self.shift)
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        self.inner.log_modulus(z + self.shift)
    }
    fn zeros(&self, r: f64) -> Vec<DivisorPoint> {
        let moved: Vec<_> = self
            .inner
            .zeros(r + self.shift.norm())
            .into_iter()
            .map(|(a, m)| (a - self.shift, m))
            .collect();
        within(&moved, r)
    }
    fn poles(&self, r: f64) -> Vec<DivisorPoint> {
        let moved: Vec<_> = self
            .inner
            .poles(r + self.shift.norm())
            .into_iter()
            .map(|(a, m)| (a - self.shift, m))
            .collect();
        within(&moved, r)
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        let v = self.inner.log_modulus(self.shift);
        v.is_finite().then_some((v, 0))
    }
}

/// `1/f`.
pub struct Reciprocal {
    pub inner: Model,
}

impl MeromorphicModel for Reciprocal {
    fn label(&self) -> String {
        format!("1/({})", self.inner.label())
    }
    fn log_modulus(&self, z: Complex64) -> f64 {
        -self.inner.log_modulus(z)
    }
    fn zeros(&self, r: f64) -> Vec<DivisorPoint> {
        self.inner.poles(r)
    }
    fn poles(&self, r: f64) -> Vec<DivisorPoint> {
        self.inner.zeros(r)
    }
    fn origin_expansion(&self) -> Option<(f64, i32)> {
        self.inner.origin_expansion().map(|(a, m)| (-a, -m))
    }
}

pub fn shifted(model: &Model, c: Complex64) -> Model {
    Arc::new(Shifted {
        inner: model.clone(),
        shift: c,
    })
}

pub fn reciprocal(model: &Model) -> Model {
    Arc::new(Reciprocal { inner: model.clone() })
}

/// Roots of `Σ a_k z^k` by Durand–Kerner iteration; returns the leading
/// coefficient and the roots with multiplicity one each (clustered roots are
/// merged).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<(Complex64, Vec<DivisorPoint>)> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::validation("zero polynomial"));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("polynomial coefficients must be finite"));
    }
    let lead = *c.last().expect("nonempty");
    let mut roots: Vec<Complex64> = Vec::new();
    // Roots at the origin are exact.
    let zeros_at_origin = c.iter().take_while(|v| v.norm() == 0.0).count();
    let c: Vec<Complex64> = c[zeros_at_origin..].iter().map(|v| v / lead).collect();
    let n = c.len() - 1;
    if n > 0 {
        let bound = 1.0 + c[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (0.5 * bound)).collect();
        let eval = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
        for _ in 0..2000 {
            let mut delta: f64 = 0.0;
            for i in 0..n {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                let step = eval(z[i]) / den;
                if step.is_finite() {
                    z[i] -= step;
                    delta = delta.max(step.norm());
                }
            }
            if delta <= 1e-15 * bound {
                break;
            }
        }
        roots.extend(z);
    }
    let mut out: Vec<DivisorPoint> = Vec::new();
    if zeros_at_origin > 0 {
        out.push((Complex64::new(0.0, 0.0), zeros_at_origin as u32));
    }
    for r in roots {
        match out.iter_mut().find(|p| (p.0 - r).norm() <= 1e-7 * (1.0 + r.norm())) {
            Some(p) => p.1 += 1,
            None => out.push((r, 1)),
        }
    }
    Ok((lead, out))
}

pub const BUILTIN_MODELS: &[&str] = &[
    "const",
    "z",
    "poly",
    "rational",
    "exp",
    "exp-power",
    "exp-exp",
    "sin",
    "pole-comb",
];

fn complex(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64();
            let im = a[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::validation(format!("bad complex number {v}"))),
            }
        }
        _ => Err(Error::validation(format!("expected a number or [re, im], got {v}"))),
    }
}

fn complex_list(v: Option<&Value>, key: &str) -> Result<Option<Vec<Complex64>>> {
    match v {
        None => Ok(None),
        Some(Value::Array(a)) => a.iter().map(complex).collect::<Result<_>>().map(Some),
        Some(other) => Err(Error::validation(format!("`{key}` must be a list, got {other}"))),
    }
}

fn simple(points: Vec<Complex64>) -> Vec<DivisorPoint> {
    let mut out: Vec<DivisorPoint> = Vec::new();
    for p in points {
        match out.iter_mut().find(|q| q.0 == p) {
            Some(q) => q.1 += 1,
            None => out.push((p, 1)),
        }
    }
    out
}

/// Builds a registry model from its name and a JSON parameter object.
///
/// | name | parameters |
/// |------|------------|
/// | `const` | `c` (default 2) |
/// | `z` | none |
/// | `poly` | `coeffs` ascending, or `roots` with optional `scale` |
/// | `rational` | `num`, `den` ascending, or `zeros`, `poles`, `scale` |
/// | `exp` | `a` (default 1): `exp(a z)` |
/// | `exp-power` | `k` (default 2), `a` (default 1): `exp(a z^k)` |
/// | `exp-exp` | none |
/// | `sin` | none |
/// | `pole-comb` | `poles`, or `count` (default 8) for poles at `1..=count` |
///
/// Complex numbers are written as `x` or `[re, im]`.
pub fn build_model(name: &str, params: &Value) -> Result<Model> {
    let p = |k: &str| params.get(k);
    let one = Complex64::new(1.0, 0.0);
    let model: Model = match name {
        "const" => {
            let value = p("c").map(complex).transpose()?.unwrap_or(Complex64::new(2.0, 0.0));
            if value.norm() == 0.0 {
                return Err(Error::validation("the constant must be nonzero"));
            }
            Arc::new(Constant { value })
        }
        "z" => Arc::new(Rational::new(
            "z",
            one,
            vec![(Complex64::new(0.0, 0.0), 1)],
            Vec::new(),
        )?),
        "poly" => {
            if let Some(c) = complex_list(p("coeffs"), "coeffs")? {
                Arc::new(Rational::polynomial(&c)?)
            } else {
                let roots = complex_list(p("roots"), "roots")?
                    .ok_or_else(|| Error::validation("poly needs `coeffs` or `roots`"))?;
                let scale = p("scale").map(complex).transpose()?.unwrap_or(one);
                Arc::new(Rational::new(
                    format!("poly(deg {})", roots.len()),
                    scale,
                    simple(roots),
                    Vec::new(),
                )?)
            }
        }
        "rational" => {
            if let (Some(n), Some(d)) = (complex_list(p("num"), "num")?, complex_list(p("den"), "den")?) {
                Arc::new(Rational::from_coefficients(&n, &d)?)
            } else {
                let zeros = complex_list(p("zeros"), "zeros")?.unwrap_or_default();
                let poles = complex_list(p("poles"), "poles")?.unwrap_or_default();
                let scale = p("scale").map(complex).transpose()?.unwrap_or(one);
                Arc::new(Rational::new("rational", scale, simple(zeros), simple(poles))?)
            }
        }
        "exp" => Arc::new(ExpPower {
            a: p("a").map(complex).transpose()?.unwrap_or(one),
            k: 1,
        }),
        "exp-power" => {
            let k = p("k").map_or(Some(2), Value::as_u64).filter(|&k| (1..=64).contains(&k));
            let k = k.ok_or_else(|| Error::validation("`k` must be an integer in 1..=64"))?;
            Arc::new(ExpPower {
                a: p("a").map(complex).transpose()?.unwrap_or(one),
                k: k as u32,
            })
        }
        "exp-exp" => Arc::new(ExpExp),
        "sin" => Arc::new(Sine),
        "pole-comb" => {
            let poles = match complex_list(p("poles"), "poles")? {
                Some(list) => simple(list),
                None => {
                    let count = p("count").map_or(Some(8), Value::as_u64);
                    let count = count.ok_or_else(|| Error::validation("`count` must be a non-negative integer"))?;
                    (1..=count).map(|k| (Complex64::new(k as f64, 0.0), 1)).collect()
                }
            };
            Arc::new(PoleComb { poles })
        }
        other => {
            return Err(Error::validation(format!(
                "unknown model `{other}`; available: {}",
                BUILTIN_MODELS.join(", ")
            )))
        }
    };
    Ok(model)
}

/// Every registry entry with representative parameters.
pub fn builtin_models() -> Vec<(String, Model)> {
    let cases = [
        ("const", r#"{"c": 2}"#),
        ("z", "{}"),
        ("poly", r#"{"coeffs": [2, -3, 0, 1]}"#),
        (
            "rational",
            r#"{"zeros": [0.5, [0, 2]], "poles": [3, [-1, 2.5]], "scale": 1.5}"#,
        ),
        ("exp", r#"{"a": 1}"#),
        ("exp-power", r#"{"k": 2}"#),
        ("exp-exp", "{}"),
        ("sin", "{}"),
        ("pole-comb", r#"{"count": 8}"#),
    ];
    cases
        .iter()
        .map(|(name, params)| {
            let v: Value = serde_json::from_str(params).expect("valid JSON");
            (name.to_string(), build_model(name, &v).expect("valid built-in"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_log_sin() {
        for &(x, y) in &[(0.3, 0.0), (1.0, 0.5), (2.0, -3.0), (0.1, 10.0), (5.0, 0.001)] {
            let z = Complex64::new(x, y);
            let direct = z.sin().norm().ln();
            assert!((log_abs_sin(z) - direct).abs() < 1e-12, "{z}");
        }
        // |sin(x + 800 i)| overflows; the formula does not.
        let v = log_abs_sin(Complex64::new(1.0, 800.0));
        assert!((v - (800.0 - LN_2)).abs() < 1e-12);
        let near = log_abs_sin(Complex64::new(PI + 1e-9, 0.0));
        assert!((near - 1e-9f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn exp_exp_does_not_overflow() {
        let v = ExpExp.log_modulus(Complex64::new(6.0, 0.0));
        assert!((v - 6f64.exp()).abs() < 1e-9);
        assert!(ExpExp.log_modulus(Complex64::new(800.0, 0.0)).is_infinite());
    }

    #[test]
    fn roots_of_cubic() {
        // 2 − 3z + z^3 = (z − 1)^2 (z + 2)
        let c: Vec<Complex64> = [2.0, -3.0, 0.0, 1.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (lead, roots) = polynomial_roots(&c).unwrap();
        assert_eq!(lead, Complex64::new(1.0, 0.0));
        let total: u32 = roots.iter().map(|r| r.1).sum();
        assert_eq!(total, 3);
        let m = Rational::polynomial(&c).unwrap();
        for &z in &[Complex64::new(0.3, 0.7), Complex64::new(-4.0, 1.0)] {
            let direct = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
            assert!((m.log_modulus(z) - direct.norm().ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn rational_from_coefficients_cancels() {
        let r = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        // (z^2 − 1)/(z − 1) = z + 1
        let m = Rational::from_coefficients(&r(&[-1.0, 0.0, 1.0]), &r(&[-1.0, 1.0])).unwrap();
        assert_eq!(m.degree(), 1);
        assert!(m.poles(10.0).is_empty());
    }

    #[test]
    fn registry() {
        assert_eq!(builtin_models().len(), BUILTIN_MODELS.len());
        let err = build_model("gamma", &Value::Null).err().unwrap();
        assert!(matches!(&err, Error::Validation(m) if m.contains("exp-exp")));
        let comb = build_model("pole-comb", &serde_json::json!({"count": 3})).unwrap();
        assert_eq!(comb.poles(2.5).len(), 2);
        let s = build_model("sin", &Value::Null).unwrap();
        assert_eq!(s.zeros(10.0).len(), 7);
    }

    #[test]
    fn wrappers() {
        let z: Model = build_model("z", &Value::Null).unwrap();
        let inv = reciprocal(&z);
        assert_eq!(inv.poles(1.0).len(), 1);
        assert_eq!(inv.origin_expansion(), Some((0.0, -1)));
        let sh = shifted(&z, Complex64::new(2.0, 0.0));
        assert_eq!(sh.zeros(1.0).len(), 0);
        assert_eq!(sh.zeros(2.0).len(), 1);
        assert!((sh.origin_expansion().unwrap().0 - 2f64.ln()).abs() < 1e-15);
    }
}
