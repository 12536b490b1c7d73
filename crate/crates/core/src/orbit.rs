//! Exact iteration of first-order equations `y_{n+1} = P(n, y_n) / Q(n, y_n)`
//! over ℚ, height sequences along orbits, admissibility ratios and the
//! slow-growth ⇒ degree-one classifier.

use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::{log_abs, log_height, ExactRational};
use crate::polyrat::{poly_gcd, IntPoly, Polynomial, RationalFunction};
use crate::stats::{fit_line, max_of};

pub const DEFAULT_BIT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_NU: f64 = 1.0;

/// `y_{n+1} = P(n, y_n) / Q(n, y_n)` with `P`, `Q` polynomials in `y` whose
/// coefficients are polynomials in `n` over ℚ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteEquation {
    /// `num[i]` is the coefficient of `y^i`, as a polynomial in `n`.
    num: Vec<Polynomial>,
    den: Vec<Polynomial>,
    n0: i64,
}

#[derive(Deserialize)]
struct RawEquation {
    num: Vec<Polynomial>,
    den: Vec<Polynomial>,
    #[serde(default)]
    n0: i64,
}

impl<'de> Deserialize<'de> for DiscreteEquation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawEquation::deserialize(d)?;
        DiscreteEquation::new(raw.num, raw.den, raw.n0).map_err(serde::de::Error::custom)
    }
}

fn trim_grid(mut g: Vec<Polynomial>) -> Vec<Polynomial> {
    while g.last().is_some_and(Polynomial::is_zero) {
        g.pop();
    }
    g
}

fn eval_grid(grid: &[Polynomial], n: &ExactRational) -> Polynomial {
    Polynomial::from_coeffs(grid.iter().map(|c| c.eval(n)).collect())
}

impl DiscreteEquation {
    /// Validates that `Q` is not identically zero and that `P`, `Q` are
    /// coprime in `y` over ℚ(n).
    pub fn new(num: Vec<Polynomial>, den: Vec<Polynomial>, n0: i64) -> Result<Self> {
        let eq = DiscreteEquation {
            num: trim_grid(num),
            den: trim_grid(den),
            n0,
        };
        if eq.den.is_empty() {
            return Err(Error::validation("denominator Q(n, y) is identically zero"));
        }
        eq.check_coprime()?;
        Ok(eq)
    }

    /// Autonomous equation from a rational map in `y`.
    pub fn autonomous(map: &RationalFunction) -> Self {
        let lift = |p: &Polynomial| p.coeffs().iter().cloned().map(Polynomial::constant).collect();
        DiscreteEquation {
            num: lift(map.numerator()),
            den: lift(map.denominator()),
            n0: 0,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    // A common factor over ℚ(n) survives every specialization that keeps
    // both leading coefficients, and a nonzero resultant in n vanishes at
    // finitely many points, so one coprime degree-preserving specialization
    // certifies coprimality.
    fn check_coprime(&self) -> Result<()> {
        if self.num.is_empty() {
            return Ok(());
        }
        let (dp, dq) = (self.num.len() - 1, self.den.len() - 1);
        for k in 0..64 {
            let n = ExactRational::from_integer(self.n0 + k);
            let p = eval_grid(&self.num, &n);
            let q = eval_grid(&self.den, &n);
            if p.degree() != Some(dp) || q.degree() != Some(dq) {
                continue;
            }
            return if poly_gcd(&p, &q)?.is_constant() {
                Ok(())
            } else {
                Err(Error::validation("P and Q share a factor in y"))
            };
        }
        Err(Error::validation(
            "no specialization of n preserves the degrees of P and Q",
        ))
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn with_n0(mut self, n0: i64) -> Self {
        self.n0 = n0;
        self
    }

    pub fn numerator_grid(&self) -> &[Polynomial] {
        &self.num
    }

    pub fn denominator_grid(&self) -> &[Polynomial] {
        &self.den
    }

    /// `deg_y R`, the generic degree of the map in `y`.
    pub fn degree_in_y(&self) -> usize {
        self.num.len().max(self.den.len()).saturating_sub(1)
    }

    pub fn is_autonomous(&self) -> bool {
        self.num.iter().chain(&self.den).all(Polynomial::is_constant)
    }

    /// `(P(n, ·), Q(n, ·))`; fails when `Q(n, ·)` vanishes identically.
    pub fn specialize(&self, n: i64) -> Result<(Polynomial, Polynomial)> {
        let nr = ExactRational::from_integer(n);
        let p = eval_grid(&self.num, &nr);
        let q = eval_grid(&self.den, &nr);
        if q.is_zero() {
            return Err(Error::Degenerate(format!("Q({n}, y) vanishes identically")));
        }
        Ok((p, q))
    }

    /// The map `y ↦ R(n, y)` as a normalized rational function.
    pub fn map_at(&self, n: i64) -> Result<RationalFunction> {
        let (p, q) = self.specialize(n)?;
        RationalFunction::normalize(p, q)
    }

    /// Values at `n` of every coefficient of `P` and `Q`.
    pub fn coefficient_values(&self, n: i64) -> Vec<ExactRational> {
        let nr = ExactRational::from_integer(n);
        self.num.iter().chain(&self.den).map(|c| c.eval(&nr)).collect()
    }

    /// Largest height among the coefficient values at `n`.
    pub fn max_coefficient_height(&self, n: i64) -> f64 {
        self.coefficient_values(n)
            .iter()
            .map(|c| log_height(c).value())
            .fold(0.0, f64::max)
    }

    /// Additive constant `C(n)` in `h(R(n, y)) ≤ deg_y(R)·h(y) + C(n)`:
    /// log of the monomial count plus the log of the largest coefficient of
    /// `P(n, ·)`, `Q(n, ·)` cleared to coprime integers.
    pub fn height_bound_constant(&self, n: i64) -> Result<f64> {
        let step = StepMap::new(self, n)?;
        let terms = step
            .p
            .iter()
            .filter(|c| !c.is_zero())
            .count()
            .max(step.q.iter().filter(|c| !c.is_zero()).count());
        let biggest = step
            .p
            .iter()
            .chain(&step.q)
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::one);
        Ok((terms.max(1) as f64).ln() + log_abs(&biggest).max(0.0))
    }
}

/// `R(n, ·)` with coefficients cleared to coprime integers, evaluated on
/// `a/b` through the homogeneous forms `P(a, b)`, `Q(a, b)`.
struct StepMap {
    p: IntPoly,
    q: IntPoly,
    d: usize,
    // Resultant of the two forms; any common factor of P(a, b) and Q(a, b)
    // with gcd(a, b) = 1 divides it.
    resultant: BigInt,
}

fn padded(p: &Polynomial, den: &BigInt, len: usize) -> IntPoly {
    let mut out: IntPoly = p.coeffs().iter().map(|c| c.numer() * (den / c.denom())).collect();
    out.resize(len, BigInt::zero());
    out
}

impl StepMap {
    fn new(eq: &DiscreteEquation, n: i64) -> Result<Self> {
        let (p, q) = eq.specialize(n)?;
        let d = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
        let den = p
            .coeffs()
            .iter()
            .chain(q.coeffs())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut pi = padded(&p, &den, d + 1);
        let mut qi = padded(&q, &den, d + 1);
        let g = pi.iter().chain(&qi).fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_one() {
            for c in pi.iter_mut().chain(qi.iter_mut()) {
                *c = &*c / &g;
            }
        }
        let resultant = if d == 0 {
            BigInt::one()
        } else {
            form_resultant(&pi, &qi, d)
        };
        Ok(StepMap {
            p: pi,
            q: qi,
            d,
            resultant,
        })
    }

    /// `None` when `Q(n, y) = 0`.
    fn apply(&self, y: &ExactRational) -> Option<ExactRational> {
        let (a, b) = (y.numer(), y.denom());
        let mut a_pows = vec![BigInt::one()];
        let mut b_pows = vec![BigInt::one()];
        for i in 1..=self.d {
            a_pows.push(&a_pows[i - 1] * a);
            b_pows.push(&b_pows[i - 1] * b);
        }
        let form = |c: &[BigInt]| {
            c.iter()
                .enumerate()
                .filter(|(_, ci)| !ci.is_zero())
                .fold(BigInt::zero(), |acc, (i, ci)| {
                    acc + ci * &a_pows[i] * &b_pows[self.d - i]
                })
        };
        let num = form(&self.p);
        let den = form(&self.q);
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(ExactRational::zero());
        }
        let g = if self.resultant.is_zero() {
            num.gcd(&den)
        } else {
            let r = self.resultant.abs();
            let g1 = num.mod_floor(&r).gcd(&r);
            if g1.is_one() {
                g1
            } else {
                den.mod_floor(&g1).gcd(&g1)
            }
        };
        let (mut num, mut den) = if g.is_one() { (num, den) } else { (num / &g, den / &g) };
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Some(ExactRational::from_coprime(num, den))
    }
}

/// Resultant of the binary forms of formal degree `d` with coefficient
/// vectors `p`, `q` (ascending powers of the first variable).
fn form_resultant(p: &[BigInt], q: &[BigInt], d: usize) -> BigInt {
    let size = 2 * d;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for row in 0..d {
        for i in 0..=d {
            m[row][row + i] = p[d - i].clone();
            m[row + d][row + i] = q[d - i].clone();
        }
    }
    bareiss_det(m)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Why an orbit stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// `Q(n - 1, y_{n-1}) = 0`, so `y_n` does not exist.
    PoleHit {
        n: i64,
    },
    /// `y_n` would exceed the bit budget.
    BitBudgetExceeded {
        n: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub start_index: i64,
    pub values: Vec<ExactRational>,
    pub heights: Vec<f64>,
    /// `cumulative[k] = Σ_{j=1}^{k} heights[j]`; `cumulative[0] = 0`.
    pub cumulative: Vec<f64>,
    pub termination: Termination,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of steps actually performed.
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn index(&self, k: usize) -> i64 {
        self.start_index + k as i64
    }

    /// CSV with columns `n, y_n, h_n, T_n`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "y_n", "h_n", "T_n"]).map_err(csv_err)?;
        for k in 0..self.len() {
            out.write_record([
                self.index(k).to_string(),
                self.values[k].to_string(),
                self.heights[k].to_string(),
                self.cumulative[k].to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Iterates `y_{n+1} = R(n, y_n)` exactly from `y_{n0} = y0` for `steps`
/// steps, stopping early at a pole or when a value outgrows `bit_budget`.
pub fn iterate_orbit(
    eq: &DiscreteEquation,
    y0: &ExactRational,
    n0: i64,
    steps: usize,
    bit_budget: u64,
) -> Result<Orbit> {
    if steps < 1 {
        return Err(Error::validation("steps must be at least 1"));
    }
    if bit_budget < 64 {
        return Err(Error::validation("bit budget must be at least 64"));
    }
    let mut values = vec![y0.clone()];
    let mut termination = Termination::Completed;
    let autonomous = eq.is_autonomous();
    let mut cached: Option<StepMap> = None;
    for k in 0..steps {
        let n = n0 + k as i64;
        if !autonomous || cached.is_none() {
            cached = Some(StepMap::new(eq, n)?);
        }
        let step = cached.as_ref().expect("step map");
        match step.apply(values.last().expect("nonempty")) {
            None => {
                termination = Termination::PoleHit { n: n + 1 };
                break;
            }
            Some(next) if next.bits() > bit_budget => {
                termination = Termination::BitBudgetExceeded { n: n + 1 };
                break;
            }
            Some(next) => values.push(next),
        }
    }
    let heights: Vec<f64> = values.iter().map(|v| log_height(v).value()).collect();
    let cumulative = cumulate(&heights);
    Ok(Orbit {
        start_index: n0,
        values,
        heights,
        cumulative,
        termination,
    })
}

fn cumulate(heights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(heights.len());
    out.push(0.0);
    for h in heights.iter().skip(1) {
        acc += h;
        out.push(acc);
    }
    out.truncate(heights.len());
    out
}

/// `(h(y_k), T_k)` along the orbit.
pub fn height_sequence(orbit: &Orbit) -> Result<(Vec<f64>, Vec<f64>)> {
    if orbit.is_empty() {
        return Err(Error::InsufficientData {
            what: "orbit values",
            needed: 1,
            have: 0,
        });
    }
    Ok((orbit.heights.clone(), orbit.cumulative.clone()))
}

/// Per index, the largest coefficient height at `n` divided by `h(y_n)`;
/// `None` where `h(y_n) = 0`.
pub fn admissibility_report(eq: &DiscreteEquation, orbit: &Orbit) -> Result<Vec<Option<f64>>> {
    if orbit.len() < 2 {
        return Err(Error::InsufficientData {
            what: "orbit values for admissibility",
            needed: 2,
            have: orbit.len(),
        });
    }
    Ok((0..orbit.len())
        .map(|k| {
            let h = orbit.heights[k];
            (h > 0.0).then(|| eq.max_coefficient_height(orbit.index(k)) / h)
        })
        .collect())
}

/// Points excluded from asymptotic estimates at the start of an orbit with
/// `steps` steps.
pub fn warmup(steps: usize) -> usize {
    4usize.max(steps.div_ceil(8))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MalmquistReport {
    /// `deg_y R`.
    pub deg: usize,
    pub slow_growth: bool,
    /// Largest `log T_k · (log k)^(2+ν) / k` over the trailing window.
    pub limsup_estimate: f64,
    pub nu: f64,
    pub tau: f64,
    /// Least-squares slope of `log log T_k` against `log k` over the
    /// trailing window; the power of `k` at which `log T_k` grows.
    pub growth_exponent: Option<f64>,
    pub admissible_ratios: Vec<Option<f64>>,
    /// Largest defined admissibility ratio over the trailing window.
    pub admissibility_trailing_max: Option<f64>,
    pub consistent: bool,
    pub degenerate: bool,
    pub warmup: usize,
    pub window_start: usize,
    /// `(k, ρ_k)` over the trailing window.
    pub rho: Vec<(usize, f64)>,
}

/// Classifies an orbit by the growth of `log T_k` and cross-checks that
/// slow growth only occurs for `deg_y R = 1`.
///
/// `slow_growth` holds when the growth exponent of `log T_k` fitted over
/// the trailing half of the orbit is below `tau`. Exponential height growth
/// has exponent 1; polynomial height growth has exponent tending to 0, and
/// only then does `ρ_k = log T_k (log k)^(2+ν) / k` tend to zero.
pub fn malmquist_classify(eq: &DiscreteEquation, orbit: &Orbit, nu: f64, tau: f64) -> Result<MalmquistReport> {
    if !(nu > 0.0) {
        return Err(Error::validation("nu must be positive"));
    }
    if !(tau > 0.0) {
        return Err(Error::validation("tau must be positive"));
    }
    let steps = orbit.steps();
    let warm = warmup(steps);
    let usable = (steps + 1).saturating_sub(warm);
    if usable < 16 {
        return Err(Error::InsufficientData {
            what: "orbit points after warm-up",
            needed: 16,
            have: usable,
        });
    }
    let admissible_ratios = admissibility_report(eq, orbit)?;
    let start = warm.max(steps.div_ceil(2));
    let deg = eq.degree_in_y();

    let rho: Vec<(usize, f64)> = (start..=steps)
        .filter(|&k| orbit.cumulative[k] > 0.0)
        .map(|k| {
            let kf = k as f64;
            (k, orbit.cumulative[k].ln() * kf.ln().powf(2.0 + nu) / kf)
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..=steps)
        .filter(|&k| orbit.cumulative[k] > 1.0)
        .map(|k| ((k as f64).ln(), orbit.cumulative[k].ln().ln()))
        .unzip();
    let degenerate = xs.len() < 2;
    let growth_exponent = if degenerate {
        None
    } else {
        Some(fit_line(&xs, &ys)?.slope)
    };
    let slow_growth = growth_exponent.is_some_and(|g| g < tau);
    let limsup_estimate = max_of(rho.iter().map(|r| r.1)).unwrap_or(0.0);
    let admissibility_trailing_max = max_of(admissible_ratios[start..].iter().flatten().copied());

    Ok(MalmquistReport {
        deg,
        slow_growth,
        limsup_estimate,
        nu,
        tau,
        growth_exponent,
        admissible_ratios,
        admissibility_trailing_max,
        consistent: degenerate || !slow_growth || deg == 1,
        degenerate,
        warmup: warm,
        window_start: start,
        rho,
    })
}

/// Least-squares slope of `log h(y_k)` against `k` over the trailing half of
/// the orbit: an estimate of `lim log h(y_n) / n`.
pub fn height_entropy(orbit: &Orbit) -> Result<f64> {
    let positive = orbit.heights.iter().filter(|&&h| h > 0.0).count();
    if positive < 8 {
        return Err(Error::InsufficientData {
            what: "points with positive height",
            needed: 8,
            have: positive,
        });
    }
    let steps = orbit.steps();
    let start = warmup(steps).max(steps.div_ceil(2)).min(steps);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..=steps)
        .filter(|&k| orbit.heights[k] > 0.0)
        .map(|k| (k as f64, orbit.heights[k].ln()))
        .unzip();
    Ok(fit_line(&xs, &ys)?.slope)
}

/// A named equation shipped with the toolkit, with a default initial value.
#[derive(Clone, Debug)]
pub struct BuiltinEquation {
    pub name: &'static str,
    pub description: &'static str,
    pub equation: DiscreteEquation,
    pub y0: ExactRational,
}

fn consts(c: &[i64]) -> Vec<Polynomial> {
    c.iter()
        .map(|&v| Polynomial::constant(ExactRational::from_integer(v)))
        .collect()
}

/// Polynomial `a + b·n`.
fn lin(a: i64, b: i64) -> Polynomial {
    Polynomial::from_ints(&[a, b])
}

pub const BUILTIN_EQUATIONS: &[&str] = &[
    "squaring",
    "riccati-fib",
    "riccati",
    "riccati-n",
    "shift",
    "inverse-pole",
    "quadratic-recip",
    "linear-n",
    "quadratic-n",
];

pub fn builtin_equation(name: &str) -> Option<BuiltinEquation> {
    let q = ExactRational::from_integer;
    let (description, num, den, n0, y0) = match name {
        "squaring" => ("y_{n+1} = y_n^2", consts(&[0, 0, 1]), consts(&[1]), 0, q(2)),
        "riccati-fib" => ("y_{n+1} = 1/(1 + y_n)", consts(&[1]), consts(&[1, 1]), 0, q(1)),
        "riccati" => (
            "y_{n+1} = (y_n + 1)/(y_n + 2)",
            consts(&[1, 1]),
            consts(&[2, 1]),
            0,
            q(1),
        ),
        "riccati-n" => (
            "y_{n+1} = (n y_n + 1)/(y_n + n)",
            vec![lin(1, 0), lin(0, 1)],
            vec![lin(0, 1), lin(1, 0)],
            2,
            q(2),
        ),
        "shift" => ("y_{n+1} = y_n + 1", consts(&[1, 1]), consts(&[1]), 0, q(0)),
        "inverse-pole" => ("y_{n+1} = 1/(y_n - 1)", consts(&[1]), consts(&[-1, 1]), 0, q(2)),
        "quadratic-recip" => (
            "y_{n+1} = (y_n^2 + 1)/y_n",
            consts(&[1, 0, 1]),
            consts(&[0, 1]),
            0,
            q(1),
        ),
        "linear-n" => (
            "y_{n+1} = n y_n",
            vec![Polynomial::zero(), lin(0, 1)],
            consts(&[1]),
            1,
            q(2),
        ),
        "quadratic-n" => (
            "y_{n+1} = n y_n^2",
            vec![Polynomial::zero(), Polynomial::zero(), lin(0, 1)],
            consts(&[1]),
            1,
            q(2),
        ),
        _ => return None,
    };
    let equation = DiscreteEquation::new(num, den, n0).expect("built-in equations are valid");
    Some(BuiltinEquation {
        name: BUILTIN_EQUATIONS.iter().find(|&&n| n == name).copied()?,
        description,
        equation,
        y0,
    })
}

/// The built-in classifier suite: Riccati maps (autonomous and not),
/// autonomous and non-autonomous degree-two maps, and a non-autonomous
/// linear map.
pub fn builtin_suite() -> Vec<BuiltinEquation> {
    [
        "riccati-fib",
        "riccati",
        "riccati-n",
        "shift",
        "squaring",
        "quadratic-recip",
        "linear-n",
        "quadratic-n",
    ]
    .iter()
    .map(|n| builtin_equation(n).expect("registered"))
    .collect()
}
