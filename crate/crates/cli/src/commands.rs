use std::f64::consts::{LN_2, PI};
use std::fs::File;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use dqkit_core::entropy::entropy_report;
use dqkit_core::growth::{
    borel_xi_set, e0_linear_measure_scan, f_eta_set, growth_relation_check, ExceptionalSet, GrowthParams,
    GrowthProfile, ProfileKind, Weight, XiPreset,
};
use dqkit_core::nevanlinna::{
    build_model, characteristic_sweep, deficiency_zero, dq_proximity_quadrature, jensen_check, lemma31_ratio,
    order_indicators, write_samples_csv, Model, QuadOptions, BUILTIN_MODELS,
};
use dqkit_core::orbit::{builtin_equation, iterate_orbit, malmquist_classify, Orbit, BUILTIN_EQUATIONS};
use dqkit_core::{DiscreteEquation, Error, ExactRational, Result};

use crate::args::{
    Command, EntropyArgs, EquationArgs, GrowthArgs, GrowthOp, MalmquistArgs, NevanlinnaArgs, NevanlinnaOp, OrbitArgs,
};
use crate::artifacts::{write_csv_rows, Artifact, Outcome};

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Orbit(a) => orbit(a),
        Command::Entropy(a) => entropy(a),
        Command::Malmquist(a) => malmquist(a),
        Command::Growth(a) => growth(a),
        Command::Nevanlinna(a) => nevanlinna(a),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::validation(format!("cannot open {}: {e}", path.display())))
}

/// The equation with its default initial value, if built in.
fn resolve_equation(args: &EquationArgs) -> Result<(DiscreteEquation, Option<ExactRational>)> {
    let path = Path::new(&args.eq);
    let (eq, y0) = if path.is_file() {
        (DiscreteEquation::from_json(&read_to_string(path)?)?, None)
    } else {
        let b = builtin_equation(&args.eq).ok_or_else(|| {
            Error::validation(format!(
                "unknown equation `{}`; available: {} (or a JSON file path)",
                args.eq,
                BUILTIN_EQUATIONS.join(", ")
            ))
        })?;
        (b.equation, Some(b.y0))
    };
    Ok(match args.n0 {
        Some(n0) => (eq.with_n0(n0), y0),
        None => (eq, y0),
    })
}

fn initial_value(given: &Option<String>, default: Option<ExactRational>) -> Result<ExactRational> {
    match (given, default) {
        (Some(s), _) => s.parse(),
        (None, Some(y0)) => Ok(y0),
        (None, None) => Err(Error::validation("--y0 is required for equations read from a file")),
    }
}

#[derive(Serialize)]
struct OrbitSummary<'a> {
    start_index: i64,
    steps: usize,
    termination: &'a dqkit_core::Termination,
}

fn orbit_csv(orbit: &Orbit) -> Result<Artifact> {
    Artifact::csv("orbit.csv", |w| orbit.write_csv(w))
}

fn orbit(a: &OrbitArgs) -> Result<Outcome> {
    let (eq, default) = resolve_equation(&a.equation)?;
    let y0 = initial_value(&a.y0, default)?;
    let orbit = iterate_orbit(&eq, &y0, eq.n0(), a.steps, a.bit_budget)?;
    let summary = OrbitSummary {
        start_index: orbit.start_index,
        steps: orbit.steps(),
        termination: &orbit.termination,
    };
    Ok(Outcome::new(
        vec![orbit_csv(&orbit)?, Artifact::json("summary.json", &summary)?],
        json!({ "n0": eq.n0(), "y0": y0, "equation": eq, "termination": orbit.termination }),
    ))
}

fn entropy(a: &EntropyArgs) -> Result<Outcome> {
    let (eq, _) = resolve_equation(&a.equation)?;
    let report = entropy_report(&eq, eq.n0(), a.j_max, a.max_degree)?;
    Ok(Outcome::new(
        vec![Artifact::json("entropy.json", &report)?],
        json!({ "n0": eq.n0(), "equation": eq }),
    ))
}

fn malmquist(a: &MalmquistArgs) -> Result<Outcome> {
    let (eq, default) = resolve_equation(&a.equation)?;
    let y0 = initial_value(&a.y0, default)?;
    let orbit = iterate_orbit(&eq, &y0, eq.n0(), a.steps, a.bit_budget)?;
    let report = malmquist_classify(&eq, &orbit, a.nu, a.tau)?;
    Ok(Outcome::new(
        vec![Artifact::json("malmquist.json", &report)?, orbit_csv(&orbit)?],
        json!({ "n0": eq.n0(), "y0": y0, "equation": eq, "termination": orbit.termination }),
    ))
}

pub const PROFILE_FORMULAS: &[&str] = &[
    "exponential",
    "root-exponential",
    "linear",
    "square",
    "log",
    "staircase",
];

/// `log T` of a built-in profile.
fn formula(name: &str) -> Result<fn(f64) -> f64> {
    Ok(match name {
        "exponential" => |r| r,
        "root-exponential" => f64::sqrt,
        "linear" => |r| (r / PI).ln(),
        "square" => |r| 2.0 * r.ln(),
        "log" => |r| r.ln().ln(),
        // log T rises by log 2 across each [2^k, 2^k + 1].
        "staircase" => |r| (1..40).map(|k| (r - 2f64.powi(k)).clamp(0.0, 1.0)).sum::<f64>() * LN_2,
        other => {
            return Err(Error::validation(format!(
                "unknown profile formula `{other}`; available: {}",
                PROFILE_FORMULAS.join(", ")
            )))
        }
    })
}

fn growth_profile(a: &GrowthArgs) -> Result<GrowthProfile> {
    let kind = if a.discrete {
        ProfileKind::Discrete
    } else {
        ProfileKind::ContinuousSampled
    };
    if let Some(path) = &a.profile {
        return GrowthProfile::from_csv(open(path)?, kind);
    }
    let name = a.formula.as_deref().expect("clap requires --profile or --formula");
    let log_t = formula(name)?;
    let grid = a
        .r_grid
        .as_ref()
        .ok_or_else(|| Error::validation("--formula needs --r-grid"))?;
    match kind {
        ProfileKind::ContinuousSampled => GrowthProfile::sample_log(grid, log_t),
        ProfileKind::Discrete => {
            let (n0, n1) = (grid.start.ceil() as i64, grid.end.floor() as i64);
            GrowthProfile::discrete_log(n0, n1, |n| log_t(n as f64))
        }
    }
}

fn weight(a: &GrowthArgs) -> Result<Weight> {
    let Some(path) = &a.weight else {
        return Ok(Weight::LogPower { eps: a.h_eps });
    };
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let rows = rdr
        .deserialize::<(f64, f64)>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("weight table: {e}")))?;
    Weight::table(rows)
}

fn samples_csv(set: &ExceptionalSet) -> Result<Artifact> {
    Artifact::csv("samples.csv", |w| write_csv_rows(w, &set.samples))
}

fn growth(a: &GrowthArgs) -> Result<Outcome> {
    let params = GrowthParams {
        eta: a.eta,
        zeta: a.zeta,
        c_const: a.c_const,
        c_abs: a.c_abs,
        nu: a.nu,
        epsilon: a.eps,
        s: a.s,
        window: a.window,
        abs_tol: a.abs_tol,
    };
    params.validate()?;
    let profile = growth_profile(a)?;
    let weight = weight(a)?;
    let mut resolved = json!({
        "params": params,
        "profile_kind": profile.kind(),
        "profile_points": profile.len(),
        "profile_range": [profile.start(), profile.end()],
        "weight": weight,
        "weight_integrability": weight.integrability(),
    });
    let artifacts = match a.op {
        GrowthOp::FEta => {
            let set = f_eta_set(&profile, &weight, &params)?;
            vec![Artifact::json("f_eta.json", &set)?, samples_csv(&set)?]
        }
        GrowthOp::Relation => {
            let report = growth_relation_check(&profile, &weight, &params)?;
            vec![Artifact::json("relation.json", &report)?]
        }
        GrowthOp::Borel => {
            let xi = XiPreset::named(&a.xi, a.eps)?;
            resolved["xi"] = serde_json::to_value(xi)?;
            let set = borel_xi_set(&profile, xi, &params)?;
            vec![Artifact::json("borel.json", &set)?, samples_csv(&set)?]
        }
        GrowthOp::E0 => {
            let report = e0_linear_measure_scan(&profile, &params)?;
            let measure = Artifact::csv("measure.csv", |w| {
                write_csv_rows(
                    w,
                    report.measure_by_r.iter().map(|&(r, m)| MeasureByR { r, measure: m }),
                )
            })?;
            vec![Artifact::json("e0.json", &report)?, measure, samples_csv(&report.set)?]
        }
    };
    Ok(Outcome::new(artifacts, resolved))
}

#[derive(Serialize)]
struct MeasureByR {
    #[serde(rename = "R")]
    r: f64,
    measure: f64,
}

fn resolve_model(a: &NevanlinnaArgs) -> Result<(Model, Value)> {
    let path = Path::new(&a.model);
    let (name, params) = if path.is_file() {
        let v: Value = serde_json::from_str(&read_to_string(path)?)?;
        let name = v
            .get("model")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::validation("model file needs a string field `model`"))?
            .to_string();
        (name, v.get("params").cloned().unwrap_or_else(|| json!({})))
    } else {
        let params: Value = serde_json::from_str(&a.params)
            .map_err(|e| Error::validation(format!("--params is not valid JSON: {e}")))?;
        (a.model.clone(), params)
    };
    if !BUILTIN_MODELS.contains(&name.as_str()) {
        return Err(Error::validation(format!(
            "unknown model `{name}`; available: {} (or a JSON file path)",
            BUILTIN_MODELS.join(", ")
        )));
    }
    let model = build_model(&name, &params)?;
    Ok((model, json!({ "model": name, "params": params })))
}

fn parse_shift(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| Error::validation(format!("bad shift `{s}`; expected `re` or `re,im`")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::validation(format!("bad shift `{s}`; expected `re` or `re,im`"))),
    }
}

#[derive(Serialize)]
struct DqRow {
    r: f64,
    dq_proximity: f64,
    quad_error: f64,
    quad_tolerance: f64,
}

#[derive(Serialize)]
struct JensenRow {
    r: f64,
    circle_mean: f64,
    predicted: f64,
    tolerance: f64,
    passes: bool,
}

fn nevanlinna(a: &NevanlinnaArgs) -> Result<Outcome> {
    let opts = QuadOptions::with_tol(a.tol);
    opts.validate()?;
    let (model, model_echo) = resolve_model(a)?;
    let c = parse_shift(&a.c)?;
    let grid = a.r_grid.points();
    let resolved = json!({
        "model": model_echo,
        "label": model.label(),
        "grid": a.r_grid,
        "radii": grid.len(),
        "quadrature": opts,
        "shift": [c.re, c.im],
        "window": a.window,
    });
    let f = model.as_ref();
    let characteristic_csv = |samples: &[_]| Artifact::csv("characteristic.csv", |w| write_samples_csv(samples, w));
    let mut failure = None;
    let artifacts = match a.op {
        NevanlinnaOp::Sweep => {
            let samples = characteristic_sweep(f, &grid, &opts)?;
            vec![characteristic_csv(&samples)?, Artifact::json("samples.json", &samples)?]
        }
        NevanlinnaOp::Dq => {
            let rows = grid
                .iter()
                .map(|&r| {
                    let q = dq_proximity_quadrature(f, c, r, &opts)?;
                    Ok(DqRow {
                        r,
                        dq_proximity: q.value,
                        quad_error: q.error_estimate,
                        quad_tolerance: q.tolerance,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            vec![Artifact::csv("dq.csv", |w| write_csv_rows(w, &rows))?]
        }
        NevanlinnaOp::Order => {
            let samples = characteristic_sweep(f, &grid, &opts)?;
            let ind = order_indicators(&samples, a.window)?;
            vec![Artifact::json("order.json", &ind)?, characteristic_csv(&samples)?]
        }
        NevanlinnaOp::Deficiency => {
            let rep = deficiency_zero(f, &grid, a.window, &opts)?;
            vec![Artifact::json("deficiency.json", &rep)?]
        }
        NevanlinnaOp::Lemma31 => {
            let rep = lemma31_ratio(f, c, a.nu, a.eps, &grid, a.window, &opts)?;
            let points = Artifact::csv("lemma31.csv", |w| write_csv_rows(w, &rep.points))?;
            vec![Artifact::json("lemma31.json", &rep)?, points]
        }
        NevanlinnaOp::Jensen => {
            let checks = grid
                .iter()
                .map(|&r| jensen_check(f, r, &opts))
                .collect::<Result<Vec<_>>>()?;
            if let Some(bad) = checks.iter().find(|j| !j.passes) {
                failure = Some(Error::Accuracy {
                    estimate: bad.circle_mean,
                    bound: (bad.circle_mean - bad.predicted).abs(),
                    tolerance: bad.tolerance,
                });
            }
            let rows = checks.iter().map(|j| JensenRow {
                r: j.r,
                circle_mean: j.circle_mean,
                predicted: j.predicted,
                tolerance: j.tolerance,
                passes: j.passes,
            });
            vec![Artifact::csv("jensen.csv", |w| write_csv_rows(w, rows))?]
        }
    };
    Ok(Outcome {
        artifacts,
        resolved,
        failure,
    })
}
