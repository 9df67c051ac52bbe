use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;

use pshmass::approximation::{
    approx_lelong, approx_mass, approx_mass_raw, counterexample_report, e2_of_lambda, inferred_order,
    log_multiplier_order, multiplier_order, PshFamily,
};
use pshmass::cantor::{build_level, cantor_cdf, measure_atoms, CantorParams, CantorPoint};
use pshmass::format::{bigint, float17, float17_string, fraction, opt_float17, opt_fraction, csv, Float17, SCHEMA_VERSION};
use pshmass::intersection::{
    cross_check, default_scale, full_mass_defect, is_full_mass, mass_via_recursion, residual_mass, Geometry,
    IntersectionData,
};
use pshmass::monomial::{family_ideal, multiplicity_closed_form, Family};
use pshmass::newton::covolume_grid;
use pshmass::potential::{upper_bound_fit, CantorPotential, QuadratureConfig};
use pshmass::sphere::SpherePoint;
use pshmass::verify::{self, Profile};
use pshmass::{Exact, Rational};

use crate::args::*;
use crate::Failure;

type Out = Result<ExitCode, Failure>;

pub fn dispatch(cli: Cli) -> Out {
    match cli.command {
        Command::Cantor(a) => cantor(a),
        Command::Potential(a) => potential(a),
        Command::Mult(a) => mult(a),
        Command::Mass(a) => mass(a),
        Command::Approx(a) => approx(a),
        Command::Report(a) => report(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Out {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn cantor(a: CantorArgs) -> Out {
    let params = CantorParams::new(a.a, a.depth.max(1))?;
    let k = a.depth;
    let approx = build_level(&params, k)?;
    let header = ["index", "left", "right", "log_length", "mass"];
    let rows: Vec<Vec<String>> = match a.emit {
        Emit::Intervals => approx
            .intervals
            .iter()
            .enumerate()
            .map(|(i, iv)| {
                vec![
                    i.to_string(),
                    float17_string(iv.left),
                    float17_string(iv.right),
                    float17_string(iv.log_length),
                    approx.mass_per_interval.to_string(),
                ]
            })
            .collect(),
        Emit::Atoms => measure_atoms(&params, k)?
            .iter()
            .enumerate()
            .map(|(i, at)| {
                let x = float17_string(at.point);
                vec![i.to_string(), x.clone(), x, float17_string(f64::NEG_INFINITY), at.mass.to_string()]
            })
            .collect(),
        Emit::Cdf => approx
            .intervals
            .iter()
            .enumerate()
            .map(|(i, iv)| {
                Ok(vec![
                    i.to_string(),
                    float17_string(iv.left),
                    float17_string(iv.right),
                    float17_string(iv.log_length),
                    cantor_cdf(&params, iv.right, k)?.to_string(),
                ])
            })
            .collect::<Result<_, pshmass::Error>>()?,
    };
    emit(&csv(&header, rows), a.out.as_deref())
}

#[derive(Serialize)]
#[serde(untagged)]
enum PointJson {
    Finite([Float17; 2]),
    Infinity(&'static str),
}

#[derive(Serialize)]
struct PotentialRecord {
    point: PointJson,
    #[serde(serialize_with = "float17")]
    value: f64,
}

#[derive(Serialize)]
struct FitPoint {
    k: usize,
    #[serde(serialize_with = "float17")]
    x: f64,
    #[serde(serialize_with = "float17")]
    value: f64,
}

#[derive(Serialize)]
struct FitJson {
    kmin: usize,
    kmax: usize,
    #[serde(serialize_with = "float17")]
    x0: f64,
    #[serde(serialize_with = "float17")]
    slope: f64,
    #[serde(serialize_with = "float17")]
    intercept: f64,
    strictly_decreasing: bool,
    points: Vec<FitPoint>,
}

#[derive(Serialize)]
struct PotentialJson {
    schema: &'static str,
    #[serde(serialize_with = "float17")]
    a: f64,
    depth: usize,
    nodes: usize,
    records: Vec<PotentialRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_fit: Option<FitJson>,
}

fn potential(a: PotentialArgs) -> Out {
    let top = a.bound_fit.map_or(a.depth, |(_, hi)| hi.max(a.depth));
    let params = CantorParams::new(a.a, top)?;
    let cfg = QuadratureConfig::with_nodes(a.depth, a.nodes)?;
    let records = if a.eval.is_empty() {
        Vec::new()
    } else {
        let pot = CantorPotential::new(&params, &cfg)?;
        a.eval
            .iter()
            .map(|p| {
                let (z, point) = match *p {
                    EvalPoint::Finite(x, y) => (SpherePoint::new(x, y), PointJson::Finite([Float17(x), Float17(y)])),
                    EvalPoint::Infinity => (SpherePoint::Infinity, PointJson::Infinity("inf")),
                };
                PotentialRecord { point, value: pot.eval(&z).value() }
            })
            .collect()
    };
    let bound_fit = match a.bound_fit {
        None => None,
        Some((lo, hi)) => {
            let ks: Vec<usize> = (lo..=hi).collect();
            let fit = upper_bound_fit(&params, &ks, &CantorPoint::real(a.x0), a.nodes)?;
            Some(FitJson {
                kmin: lo,
                kmax: hi,
                x0: a.x0,
                slope: fit.slope,
                intercept: fit.intercept,
                strictly_decreasing: fit.strictly_decreasing(),
                points: fit.points.iter().map(|&(k, x, value)| FitPoint { k, x, value }).collect(),
            })
        }
    };
    let doc = PotentialJson { schema: SCHEMA_VERSION, a: a.a, depth: a.depth, nodes: a.nodes, records, bound_fit };
    emit(&to_json(&doc)?, None)
}

#[derive(Serialize)]
struct MultJson {
    schema: &'static str,
    family: &'static str,
    n: usize,
    p: u32,
    q: u32,
    #[serde(serialize_with = "opt_bigint", skip_serializing_if = "Option::is_none")]
    mult_closed: Option<num_bigint::BigInt>,
    #[serde(serialize_with = "opt_float17", skip_serializing_if = "Option::is_none")]
    mult_grid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<usize>,
    #[serde(serialize_with = "opt_float17", skip_serializing_if = "Option::is_none")]
    rel_err: Option<f64>,
}

fn opt_bigint<S: serde::Serializer>(x: &Option<num_bigint::BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => bigint(v, s),
        None => s.serialize_none(),
    }
}

fn family_of(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Hyperplane => Family::Hyperplane,
        FamilyArg::Point => Family::Point,
    }
}

fn mult(a: MultArgs) -> Out {
    let family = family_of(a.family);
    // validates n, p, q for both oracles
    let ideal = family_ideal(family, a.n, a.p, a.q, false)?;
    let closed = match a.oracle {
        Oracle::Closed | Oracle::Both => Some(multiplicity_closed_form(family, a.n, a.p, a.q)?),
        Oracle::Grid => None,
    };
    let grid = match a.oracle {
        Oracle::Grid | Oracle::Both => Some(covolume_grid(&ideal, a.resolution)?),
        Oracle::Closed => None,
    };
    let rel_err = match (&closed, grid) {
        (Some(m), Some(g)) => {
            let m = m.to_string().parse::<f64>().map_err(|e| Failure::Internal(e.to_string()))?;
            Some((g - m).abs() / m)
        }
        _ => None,
    };
    let doc = MultJson {
        schema: SCHEMA_VERSION,
        family: family.name(),
        n: a.n,
        p: a.p,
        q: a.q,
        mult_closed: closed,
        mult_grid: grid,
        resolution: grid.map(|_| a.resolution),
        rel_err,
    };
    emit(&to_json(&doc)?, None)
}

#[derive(Serialize)]
struct Fraction(#[serde(serialize_with = "fraction")] Rational);

#[derive(Serialize)]
struct RecursionJson {
    d: u64,
    #[serde(serialize_with = "fraction")]
    e_n: Rational,
    agrees: bool,
}

#[derive(Serialize)]
struct CrossCheckJson {
    family: &'static str,
    p: u32,
    q: u32,
    #[serde(serialize_with = "bigint")]
    mult_closed: num_bigint::BigInt,
    #[serde(serialize_with = "fraction")]
    scaled_mult: Rational,
    agrees: bool,
}

#[derive(Serialize)]
struct MassJson {
    schema: &'static str,
    geometry: &'static str,
    n: usize,
    #[serde(serialize_with = "fraction")]
    c: Rational,
    iota: Vec<Fraction>,
    #[serde(serialize_with = "fraction")]
    e_n: Rational,
    #[serde(serialize_with = "fraction")]
    delta: Rational,
    #[serde(serialize_with = "fraction")]
    volume: Rational,
    full_mass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    recursion: Option<RecursionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<CrossCheckJson>,
}

fn geometry_of(g: GeometryArg) -> Geometry {
    match g {
        GeometryArg::Trivial => Geometry::Trivial,
        GeometryArg::Hyperplane => Geometry::Hyperplane,
        GeometryArg::Point => Geometry::Point,
        GeometryArg::Custom => Geometry::Custom,
    }
}

fn mass(a: MassArgs) -> Out {
    let geometry = geometry_of(a.geometry);
    if a.iota.is_some() && geometry != Geometry::Custom {
        return Err(Failure::Invalid("--iota is only accepted with --geometry custom".into()));
    }
    let data = IntersectionData::build(geometry, a.n, a.c.clone(), a.iota.map(|l| l.0), a.allow_any_c)?;
    let e_n = residual_mass(&data);
    let defect = full_mass_defect(&data);
    let recursion = if a.check_recursion {
        let d = match a.d {
            Some(d) => d,
            None => default_scale(data.c())?,
        };
        let r = mass_via_recursion(&data, d)?;
        if r != e_n {
            return Err(Failure::Internal(format!(
                "recursion gives {} but the closed formula gives {}",
                r.fraction_string(),
                e_n.fraction_string()
            )));
        }
        Some(RecursionJson { d, e_n: r, agrees: true })
    } else {
        None
    };
    let cross = if a.cross_check {
        let family = match geometry {
            Geometry::Hyperplane => Family::Hyperplane,
            Geometry::Point => Family::Point,
            _ => return Err(Failure::Invalid("--cross-check needs --geometry hyperplane or point".into())),
        };
        let (p, q) = a.c.num_den();
        let (Ok(p), Ok(q)) = (p.parse::<u32>(), q.parse::<u32>()) else {
            return Err(Failure::Invalid("c must be a nonnegative fraction with small terms for --cross-check".into()));
        };
        let cc = cross_check(family, a.n, p, q, None)?;
        Some(CrossCheckJson { family: family.name(), p, q, mult_closed: cc.mult_closed, scaled_mult: cc.scaled_mult, agrees: true })
    } else {
        None
    };
    let doc = MassJson {
        schema: SCHEMA_VERSION,
        geometry: geometry.name(),
        n: a.n,
        c: data.c().clone(),
        iota: data.iota().iter().cloned().map(Fraction).collect(),
        full_mass: is_full_mass(&data)?,
        e_n,
        delta: defect.delta,
        volume: defect.volume,
        recursion,
        cross_check: cross,
    };
    emit(&to_json(&doc)?, None)
}

#[derive(Serialize)]
struct ApproxRow {
    m: u64,
    #[serde(serialize_with = "fraction")]
    e_n: Rational,
    #[serde(serialize_with = "fraction")]
    lelong: Rational,
    order: u64,
}

#[derive(Serialize)]
struct LambdaJson {
    #[serde(serialize_with = "fraction")]
    lambda: Rational,
    log_multiplier_order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplier_order: Option<u64>,
    #[serde(serialize_with = "opt_fraction", skip_serializing_if = "Option::is_none")]
    e_2: Option<Rational>,
}

#[derive(Serialize)]
struct ApproxJson {
    schema: &'static str,
    n: usize,
    m_max: u64,
    raw: bool,
    approximants: Vec<ApproxRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<LambdaJson>,
}

fn approx(a: ApproxArgs) -> Out {
    if a.m_max < 1 {
        return Err(Failure::Invalid("--m-max must be at least 1".into()));
    }
    let rows = (1..=a.m_max)
        .map(|m| {
            let e_n = if a.raw { approx_mass_raw(m, a.n)? } else { approx_mass(m, a.n)? };
            Ok(ApproxRow { m, e_n, lelong: approx_lelong(m, a.n)?, order: inferred_order(m, a.n) })
        })
        .collect::<Result<Vec<_>, pshmass::Error>>()?;
    let lambda = match a.lambda {
        None => None,
        Some(l) => {
            let two = a.n == 2;
            Some(LambdaJson {
                log_multiplier_order: log_multiplier_order(&l, a.n)?,
                multiplier_order: if two { Some(multiplier_order(&l)?) } else { None },
                e_2: if two { Some(e2_of_lambda(&l)?) } else { None },
                lambda: l,
            })
        }
    };
    match a.format {
        Format::Csv => {
            let text = csv(
                &["m", "e_n", "lelong", "order"],
                rows.iter()
                    .map(|r| vec![r.m.to_string(), r.e_n.fraction_string(), r.lelong.fraction_string(), r.order.to_string()]),
            );
            emit(&text, None)
        }
        Format::Json => {
            let doc = ApproxJson { schema: SCHEMA_VERSION, n: a.n, m_max: a.m_max, raw: a.raw, approximants: rows, lambda };
            emit(&to_json(&doc)?, None)
        }
    }
}

fn report(a: ReportArgs) -> Out {
    let family = match a.family {
        ReportFamily::Cantor2 => {
            if a.n.is_some_and(|n| n != 2) {
                return Err(Failure::Invalid("the cantor2 family lives in dimension 2".into()));
            }
            PshFamily::Cantor2
        }
        ReportFamily::CantorHd => {
            let n = a.n.ok_or_else(|| Failure::Invalid("cantor-hd needs --n".into()))?;
            let gamma = a.gamma.ok_or_else(|| Failure::Invalid("cantor-hd needs --gamma".into()))?;
            PshFamily::cantor_high_dim(n, gamma)?
        }
        ReportFamily::Analytic => {
            let geometry = a.geometry.ok_or_else(|| Failure::Invalid("analytic needs --geometry".into()))?;
            if geometry == GeometryArg::Custom {
                return Err(Failure::Invalid("analytic reports support trivial, hyperplane and point geometries".into()));
            }
            let c = a.c.ok_or_else(|| Failure::Invalid("analytic needs --c".into()))?;
            PshFamily::Analytic(IntersectionData::new(geometry_of(geometry), a.n.unwrap_or(2), c)?)
        }
    };
    let report = counterexample_report(&family, a.m_max)?;
    let text = match a.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report.to_csv(),
    };
    emit(&text, a.out.as_deref())
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    schema: &'static str,
    profile: &'static str,
    all_passed: bool,
    checks: &'a [verify::CheckOutcome],
}

fn run_verify(a: VerifyArgs) -> Out {
    let (profile, name) = match a.profile {
        ProfileArg::Fast => (Profile::Fast, "fast"),
        ProfileArg::Full => (Profile::Full, "full"),
    };
    let outcomes = verify::run(profile);
    for o in &outcomes {
        eprintln!("criterion {}: {:.3} s", o.id, o.elapsed.as_secs_f64());
    }
    let all_passed = outcomes.iter().all(|o| o.passed);
    let text = match a.format {
        VerifyFormat::Json => to_json(&VerifyJson { schema: SCHEMA_VERSION, profile: name, all_passed, checks: &outcomes })?,
        VerifyFormat::Table => {
            let mut t = String::new();
            for o in &outcomes {
                t.push_str(&o.line());
                t.push('\n');
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            t.push_str(&format!("{passed}/{} passed\n", outcomes.len()));
            t
        }
    };
    emit(&text, None)?;
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
