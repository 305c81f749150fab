//! Handlers for the non-verification subcommands.

use crate::args::{EmitSeries, ExampleChoice, FanAction, GkzAction, MirrorAction, PolytopeAction};
use crate::config::RunConfig;
use crate::emit::{series_to_csv, series_to_text};
use crate::error::{input, CliError};
use crate::report::Report;
use crate::verify::verify_morrison;
use cymirror::amodel::appendix_pipeline;
use cymirror::bmodel::{run, Pipeline};
use cymirror::examples::Example;
use cymirror::fan::{box_elements, canonical_lifting, contract_semiample, star_subdivision, Fan, StackyFan};
use cymirror::gkz::{build_aext, derive_pf, holo_series, GkzSystem, LinearRatio, PfOperator};
use cymirror::polytope::{integral_points, is_reflexive, polar_dual, LatticePolytope};
use cymirror::rational::{to_fraction_string, Rational};
use cymirror::series::SeriesJson;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Result of a command before formatting.
pub enum Output {
    /// Arbitrary JSON with a tabular view for CSV and text.
    Table { json: Value, header: Vec<String>, rows: Vec<Vec<String>> },
    Series(SeriesJson),
    Report(Report),
}

fn table(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Output {
    Output::Table { json, header: header.iter().map(|s| s.to_string()).collect(), rows }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn joined<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid {what} {}: {e}", path.display())))
}

fn required(flag: &Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    flag.clone().or_else(|| fallback.clone()).ok_or_else(|| CliError::Config(format!("--{what} is required")))
}

/// Loads the polytope named by the flag or the config file.
pub fn load_polytope(flag: &Option<PathBuf>, cfg: &RunConfig) -> Result<LatticePolytope, CliError> {
    read_json(&required(flag, &cfg.polytope, "polytope")?, "polytope")
}

fn load_fan(flag: &Option<PathBuf>, cfg: &RunConfig) -> Result<Fan, CliError> {
    read_json(&required(flag, &cfg.fan, "fan")?, "fan")
}

fn fan_output(fan: &Fan, extra: Option<(&str, Value)>) -> Output {
    let mut rows: Vec<Vec<String>> =
        fan.rays().iter().enumerate().map(|(i, r)| vec!["ray".into(), i.to_string(), joined(r)]).collect();
    rows.extend(fan.max_cones().iter().enumerate().map(|(i, c)| vec!["cone".into(), i.to_string(), joined(c)]));
    let mut json = to_json(fan);
    if let (Some((k, v)), Value::Object(map)) = (extra, &mut json) {
        map.insert(k.into(), v);
    }
    table(json, &["kind", "index", "data"], rows)
}

fn polytope_output(p: &LatticePolytope) -> Output {
    let rows = p.vertices().iter().map(|v| vec![joined(v)]).collect();
    table(to_json(p), &["vertex"], rows)
}

pub fn polytope(action: &PolytopeAction, cfg: &RunConfig) -> Result<Output, CliError> {
    match action {
        PolytopeAction::Dual(i) => Ok(polytope_output(&polar_dual(&load_polytope(&i.polytope, cfg)?).map_err(input)?)),
        PolytopeAction::Points(i) => {
            let pts = integral_points(&load_polytope(&i.polytope, cfg)?);
            let rows = pts.iter().map(|p| vec![joined(p)]).collect();
            Ok(table(json!({ "points": pts }), &["point"], rows))
        }
        PolytopeAction::Reflexive(i) => {
            let r = is_reflexive(&load_polytope(&i.polytope, cfg)?);
            Ok(table(json!({ "reflexive": r }), &["reflexive"], vec![vec![r.to_string()]]))
        }
        PolytopeAction::Morrison(i) => Ok(Output::Report(verify_morrison(&load_polytope(&i.polytope, cfg)?)?)),
    }
}

pub fn fan(action: &FanAction, cfg: &RunConfig) -> Result<Output, CliError> {
    match action {
        FanAction::Subdivide { input: i, ray } => {
            Ok(fan_output(&star_subdivision(&load_fan(&i.fan, cfg)?, ray).map_err(input)?, None))
        }
        FanAction::Lift(i) => Ok(fan_output(&canonical_lifting(&load_fan(&i.fan, cfg)?).map_err(input)?, None)),
        FanAction::Contract { input: i, divisor } => {
            let (f, map) = contract_semiample(&load_fan(&i.fan, cfg)?, divisor).map_err(input)?;
            Ok(fan_output(&f, Some(("cone_map", json!(map)))))
        }
        FanAction::Box(i) => {
            let elements = box_elements(&StackyFan::canonical(load_fan(&i.fan, cfg)?)).map_err(input)?;
            let rows = elements
                .iter()
                .map(|e| {
                    let coeffs: Vec<String> = e.coeffs.iter().map(|(j, a)| format!("{j}:{}", to_fraction_string(a))).collect();
                    vec![e.cone.to_string(), joined(&e.point), coeffs.join(" ")]
                })
                .collect();
            let json: Vec<Value> = elements
                .iter()
                .map(|e| {
                    let coeffs: Vec<Value> = e.coeffs.iter().map(|(j, a)| json!([j, to_fraction_string(a)])).collect();
                    json!({ "cone": e.cone, "point": e.point, "coeffs": coeffs })
                })
                .collect();
            Ok(table(Value::Array(json), &["cone", "point", "coeffs"], rows))
        }
    }
}

/// GKZ system, operator and classical value selected by the configuration.
pub struct Resolved {
    pub system: GkzSystem,
    pub operator: PfOperator,
    pub classical: Option<Rational>,
}

pub fn resolve_source(cfg: &RunConfig) -> Result<Resolved, CliError> {
    let named = |ex: Example| Resolved {
        system: ex.system(),
        operator: ex.operator(),
        classical: Some(cfg.classical.clone().unwrap_or_else(|| ex.classical())),
    };
    match cfg.example {
        Some(ExampleChoice::Hhhh) => Ok(named(Example::Hhhh)),
        Some(ExampleChoice::FourH) => Ok(named(Example::FourH)),
        Some(ExampleChoice::Custom) => {
            let fan = load_fan(&None, cfg)?;
            let partition = cfg.partition.clone().expect("validated in resolve");
            let system = build_aext(&fan, &partition).map_err(input)?;
            if system.kernel_rank() != 1 {
                return Err(CliError::Input(format!("relation lattice has rank {}, not 1", system.kernel_rank())));
            }
            let ell = system.kernel_vector(0).map_err(input)?;
            let operator = derive_pf(&LinearRatio::from_relation(&system.gamma, &ell)).map_err(input)?;
            Ok(Resolved { system, operator, classical: cfg.classical.clone() })
        }
        None => Err(CliError::Config("--example is required".into())),
    }
}

fn pipeline(cfg: &RunConfig) -> Result<Pipeline, CliError> {
    let r = resolve_source(cfg)?;
    let classical = r.classical.ok_or_else(|| CliError::Config("--classical is required for custom systems".into()))?;
    run(&r.system, &r.operator, classical, cfg.order).map_err(input)
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(to_fraction_string).collect()
}

pub fn gkz(action: &GkzAction, cfg: &RunConfig) -> Result<Output, CliError> {
    let r = resolve_source(cfg)?;
    match action {
        GkzAction::Build(_) => {
            let m = &r.system.matrix;
            let rows = (0..m.cols())
                .map(|j| {
                    let col: Vec<String> = (0..m.rows()).map(|i| m.get(i, j).to_string()).collect();
                    vec![r.system.labels[j].clone(), col.join(","), to_fraction_string(&r.system.gamma[j])]
                })
                .collect();
            Ok(table(to_json(&r.system), &["label", "column", "gamma"], rows))
        }
        GkzAction::Pf(_) => {
            let polys: Vec<Vec<String>> = r.operator.polys.iter().map(|p| strings(p)).collect();
            let rows = polys.iter().enumerate().map(|(k, p)| vec![k.to_string(), p.join(",")]).collect();
            Ok(table(json!({ "operator": r.operator.to_string(), "polys": polys }), &["z_power", "theta_coefficients"], rows))
        }
        GkzAction::Series(_) => Ok(Output::Series((&holo_series(&r.system, cfg.order).map_err(input)?).into())),
    }
}

pub fn mirror(action: &MirrorAction, cfg: &RunConfig) -> Result<Output, CliError> {
    let p = pipeline(cfg)?;
    match action {
        MirrorAction::Map(_) => Ok(Output::Series((&p.mirror.forward).into())),
        MirrorAction::Invert(_) => Ok(Output::Series((&p.mirror.inverse).into())),
        MirrorAction::Yukawa(_) => Ok(Output::Series((&p.correlation).into())),
        MirrorAction::Instantons(_) => {
            let rows: Vec<Vec<String>> =
                p.instantons.n.iter().map(|(d, n)| vec![d.to_string(), to_fraction_string(n)]).collect();
            let json: Vec<Value> = rows.iter().map(|r| json!({ "d": r[0].parse::<usize>().expect("index"), "n": r[1] })).collect();
            Ok(table(json!({ "classical": to_fraction_string(&p.instantons.classical), "instantons": json }), &["d", "n"], rows))
        }
    }
}

pub fn emit(series: EmitSeries, cfg: &RunConfig) -> Result<Output, CliError> {
    let appendix = || {
        let [b1, b2] = cfg.appendix_bounds;
        appendix_pipeline(b1, b2).map_err(input)
    };
    let s: SeriesJson = match series {
        EmitSeries::Y0 => (&resolve_source(cfg).and_then(|r| holo_series(&r.system, cfg.order).map_err(input))?).into(),
        EmitSeries::MirrorMap => (&pipeline(cfg)?.mirror.forward).into(),
        EmitSeries::Inverse => (&pipeline(cfg)?.mirror.inverse).into(),
        EmitSeries::Correlation => (&pipeline(cfg)?.correlation).into(),
        EmitSeries::AppendixQ1 => (&appendix()?.q1).into(),
        EmitSeries::AppendixW2 => (&appendix()?.w2).into(),
        EmitSeries::AppendixW3 => (&appendix()?.w3).into(),
    };
    Ok(Output::Series(s))
}

/// Formats an output; JSON is pretty-printed with a trailing newline.
pub fn render(out: &Output, format: crate::args::Format) -> Result<String, CliError> {
    use crate::args::Format;
    Ok(match (out, format) {
        (Output::Table { json, .. }, Format::Json) => pretty(json),
        (Output::Series(s), Format::Json) => pretty(s),
        (Output::Report(r), Format::Json) => pretty(r),
        (Output::Table { header, rows, .. }, Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(input)?;
            for r in rows {
                w.write_record(r).map_err(input)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Input(e.to_string()))?).expect("csv is utf-8")
        }
        (Output::Series(s), Format::Csv) => series_to_csv(s)?,
        (Output::Report(r), Format::Csv) => r.to_csv().map_err(input)?,
        (Output::Table { header, rows, .. }, Format::Text) => {
            let mut s = header.join("\t") + "\n";
            for r in rows {
                s.push_str(&r.join("\t"));
                s.push('\n');
            }
            s
        }
        (Output::Series(s), Format::Text) => series_to_text(s),
        (Output::Report(r), Format::Text) => r.to_text(),
    })
}

fn pretty<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable") + "\n"
}
