//! Series serialization: canonical JSON, CSV and plain text.

use crate::error::{input, CliError};
use cymirror::rational::Rational;
use cymirror::series::{Bound, SeriesJson};
use num_bigint::BigInt;

/// CSV with one exponent column per variable, then numerator and denominator.
pub fn series_to_csv(s: &SeriesJson) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = s.vars.clone();
    header.push("numerator".into());
    header.push("denominator".into());
    w.write_record(&header).map_err(input)?;
    for (exps, c) in &s.terms {
        let (num, den) = c.split_once('/').unwrap_or((c.as_str(), "1"));
        let mut row: Vec<String> = exps.iter().map(u32::to_string).collect();
        row.push(num.into());
        row.push(den.into());
        w.write_record(&row).map_err(input)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Reads the CSV form back; the bound is not part of the CSV and is supplied.
pub fn series_from_csv(text: &str, bound: cymirror::series::BoundJson) -> Result<SeriesJson, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(input)?.clone();
    if header.len() < 2 {
        return Err(CliError::Input("CSV needs numerator and denominator columns".into()));
    }
    let nvars = header.len() - 2;
    let vars: Vec<String> = header.iter().take(nvars).map(str::to_string).collect();
    let mut terms = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(input)?;
        let exps = (0..nvars)
            .map(|i| rec[i].parse::<u32>().map_err(input))
            .collect::<Result<Vec<_>, _>>()?;
        let num: BigInt = rec[nvars].parse().map_err(input)?;
        let den: BigInt = rec[nvars + 1].parse().map_err(input)?;
        if den == BigInt::from(0) {
            return Err(CliError::Input("zero denominator".into()));
        }
        let c = Rational::new(num, den);
        terms.push((exps, cymirror::rational::to_fraction_string(&c)));
    }
    Ok(SeriesJson { vars, bound, terms })
}

/// `c·v^k` lines, one per nonzero term.
pub fn series_to_text(s: &SeriesJson) -> String {
    let mut out = String::new();
    for (exps, c) in &s.terms {
        let mono: Vec<String> = s
            .vars
            .iter()
            .zip(exps)
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        let mono = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
        out.push_str(&format!("{mono}\t{c}\n"));
    }
    out
}

/// Bound in serialized form.
pub fn bound_json(b: &Bound) -> cymirror::series::BoundJson {
    match b {
        Bound::Total(d) => cymirror::series::BoundJson::Total(*d),
        Bound::PerVariable(v) => cymirror::series::BoundJson::PerVariable(v.clone()),
    }
}
