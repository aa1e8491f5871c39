//! JSON documents for series, orders, echelons and division results.
//!
//! ```text
//! series:  {"vars": ["x","y","z"], "prec": 12, "terms": [{"e": [2,0,2], "c": "1/12"}]}
//! order:   {"kind": "lex", "precedence": ["x","y","z"]}
//! echelon: {"vars": [...], "order": {...}, "prec": 12,
//!           "generators": [{"series": {...}, "scope": 2}, {"path": "g.json", "scope": 2}]}
//! ```
//!
//! Coefficients are exact strings `p/q` (or `p`). Generator paths are
//! relative to the echelon file. Every validation error names the JSON path
//! of the offending value.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::division::DivisionResult;
use crate::echelon::{EchelonPresentation, ScopedGenerator};
use crate::error::{Error, Result};
use crate::order::{MonomialOrder, OrderKind};
use crate::series::{parse_rational, Exponent, Rational, Series, Term};

/// A series together with the names of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSeries {
    pub vars: Vec<String>,
    pub series: Series,
}

/// An echelon presentation together with the names of its variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedEchelon {
    pub vars: Vec<String>,
    pub presentation: EchelonPresentation,
}

struct Coefficient(Rational);

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(Coefficient)
            .ok_or_else(|| de::Error::custom(format!("`{s}` is not an exact rational \"p/q\"")))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    e: Vec<u32>,
    c: Coefficient,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDoc {
    vars: Vec<String>,
    prec: u32,
    terms: Vec<TermDoc>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OrderDoc {
    kind: OrderKind,
    precedence: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    series: Option<SeriesDoc>,
    path: Option<String>,
    scope: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EchelonDoc {
    vars: Vec<String>,
    order: OrderDoc,
    prec: Option<u32>,
    generators: Vec<GeneratorDoc>,
}

#[derive(Serialize)]
struct SeriesOut<'a> {
    vars: &'a [String],
    prec: u32,
    terms: Vec<Term>,
}

impl<'a> SeriesOut<'a> {
    fn new(s: &Series, vars: &'a [String]) -> Self {
        SeriesOut {
            vars,
            prec: s.prec(),
            terms: s.terms().map(|(e, c)| Term::new(c.clone(), e.clone())).collect(),
        }
    }
}

#[derive(Serialize)]
struct GeneratorOut<'a> {
    series: SeriesOut<'a>,
    scope: usize,
}

#[derive(Serialize)]
struct EchelonOut<'a> {
    vars: &'a [String],
    order: OrderDoc,
    prec: Option<u32>,
    generators: Vec<GeneratorOut<'a>>,
}

#[derive(Serialize)]
struct DivisionOut<'a> {
    quotients: Vec<SeriesOut<'a>>,
    remainder: SeriesOut<'a>,
    min_witness: Option<&'a Exponent>,
    remainder_scope: usize,
    prec: u32,
}

fn schema(origin: &str, path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        origin: origin.to_string(),
        path: path.into(),
        message: message.into(),
    }
}

fn deserialize<'a, T: Deserialize<'a>>(text: &'a str, origin: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| schema(origin, e.path().to_string(), e.inner().to_string()))?;
    de.end().map_err(|e| schema(origin, ".", e.to_string()))?;
    Ok(value)
}

fn check_vars(vars: &[String], origin: &str, at: &str) -> Result<()> {
    if vars.is_empty() {
        return Err(schema(origin, at, "at least one variable is required"));
    }
    let mut seen = HashSet::new();
    for (i, v) in vars.iter().enumerate() {
        if v.is_empty() || !seen.insert(v) {
            return Err(schema(
                origin,
                format!("{at}[{i}]"),
                format!("variable `{v}` is empty or repeated"),
            ));
        }
    }
    Ok(())
}

fn series_from_doc(doc: SeriesDoc, origin: &str, at: &str) -> Result<NamedSeries> {
    let sep = if at.is_empty() { "" } else { "." };
    check_vars(&doc.vars, origin, &format!("{at}{sep}vars"))?;
    let n = doc.vars.len();
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, t) in doc.terms.into_iter().enumerate() {
        let here = format!("{at}{sep}terms[{i}]");
        if t.e.len() != n {
            return Err(schema(
                origin,
                format!("{here}.e"),
                format!("expected {n} exponents, found {}", t.e.len()),
            ));
        }
        let e = Exponent::new(t.e);
        if e.degree() > doc.prec {
            return Err(schema(
                origin,
                format!("{here}.e"),
                format!("degree {} exceeds prec {}", e.degree(), doc.prec),
            ));
        }
        if !seen.insert(e.clone()) {
            return Err(schema(origin, format!("{here}.e"), "repeated exponent"));
        }
        terms.push((e, t.c.0));
    }
    Ok(NamedSeries {
        series: Series::from_terms(n, doc.prec, terms)?,
        vars: doc.vars,
    })
}

pub fn parse_series(text: &str, origin: &str) -> Result<NamedSeries> {
    series_from_doc(deserialize(text, origin)?, origin, "")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_series(path: &Path) -> Result<NamedSeries> {
    parse_series(&read_text(path)?, &path.display().to_string())
}

fn order_from_doc(doc: &OrderDoc, vars: &[String], origin: &str) -> Result<MonomialOrder> {
    let precedence = doc
        .precedence
        .iter()
        .enumerate()
        .map(|(i, name)| {
            vars.iter().position(|v| v == name).ok_or_else(|| {
                schema(
                    origin,
                    format!("order.precedence[{i}]"),
                    format!("unknown variable `{name}`"),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if precedence.len() != vars.len() {
        return Err(schema(
            origin,
            "order.precedence",
            "must list every variable exactly once",
        ));
    }
    MonomialOrder::new(doc.kind, precedence).map_err(|e| schema(origin, "order.precedence", e.to_string()))
}

/// Parses an echelon document; `base` resolves generator paths.
pub fn parse_echelon(text: &str, origin: &str, base: &Path) -> Result<NamedEchelon> {
    let doc: EchelonDoc = deserialize(text, origin)?;
    check_vars(&doc.vars, origin, "vars")?;
    let order = order_from_doc(&doc.order, &doc.vars, origin)?;
    let mut generators = Vec::with_capacity(doc.generators.len());
    for (i, g) in doc.generators.into_iter().enumerate() {
        let at = format!("generators[{i}]");
        let named = match (g.series, g.path) {
            (Some(s), None) => series_from_doc(s, origin, &format!("{at}.series"))?,
            (None, Some(p)) => {
                let file: PathBuf = base.join(&p);
                read_series(&file).map_err(|e| schema(origin, format!("{at}.path"), e.to_string()))?
            }
            _ => return Err(schema(origin, at, "exactly one of `series` and `path` is required")),
        };
        if named.vars != doc.vars {
            return Err(schema(origin, at, "generator variables differ from the echelon's"));
        }
        let series = match doc.prec {
            Some(p) if p < named.series.prec() => named.series.truncate(p),
            _ => named.series,
        };
        if series.is_zero() {
            return Err(schema(origin, at, "generator is zero"));
        }
        if g.scope > doc.vars.len() {
            return Err(schema(
                origin,
                format!("{at}.scope"),
                format!("scope exceeds {} variables", doc.vars.len()),
            ));
        }
        generators.push(ScopedGenerator::new(series, g.scope)?);
    }
    Ok(NamedEchelon {
        presentation: EchelonPresentation::new(order, generators)?,
        vars: doc.vars,
    })
}

pub fn read_echelon(path: &Path) -> Result<NamedEchelon> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_echelon(&read_text(path)?, &path.display().to_string(), base)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn series_value(s: &Series, vars: &[String]) -> serde_json::Value {
    serde_json::to_value(SeriesOut::new(s, vars)).expect("documents serialize")
}

pub fn series_json(s: &Series, vars: &[String]) -> String {
    pretty(&SeriesOut::new(s, vars))
}

pub fn echelon_json(p: &EchelonPresentation, vars: &[String]) -> String {
    pretty(&EchelonOut {
        vars,
        order: OrderDoc {
            kind: p.order().kind(),
            precedence: p.order().precedence().iter().map(|&i| vars[i].clone()).collect(),
        },
        prec: p.min_prec(),
        generators: p
            .generators()
            .iter()
            .map(|g| GeneratorOut {
                series: SeriesOut::new(g.series(), vars),
                scope: g.scope(),
            })
            .collect(),
    })
}

pub fn division_json(r: &DivisionResult, vars: &[String]) -> String {
    pretty(&DivisionOut {
        quotients: r.quotients.iter().map(|q| SeriesOut::new(q, vars)).collect(),
        remainder: SeriesOut::new(&r.remainder, vars),
        min_witness: r.min_witness.as_ref(),
        remainder_scope: r.remainder_scope,
        prec: r.prec,
    })
}

/// Writes `text` to `path`.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Comma-separated exponent such as `2,0,2`.
pub fn parse_exponent(text: &str, nvars: usize) -> Result<Exponent> {
    let parts = text
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Domain(format!("exponent `{text}`: {e}")))?;
    if parts.len() != nvars {
        return Err(Error::Dimension {
            expected: nvars,
            found: parts.len(),
        });
    }
    Ok(Exponent::new(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational;

    const G2: &str = r#"{"vars":["x","y","z"],"prec":6,"terms":[{"e":[2,0,2],"c":"1/12"},{"e":[2,0,3],"c":"1/24"}]}"#;

    #[test]
    fn series_round_trip() {
        let s = parse_series(G2, "g2").unwrap();
        assert_eq!(s.series.coeff(&Exponent::from([2, 0, 2])), rational(1, 12));
        let text = series_json(&s.series, &s.vars);
        let again = parse_series(&text, "again").unwrap();
        assert_eq!(again, s);
        assert_eq!(series_json(&again.series, &again.vars), text);
    }

    #[test]
    fn bad_coefficient_names_its_path() {
        let text = r#"{"vars":["x"],"prec":3,"terms":[{"e":[1],"c":"1"},{"e":[2],"c":"0.5"}]}"#;
        match parse_series(text, "f.json").unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "terms[1].c"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_their_path() {
        let cases = [
            (
                r#"{"vars":["x","y"],"prec":3,"terms":[{"e":[1],"c":"1"}]}"#,
                "terms[0].e",
            ),
            (r#"{"vars":["x"],"prec":1,"terms":[{"e":[2],"c":"1"}]}"#, "terms[0].e"),
            (r#"{"vars":["x","x"],"prec":1,"terms":[]}"#, "vars[1]"),
            (r#"{"vars":["x"],"prec":1,"terms":[],"extra":1}"#, "extra"),
            (r#"{"vars":["x"],"prec":-1,"terms":[]}"#, "prec"),
        ];
        for (text, want) in cases {
            match parse_series(text, "f.json").unwrap_err() {
                Error::Schema { path, .. } => assert_eq!(path, want, "{text}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn echelon_with_relative_path() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("g2.json"), G2).unwrap();
        let text = r#"{
            "vars": ["x","y","z"],
            "order": {"kind": "lex", "precedence": ["x","y","z"]},
            "generators": [
                {"series": {"vars":["x","y","z"],"prec":6,"terms":[{"e":[0,0,0],"c":"1"}]}, "scope": 2},
                {"path": "g2.json", "scope": 2}
            ]
        }"#;
        fs::write(dir.path().join("e.json"), text).unwrap();
        let e = read_echelon(&dir.path().join("e.json")).unwrap();
        assert_eq!(e.presentation.len(), 2);
        let out = echelon_json(&e.presentation, &e.vars);
        let again = parse_echelon(&out, "out", dir.path()).unwrap();
        assert_eq!(again, e);
    }

    #[test]
    fn echelon_errors() {
        let bad_var = r#"{"vars":["x","y"],"order":{"kind":"lex","precedence":["x","w"]},"generators":[]}"#;
        match parse_echelon(bad_var, "e", Path::new(".")).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "order.precedence[1]"),
            other => panic!("{other:?}"),
        }
        let bad_kind = r#"{"vars":["x"],"order":{"kind":"revlex","precedence":["x"]},"generators":[]}"#;
        match parse_echelon(bad_kind, "e", Path::new(".")).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "order.kind"),
            other => panic!("{other:?}"),
        }
        let bad_scope = r#"{"vars":["x"],"order":{"kind":"lex","precedence":["x"]},
            "generators":[{"series":{"vars":["x"],"prec":2,"terms":[{"e":[1],"c":"1"}]},"scope":2}]}"#;
        match parse_echelon(bad_scope, "e", Path::new(".")).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "generators[0].scope"),
            other => panic!("{other:?}"),
        }
        let missing = r#"{"vars":["x"],"order":{"kind":"lex","precedence":["x"]},
            "generators":[{"path":"nope.json","scope":1}]}"#;
        match parse_echelon(missing, "e", Path::new("/nonexistent")).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "generators[0].path"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponents_from_the_command_line() {
        assert_eq!(parse_exponent("2, 0,2", 3).unwrap(), Exponent::from([2, 0, 2]));
        assert!(parse_exponent("2,0", 3).is_err());
        assert!(parse_exponent("2,a,0", 3).is_err());
    }
}
