//! Report records and their JSON-lines and CSV renderings.

use std::io::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::Value;

use signlab_core::concentration::{Annotation, CheckPoint, CheckReport};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Field {
    /// Text form shared by both formats; numbers use the JSON spelling,
    /// non-finite values the strings `inf`, `-inf` and `NaN`.
    fn text(&self) -> String {
        match self {
            Field::Num(x) if x.is_finite() => serde_json::to_string(x).expect("finite float"),
            Field::Num(x) => non_finite(*x).into(),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) => s.clone(),
        }
    }
}

fn non_finite(x: f64) -> &'static str {
    if x.is_nan() {
        "NaN"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Field::Num(x) => s.serialize_str(non_finite(*x)),
            Field::Int(i) => s.serialize_u64(*i),
            Field::Bool(b) => s.serialize_bool(*b),
            Field::Text(t) => s.serialize_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            fields: Vec::new(),
        }
    }

    pub fn num(mut self, key: &'static str, x: f64) -> Self {
        self.fields.push((key, Field::Num(x)));
        self
    }

    pub fn int(mut self, key: &'static str, i: u64) -> Self {
        self.fields.push((key, Field::Int(i)));
        self
    }

    pub fn flag(mut self, key: &'static str, b: bool) -> Self {
        self.fields.push((key, Field::Bool(b)));
        self
    }

    pub fn text(mut self, key: &'static str, t: impl Into<String>) -> Self {
        self.fields.push((key, Field::Text(t.into())));
        self
    }

    pub fn point(p: &CheckPoint) -> Self {
        Record::new("point")
            .text("name", p.name.clone())
            .num("input", p.input)
            .num("lhs", p.lhs)
            .num("rhs", p.rhs)
            .flag("holds", p.holds)
            .num("margin", p.margin)
    }

    pub fn annotation(report: &str, a: &Annotation) -> Self {
        let r = Record::new("value")
            .text("name", format!("{report}: {}", a.label))
            .num("value", a.value);
        match a.holds {
            Some(h) => r.flag("holds", h),
            None => r,
        }
    }

    pub fn holds(&self) -> Option<bool> {
        self.fields.iter().find_map(|(k, v)| match (k, v) {
            (&"holds", Field::Bool(b)) if self.kind == "point" => Some(*b),
            _ => None,
        })
    }
}

/// Points (sorted by input) followed by annotations.
pub fn report_records(report: &CheckReport) -> Vec<Record> {
    let mut points: Vec<&CheckPoint> = report.points.iter().collect();
    points.sort_by(|a, b| a.input.total_cmp(&b.input));
    points
        .into_iter()
        .map(Record::point)
        .chain(report.annotations.iter().map(|a| Record::annotation(&report.name, a)))
        .collect()
}

/// Closing record: overall verdict over every point record.
pub fn summary(records: &[Record]) -> Record {
    let verdicts: Vec<bool> = records.iter().filter_map(Record::holds).collect();
    let worst = records
        .iter()
        .filter(|r| r.kind == "point")
        .flat_map(|r| r.fields.iter())
        .filter_map(|(k, v)| match (k, v) {
            (&"margin", Field::Num(m)) => Some(*m),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let mut s = Record::new("summary")
        .flag("all_hold", verdicts.iter().all(|&h| h))
        .int("points", verdicts.len() as u64)
        .int("violations", verdicts.iter().filter(|&&h| !h).count() as u64);
    if !verdicts.is_empty() {
        s = s.num("worst_margin", worst);
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub config: Value,
}

struct Line<'a> {
    record: &'a Record,
    meta: &'a Meta,
}

impl Serialize for Line<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.record.fields.len() + 2))?;
        map.serialize_entry("kind", self.record.kind)?;
        for (k, v) in &self.record.fields {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("meta", self.meta)?;
        map.end()
    }
}

pub fn write(out: &mut impl Write, format: Format, meta: &Meta, records: &[Record]) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for record in records {
                serde_json::to_writer(&mut *out, &Line { record, meta })?;
                writeln!(out)?;
            }
            Ok(())
        }
        Format::Csv => write_csv(out, meta, records),
    }
}

/// One row per record; the columns are `kind`, every field key in order
/// of first appearance, then the metadata.
fn write_csv(out: &mut impl Write, meta: &Meta, records: &[Record]) -> std::io::Result<()> {
    let mut keys: Vec<&str> = Vec::new();
    for (k, _) in records.iter().flat_map(|r| r.fields.iter()) {
        if !keys.contains(k) {
            keys.push(k);
        }
    }
    let config = serde_json::to_string(&meta.config)?;
    let mut w = csv::Writer::from_writer(out);
    let header = ["kind"]
        .into_iter()
        .chain(keys.iter().copied())
        .chain(["version", "subcommand", "seed", "config"]);
    w.write_record(header)?;
    for r in records {
        let mut row = vec![r.kind.to_string()];
        for key in &keys {
            let cell = r.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.text());
            row.push(cell.unwrap_or_default());
        }
        row.extend([meta.version.into(), meta.subcommand.into(), meta.seed.to_string(), config.clone()]);
        w.write_record(&row)?;
    }
    w.flush()
}
