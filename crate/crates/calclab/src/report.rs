//! Check records and JSON/CSV report output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

/// One verified inequality or invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The statement being checked, in plain notation.
    pub anchor: String,
    #[serde(with = "float_or_tag")]
    pub constant: f64,
    #[serde(with = "float_or_tag")]
    pub threshold: f64,
    pub passed: bool,
    pub runtime_s: f64,
    /// Supporting measurements, keyed by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl Check {
    /// Passes when `constant ≤ threshold`.
    pub fn at_most(name: &str, anchor: &str, constant: f64, threshold: f64) -> Self {
        Self::new(name, anchor, constant, threshold, constant <= threshold)
    }

    /// Passes when `constant ≥ threshold`.
    pub fn at_least(name: &str, anchor: &str, constant: f64, threshold: f64) -> Self {
        Self::new(name, anchor, constant, threshold, constant >= threshold)
    }

    pub fn new(name: &str, anchor: &str, constant: f64, threshold: f64, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            constant,
            threshold,
            passed,
            runtime_s: 0.0,
            details: BTreeMap::new(),
        }
    }

    pub fn timed(mut self, since: Instant) -> Self {
        self.runtime_s = since.elapsed().as_secs_f64();
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.to_string(), v);
        self
    }

    /// Fails the check, whatever the comparison said.
    pub fn require(mut self, ok: bool) -> Self {
        self.passed &= ok;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,anchor,constant,threshold,passed,runtime_s\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&c.name),
                csv_field(&c.anchor),
                c.constant,
                c.threshold,
                c.passed,
                c.runtime_s
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("name,anchor,constant,threshold,passed,runtime_s") => {}
            other => bail!("unexpected CSV header {other:?}"),
        }
        let mut checks = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let f = split_csv(line)?;
            if f.len() != 6 {
                bail!("expected 6 columns, got {} in {line:?}", f.len());
            }
            checks.push(Check {
                name: f[0].clone(),
                anchor: f[1].clone(),
                constant: f[2].parse()?,
                threshold: f[3].parse()?,
                passed: f[4].parse()?,
                runtime_s: f[5].parse()?,
                details: BTreeMap::new(),
            });
        }
        Ok(Self { checks, metadata: BTreeMap::new() })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Zeroes every runtime so two reports can be compared for determinism.
    pub fn without_runtimes(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.runtime_s = 0.0;
        }
        r.metadata.remove("runtime_s");
        r
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_csv(line: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', true) => quoted = false,
            ('"', false) if cur.is_empty() => quoted = true,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    if quoted {
        bail!("unterminated quote in {line:?}");
    }
    out.push(cur);
    Ok(out)
}

/// Finite floats as JSON numbers; infinities and NaN as the strings
/// `"inf"`, `"-inf"`, `"nan"`.
mod float_or_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Tag(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Tag(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::default();
        r.checks.push(Check::at_most("a", "|T f| ≤ C M f, pointwise", 1.5, 2.0).detail("n", 64));
        r.checks.push(Check::at_least("b,quoted \"x\"", "|E_Q| ≥ η|Q|", 0.75, 0.5));
        r.checks.push(Check::at_most("c", "finite", f64::INFINITY, f64::INFINITY));
        r.meta("seed", 7);
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"inf\""));
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let csv = r.to_csv();
        assert!(csv.lines().all(|l| split_csv(l).unwrap().len() == 6));
        let back = Report::from_csv(&csv).unwrap();
        assert_eq!(back.checks.len(), 3);
        for (a, b) in back.checks.iter().zip(&r.checks) {
            assert_eq!((a.name.as_str(), a.constant, a.passed), (b.name.as_str(), b.constant, b.passed));
        }
    }
}
