//! Report documents and their three renderings.
//!
//! Floats are printed with 17 significant digits and non-finite values as
//! `null`; JSON keys come out sorted because maps are `BTreeMap`s.

use std::collections::BTreeMap;

use serde_json::{Map, Number, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Null,
}

impl From<f64> for Val {
    fn from(x: f64) -> Self {
        Val::Float(x)
    }
}
impl From<i64> for Val {
    fn from(x: i64) -> Self {
        Val::Int(x)
    }
}
impl From<u32> for Val {
    fn from(x: u32) -> Self {
        Val::Int(x.into())
    }
}
impl From<usize> for Val {
    fn from(x: usize) -> Self {
        Val::Int(x as i64)
    }
}
impl From<u64> for Val {
    fn from(x: u64) -> Self {
        Val::Int(x as i64)
    }
}
impl From<bool> for Val {
    fn from(x: bool) -> Self {
        Val::Bool(x)
    }
}
impl From<&str> for Val {
    fn from(x: &str) -> Self {
        Val::Str(x.to_owned())
    }
}
impl From<String> for Val {
    fn from(x: String) -> Self {
        Val::Str(x)
    }
}
impl<T: Into<Val>> From<Option<T>> for Val {
    fn from(x: Option<T>) -> Self {
        x.map_or(Val::Null, Into::into)
    }
}

/// `x` with 17 significant digits, positional for exponents in [-3, 17).
pub fn fmt17(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some("0.0".into());
    }
    let s = format!("{x:.16e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    let sign = if neg { "-" } else { "" };
    let body = if (0..17).contains(&exp) {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            format!("{int}.0")
        } else {
            format!("{int}.{frac}")
        }
    } else if (-3..0).contains(&exp) {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        return Some(format!("{mant}e{exp}"));
    };
    Some(format!("{sign}{body}"))
}

impl Val {
    fn json(&self) -> Value {
        match self {
            Val::Int(i) => Value::from(*i),
            Val::Float(x) => match fmt17(*x) {
                Some(s) => Value::Number(s.parse::<Number>().expect("valid number")),
                None => Value::Null,
            },
            Val::Str(s) => Value::String(s.clone()),
            Val::Bool(b) => Value::Bool(*b),
            Val::Null => Value::Null,
        }
    }

    fn text(&self) -> String {
        match self {
            Val::Int(i) => i.to_string(),
            Val::Float(x) => fmt17(*x).unwrap_or_else(|| "null".into()),
            Val::Str(s) => s.clone(),
            Val::Bool(b) => b.to_string(),
            Val::Null => "null".into(),
        }
    }

    fn csv(&self) -> String {
        let t = self.text();
        if t.contains([',', '"', '\n']) {
            format!("\"{}\"", t.replace('"', "\"\""))
        } else {
            t
        }
    }
}

/// A flat key-value document, optionally carrying one table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub meta: BTreeMap<String, Val>,
    pub table: Option<Table>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Key of the row array in JSON.
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Val>>,
}

impl Report {
    pub fn set(&mut self, key: &str, v: impl Into<Val>) -> &mut Self {
        self.meta.insert(key.to_owned(), v.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }

    fn json(&self) -> String {
        let mut map: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Object(t.columns.iter().zip(r).map(|(c, v)| ((*c).to_owned(), v.json())).collect()))
                .collect();
            map.insert(t.name.to_owned(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
        s.push('\n');
        s
    }

    /// Tables render as header plus rows; flat documents as `key,value`.
    fn csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(t) => {
                out.push_str(&t.columns.join(","));
                out.push('\n');
                for r in &t.rows {
                    out.push_str(&r.iter().map(Val::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("key,value\n");
                for (k, v) in &self.meta {
                    out.push_str(&format!("{k},{}\n", v.csv()));
                }
            }
        }
        out
    }

    fn text(&self) -> String {
        let width = self.meta.keys().map(String::len).max().unwrap_or(0);
        let mut out: String = self.meta.iter().map(|(k, v)| format!("{k:<width$}  {}\n", v.text())).collect();
        if let Some(t) = &self.table {
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Val::text).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| cells.iter().map(|r| r[j].len()).chain([t.columns[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |items: Vec<&str>| {
                items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_owned()
            };
            out.push('\n');
            out.push_str(&line(t.columns.clone()));
            out.push('\n');
            for r in &cells {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(10.0).unwrap(), "10.000000000000000");
        assert_eq!(fmt17(10.0 / 3.0).unwrap(), "3.3333333333333335");
        assert_eq!(fmt17(-2.0f64.sqrt()).unwrap(), "-1.4142135623730951");
        assert_eq!(fmt17(1e-3).unwrap(), "0.0010000000000000000");
        assert_eq!(fmt17(1.5e-9).unwrap(), "1.5000000000000000e-9");
        assert_eq!(fmt17(0.0).unwrap(), "0.0");
        assert_eq!(fmt17(f64::NAN), None);
        for x in [0.1, 1.0 / 7.0, 6.02e23, -3.5e-12, 123456.789] {
            assert_eq!(fmt17(x).unwrap().parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_sorted_and_null() {
        let mut r = Report::default();
        r.set("zeta", 1.0).set("alpha", f64::INFINITY).set("mid", "x");
        let s = r.render(Format::Json);
        let (a, m, z) = (s.find("alpha").unwrap(), s.find("mid").unwrap(), s.find("zeta").unwrap());
        assert!(a < m && m < z);
        assert!(s.contains("\"alpha\": null") && s.contains("1.0000000000000000") && s.ends_with('\n'));
    }
}
