//! Artifact writing: CSV tables, JSON summaries and FNV-1a digests.

use std::hash::Hasher;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bozk::estimates_lab::SweepResult;
use fnv::FnvHasher;
use serde_json::{Map, Value};

/// 64-bit FNV-1a of `bytes` as 16 lowercase hex digits.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut h = FnvHasher::default();
    h.write(bytes);
    format!("{:016x}", h.finish())
}

/// Reals use 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => fmt_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// JSON number, with non-finite values as strings.
pub fn jnum(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(fmt_real(v)), Value::Number)
}

/// Output directory plus the digest of every file written to it.
pub struct Artifacts {
    dir: PathBuf,
    digests: Vec<(String, String)>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            digests: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn digests(&self) -> &[(String, String)] {
        &self.digests
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        self.digests.push((name.to_string(), fnv1a_hex(bytes)));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<Cell>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            anyhow::ensure!(r.len() == header.len(), "row width {} != header width {}", r.len(), header.len());
            w.write_record(r.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
        self.write(name, &bytes)
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// One row per sweep point with every producing parameter.
    pub fn sweep_csv(&mut self, name: &str, sweep: &SweepResult) -> Result<()> {
        let names: Vec<String> = sweep
            .points
            .first()
            .map(|p| p.params.iter().map(|(k, _)| k.clone()).collect())
            .unwrap_or_default();
        let mut header: Vec<String> = ["experiment", "x_name", "x", "measured", "bound", "ratio"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(names.iter().cloned());
        let mut rows = Vec::with_capacity(sweep.points.len());
        for p in &sweep.points {
            let mut r: Vec<Cell> = vec![
                sweep.experiment.as_str().into(),
                sweep.x_name.as_str().into(),
                p.x.into(),
                p.measured.into(),
                p.bound.into(),
                p.ratio.into(),
            ];
            for n in &names {
                let v = p.params.iter().find(|(k, _)| k == n).map_or(f64::NAN, |(_, v)| *v);
                r.push(v.into());
            }
            rows.push(r);
        }
        self.csv(name, &header, &rows)
    }
}

/// Fit summary of a sweep.
pub fn sweep_json(s: &SweepResult) -> Value {
    let mut m = Map::new();
    m.insert("experiment".into(), Value::String(s.experiment.clone()));
    m.insert("x_name".into(), Value::String(s.x_name.clone()));
    m.insert("points".into(), Value::from(s.points.len()));
    m.insert("slope".into(), jnum(s.fit.slope));
    m.insert("intercept".into(), jnum(s.fit.intercept));
    m.insert("r_squared".into(), jnum(s.fit.r_squared));
    m.insert("residual_rms".into(), jnum(s.fit.residual_rms));
    m.insert("max_ratio".into(), jnum(s.max_ratio()));
    m.insert("flagged".into(), Value::Bool(s.flagged));
    m.insert(
        "notes".into(),
        Value::Array(s.notes.iter().cloned().map(Value::String).collect()),
    );
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hex(b"a"), "af63dc4c8601ec8c");
        assert_eq!(fnv1a_hex(b"foobar"), "85944171f73967e8");
    }

    #[test]
    fn reals_have_17_significant_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_real(f64::NAN), "NaN");
        let v = 1.0 / 3.0;
        assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_is_rfc4180_and_digested() {
        let dir = std::env::temp_dir().join(format!("bozk-out-test-{}", std::process::id()));
        let mut a = Artifacts::new(&dir).unwrap();
        let header = vec!["name".to_string(), "v".to_string()];
        a.csv("t.csv", &header, &[vec!["a,b".into(), 1.5.into()]]).unwrap();
        let bytes = std::fs::read(dir.join("t.csv")).unwrap();
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "name,v\r\n\"a,b\",1.5000000000000000e0\r\n");
        assert_eq!(a.digests()[0], ("t.csv".to_string(), fnv1a_hex(&bytes)));
        assert!(a.csv("u.csv", &header, &[vec![1.0.into()]]).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn json_keys_are_sorted() {
        let mut m = Map::new();
        m.insert("zeta".into(), jnum(1.0));
        m.insert("alpha".into(), jnum(f64::INFINITY));
        let s = serde_json::to_string(&Value::Object(m)).unwrap();
        assert_eq!(s, r#"{"alpha":"inf","zeta":1.0}"#);
    }
}
