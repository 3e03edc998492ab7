//! Flat INI configuration: built-in defaults, then the file, then
//! `key=value` overrides. Keys are `name` (top level) or `section.name`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}:{line}: syntax error: {msg}")]
    Syntax { file: String, line: usize, msg: String },
    #[error("{file}:{line}: unknown section [{section}]; valid sections: {valid}")]
    UnknownSection {
        file: String,
        line: usize,
        section: String,
        valid: String,
    },
    #[error("{origin}: unknown key '{key}'; valid keys: {valid}")]
    UnknownKey { origin: String, key: String, valid: String },
    #[error("{origin}: '{key}' is derived, not settable")]
    Derived { origin: String, key: String },
    #[error("{origin}: invalid value '{value}' for {key}: violates {constraint}")]
    Invalid {
        origin: String,
        key: String,
        value: String,
        constraint: String,
    },
    #[error("override '{0}' is not of the form key=value")]
    Override(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Quantities computed from `alpha`; setting them is an error.
pub const DERIVED_KEYS: &[&str] = &["B", "beta", "s_alpha"];

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    /// Real in `[min, max]` (`max_open` makes the upper end exclusive).
    Real { min: f64, max: f64, max_open: bool },
    /// Finite real strictly above zero.
    Positive,
    Int { min: u64, max: u64 },
    /// Power of two, at least 8.
    Pow2,
    Bool,
    Choice(&'static [&'static str]),
    /// `auto` or a real in `[min, max]`.
    AutoReal { min: f64, max: f64 },
    /// Comma-separated nonnegative reals, or `auto`.
    RealList,
    /// Free text (file paths).
    Text,
}

impl Kind {
    fn constraint(&self, key: &str) -> String {
        let name = key.rsplit('.').next().unwrap_or(key);
        match *self {
            Kind::Real { min, max, max_open } => {
                format!("{name} ∈ [{min},{max}{}", if max_open { ")" } else { "]" })
            }
            Kind::Positive => format!("{name} > 0"),
            Kind::Int { min, max } if max == u64::MAX => format!("{name} integer >= {min}"),
            Kind::Int { min, max } => format!("{name} integer in [{min},{max}]"),
            Kind::Pow2 => format!("{name} a power of two >= 8"),
            Kind::Bool => format!("{name} ∈ {{true, false}}"),
            Kind::Choice(c) => format!("{name} ∈ {{{}}}", c.join(", ")),
            Kind::AutoReal { min, max } => format!("{name} = auto or {name} ∈ [{min},{max}]"),
            Kind::RealList => format!("{name} a comma-separated list of nonnegative reals or 'auto'"),
            Kind::Text => String::new(),
        }
    }

    fn check(&self, value: &str) -> bool {
        match *self {
            Kind::Real { min, max, max_open } => parse_real(value)
                .is_some_and(|v| v >= min && if max_open { v < max } else { v <= max }),
            Kind::Positive => parse_real(value).is_some_and(|v| v > 0.0 && v.is_finite()),
            Kind::Int { min, max } => value.parse::<u64>().is_ok_and(|v| v >= min && v <= max),
            Kind::Pow2 => value.parse::<u64>().is_ok_and(|v| v >= 8 && v.is_power_of_two()),
            Kind::Bool => matches!(value, "true" | "false"),
            Kind::Choice(c) => c.contains(&value),
            Kind::AutoReal { min, max } => value == "auto" || parse_real(value).is_some_and(|v| v >= min && v <= max),
            Kind::RealList => value == "auto" || parse_list(value).is_some_and(|l| !l.is_empty()),
            Kind::Text => true,
        }
    }
}

/// One documented configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

/// Parses a real; a trailing `pi` multiplies by pi (`16pi`, `0.5pi`, `pi`).
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some(head) => head.trim().parse::<f64>().ok()? * std::f64::consts::PI,
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',')
        .map(|t| parse_real(t).filter(|v| *v >= 0.0))
        .collect()
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl Config {
    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("key {key} is not in the schema"))
    }

    pub fn real(&self, key: &str) -> f64 {
        parse_real(self.raw(key)).expect("validated real")
    }

    pub fn int(&self, key: &str) -> u64 {
        self.raw(key).parse().expect("validated integer")
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key) == "true"
    }

    pub fn text(&self, key: &str) -> &str {
        self.raw(key)
    }

    /// `None` for `auto`.
    pub fn auto_real(&self, key: &str) -> Option<f64> {
        match self.raw(key) {
            "auto" => None,
            v => Some(parse_real(v).expect("validated real")),
        }
    }

    /// `None` for `auto`.
    pub fn list(&self, key: &str) -> Option<Vec<f64>> {
        match self.raw(key) {
            "auto" => None,
            v => Some(parse_list(v).expect("validated list")),
        }
    }

    /// Sets a value after validation against `schema`.
    pub fn set(&mut self, schema: &[KeySpec], key: &str, value: &str, origin: &str) -> Result<(), ConfigError> {
        let last = key.rsplit('.').next().unwrap_or(key);
        if DERIVED_KEYS.contains(&last) {
            return Err(ConfigError::Derived {
                origin: origin.to_string(),
                key: key.to_string(),
            });
        }
        let spec = schema.iter().find(|s| s.key == key).ok_or_else(|| ConfigError::UnknownKey {
            origin: origin.to_string(),
            key: key.to_string(),
            valid: schema.iter().map(|s| s.key).collect::<Vec<_>>().join(", "),
        })?;
        let value = value.trim();
        if !spec.kind.check(value) {
            return Err(ConfigError::Invalid {
                origin: origin.to_string(),
                key: key.to_string(),
                value: value.to_string(),
                constraint: spec.kind.constraint(key),
            });
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }
}

pub fn defaults(schema: &[KeySpec]) -> Config {
    Config {
        values: schema
            .iter()
            .map(|s| (s.key.to_string(), s.default.to_string()))
            .collect(),
    }
}

/// Applies INI `text` (named `file` in messages) on top of `cfg`.
pub fn apply_ini(cfg: &mut Config, schema: &[KeySpec], text: &str, file: &str) -> Result<(), ConfigError> {
    let sections: Vec<&str> = schema
        .iter()
        .filter_map(|k| k.key.split_once('.').map(|p| p.0))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with(';') {
            continue;
        }
        if let Some(rest) = l.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                file: file.to_string(),
                line,
                msg: "section header lacks a closing ']'".into(),
            })?;
            let name = name.trim();
            if !sections.contains(&name) {
                return Err(ConfigError::UnknownSection {
                    file: file.to_string(),
                    line,
                    section: name.to_string(),
                    valid: sections.join(", "),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| ConfigError::Syntax {
            file: file.to_string(),
            line,
            msg: format!("expected 'key = value' or '[section]', found '{l}'"),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                file: file.to_string(),
                line,
                msg: "empty key".into(),
            });
        }
        let key = match &section {
            Some(s) => format!("{s}.{k}"),
            None => k.to_string(),
        };
        cfg.set(schema, &key, v, &format!("{file}:{line}"))?;
    }
    Ok(())
}

/// Layered resolution: defaults, then the optional file, then overrides.
pub fn resolve(schema: &[KeySpec], path: Option<&Path>, overrides: &[String]) -> Result<Config, ConfigError> {
    let mut cfg = defaults(schema);
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
            path: p.display().to_string(),
            source: e,
        })?;
        apply_ini(&mut cfg, schema, &text, &p.display().to_string())?;
    }
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| ConfigError::Override(o.clone()))?;
        cfg.set(schema, k.trim(), v, "override")?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[KeySpec] = &[
        KeySpec {
            key: "alpha",
            default: "2",
            kind: Kind::Real {
                min: 1.0,
                max: 2.0,
                max_open: false,
            },
            help: "",
        },
        KeySpec {
            key: "grid.nx",
            default: "64",
            kind: Kind::Pow2,
            help: "",
        },
        KeySpec {
            key: "grid.lx",
            default: "16pi",
            kind: Kind::Positive,
            help: "",
        },
        KeySpec {
            key: "run.mode",
            default: "a",
            kind: Kind::Choice(&["a", "b"]),
            help: "",
        },
        KeySpec {
            key: "ts",
            default: "auto",
            kind: Kind::RealList,
            help: "",
        },
    ];

    #[test]
    fn empty_file_gives_defaults() {
        let mut c = defaults(SCHEMA);
        apply_ini(&mut c, SCHEMA, "", "empty.cfg").unwrap();
        assert_eq!(c, defaults(SCHEMA));
        assert_eq!(c.real("grid.lx"), 16.0 * std::f64::consts::PI);
        assert_eq!(c.list("ts"), None);
    }

    #[test]
    fn layering_and_sections() {
        let mut c = defaults(SCHEMA);
        apply_ini(&mut c, SCHEMA, "alpha = 1.5\n# note\n[grid]\nnx = 128\n", "f.cfg").unwrap();
        c.set(SCHEMA, "grid.nx", "256", "override").unwrap();
        assert_eq!(c.real("alpha"), 1.5);
        assert_eq!(c.usize("grid.nx"), 256);
    }

    #[test]
    fn errors_carry_context() {
        let mut c = defaults(SCHEMA);
        let e = apply_ini(&mut c, SCHEMA, "alpha = 1\nbogus line\n", "f.cfg").unwrap_err();
        assert!(e.to_string().starts_with("f.cfg:2: syntax error"), "{e}");
        let e = apply_ini(&mut c, SCHEMA, "[nope]\n", "f.cfg").unwrap_err();
        assert!(e.to_string().contains("unknown section [nope]"), "{e}");
        let e = c.set(SCHEMA, "gamma", "1", "override").unwrap_err();
        assert!(e.to_string().contains("valid keys: alpha, grid.nx"), "{e}");
        let e = c.set(SCHEMA, "alpha", "2.5", "override").unwrap_err();
        assert!(e.to_string().contains("alpha ∈ [1,2]"), "{e}");
        let e = c.set(SCHEMA, "B", "1", "override").unwrap_err();
        assert!(e.to_string().contains("derived, not settable"), "{e}");
        assert!(c.set(SCHEMA, "grid.nx", "48", "override").is_err());
        assert!(c.set(SCHEMA, "run.mode", "c", "override").is_err());
        assert!(c.set(SCHEMA, "ts", "1,-2", "override").is_err());
    }

    #[test]
    fn real_parsing() {
        assert_eq!(parse_real("pi"), Some(std::f64::consts::PI));
        assert_eq!(parse_real("0.5pi"), Some(0.5 * std::f64::consts::PI));
        assert_eq!(parse_real("1e-3"), Some(1e-3));
        assert_eq!(parse_real("x"), None);
        assert_eq!(parse_real("inf"), None);
    }
}
