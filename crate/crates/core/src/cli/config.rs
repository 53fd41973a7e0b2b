use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spatial::SpatialModePair;

/// Flat `key = value` scenario parameters.
///
/// Lengths carry a unit tag, `sigma` or `um` (`d = 1.64 sigma`,
/// `d = 200 um` together with `sigma = 122 um`). Angles are radians and may be
/// written as `pi`, `pi/4` or with a `deg` tag. Lines starting with `#` are
/// comments. Keys not accepted by the command are rejected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    values: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config("empty key".into()));
        }
        self.values.insert(key.to_owned(), value.trim().to_owned());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{pair}` is not `key=value`")))?;
        self.set(k, v)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn reject_unknown(&self, allowed: &[&str], command: &str) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!(
                "unknown key `{k}` for `{command}` (accepted: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_number(key, v)).transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("`{key}` = `{v}` is not a nonnegative integer"))),
        }
    }

    pub fn seed_or(&self, default: u64) -> Result<u64> {
        match self.raw("seed") {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("`seed` = `{v}` is not an unsigned integer"))),
        }
    }

    pub fn flag_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::Config(format!("`{key}` = `{v}` is not a boolean"))),
        }
    }

    /// An angle in radians.
    pub fn angle(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_angle(key, v)).transpose()
    }

    pub fn angle_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.angle(key)?.unwrap_or(default))
    }

    /// A length in units of `σ`; `um` values need `sigma` in `um` as well.
    pub fn length(&self, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.raw(key) else {
            return Ok(None);
        };
        let (value, unit) = split_unit(key, raw)?;
        match unit {
            Some("sigma") => Ok(Some(value)),
            Some("um") => {
                let sigma = self.raw("sigma").ok_or_else(|| {
                    Error::Config(format!("`{key}` is in um; give `sigma = <value> um` as well"))
                })?;
                match split_unit("sigma", sigma)? {
                    (s, Some("um")) if s > 0.0 => Ok(Some(value / s)),
                    _ => Err(Error::Config("`sigma` must be a positive length in um".into())),
                }
            }
            Some(other) => Err(Error::Config(format!(
                "`{key}`: unknown length unit `{other}` (use sigma or um)"
            ))),
            None => Err(Error::Config(format!(
                "`{key}` = `{raw}` needs a unit tag: `sigma` or `um`"
            ))),
        }
    }

    /// Mode pair from `d`, or `default` (in units of `σ`) when absent.
    pub fn pair_or(&self, default: f64) -> Result<SpatialModePair> {
        SpatialModePair::from_ratio(self.length("d")?.unwrap_or(default))
    }

    /// `theta` as a single point, or `theta_min..theta_max` in `theta_points` steps.
    pub fn theta_grid(&self, points: usize) -> Result<Vec<f64>> {
        if let Some(t) = self.angle("theta")? {
            if ["theta_min", "theta_max", "theta_points"].iter().any(|k| self.contains(k)) {
                return Err(Error::Config("give either `theta` or a theta_min/theta_max grid".into()));
            }
            return Ok(vec![t]);
        }
        let lo = self.angle_or("theta_min", 0.0)?;
        let hi = self.angle_or("theta_max", PI)?;
        let n = self.count_or("theta_points", points)?;
        grid("theta", lo, hi, n)
    }
}

pub(crate) fn grid(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config(format!("{name} grid needs at least one point")));
    }
    if !(lo <= hi) {
        return Err(Error::Config(format!("{name} grid: minimum {lo} exceeds maximum {hi}")));
    }
    Ok(crate::numeric::linspace(lo, hi, n))
}

fn parse_number(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` = `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("`{key}` = `{v}` is not finite")));
    }
    Ok(x)
}

fn split_unit<'a>(key: &str, raw: &'a str) -> Result<(f64, Option<&'a str>)> {
    let mut parts = raw.split_whitespace();
    let value = parts
        .next()
        .ok_or_else(|| Error::Config(format!("`{key}` has no value")))?;
    let unit = parts.next();
    if parts.next().is_some() {
        return Err(Error::Config(format!("`{key}` = `{raw}`: expected `<value> [unit]`")));
    }
    Ok((parse_number(key, value)?, unit))
}

fn parse_angle(key: &str, raw: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw == "pi" {
        return Ok(PI);
    }
    if let Some(den) = raw.strip_prefix("pi/") {
        return Ok(PI / parse_number(key, den)?);
    }
    match split_unit(key, raw)? {
        (v, None | Some("rad")) => Ok(v),
        (v, Some("deg")) => Ok(v.to_radians()),
        (_, Some(u)) => Err(Error::Config(format!("`{key}`: unknown angle unit `{u}`"))),
    }
}
