//! Flat `key=value` configuration and literal parsing.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

/// A usage or parse error; the CLI exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Parses `x`, `yi`, `x+yi`, `x-yi` and `i`-only forms such as `-i`.
/// Whitespace is ignored; `j` is accepted for `i`.
pub fn parse_complex(text: &str) -> Result<Complex<f64>, UsageError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || usage(format!("malformed complex literal '{text}' (expected x+yi)"));
    if s.is_empty() {
        return Err(bad());
    }
    let number = |t: &str| -> Result<f64, UsageError> {
        let v: f64 = t.parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let imaginary = |t: &str| -> Result<f64, UsageError> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => number(t),
        }
    };
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex::new(number(&s)?, 0.0));
    };
    // Split at the last sign that is not the leading one or part of an
    // exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex::new(number(&body[..k])?, imaginary(&body[k..])?)),
        None => Ok(Complex::new(0.0, imaginary(body)?)),
    }
}

/// Parses `N` or `WxH`.
pub fn parse_size(text: &str) -> Result<(usize, usize), UsageError> {
    let bad = || usage(format!("malformed size '{text}' (expected N or WxH)"));
    let dim = |t: &str| -> Result<usize, UsageError> {
        match t.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(bad()),
        }
    };
    match text.split_once(['x', 'X']) {
        Some((w, h)) => Ok((dim(w)?, dim(h)?)),
        None => {
            let n = dim(text)?;
            Ok((n, n))
        }
    }
}

pub fn parse_bool(key: &str, text: &str) -> Result<bool, UsageError> {
    match text.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(usage(format!("{key}: expected true or false, got '{other}'"))),
    }
}

/// Resolved settings: config file values overlaid by command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key=value` lines; `#` starts a comment line. Keys are
    /// normalised to use `_` instead of `-`.
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", n + 1)))?;
            let key = normalise(k);
            if key.is_empty() {
                return Err(usage(format!("config line {}: empty key", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalise(key), value.into());
    }

    /// Overlays `other` on `self`.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Fails on keys not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(usage(format!("unknown setting '{k}'"))),
            None => Ok(()),
        }
    }

    pub fn complex(&self, key: &str) -> Result<Option<Complex<f64>>, UsageError> {
        self.get(key)
            .map(|v| parse_complex(v).map_err(|e| usage(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, UsageError> {
        self.get(key)
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(usage(format!("{key}: expected a number, got '{v}'"))),
            })
            .transpose()
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>, UsageError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| usage(format!("{key}: expected a non-negative integer, got '{v}'")))
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>, UsageError> {
        self.get(key).map(|v| parse_bool(key, v)).transpose()
    }
}

fn normalise(key: &str) -> String {
    key.trim().replace('-', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("4.565+0.420i"), Ok(c(4.565, 0.42)));
        assert_eq!(parse_complex("6-2i"), Ok(c(6.0, -2.0)));
        assert_eq!(parse_complex("-1.5e-3-2e+2i"), Ok(c(-1.5e-3, -200.0)));
        assert_eq!(parse_complex(" 7 "), Ok(c(7.0, 0.0)));
        assert_eq!(parse_complex("-i"), Ok(c(0.0, -1.0)));
        assert_eq!(parse_complex("2.5i"), Ok(c(0.0, 2.5)));
        assert_eq!(parse_complex("1+i"), Ok(c(1.0, 1.0)));
        assert_eq!(parse_complex("+3-0.5j"), Ok(c(3.0, -0.5)));
        for bad in ["", "i+1", "4.5+0.4", "1+2ii", "abc", "nan", "1++2i", "inf+1i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_size("512"), Ok((512, 512)));
        assert_eq!(parse_size("640x480"), Ok((640, 480)));
        assert!(parse_size("0").is_err());
        assert!(parse_size("12x").is_err());
    }

    #[test]
    fn settings_parse_and_merge() {
        let mut file = Settings::parse("# comment\na = 4.5+0i\nmax-iter=100\n\n").unwrap();
        let mut flags = Settings::default();
        flags.set("max_iter", "300");
        file.merge(&flags);
        assert_eq!(file.get("max_iter"), Some("300"));
        assert_eq!(file.complex("a"), Ok(Some(c(4.5, 0.0))));
        assert!(file.check_keys(&["a", "max_iter"]).is_ok());
        assert!(file.check_keys(&["a"]).is_err());
        assert!(Settings::parse("novalue").is_err());
        assert!(file.count("a").is_err());
    }
}
