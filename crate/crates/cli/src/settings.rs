//! `--config FILE` support: `key = value` lines, `#` comments.  Keys use the
//! long flag names (`z-max` or `z_max`); command-line flags win.

use std::collections::HashMap;
use std::str::FromStr;

use radkernel::KernelError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").to_ascii_lowercase().replace('_', "-")
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, KernelError> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| KernelError::Usage(format!("config line {}: expected key=value, got '{raw}'", i + 1)))?;
            entries.insert(normalize(k), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, KernelError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| KernelError::Usage(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, KernelError> {
        match self.raw(key).map(|v| v.to_ascii_lowercase()) {
            None => Ok(false),
            Some(v) if v == "true" || v == "1" || v == "yes" => Ok(true),
            Some(v) if v == "false" || v == "0" || v == "no" => Ok(false),
            Some(v) => Err(KernelError::Usage(format!("config key '{key}': expected a boolean, got '{v}'"))),
        }
    }
}

/// Parses a real number or a fraction `p/q`.
pub fn parse_real(s: &str) -> Result<f64, KernelError> {
    let bad = || KernelError::Usage(format!("cannot parse '{s}' as a number"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

/// Comma-separated list.
pub fn parse_list<T, F>(s: &str, item: F) -> Result<Vec<T>, KernelError>
where
    F: Fn(&str) -> Result<T, KernelError>,
{
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| item(t.trim())).collect()
}
