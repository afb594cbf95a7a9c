use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub c_max: u64,
    pub b_bound_initial: u64,
    pub quadrature_tol: f64,
    pub series_tol: f64,
    pub cache_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: 192,
            c_max: 20_000,
            b_bound_initial: 100,
            quadrature_tol: 1e-8,
            series_tol: 1e-7,
            cache_path: None,
            output_format: OutputFormat::Text,
        }
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<u32>,
    pub c_max: Option<u64>,
    pub b_bound_initial: Option<u64>,
    pub quadrature_tol: Option<f64>,
    pub cache_path: Option<PathBuf>,
    pub json: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

impl RunConfig {
    fn apply_pair(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "precision_bits" => self.precision_bits = parse(key, value)?,
            "c_max" => self.c_max = parse(key, value)?,
            "b_bound_initial" => self.b_bound_initial = parse(key, value)?,
            "quadrature_tol" => self.quadrature_tol = parse(key, value)?,
            "series_tol" => self.series_tol = parse(key, value)?,
            "cache_path" => self.cache_path = Some(PathBuf::from(value.trim())),
            "output_format" => {
                self.output_format = match value.trim() {
                    "json" => OutputFormat::Json,
                    "text" => OutputFormat::Text,
                    other => return Err(format!("output_format must be json or text, got {other:?}")),
                }
            }
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), no + 1))?;
            self.apply_pair(k.trim(), v)
                .map_err(|e| format!("{}:{}: {e}", path.display(), no + 1))?;
        }
        Ok(())
    }

    pub fn apply_env(&mut self, env: &BTreeMap<String, String>) -> Result<(), String> {
        if let Some(v) = env.get("QPZ_PRECISION_BITS") {
            self.precision_bits = parse("QPZ_PRECISION_BITS", v)?;
        }
        if let Some(v) = env.get("QPZ_CACHE") {
            self.cache_path = Some(PathBuf::from(v));
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(p) = o.precision_bits {
            self.precision_bits = p;
        }
        if let Some(c) = o.c_max {
            self.c_max = c;
        }
        if let Some(b) = o.b_bound_initial {
            self.b_bound_initial = b;
        }
        if let Some(t) = o.quadrature_tol {
            self.quadrature_tol = t;
        }
        if let Some(c) = &o.cache_path {
            self.cache_path = Some(c.clone());
        }
        if o.json {
            self.output_format = OutputFormat::Json;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.precision_bits < 64 {
            return Err(format!("precision_bits must be at least 64, got {}", self.precision_bits));
        }
        if !(self.quadrature_tol > 0.0 && self.series_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if self.c_max == 0 {
            return Err("c_max must be positive".into());
        }
        Ok(())
    }

    /// Defaults, then the file, then the environment, then flags.
    pub fn resolve(file: Option<&Path>, env: &BTreeMap<String, String>, flags: &Overrides) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        cfg.apply_env(env)?;
        cfg.apply_overrides(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn precedence_is_flags_env_file_defaults() {
        let dir = std::env::temp_dir().join(format!("qpz-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let file = dir.join("qpz.conf");
        fs::write(&file, "precision_bits = 100\nc_max = 77 # comment\ncache_path = /from/file\n").unwrap();

        let cfg = RunConfig::resolve(Some(&file), &env(&[]), &Overrides::default()).unwrap();
        assert_eq!((cfg.precision_bits, cfg.c_max), (100, 77));
        assert_eq!(cfg.cache_path, Some(PathBuf::from("/from/file")));

        let e = env(&[("QPZ_PRECISION_BITS", "150"), ("QPZ_CACHE", "/from/env")]);
        let cfg = RunConfig::resolve(Some(&file), &e, &Overrides::default()).unwrap();
        assert_eq!(cfg.precision_bits, 150);
        assert_eq!(cfg.cache_path, Some(PathBuf::from("/from/env")));

        let flags = Overrides {
            precision_bits: Some(256),
            cache_path: Some("/from/flag".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(&file), &e, &flags).unwrap();
        assert_eq!(cfg.precision_bits, 256);
        assert_eq!(cfg.cache_path, Some(PathBuf::from("/from/flag")));
        assert_eq!(cfg.c_max, 77);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_bad_values() {
        let low = Overrides {
            precision_bits: Some(32),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, &env(&[]), &low).is_err());
        let neg = Overrides {
            quadrature_tol: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, &env(&[]), &neg).is_err());
        assert!(RunConfig::resolve(None, &env(&[("QPZ_PRECISION_BITS", "many")]), &Overrides::default()).is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_pair("colour", "red").is_err());
        assert!(cfg.apply_pair("output_format", "xml").is_err());
    }
}
