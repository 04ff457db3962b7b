//! Flat `key = value` experiment configuration. Files and command-line flags go
//! through the same setter, so both are validated identically.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::geom::{SurfaceKind, DEFAULT_STRIP};
use crate::spectra::{Bc, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Every key is optional; commands fill in their own defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub surface: Option<SurfaceKind>,
    pub k: Option<[i32; 2]>,
    pub n: Option<u32>,
    pub m: Option<i32>,
    pub bc: Option<Bc>,
    pub parity: Option<Parity>,
    pub grid: Option<usize>,
    pub lambda_max: Option<f64>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub a: Option<f64>,
    pub trials: Option<usize>,
}

pub const KEYS: [&str; 16] = [
    "experiment", "surface", "k", "N", "m", "bc", "parity", "grid", "lambda_max", "eps", "out", "format", "threads",
    "seed", "a", "trials",
];

fn bad(key: &str, value: &str, why: &str) -> Error {
    Error::Config(format!("{key} = `{value}`: {why}"))
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "not a number of the expected kind"))
}

fn in_range<T: PartialOrd + Copy>(key: &str, raw: &str, v: T, lo: T, hi: T, why: &str) -> Result<T> {
    if v >= lo && v <= hi {
        Ok(v)
    } else {
        Err(bad(key, raw, why))
    }
}

impl ExperimentConfig {
    /// Parses one key and stores it, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "experiment" => self.experiment = Some(v.to_string()),
            "surface" => self.surface = Some(v.parse().map_err(|_| bad(key, v, "expected torus, sphere or disc"))?),
            "k" => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(bad(key, v, "expected two integers a,b"));
                }
                let a: i32 = number(key, parts[0])?;
                let b: i32 = number(key, parts[1])?;
                if a.unsigned_abs().max(b.unsigned_abs()) > 4096 {
                    return Err(bad(key, v, "components must lie in [-4096, 4096]"));
                }
                self.k = Some([a, b]);
            }
            "N" => self.n = Some(in_range(key, v, number(key, v)?, 0, 4096, "must lie in [0, 4096]")?),
            "m" => self.m = Some(in_range(key, v, number(key, v)?, -4096, 4096, "must lie in [-4096, 4096]")?),
            "bc" => self.bc = Some(v.parse().map_err(|_| bad(key, v, "expected dirichlet or neumann"))?),
            "parity" => self.parity = Some(v.parse().map_err(|_| bad(key, v, "expected cos or sin"))?),
            "grid" => self.grid = Some(in_range(key, v, number(key, v)?, 16, 8192, "must lie in [16, 8192]")?),
            "lambda_max" => {
                let x: f64 = number(key, v)?;
                self.lambda_max = Some(in_range(key, v, x, 0.0, 2000.0, "must lie in [0, 2000]")?);
            }
            "eps" => {
                let x: f64 = number(key, v)?;
                if !(x > 0.0 && x <= DEFAULT_STRIP) {
                    return Err(bad(key, v, &format!("must lie in (0, {DEFAULT_STRIP}]")));
                }
                self.eps = Some(x);
            }
            "out" => {
                if v.is_empty() {
                    return Err(bad(key, v, "empty path"));
                }
                self.out = Some(PathBuf::from(v));
            }
            "format" => {
                let mut fs = Vec::new();
                for part in v.split(',').map(str::trim) {
                    let f = match part {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        "svg" => Format::Svg,
                        _ => return Err(bad(key, v, "expected a comma list of csv, json, svg")),
                    };
                    if !fs.contains(&f) {
                        fs.push(f);
                    }
                }
                self.formats = Some(fs);
            }
            "threads" => self.threads = Some(in_range(key, v, number(key, v)?, 1, 1024, "must lie in [1, 1024]")?),
            "seed" => self.seed = Some(number(key, v)?),
            "a" => {
                let x: f64 = number(key, v)?;
                if !(x > 0.0 && x <= 100.0) {
                    return Err(bad(key, v, "must lie in (0, 100]"));
                }
                self.a = Some(x);
            }
            "trials" => self.trials = Some(in_range(key, v, number(key, v)?, 1, 100_000, "must lie in [1, 100000]")?),
            _ => return Err(Error::Config(format!("unknown key `{key}`; known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// `#` starts a comment line; a key may appear at most once per file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let k = k.trim();
            if seen.contains(&k) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
            seen.push(k);
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Keys in canonical order; unset keys are omitted.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        };
        put("experiment", self.experiment.clone());
        put("surface", self.surface.map(|x| x.name().to_string()));
        put("k", self.k.map(|k| format!("{},{}", k[0], k[1])));
        put("N", self.n.map(|x| x.to_string()));
        put("m", self.m.map(|x| x.to_string()));
        put("bc", self.bc.map(|x| x.name().to_string()));
        put("parity", self.parity.map(|x| x.name().to_string()));
        put("grid", self.grid.map(|x| x.to_string()));
        put("lambda_max", self.lambda_max.map(|x| x.to_string()));
        put("eps", self.eps.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put(
            "format",
            self.formats.as_ref().map(|f| f.iter().map(|x| x.name()).collect::<Vec<_>>().join(",")),
        );
        put("threads", self.threads.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("a", self.a.map(|x| x.to_string()));
        put("trials", self.trials.map(|x| x.to_string()));
        s
    }

    /// Values set in `other` win.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(experiment, surface, k, n, m, bc, parity, grid, lambda_max, eps, out, formats, threads, seed, a, trials);
    }

    pub fn formats(&self) -> Vec<Format> {
        self.formats.clone().unwrap_or_else(|| vec![Format::Csv, Format::Svg])
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats().contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let text = "# sweep\nsurface = sphere\nk = 3,-4\nN=12\nm = -3\nbc = neumann\nlambda_max = 40.5\n\
                    eps=0.25\nformat = json,csv\nseed = 7\nout = runs/a b\n";
        let a = ExperimentConfig::parse(text).unwrap();
        let b = ExperimentConfig::parse(&a.serialize()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.serialize(), b.serialize());
        assert_eq!(a.out, Some(PathBuf::from("runs/a b")));
    }

    #[test]
    fn rejects_unknown_duplicate_and_out_of_range() {
        assert!(matches!(ExperimentConfig::parse("colour = red"), Err(Error::Config(_))));
        assert!(ExperimentConfig::parse("N = 3\nN = 4").is_err());
        assert!(ExperimentConfig::parse("grid = 4").is_err());
        assert!(ExperimentConfig::parse("eps = 0.9").is_err());
        assert!(ExperimentConfig::parse("lambda_max = nan").is_err());
        assert!(ExperimentConfig::parse("k = 1").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
    }
}
