//! Experiment settings from a flat INI file, overridden by command-line flags.
//!
//! Section headers are allowed for readability but ignored: every key lives
//! in one namespace.
//!
//! ```ini
//! experiment = main          ; estimate | main | nonunit | scaled-haar | upsilon | tail
//! prime = 3
//! degree = 200
//! d = 1
//! samples = 100000
//! distribution = finite-support
//! values = -1, 1
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use ini::Ini;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use padic_roots::monte_carlo::{
    CoeffDistribution, Conditioning, ExperimentConfig, TailThreshold, DEFAULT_HENSELIAN_LEVEL, DEFAULT_SLACK,
};
use padic_roots::Prime;

use crate::CliError;

pub const KEYS: [&str; 17] = [
    "experiment",
    "prime",
    "seed",
    "workers",
    "degree",
    "d",
    "samples",
    "condition",
    "henselian_level",
    "slack",
    "threshold",
    "lambda",
    "distribution",
    "values",
    "probabilities",
    "precision",
    "level",
];

/// Flags accepted by `simulate`; each overrides the key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct SimulateFlags {
    /// Flat key-value experiment file
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// estimate | main | nonunit | scaled-haar | upsilon | tail
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub degree: Option<String>,
    #[arg(long = "d")]
    pub d: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    /// none | unit-constant-term
    #[arg(long)]
    pub condition: Option<String>,
    #[arg(long = "henselian-level")]
    pub henselian_level: Option<String>,
    #[arg(long)]
    pub slack: Option<String>,
    /// log-n | power (tail experiment)
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// finite-support | haar | haar-multiple-of-p | upsilon
    #[arg(long)]
    pub distribution: Option<String>,
    /// Comma-separated integers (finite support)
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Comma-separated rationals such as 1/2 (default: uniform)
    #[arg(long)]
    pub probabilities: Option<String>,
    /// Haar sampling precision K (default 2k - 1)
    #[arg(long)]
    pub precision: Option<String>,
    /// Upsilon level k
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Estimate,
    Main,
    Nonunit,
    ScaledHaar,
    Upsilon,
    Tail,
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "estimate" => Experiment::Estimate,
            "main" => Experiment::Main,
            "nonunit" => Experiment::Nonunit,
            "scaled-haar" => Experiment::ScaledHaar,
            "upsilon" => Experiment::Upsilon,
            "tail" => Experiment::Tail,
            other => return Err(format!("unknown experiment '{other}'")),
        })
    }
}

pub struct Plan {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub slack: f64,
    pub threshold: TailThreshold,
    pub params: Value,
}

pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let ini = Ini::load_from_file(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (_, props) in ini.iter() {
        for (k, v) in props.iter() {
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key '{k}'")));
            }
            map.insert(key, v.trim().to_string());
        }
    }
    Ok(map)
}

fn parse<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Usage(format!("invalid value '{s}' for '{key}'")))
        })
        .transpose()
}

fn list<T: FromStr>(s: &str, key: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<T>()
                .map_err(|_| CliError::Usage(format!("invalid entry '{x}' in '{key}'")))
        })
        .collect()
}

fn rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Usage(format!("invalid probability '{s}'"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl SimulateFlags {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("experiment", &self.experiment),
            ("degree", &self.degree),
            ("d", &self.d),
            ("samples", &self.samples),
            ("condition", &self.condition),
            ("henselian_level", &self.henselian_level),
            ("slack", &self.slack),
            ("threshold", &self.threshold),
            ("lambda", &self.lambda),
            ("distribution", &self.distribution),
            ("values", &self.values),
            ("probabilities", &self.probabilities),
            ("precision", &self.precision),
            ("level", &self.level),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect()
    }
}

/// Global flags that also act as config keys.
pub struct Globals {
    pub prime: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

pub fn plan(flags: &SimulateFlags, globals: &Globals) -> Result<Plan, CliError> {
    let mut map = match &flags.config {
        Some(path) => read_file(path)?,
        None => BTreeMap::new(),
    };
    map.extend(flags.overrides());
    if let Some(p) = globals.prime {
        map.insert("prime".into(), p.to_string());
    }
    if let Some(s) = globals.seed {
        map.insert("seed".into(), s.to_string());
    }
    if let Some(w) = globals.workers {
        map.insert("workers".into(), w.to_string());
    }

    let experiment: Experiment = match map.get("experiment") {
        Some(s) => s.parse().map_err(CliError::Usage)?,
        None => Experiment::Estimate,
    };
    let prime = Prime::new(parse(&map, "prime")?.unwrap_or(2)).map_err(|e| CliError::Usage(e.to_string()))?;
    let degree: usize = parse(&map, "degree")?.unwrap_or(1);
    let d: usize = parse(&map, "d")?.unwrap_or(1);
    let samples: u64 = parse(&map, "samples")?.unwrap_or(10_000);
    let seed: u64 = parse(&map, "seed")?.unwrap_or(42);
    let workers: usize = parse(&map, "workers")?.unwrap_or(1);
    let k: u32 = parse(&map, "henselian_level")?.unwrap_or(DEFAULT_HENSELIAN_LEVEL);
    let slack: f64 = parse(&map, "slack")?.unwrap_or(DEFAULT_SLACK);
    let condition = match map.get("condition").map(String::as_str) {
        None | Some("none") => Conditioning::None,
        Some("unit-constant-term") => Conditioning::UnitConstantTerm,
        Some(other) => return Err(CliError::Usage(format!("unknown condition '{other}'"))),
    };
    let threshold = match map.get("threshold").map(String::as_str) {
        None | Some("log-n") => TailThreshold::LogN,
        Some("power") => TailThreshold::Power(parse(&map, "lambda")?.unwrap_or(1.0)),
        Some(other) => return Err(CliError::Usage(format!("unknown threshold '{other}'"))),
    };

    let kind = map.get("distribution").map(String::as_str).unwrap_or(match experiment {
        Experiment::ScaledHaar => "haar",
        Experiment::Upsilon => "upsilon",
        _ => "finite-support",
    });
    let distribution = match kind {
        "finite-support" => {
            let values: Vec<i64> = match map.get("values") {
                Some(s) => list(s, "values")?,
                None => vec![-1, 1],
            };
            match map.get("probabilities") {
                Some(s) => {
                    let probs = s
                        .split(',')
                        .map(str::trim)
                        .filter(|x| !x.is_empty())
                        .map(rational)
                        .collect::<Result<Vec<_>, _>>()?;
                    CoeffDistribution::finite_support(prime, values, probs)
                }
                None => CoeffDistribution::uniform(prime, values),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?
        }
        "haar" | "haar-multiple-of-p" => {
            let precision: u32 = parse(&map, "precision")?.unwrap_or(2 * k.max(1) - 1);
            if kind == "haar" {
                CoeffDistribution::haar(prime, precision)
            } else {
                CoeffDistribution::haar_multiple_of_p(prime, precision)
            }
        }
        "upsilon" => CoeffDistribution::upsilon(prime, parse(&map, "level")?.unwrap_or(12)),
        other => return Err(CliError::Usage(format!("unknown distribution '{other}'"))),
    };

    let config = ExperimentConfig::new(distribution, degree, d, samples)
        .with_seed(seed)
        .with_workers(workers)
        .with_condition(condition)
        .with_henselian_level(k);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut params = config.describe();
    params["experiment"] = json!(map.get("experiment").cloned().unwrap_or_else(|| "estimate".into()));
    params["slack"] = json!(slack);
    if experiment == Experiment::Tail {
        params["threshold"] = json!(format!("{threshold:?}"));
    }
    Ok(Plan {
        experiment,
        config,
        slack,
        threshold,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn globals() -> Globals {
        Globals {
            prime: None,
            seed: None,
            workers: None,
        }
    }

    #[test]
    fn defaults() {
        let p = plan(&SimulateFlags::default(), &globals()).unwrap();
        assert_eq!(p.experiment, Experiment::Estimate);
        assert_eq!(p.config.degree, 1);
        assert_eq!(p.config.seed, 42);
        assert_eq!(p.config.prime().get(), 2);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.ini");
        std::fs::write(&path, "[experiment]\nexperiment = main\nprime = 3\ndegree = 50\n[distribution]\nvalues = -1, 1\n").unwrap();
        let flags = SimulateFlags {
            config: Some(path),
            degree: Some("20".into()),
            ..Default::default()
        };
        let g = Globals {
            seed: Some(7),
            ..globals()
        };
        let p = plan(&flags, &g).unwrap();
        assert_eq!(p.experiment, Experiment::Main);
        assert_eq!(p.config.degree, 20);
        assert_eq!(p.config.seed, 7);
        assert_eq!(p.config.prime().get(), 3);
    }

    #[test]
    fn bad_inputs_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ini");
        std::fs::write(&path, "colour = blue\n").unwrap();
        let flags = SimulateFlags {
            config: Some(path),
            ..Default::default()
        };
        assert!(matches!(plan(&flags, &globals()), Err(CliError::Usage(_))));
        let flags = SimulateFlags {
            probabilities: Some("1/2, 1/3".into()),
            ..Default::default()
        };
        assert!(matches!(plan(&flags, &globals()), Err(CliError::Usage(_))));
        let g = Globals {
            prime: Some(4),
            ..globals()
        };
        assert!(matches!(plan(&SimulateFlags::default(), &g), Err(CliError::Usage(_))));
    }

    #[test]
    fn rationals() {
        assert_eq!(rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(rational("1/0").is_err());
        assert!(rational("x").is_err());
    }
}
