//! Run configuration: a flat `key = value` text file mirrored by the CLI
//! flags, with precedence CLI flag > `EPICAL_SEED` environment variable >
//! config file > built-in default.

use std::fs;
use std::path::{Path, PathBuf};

use crate::data::CountKind;
use crate::error::{Error, Result};
use crate::mcmc::{ChainConfig, PriorConfig};
use crate::sir::NegativeStateMode;

/// Which mean model drives the Poisson likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanModelKind {
    /// Discrete SIR recursion seeded from the observed series.
    #[default]
    Sir,
    /// The polynomial test model λ_t = 5 β_t + γ_t (t/10)².
    Test,
}

/// Input distribution used by the sensitivity analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorChoice {
    /// Independent resampling of the empirical training marginals.
    #[default]
    Empirical,
    /// Uniform over the observed range of each factor.
    Uniform,
}

/// Everything a pipeline run needs beyond its input paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub prior: PriorConfig,
    pub chain: ChainConfig,
    /// Days between infection and confirmation; covariates of day t are
    /// paired with counts of day t + shift.
    pub shift_days: usize,
    pub mean_model: MeanModelKind,
    pub negative_state: NegativeStateMode,
    pub count_kind: CountKind,
    pub factor_distribution: FactorChoice,
    /// Forecast horizon in days.
    pub horizon: usize,
    /// Central predictive-interval mass.
    pub quantile: f64,
    /// Monte-Carlo integration points for the sensitivity analysis.
    pub sens_points: usize,
    pub grid_points: usize,
    pub pair_grid: usize,
    /// Chain draws used per sensitivity run (0 = all).
    pub max_draws: usize,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prior: PriorConfig::default(),
            chain: ChainConfig::default(),
            shift_days: 11,
            mean_model: MeanModelKind::Sir,
            negative_state: NegativeStateMode::Error,
            count_kind: CountKind::Auto,
            factor_distribution: FactorChoice::Empirical,
            horizon: 14,
            quantile: 0.90,
            sens_points: 2000,
            grid_points: 25,
            pair_grid: 15,
            max_draws: 200,
            jobs: 1,
        }
    }
}

fn parse<T: std::str::FromStr>(path: &Path, line: usize, key: &str, val: &str) -> Result<T> {
    val.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: format!("invalid value {val:?} for key {key:?}"),
    })
}

fn parse_bool(path: &Path, line: usize, key: &str, val: &str) -> Result<bool> {
    match val {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: format!("invalid boolean {val:?} for key {key:?}"),
        }),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment; unknown keys are errors so typos
    /// fail loudly instead of silently running with defaults.
    fn set(&mut self, path: &Path, line: usize, key: &str, val: &str) -> Result<()> {
        match key {
            "seed" => self.chain.seed = parse(path, line, key, val)?,
            "burn_in" => self.chain.burn_in = parse(path, line, key, val)?,
            "samples" => self.chain.samples = parse(path, line, key, val)?,
            "thin" => self.chain.thin = parse(path, line, key, val)?,
            "independent_gp" => self.chain.independent_gp = parse_bool(path, line, key, val)?,
            "target_accept" => self.chain.target_accept = parse(path, line, key, val)?,
            "a" => self.prior.a = parse(path, line, key, val)?,
            "b" => self.prior.b = parse(path, line, key, val)?,
            "b_rho" => self.prior.b_rho = parse(path, line, key, val)?,
            "b_phi" => self.prior.b_phi = parse(path, line, key, val)?,
            "alpha1" => self.prior.alpha1 = parse(path, line, key, val)?,
            "alpha2" => self.prior.alpha2 = parse(path, line, key, val)?,
            "sigma2_1" => self.prior.sigma2_1 = parse(path, line, key, val)?,
            "sigma2_2" => self.prior.sigma2_2 = parse(path, line, key, val)?,
            "shift_days" => self.shift_days = parse(path, line, key, val)?,
            "horizon" => self.horizon = parse(path, line, key, val)?,
            "quantile" => self.quantile = parse(path, line, key, val)?,
            "sens_points" => self.sens_points = parse(path, line, key, val)?,
            "grid_points" => self.grid_points = parse(path, line, key, val)?,
            "pair_grid" => self.pair_grid = parse(path, line, key, val)?,
            "max_draws" => self.max_draws = parse(path, line, key, val)?,
            "jobs" => self.jobs = parse(path, line, key, val)?,
            "mean_model" => {
                self.mean_model = match val {
                    "sir" => MeanModelKind::Sir,
                    "test" => MeanModelKind::Test,
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line,
                            msg: format!("mean_model must be sir or test, got {val:?}"),
                        })
                    }
                }
            }
            "negative_state" => {
                self.negative_state = match val {
                    "error" => NegativeStateMode::Error,
                    "clamp" => NegativeStateMode::Clamp,
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line,
                            msg: format!("negative_state must be error or clamp, got {val:?}"),
                        })
                    }
                }
            }
            "count_kind" => {
                self.count_kind = match val {
                    "auto" => CountKind::Auto,
                    "cumulative" => CountKind::Cumulative,
                    "daily" => CountKind::Daily,
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line,
                            msg: format!("count_kind must be auto, cumulative, or daily, got {val:?}"),
                        })
                    }
                }
            }
            "factor_distribution" => {
                self.factor_distribution = match val {
                    "empirical" => FactorChoice::Empirical,
                    "uniform" => FactorChoice::Uniform,
                    _ => {
                        return Err(Error::Parse {
                            path: path.to_path_buf(),
                            line,
                            msg: format!(
                                "factor_distribution must be empirical or uniform, got {val:?}"
                            ),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("unknown config key {key:?}"),
                })
            }
        }
        Ok(())
    }

    /// Parse a flat `key = value` file. Blank lines and `#` comments are
    /// ignored.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected `key = value`, got {raw:?}"),
            })?;
            cfg.set(path, i + 1, key.trim(), val.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply the `EPICAL_SEED` environment override (between config file and
    /// CLI flags in precedence).
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("EPICAL_SEED") {
            self.chain.seed = v.parse().map_err(|_| {
                Error::Config(format!("EPICAL_SEED must be an unsigned integer, got {v:?}"))
            })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.prior.validate()?;
        self.chain.validate()?;
        if !(0.0 < self.quantile && self.quantile < 1.0) {
            return Err(Error::Config(format!(
                "quantile must lie in (0,1), got {}",
                self.quantile
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.sens_points == 0 || self.grid_points == 0 || self.pair_grid == 0 {
            return Err(Error::Config(
                "sens_points, grid_points, pair_grid must be positive".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parse `--pairs a:b,c:d` into factor-name pairs.
pub fn parse_pairs(spec: &str) -> Result<Vec<(String, String)>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .split_once(':')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("pair {s:?} must look like name:name")))
        })
        .collect()
}

/// Files written by `fit` and consumed by the downstream commands.
#[derive(Debug, Clone)]
pub struct FitArtifacts {
    pub chain: PathBuf,
    pub acceptance: PathBuf,
    pub fitted: PathBuf,
    pub train: PathBuf,
    pub ranges: PathBuf,
    pub meta: PathBuf,
}

impl FitArtifacts {
    pub fn in_dir(dir: &Path) -> FitArtifacts {
        FitArtifacts {
            chain: dir.join("chain.csv"),
            acceptance: dir.join("acceptance.txt"),
            fitted: dir.join("fitted.csv"),
            train: dir.join("train_scaled.csv"),
            ranges: dir.join("scaling_ranges.csv"),
            meta: dir.join("meta.txt"),
        }
    }

    /// Error with the first missing path, if any.
    pub fn require(&self) -> Result<()> {
        for p in [&self.chain, &self.acceptance, &self.fitted, &self.train, &self.ranges, &self.meta]
        {
            if !p.exists() {
                return Err(Error::MissingArtifact(p.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_cfg(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn default_settings_pinned() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.chain.burn_in, 2000);
        assert_eq!(cfg.chain.samples, 2000);
        assert_eq!(cfg.shift_days, 11);
        assert_eq!(cfg.horizon, 14);
        assert_eq!(cfg.prior.a, 0.01);
        assert_eq!(cfg.prior.b_rho, 0.1);
        cfg.validate().unwrap();
    }

    #[test]
    fn file_overrides_defaults() {
        let f = write_cfg(
            "# a comment\nseed = 42\nburn_in = 10\nmean_model = test\n\nquantile = 0.5 # inline\nindependent_gp = true\n",
        );
        let cfg = RunConfig::load(f.path()).unwrap();
        assert_eq!(cfg.chain.seed, 42);
        assert_eq!(cfg.chain.burn_in, 10);
        assert_eq!(cfg.mean_model, MeanModelKind::Test);
        assert_eq!(cfg.quantile, 0.5);
        assert!(cfg.chain.independent_gp);
        // untouched keys keep defaults
        assert_eq!(cfg.horizon, 14);
    }

    #[test]
    fn unknown_key_and_bad_value_are_parse_errors() {
        for text in ["bogus = 1\n", "seed = not-a-number\n", "just words\n"] {
            let f = write_cfg(text);
            assert!(matches!(
                RunConfig::load(f.path()),
                Err(Error::Parse { line: 1, .. })
            ));
        }
    }

    #[test]
    fn pairs_parse() {
        let pairs = parse_pairs("intervention:temperature, humidity:pressure").unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0], ("intervention".into(), "temperature".into()));
        assert!(parse_pairs("nocolon").is_err());
        assert!(parse_pairs("").unwrap().is_empty());
    }

    #[test]
    fn missing_artifact_named() {
        let dir = tempfile::tempdir().unwrap();
        let art = FitArtifacts::in_dir(dir.path());
        match art.require() {
            Err(Error::MissingArtifact(p)) => assert!(p.ends_with("chain.csv")),
            other => panic!("expected MissingArtifact, got {other:?}"),
        }
    }
}
