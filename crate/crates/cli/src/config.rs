use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spcluster::ground_state::{Nonlinearity, SolverOptions};
use spcluster::oracle_quadrature::OracleOptions;
use spcluster::{Execution, ReductionParameters};

use crate::CliError;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SPCLUSTER_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReductionConfig {
    pub beta: f64,
    /// Defaults to the Hölder exponent of `f`, capped so that `σ < β`.
    pub sigma: Option<f64>,
    pub mu: f64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            beta: ReductionParameters::DEFAULT_BETA,
            sigma: None,
            mu: ReductionParameters::DEFAULT_MU,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub cache_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub exponent: f64,
    pub reduction: ReductionConfig,
    pub solver: SolverOptions,
    pub quadrature: OracleOptions,
    pub paths: PathsConfig,
    pub sequential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dimension: 3,
            exponent: 3.0,
            reduction: ReductionConfig::default(),
            solver: SolverOptions::default(),
            quadrature: OracleOptions::default(),
            paths: PathsConfig::default(),
            sequential: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(3..=6).contains(&self.dimension) {
            return Err(CliError::Validation(format!(
                "dimension N = {} outside [3, 6]",
                self.dimension
            )));
        }
        self.nonlinearity()?;
        self.reduction_parameters()?;
        self.solver.validate()?;
        if !(self.quadrature.rel_tol > 0.0 && self.quadrature.panels > 0) {
            return Err(CliError::Validation(format!(
                "quadrature needs rel_tol > 0 and panels > 0, got {:?}",
                self.quadrature
            )));
        }
        Ok(())
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, CliError> {
        let nl = Nonlinearity::power(self.exponent)?;
        nl.check_admissible(self.dimension)?;
        Ok(nl)
    }

    pub fn reduction_parameters(&self) -> Result<ReductionParameters, CliError> {
        let nl = Nonlinearity::power(self.exponent)?;
        let sigma = self
            .reduction
            .sigma
            .unwrap_or_else(|| nl.holder_sigma().min(ReductionParameters::SIGMA_CAP));
        Ok(ReductionParameters::new(self.reduction.beta, sigma, self.reduction.mu)?)
    }

    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Applies the cache directory precedence: flag, environment, config file.
    pub fn override_cache_dir(&mut self, flag: Option<PathBuf>) {
        let env = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
        if let Some(dir) = flag.or(env) {
            self.paths.cache_dir = Some(dir);
        }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.paths
            .cache_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("spcluster-cache"))
    }

    /// Resolves a relative output path against the configured output directory.
    pub fn output_path(&self, path: &Path) -> PathBuf {
        match &self.paths.output_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let r = c.reduction_parameters().unwrap();
        assert_eq!((r.beta, r.sigma, r.mu), (0.95, 0.9, 0.5));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"dimension": 4, "exponent": 2.5, "solver": {"r_max": 30}}"#).unwrap();
        assert_eq!(c.dimension, 4);
        assert_eq!(c.solver.r_max, 30.0);
        assert_eq!(c.solver.grid_step, SolverOptions::default().grid_step);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_ranges() {
        let bad = [
            RunConfig { dimension: 2, ..RunConfig::default() },
            RunConfig { exponent: 5.0, ..RunConfig::default() },
            RunConfig {
                reduction: ReductionConfig { beta: 0.5, sigma: Some(0.7), mu: 0.5 },
                ..RunConfig::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(serde_json::from_str::<RunConfig>(r#"{"dimesion": 3}"#).is_err());
    }
}
