//! Profile cache on disk, keyed by `(N, p)` and validated against the solver options.

use std::path::PathBuf;

use spcluster::ground_state::{solve_ground_state, ProfileCache, RadialProfile, SOLVER_VERSION};
use spcluster::InteractionConstants;

use crate::config::RunConfig;
use crate::emit::write_atomic;
use crate::CliError;

/// Profile plus whatever constants could be computed for it.
pub struct Loaded {
    pub profile: RadialProfile,
    pub constants: Result<InteractionConstants, spcluster::Error>,
    pub hit: bool,
    pub path: PathBuf,
}

impl Loaded {
    pub fn constants(&self) -> Result<InteractionConstants, CliError> {
        self.constants.clone().map_err(CliError::from)
    }
}

pub fn cache_path(cfg: &RunConfig) -> PathBuf {
    cfg.cache_dir()
        .join(format!("profile_N{}_p{}.json", cfg.dimension, cfg.exponent))
}

fn matches(cache: &ProfileCache, cfg: &RunConfig) -> bool {
    let same_options = serde_json::to_string(&cache.solver.tolerances).ok()
        == serde_json::to_string(&cfg.solver).ok();
    cache.dimension == cfg.dimension
        && cache.exponent.to_bits() == cfg.exponent.to_bits()
        && cache.solver.version == SOLVER_VERSION
        && same_options
}

/// Reuses the cached profile when `(N, p, solver options)` match exactly,
/// otherwise solves and rewrites the cache.
pub fn load_or_solve(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let path = cache_path(cfg);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(cache) = ProfileCache::from_json(&text) {
            if matches(&cache, cfg) {
                let profile = RadialProfile::from_cache(&cache)?;
                let (constants, stored) = match cache.constants {
                    Some(c) => (Ok(c), true),
                    None => (InteractionConstants::compute(&profile), false),
                };
                if !stored {
                    if let Ok(c) = &constants {
                        let mut updated = cache.clone();
                        updated.constants = Some(*c);
                        write_atomic(&path, &updated.to_json())?;
                    }
                }
                return Ok(Loaded {
                    profile,
                    constants,
                    hit: true,
                    path,
                });
            }
        }
    }
    let profile = solve_ground_state(cfg.nonlinearity()?, cfg.dimension, &cfg.solver)?;
    let constants = InteractionConstants::compute(&profile);
    let mut cache = profile.to_cache();
    cache.constants = constants.as_ref().ok().copied();
    write_atomic(&path, &cache.to_json())?;
    Ok(Loaded {
        profile,
        constants,
        hit: false,
        path,
    })
}
