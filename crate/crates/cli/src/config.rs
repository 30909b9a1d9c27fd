//! Run configuration: a JSON file with command-line overrides on top.

use std::path::Path;

use nilflow::interval::ParamConfig;
use nilflow::ParamSet;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamConfig,
    /// Truncation radius of the index box.
    #[serde(rename = "N")]
    pub radius: i64,
    pub seed: u64,
    pub holder: HolderOptions,
    pub markov: MarkovOptions,
    pub obstruction: ObstructionOptions,
    pub eval: EvalOptions,
    pub verify: VerifyOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ParamConfig::Auto { alpha: 0.4, auto: true },
            radius: 6,
            seed: 0,
            holder: HolderOptions::default(),
            markov: MarkovOptions::default(),
            obstruction: ObstructionOptions::default(),
            eval: EvalOptions::default(),
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderOptions {
    pub alpha_list: Vec<f64>,
    #[serde(rename = "N_list")]
    pub radius_list: Vec<i64>,
    pub word: String,
    pub points_per_interval: usize,
    pub random_points: usize,
}

impl Default for HolderOptions {
    fn default() -> Self {
        HolderOptions {
            alpha_list: vec![0.4],
            radius_list: vec![4, 8],
            word: "f".into(),
            points_per_interval: 17,
            random_points: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkovOptions {
    pub d: usize,
    pub paths: u64,
    pub horizons: Vec<u64>,
    /// Length exponents, one per coordinate. Defaults to `(p, q, r)` when
    /// `d = 3`.
    pub exponents: Option<Vec<f64>>,
    pub tolerance: f64,
}

impl Default for MarkovOptions {
    fn default() -> Self {
        MarkovOptions { d: 3, paths: 10_000, horizons: vec![1_000, 10_000, 100_000], exponents: None, tolerance: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObstructionOptions {
    pub base: [i64; 3],
    /// Radius of the lexicographic family check; 0 skips it.
    pub lex_radius: i64,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        ObstructionOptions { base: [0, 0, 0], lex_radius: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOptions {
    pub word: String,
    /// Sample points; empty means the midpoint of every safe interval.
    pub x: Vec<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { word: "f".into(), x: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    GroupOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub suite: Suite,
    /// Relative perturbation of alternate frame lengths (fault injection).
    pub perturb_lengths: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { suite: Suite::All, perturb_lengths: None }
    }
}

/// Parameter flags shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct ParamFlags {
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub auto: bool,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply_param_flags(&mut self, flags: &ParamFlags) -> Result<(), CliError> {
        let (alpha, explicit) = match self.params {
            ParamConfig::Explicit { alpha, p, q, r } => (alpha, Some((p, q, r))),
            ParamConfig::Auto { alpha, .. } => (alpha, None),
        };
        let alpha = flags.alpha.unwrap_or(alpha);
        let any_exponent = flags.p.is_some() || flags.q.is_some() || flags.r.is_some();
        if flags.auto && any_exponent {
            return Err(CliError::Usage("--auto cannot be combined with --p/--q/--r".into()));
        }
        self.params = if flags.auto {
            ParamConfig::Auto { alpha, auto: true }
        } else if any_exponent {
            let (p0, q0, r0) = explicit.map_or((None, None, None), |(p, q, r)| (Some(p), Some(q), Some(r)));
            match (flags.p.or(p0), flags.q.or(q0), flags.r.or(r0)) {
                (Some(p), Some(q), Some(r)) => ParamConfig::Explicit { alpha, p, q, r },
                _ => return Err(CliError::Usage("explicit parameters need all of --p, --q, --r".into())),
            }
        } else {
            match explicit {
                Some((p, q, r)) => ParamConfig::Explicit { alpha, p, q, r },
                None => ParamConfig::Auto { alpha, auto: true },
            }
        };
        Ok(())
    }

    /// Validated parameters. Auto mode needs `α ∈ (0, 1/2)`.
    pub fn resolve_params(&self) -> Result<ParamSet, CliError> {
        self.params.resolve().map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.radius < 1 {
            return Err(CliError::Usage(format!("N must be at least 1, got {}", self.radius)));
        }
        Ok(())
    }
}
