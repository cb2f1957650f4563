//! Experiment configuration files.

use std::path::{Path, PathBuf};

use bundlegsp::bundle::VoltageEntry;
use bundlegsp::cover::{self, Cover, PartitionOfUnity};
use bundlegsp::denoise::{ThresholdRule, DEFAULT_SIGMA_COUNT};
use bundlegsp::graph::cartesian_product;
use bundlegsp::spectral::{fourier_basis, standard_basis};
use bundlegsp::{build_bundle, presets, Graph, GraphBundle, OrthonormalDictionary, VoltageAssignment};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSpec>,
    #[serde(default)]
    pub cover: CoverSpec,
    #[serde(default)]
    pub partition: PartitionSpec,
    #[serde(default)]
    pub factor_basis: FactorBasis,
    /// Sparsity level for cumulative coherence; `⌊√n⌋` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_m: Option<usize>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denoise: Option<DenoiseSpec>,
    #[serde(default)]
    pub dictionary: DictionarySpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// A named preset or an explicit base, fiber and voltage table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BundleSpec {
    Preset {
        preset: String,
    },
    Explicit {
        base: Graph,
        fiber: Graph,
        #[serde(default)]
        voltages: Vec<VoltageEntry>,
        /// Base vertex order used to place stride/reach centers.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cycle_order: Option<Vec<usize>>,
    },
}

impl BundleSpec {
    pub fn build(&self) -> Result<GraphBundle> {
        match self {
            BundleSpec::Preset { preset } => presets::by_name(preset)
                .ok_or_else(|| CliError::Config(format!("unknown bundle preset `{preset}`"))),
            BundleSpec::Explicit {
                base,
                fiber,
                voltages,
                ..
            } => Ok(build_bundle(VoltageAssignment::from_entries(base, fiber, voltages)?)?),
        }
    }

    /// Order of base vertices along which cover centers are placed.
    pub fn cycle_order(&self, base: &Graph) -> Vec<usize> {
        match self {
            BundleSpec::Explicit {
                cycle_order: Some(order),
                ..
            } => order.clone(),
            _ => (0..base.vertex_count()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoverSpec {
    StrideReach { stride: usize, reach: usize },
    Star,
    Trivial,
    Singleton,
}

impl Default for CoverSpec {
    fn default() -> Self {
        CoverSpec::StrideReach { stride: 3, reach: 2 }
    }
}

impl CoverSpec {
    pub fn build(&self, base: &Graph, cycle_order: &[usize]) -> Result<Cover> {
        Ok(match *self {
            CoverSpec::StrideReach { stride, reach } => {
                cover::stride_reach_cover(base, cycle_order, stride, reach)?
            }
            CoverSpec::Star => cover::star_cover(base),
            CoverSpec::Trivial => cover::trivial_cover(base)?,
            CoverSpec::Singleton => cover::singleton_cover(base)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    #[default]
    InverseMultiplicity,
    /// `weights[k][v]` is `ρ_U(v)` for the `k`-th cover set.
    Weights(Vec<Vec<f64>>),
}

impl PartitionSpec {
    pub fn build(&self, cover: &Cover) -> Result<PartitionOfUnity> {
        Ok(match self {
            PartitionSpec::InverseMultiplicity => cover::inverse_multiplicity_partition(cover),
            PartitionSpec::Weights(w) => PartitionOfUnity::new(cover, w.clone())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorBasis {
    #[default]
    Fourier,
    Standard,
}

impl FactorBasis {
    pub fn build(self, g: &Graph) -> Result<OrthonormalDictionary> {
        Ok(match self {
            FactorBasis::Fourier => fourier_basis(g)?,
            FactorBasis::Standard => standard_basis(g),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "one_to_six")]
    pub strides: Vec<usize>,
    #[serde(default = "one_to_six")]
    pub reaches: Vec<usize>,
}

fn one_to_six() -> Vec<usize> {
    (1..=6).collect()
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            strides: one_to_six(),
            reaches: one_to_six(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Total graph of a bundle.
    Bundle(BundleSpec),
    Product { base: Graph, fiber: Graph },
    Graph(Graph),
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph> {
        Ok(match self {
            GraphSpec::Bundle(b) => b.build()?.total().clone(),
            GraphSpec::Product { base, fiber } => cartesian_product(base, fiber).0,
            GraphSpec::Graph(g) => g.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraSpec {
    pub left: GraphSpec,
    pub right: GraphSpec,
    #[serde(default = "default_max_moment")]
    pub max_moment: u32,
}

fn default_max_moment() -> u32 {
    6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleSpec {
    #[default]
    Hard,
    Soft,
}

impl From<RuleSpec> for ThresholdRule {
    fn from(r: RuleSpec) -> Self {
        match r {
            RuleSpec::Hard => ThresholdRule::Hard,
            RuleSpec::Soft => ThresholdRule::Soft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenoiseSpec {
    /// Landscape CSV, relative to the config file's directory.
    pub landscape: PathBuf,
    /// Noise levels; a log-spaced grid over `[0.01, 1]·RMS` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default = "default_sigma_count")]
    pub sigma_count: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub rule: RuleSpec,
}

fn default_sigma_count() -> usize {
    DEFAULT_SIGMA_COUNT
}

fn default_trials() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionarySpec {
    /// Optional signal CSV to analyze and resynthesize alongside the dump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<PathBuf>,
}

/// A parsed config together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = serde_json::from_str(&text).map_err(|e| CliError::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, dir })
    }

    pub fn from_config(config: ExperimentConfig, dir: impl Into<PathBuf>) -> Self {
        Self {
            config,
            dir: dir.into(),
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    pub fn bundle_spec(&self) -> Result<&BundleSpec> {
        self.config
            .bundle
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no `bundle` section".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"bundle": {"preset": "mobius"}}"#).unwrap();
        assert_eq!(c.cover, CoverSpec::StrideReach { stride: 3, reach: 2 });
        assert_eq!(c.partition, PartitionSpec::InverseMultiplicity);
        assert_eq!(c.sweep.strides, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn round_trips() {
        let text = r#"{
            "bundle": {"base": {"n": 3, "edges": [[0,1],[1,2],[0,2]]},
                       "fiber": {"n": 2, "edges": [[0,1]]},
                       "voltages": [{"edge": [2, 0], "perm": [1, 0]}]},
            "cover": {"kind": "star"},
            "partition": {"weights": [[1.0, 0.5, 0.5], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]]},
            "factor_basis": "standard",
            "spectra": {"left": {"bundle": {"preset": "mobius"}},
                        "right": {"product": {"base": {"n": 2, "edges": [[0,1]]},
                                              "fiber": {"n": 2, "edges": [[0,1]]}}}},
            "denoise": {"landscape": "x.csv", "rule": "soft"},
            "seed": 5
        }"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.denoise.as_ref().unwrap().trials, 50);
        assert_eq!(c.spectra.as_ref().unwrap().max_moment, 6);
        let b = c.bundle.unwrap().build().unwrap();
        assert_eq!(b.total().vertex_count(), 6);
    }

    #[test]
    fn rejects_unknown_fields_and_presets() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"stride": 3}"#).is_err());
        let c: ExperimentConfig = serde_json::from_str(r#"{"bundle": {"preset": "torus"}}"#).unwrap();
        assert!(matches!(c.bundle.unwrap().build(), Err(CliError::Config(_))));
    }

    #[test]
    fn bad_voltage_is_reported() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"bundle": {"base": {"n": 2, "edges": [[0,1]]},
                           "fiber": {"n": 3, "edges": [[0,1],[1,2]]},
                           "voltages": [{"edge": [0, 1], "perm": [1, 0, 2]}]}}"#,
        )
        .unwrap();
        assert!(matches!(c.bundle.unwrap().build(), Err(CliError::Core(_))));
    }
}
