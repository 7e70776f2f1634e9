//! TOML run configuration for [`sweep`](super::sweep).
//!
//! Every table rejects unknown keys. Omitted sections take the defaults
//! below, which are also what `configs/default.toml` spells out.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::family::SequenceFamily;
use crate::error::{Error, Result};
use crate::params::MorreyParams;
use crate::seq::WeightFamily;

use super::report::SCHEMA_VERSION;

/// Identifiers of the checks a sweep can run.
pub const CHECK_IDS: [&str; 11] = [
    "riesz",
    "weak11",
    "l1-log",
    "theorem31",
    "theorem32",
    "embedding-norm",
    "domination",
    "ap-stability",
    "reverse-doubling",
    "corollary",
    "opnorm",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub checks: Vec<String>,
    pub tolerances: Tolerances,
    pub output: Output,
    pub riesz: RieszConfig,
    pub weak11: Weak11Config,
    pub l1_log: L1LogConfig,
    pub theorem31: Theorem31Config,
    pub theorem32: Theorem32Config,
    pub embedding_norm: EmbeddingNormConfig,
    pub domination: DominationConfig,
    pub ap_stability: ApStabilityConfig,
    pub reverse_doubling: ReverseDoublingConfig,
    pub corollary: CorollaryConfig,
    pub opnorm: OpNormConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: 20_240_917,
            checks: CHECK_IDS.iter().map(|s| s.to_string()).collect(),
            tolerances: Tolerances::default(),
            output: Output::default(),
            riesz: RieszConfig::default(),
            weak11: Weak11Config::default(),
            l1_log: L1LogConfig::default(),
            theorem31: Theorem31Config::default(),
            theorem32: Theorem32Config::default(),
            embedding_norm: EmbeddingNormConfig::default(),
            domination: DominationConfig::default(),
            ap_stability: ApStabilityConfig::default(),
            reverse_doubling: ReverseDoublingConfig::default(),
            corollary: CorollaryConfig::default(),
            opnorm: OpNormConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Tolerances {
    /// Allowed relative change of a measured constant when the window doubles.
    pub drift: f64,
    /// The same for Muckenhoupt constants.
    pub ap_drift: f64,
    /// Minimum relative growth expected from a weight outside the class.
    pub ap_growth: f64,
    /// `D_1` must exceed `1 + reverse_doubling_margin`.
    pub reverse_doubling_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift: 0.05,
            ap_drift: 0.02,
            ap_growth: 0.25,
            reverse_doubling_margin: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RieszConfig {
    pub sequences: Vec<String>,
    pub p: Vec<f64>,
    /// Evaluation half-width beyond the support; compared against twice this.
    pub half_width: i64,
}

impl Default for RieszConfig {
    fn default() -> Self {
        RieszConfig {
            sequences: strings(&["delta", "random:50:16:1"]),
            p: vec![1.5, 2.0, 3.0],
            half_width: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Weak11Config {
    pub sequences: Vec<String>,
    pub half_width: i64,
}

impl Default for Weak11Config {
    fn default() -> Self {
        Weak11Config {
            sequences: strings(&["delta", "random:50:16:1"]),
            half_width: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct L1LogConfig {
    pub sequences: Vec<String>,
    pub half_width: i64,
}

impl Default for L1LogConfig {
    fn default() -> Self {
        L1LogConfig {
            sequences: strings(&["pairs:8", "random-mean-zero:20:12"]),
            half_width: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Theorem31Config {
    pub sequences: Vec<String>,
    pub weights: Vec<String>,
    /// `(p, lambda)` grid.
    pub params: Vec<(f64, f64)>,
    /// The bound is checked at every `|n| <= n_max`.
    pub n_max: i64,
    pub ap_half_width: i64,
    pub d1_max_n: i64,
}

impl Default for Theorem31Config {
    fn default() -> Self {
        Theorem31Config {
            sequences: strings(&["delta", "alternating:6", "block:5", "random:3:9:1"]),
            weights: strings(&[
                "const:1",
                "power:0.25",
                "power:-0.5",
                "power:1",
                "random:7:4",
                "step:1:100:0",
            ]),
            params: lambda_grid(&[1.5, 2.0, 3.0]),
            n_max: 100,
            ap_half_width: 128,
            d1_max_n: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Theorem32Config {
    pub sequences: Vec<String>,
    pub weights: Vec<String>,
    pub params: Vec<(f64, f64)>,
    pub half_width: i64,
    /// Also double the spacing of the support when the window doubles.
    pub dilate: bool,
}

impl Default for Theorem32Config {
    fn default() -> Self {
        Theorem32Config {
            sequences: strings(&["random:50:8:1"]),
            weights: strings(&["const:1", "power:0.5", "random:7:4"]),
            params: vec![(2.0, 0.125), (2.0, 0.25), (3.0, 0.2)],
            half_width: 256,
            dilate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EmbeddingNormConfig {
    pub sequences: Vec<String>,
    pub weights: Vec<String>,
    pub params: Vec<(f64, f64)>,
    /// Doubling search: `delta` up to this many half steps.
    pub half_steps: i64,
}

impl Default for EmbeddingNormConfig {
    fn default() -> Self {
        EmbeddingNormConfig {
            sequences: strings(&["delta", "random:20:8:1"]),
            weights: strings(&["const:1", "power:0.5", "random:7:4"]),
            params: vec![(2.0, 0.25), (3.0, 0.2), (1.5, 0.3)],
            half_steps: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DominationConfig {
    pub sequences: Vec<String>,
    /// Indices `|j| <= j_max`.
    pub j_max: i64,
    pub samples: usize,
}

impl Default for DominationConfig {
    fn default() -> Self {
        DominationConfig {
            sequences: strings(&["delta", "random:20:8:1", "random-mean-zero:20:8"]),
            j_max: 20,
            samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ApStabilityConfig {
    /// Expected to change by at most `ap-drift` when the window doubles.
    pub stable: Vec<String>,
    /// Negative controls: expected to grow by at least `ap-growth`.
    pub growing: Vec<String>,
    pub p: Vec<f64>,
    pub half_width: i64,
}

impl Default for ApStabilityConfig {
    fn default() -> Self {
        ApStabilityConfig {
            stable: strings(&["const:1", "random:7:4", "step:1:100:0"]),
            growing: strings(&["power:3"]),
            p: vec![1.5, 2.0, 3.0],
            half_width: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReverseDoublingConfig {
    pub weights: Vec<String>,
    pub max_n: i64,
    pub half_width: i64,
}

impl Default for ReverseDoublingConfig {
    fn default() -> Self {
        ReverseDoublingConfig {
            weights: shipped_weights(),
            max_n: 60,
            half_width: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CorollaryConfig {
    pub weights: Vec<String>,
    /// Number of random centers.
    pub centers: usize,
    /// Centers are drawn from `[-center_range, center_range]`.
    pub center_range: i64,
    pub i_max: u32,
    pub max_n: i64,
    pub half_width: i64,
}

impl Default for CorollaryConfig {
    fn default() -> Self {
        CorollaryConfig {
            weights: shipped_weights(),
            centers: 20,
            center_range: 64,
            i_max: 6,
            max_n: 60,
            half_width: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    DeltaProbes,
    RandomSearch,
    CoordinateAscent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct OpNormConfig {
    pub weights: Vec<String>,
    pub params: Vec<(f64, f64)>,
    /// Trial sequences live on `[-box_half_width, box_half_width]`.
    pub box_half_width: i64,
    /// Evaluation window padding beyond the box.
    pub pad: i64,
    pub strategy: StrategyKind,
    pub budget: usize,
}

impl Default for OpNormConfig {
    fn default() -> Self {
        OpNormConfig {
            weights: strings(&["const:1", "power:0.5"]),
            params: vec![(2.0, 0.125), (2.0, 0.25)],
            box_half_width: 4,
            pad: 32,
            strategy: StrategyKind::CoordinateAscent,
            budget: 36,
        }
    }
}

/// Weight families shipped with the default configuration. All are
/// doubling; `power:1` lies in the Muckenhoupt class only for `p > 2`.
pub fn shipped_weights() -> Vec<String> {
    strings(&[
        "const:1",
        "power:0.5",
        "power:-0.5",
        "power:1",
        "random:7:4",
        "step:1:100:0",
    ])
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// `lambda = 1/(4p), 1/(2p), 3/(4p)` for each `p`.
fn lambda_grid(ps: &[f64]) -> Vec<(f64, f64)> {
    ps.iter().flat_map(|&p| [0.25, 0.5, 0.75].map(|f| (p, f / p))).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn enabled(&self, id: &str) -> bool {
        self.checks.iter().any(|c| c == id)
    }

    /// Rejects anything a sweep could only discover halfway through: unknown
    /// check ids, unparsable families and out-of-range exponents.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "config schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        for c in &self.checks {
            if !CHECK_IDS.contains(&c.as_str()) {
                return Err(Error::Parse(format!("unknown check '{c}'")));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("drift", t.drift),
            ("ap-drift", t.ap_drift),
            ("ap-growth", t.ap_growth),
            ("reverse-doubling-margin", t.reverse_doubling_margin),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("tolerance {name} = {v}")));
            }
        }
        let seqs = [
            &self.riesz.sequences,
            &self.weak11.sequences,
            &self.l1_log.sequences,
            &self.theorem31.sequences,
            &self.theorem32.sequences,
            &self.embedding_norm.sequences,
            &self.domination.sequences,
        ];
        for list in seqs {
            parse_all::<SequenceFamily>(list)?;
        }
        let weights = [
            &self.theorem31.weights,
            &self.theorem32.weights,
            &self.embedding_norm.weights,
            &self.ap_stability.stable,
            &self.ap_stability.growing,
            &self.reverse_doubling.weights,
            &self.corollary.weights,
            &self.opnorm.weights,
        ];
        for list in weights {
            parse_all::<WeightFamily>(list)?;
        }
        for grid in [
            &self.theorem31.params,
            &self.theorem32.params,
            &self.embedding_norm.params,
            &self.opnorm.params,
        ] {
            for &(p, l) in grid {
                MorreyParams::new(p, l)?;
            }
        }
        for &p in self.riesz.p.iter().chain(&self.ap_stability.p) {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("p = {p}")));
            }
        }
        let nonneg = [
            ("riesz.half-width", self.riesz.half_width),
            ("weak11.half-width", self.weak11.half_width),
            ("l1-log.half-width", self.l1_log.half_width),
            ("theorem31.n-max", self.theorem31.n_max),
            ("theorem31.ap-half-width", self.theorem31.ap_half_width),
            ("theorem31.d1-max-n", self.theorem31.d1_max_n),
            ("theorem32.half-width", self.theorem32.half_width),
            ("embedding-norm.half-steps", self.embedding_norm.half_steps),
            ("domination.j-max", self.domination.j_max),
            ("ap-stability.half-width", self.ap_stability.half_width),
            ("reverse-doubling.max-n", self.reverse_doubling.max_n),
            ("reverse-doubling.half-width", self.reverse_doubling.half_width),
            ("corollary.center-range", self.corollary.center_range),
            ("corollary.max-n", self.corollary.max_n),
            ("corollary.half-width", self.corollary.half_width),
            ("opnorm.box-half-width", self.opnorm.box_half_width),
            ("opnorm.pad", self.opnorm.pad),
        ];
        for (name, v) in nonneg {
            if !(0..=1 << 20).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} out of range")));
            }
        }
        if self.domination.samples == 0 {
            return Err(Error::InvalidParameter("domination.samples = 0".into()));
        }
        Ok(())
    }
}

pub(crate) fn parse_all<T: FromStr<Err = Error>>(list: &[String]) -> Result<Vec<T>> {
    list.iter().map(|s| s.parse()).collect()
}
