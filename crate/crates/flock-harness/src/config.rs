//! Experiment configuration.
//!
//! Config files are TOML. Every key is optional; the five sweep axes
//! (`rv_count`, `inf_count`, `placement`, `placement_radius`, `behavior`)
//! take either a single value or an array, and the experiment runs their full
//! Cartesian product. Unknown keys are rejected.
//!
//! ```toml
//! setting = "large"
//! inf_count = [10, 20, 30]
//! behavior = ["face", "multistep:face"]
//! trials = 20
//! ```

use std::fmt;

use flock_core::behaviors::BehaviorSpec;
use flock_core::metrics::{AlignmentTolerance, MetricOptions};
use flock_core::placement::{KMeansParams, PlacementSpec};
use flock_core::{BehaviorKind, Setting, Strategy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_RV_COUNT: usize = 300;
pub const DEFAULT_INF_COUNT: usize = 50;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SAMPLE_INTERVAL: u64 = 100;
pub const DEFAULT_PLACEMENT_RADIUS: f64 = 500.0;
pub const DEFAULT_THRESHOLD_FRAC: f64 = 0.5;
/// Step cap for large-setting runs with influencers.
pub const LARGE_INFLUENCE_STEPS: u64 = 30_000;
pub const HERD_INFLUENCE_STEPS: u64 = 15_000;
pub const NO_INFLUENCE_STEPS: u64 = 6_000;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error("unknown setting `{0}` (expected small, large or herd)")]
    UnknownSetting(String),
    #[error("unknown placement strategy `{0}`")]
    UnknownPlacement(String),
    #[error("unknown behavior `{0}`")]
    UnknownBehavior(String),
    #[error("behavior `{behavior}` cannot run in the {setting} setting")]
    BehaviorSettingMismatch { behavior: BehaviorKind, setting: Setting },
    #[error("placement `{placement}` cannot be used in the {setting} setting")]
    PlacementSettingMismatch { placement: Strategy, setting: Setting },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::InvalidValue { key, reason: reason.to_string() }
}

/// A scalar or a list of values for a sweep axis.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(mut v: Vec<T>) -> Self {
        if v.len() == 1 {
            OneOrMany::One(v.pop().unwrap())
        } else {
            OneOrMany::Many(v)
        }
    }
}

/// The file schema. Every field is optional; CLI flags are layered on top
/// with [`ConfigFile::merge`] before [`ConfigFile::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub setting: Option<String>,
    pub rv_count: Option<OneOrMany<usize>>,
    pub inf_count: Option<OneOrMany<usize>>,
    pub placement: Option<OneOrMany<String>>,
    pub placement_radius: Option<OneOrMany<f64>>,
    pub behavior: Option<OneOrMany<String>>,
    pub goal_theta: Option<f64>,
    pub threshold_frac: Option<f64>,
    pub include_influencer_headings: Option<bool>,
    pub final_radius: Option<f64>,
    pub circle_radius: Option<f64>,
    pub polygon_sides: Option<usize>,
    pub candidates: Option<usize>,
    pub max_steps: Option<u64>,
    pub sample_interval: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub epsilon_align: Option<f64>,
    pub proximity_only_flocks: Option<bool>,
    pub threads: Option<usize>,
    pub early_exit: Option<bool>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Malformed(e.message().to_string()))
    }

    /// Overwrites every field that is set in `over`.
    pub fn merge(&mut self, over: ConfigFile) {
        merge_fields!(self, over;
            setting, rv_count, inf_count, placement, placement_radius, behavior, goal_theta,
            threshold_frac, include_influencer_headings, final_radius, circle_radius, polygon_sides,
            candidates, max_steps, sample_interval, trials, seed, epsilon_align,
            proximity_only_flocks, threads, early_exit);
    }

    /// Fills defaults and validates, including every cell of the sweep.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let setting: Setting = match &self.setting {
            Some(s) => s.parse().map_err(|_| ConfigError::UnknownSetting(s.clone()))?,
            None => Setting::Large,
        };
        let axis = |v: &Option<OneOrMany<usize>>, key, default| -> Result<Vec<usize>, ConfigError> {
            let v = v.as_ref().map_or(vec![default], OneOrMany::to_vec);
            if v.is_empty() {
                return Err(invalid(key, "empty list"));
            }
            Ok(v)
        };
        let placements = match &self.placement {
            Some(p) => p
                .to_vec()
                .iter()
                .map(|s| s.parse().map_err(|_| ConfigError::UnknownPlacement(s.clone())))
                .collect::<Result<Vec<Strategy>, _>>()?,
            None => vec![default_placement(setting)],
        };
        let behaviors = match &self.behavior {
            Some(b) => b
                .to_vec()
                .iter()
                .map(|s| s.parse().map_err(|_| ConfigError::UnknownBehavior(s.clone())))
                .collect::<Result<Vec<BehaviorKind>, _>>()?,
            None => vec![BehaviorKind::Face],
        };
        let radii = self.placement_radius.as_ref().map_or(vec![DEFAULT_PLACEMENT_RADIUS], OneOrMany::to_vec);
        let axes = Axes {
            rv_count: axis(&self.rv_count, "rv_count", DEFAULT_RV_COUNT)?,
            inf_count: axis(&self.inf_count, "inf_count", DEFAULT_INF_COUNT)?,
            placement: placements,
            placement_radius: radii,
            behavior: behaviors,
        };
        if axes.placement.is_empty() {
            return Err(invalid("placement", "empty list"));
        }
        if axes.behavior.is_empty() {
            return Err(invalid("behavior", "empty list"));
        }
        if axes.placement_radius.is_empty() {
            return Err(invalid("placement_radius", "empty list"));
        }

        let epsilon = self.epsilon_align.unwrap_or(AlignmentTolerance::DEFAULT.radians());
        let tolerance = AlignmentTolerance::new(epsilon).map_err(|e| invalid("epsilon_align", e))?;
        let threshold_frac = self.threshold_frac.unwrap_or(DEFAULT_THRESHOLD_FRAC);
        if !(threshold_frac > 0.0 && threshold_frac <= 1.0) {
            return Err(invalid("threshold_frac", "must be in (0, 1]"));
        }
        let cfg = ExperimentConfig {
            setting,
            axes,
            goal_theta: self.goal_theta.unwrap_or(0.0),
            threshold_frac,
            include_influencer_headings: self.include_influencer_headings.unwrap_or(true),
            final_radius: self.final_radius,
            circle_radius: self.circle_radius,
            polygon_sides: self.polygon_sides.unwrap_or(10),
            candidates: self.candidates,
            max_steps: self.max_steps,
            sample_interval: self.sample_interval.unwrap_or(DEFAULT_SAMPLE_INTERVAL),
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            base_seed: self.seed.unwrap_or(0),
            metrics: MetricOptions {
                tolerance,
                proximity_only_flocks: self.proximity_only_flocks.unwrap_or(false),
            },
            threads: self.threads.unwrap_or(0),
            early_exit: self.early_exit.unwrap_or(false),
        };
        if cfg.sample_interval == 0 {
            return Err(invalid("sample_interval", "must be at least 1"));
        }
        if cfg.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !cfg.goal_theta.is_finite() {
            return Err(invalid("goal_theta", "must be finite"));
        }
        cfg.cells()?;
        Ok(cfg)
    }
}

/// Parses and validates a TOML config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    ConfigFile::from_toml(text)?.resolve()
}

pub fn default_placement(setting: Setting) -> Strategy {
    match setting {
        Setting::Herd => Strategy::KMeans,
        Setting::Small | Setting::Large => Strategy::Grid,
    }
}

/// Step cap used when `max_steps` is not given.
pub fn default_max_steps(setting: Setting, inf_count: usize) -> u64 {
    match (setting, inf_count) {
        (_, 0) => NO_INFLUENCE_STEPS,
        (Setting::Herd, _) => HERD_INFLUENCE_STEPS,
        (Setting::Small | Setting::Large, _) => LARGE_INFLUENCE_STEPS,
    }
}

/// Final multicircle radius used when none is given: 900 for the radius-500
/// placement, and kept 350 beyond larger placement radii.
pub fn default_final_radius(placement_radius: f64) -> f64 {
    f64::max(900.0, placement_radius + 350.0)
}

/// Values for the swept parameters. Cells enumerate their product with
/// `behavior` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Axes {
    pub rv_count: Vec<usize>,
    pub inf_count: Vec<usize>,
    pub placement: Vec<Strategy>,
    pub placement_radius: Vec<f64>,
    pub behavior: Vec<BehaviorKind>,
}

impl Axes {
    pub fn cell_count(&self) -> usize {
        self.rv_count.len()
            * self.inf_count.len()
            * self.placement.len()
            * self.placement_radius.len()
            * self.behavior.len()
    }
}

/// A validated experiment: shared parameters plus the sweep axes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub axes: Axes,
    pub goal_theta: f64,
    pub threshold_frac: f64,
    pub include_influencer_headings: bool,
    pub final_radius: Option<f64>,
    pub circle_radius: Option<f64>,
    pub polygon_sides: usize,
    pub candidates: Option<usize>,
    /// `None` picks [`default_max_steps`] per cell.
    pub max_steps: Option<u64>,
    pub sample_interval: u64,
    pub trials: usize,
    pub base_seed: u64,
    pub metrics: MetricOptions,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Stop a trial at the first sample that meets the convergence criterion.
    pub early_exit: bool,
}

impl ExperimentConfig {
    /// One fully resolved cell per point of the sweep grid.
    pub fn cells(&self) -> Result<Vec<Cell>, ConfigError> {
        let a = &self.axes;
        let mut cells = Vec::with_capacity(a.cell_count());
        for &rv_count in &a.rv_count {
            for &inf_count in &a.inf_count {
                for &placement in &a.placement {
                    for &radius in &a.placement_radius {
                        for &behavior in &a.behavior {
                            let cell = self.cell(cells.len(), rv_count, inf_count, placement, radius, behavior)?;
                            cells.push(cell);
                        }
                    }
                }
            }
        }
        Ok(cells)
    }

    fn cell(
        &self,
        index: usize,
        rv_count: usize,
        inf_count: usize,
        strategy: Strategy,
        radius: f64,
        kind: BehaviorKind,
    ) -> Result<Cell, ConfigError> {
        let setting = self.setting;
        if !kind.valid_in(setting) {
            return Err(ConfigError::BehaviorSettingMismatch { behavior: kind, setting });
        }
        if !strategy.valid_in(setting) {
            return Err(ConfigError::PlacementSettingMismatch { placement: strategy, setting });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("placement_radius", "must be positive"));
        }
        if strategy == Strategy::KMeans && inf_count > 0 && rv_count == 0 {
            return Err(invalid("placement", "k-means needs at least one flock member"));
        }

        let world = setting.world();
        let mut behavior = BehaviorSpec::new(kind).with_goal(self.goal_theta);
        behavior.threshold = ((self.threshold_frac * rv_count as f64).ceil() as usize).max(1);
        behavior.include_influencer_headings = self.include_influencer_headings;
        if let Some(c) = self.candidates {
            behavior.candidates = c;
        }
        behavior.polygon_sides = self.polygon_sides;
        behavior.circle_radius = self.circle_radius;
        behavior.final_radius = self.final_radius.unwrap_or_else(|| default_final_radius(radius));
        behavior.origin = world.center();
        behavior.validate().map_err(|e| invalid("behavior", e))?;

        let max_steps = self.max_steps.unwrap_or_else(|| default_max_steps(setting, inf_count));
        if max_steps % self.sample_interval != 0 {
            return Err(invalid("max_steps", format!("{max_steps} is not a multiple of {}", self.sample_interval)));
        }
        let placement = PlacementSpec {
            strategy,
            origin: world.center(),
            radius,
            count: inf_count,
            kmeans: KMeansParams::default(),
        };
        Ok(Cell {
            index,
            setting,
            rv_count,
            placement,
            behavior,
            max_steps,
            sample_interval: self.sample_interval,
            trials: self.trials,
            base_seed: self.base_seed,
            metrics: self.metrics,
            early_exit: self.early_exit,
        })
    }
}

/// One point of the sweep grid with everything a trial needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub setting: Setting,
    pub rv_count: usize,
    /// `placement.count` is the influencer count (possibly 0).
    pub placement: PlacementSpec,
    pub behavior: BehaviorSpec,
    pub max_steps: u64,
    pub sample_interval: u64,
    pub trials: usize,
    pub base_seed: u64,
    pub metrics: MetricOptions,
    pub early_exit: bool,
}

impl Cell {
    pub fn inf_count(&self) -> usize {
        self.placement.count
    }

    /// Samples per trial without early exit.
    pub fn samples_per_trial(&self) -> u64 {
        self.max_steps / self.sample_interval + 1
    }
}

/// Parses a count list for a sweep axis: comma-separated values and/or
/// inclusive ranges `start:end:step`, e.g. `10:100:10` or `50,100,300`.
pub fn parse_count_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        let nums: Vec<&str> = part.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a count"));
        match nums.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if step == 0 || b < a {
                    return Err(format!("bad range `{part}`"));
                }
                out.extend((a..=b).step_by(step));
            }
            _ => return Err(format!("bad list item `{part}`")),
        }
    }
    Ok(out)
}
