//! TOML experiment configuration.
//!
//! Every section except `[model]` may be omitted. Leap lengths are integer
//! multiples of `schedule.time_unit`, so elapsed time is always an exact
//! integer count of units; the absolute time of a record is that count
//! times the unit.
//!
//! ```toml
//! [model]
//! preset = "oscillation"   # or "pointer", "custom"
//! bath_spins = 12
//! j = 16.0
//! a_range = [-0.5, 0.0]
//! seed = 1
//!
//! [initial]
//! system = "up-down"       # or "singlet", "custom" (with `amplitudes`)
//! bath_seed = 2
//!
//! [schedule]
//! kind = "one-leap"        # or "two-leap" with long_leap/short_leap/short_count/repeats
//! time_unit = 0.035
//! leap = 2
//! steps = 800
//!
//! [propagator]
//! kind = "chebyshev"       # or "trotter" (optional `dt`, `order`), "reference"
//! epsilon = 1e-6
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spinbath_core::model::{CouplingRange, SpinModel};
use spinbath_core::observables::ObservableSpec;
use spinbath_core::trotter::{TermOrder, COMMENSURATE_TOL};
use spinbath_core::{Basis, HamiltonianTerm};

use crate::error::{ExperimentError, Result};

pub const REFERENCE_EPSILON: f64 = 1e-12;
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub observables: ObservableSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "raw::Model", into = "raw::Model")]
pub enum ModelConfig {
    Oscillation {
        bath_spins: usize,
        j: f64,
        a_range: [f64; 2],
        seed: u64,
    },
    Pointer {
        bath_spins: usize,
        j: f64,
        h: f64,
        u_max: f64,
        a_range: [f64; 2],
        seed: u64,
    },
    /// Explicit term list; nothing is sampled.
    Custom {
        central_spins: usize,
        bath_spins: usize,
        terms: Vec<HamiltonianTerm>,
    },
}

fn default_bath_spins() -> usize {
    16
}
fn default_central_spins() -> usize {
    2
}
fn default_oscillation_j() -> f64 {
    16.0
}
fn default_pointer_j() -> f64 {
    0.1
}
fn default_pointer_h() -> f64 {
    0.1
}
fn default_u_max() -> f64 {
    0.013
}
fn default_a_range() -> [f64; 2] {
    let r = CouplingRange::default();
    [r.lo, r.hi]
}
fn default_seed() -> u64 {
    1
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::Oscillation {
            bath_spins: default_bath_spins(),
            j: default_oscillation_j(),
            a_range: default_a_range(),
            seed: default_seed(),
        }
    }
}

impl ModelConfig {
    pub fn central_spins(&self) -> usize {
        match self {
            Self::Custom { central_spins, .. } => *central_spins,
            _ => 2,
        }
    }

    pub fn bath_spins(&self) -> usize {
        match self {
            Self::Oscillation { bath_spins, .. }
            | Self::Pointer { bath_spins, .. }
            | Self::Custom { bath_spins, .. } => *bath_spins,
        }
    }

    pub fn set_bath_spins(&mut self, n: usize) {
        match self {
            Self::Oscillation { bath_spins, .. }
            | Self::Pointer { bath_spins, .. }
            | Self::Custom { bath_spins, .. } => *bath_spins = n,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Oscillation { seed, .. } | Self::Pointer { seed, .. } => Some(*seed),
            Self::Custom { .. } => None,
        }
    }

    pub fn set_seed(&mut self, s: u64) {
        if let Self::Oscillation { seed, .. } | Self::Pointer { seed, .. } = self {
            *seed = s;
        }
    }

    /// Exchange constant of the central pair, where the preset defines one.
    pub fn exchange(&self) -> Option<f64> {
        match self {
            Self::Oscillation { j, .. } | Self::Pointer { j, .. } => Some(*j),
            Self::Custom { .. } => None,
        }
    }

    pub fn default_system(&self) -> SystemState {
        match self {
            Self::Pointer { .. } => SystemState::Singlet,
            _ => SystemState::UpDown,
        }
    }

    /// Replaces a sampled preset with the explicit terms it produced.
    pub fn pinned(model: &SpinModel) -> Self {
        let basis = model.basis();
        Self::Custom {
            central_spins: basis.central(),
            bath_spins: basis.bath(),
            terms: model.terms().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemState {
    /// `|↑↓⟩`: first central spin up, second down.
    UpDown,
    /// `(|↑↓⟩ − |↓↑⟩)/√2`.
    Singlet,
    /// `initial.amplitudes`, normalized on load.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Defaults to up-down for the oscillation preset and singlet for pointer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemState>,
    /// `[re, im]` pairs over the central basis, used with `system = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_bath_seed")]
    pub bath_seed: u64,
}

fn default_bath_seed() -> u64 {
    2
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { system: None, amplitudes: None, bath_seed: default_bath_seed() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "raw::Schedule", into = "raw::Schedule")]
pub enum Schedule {
    /// `steps` repetitions of one leap of `leap` units.
    OneLeap { time_unit: f64, leap: u64, steps: u64 },
    /// `repeats` repetitions of one leap of `long_leap` units followed by
    /// `short_count` leaps of `short_leap` units.
    TwoLeap { time_unit: f64, long_leap: u64, short_leap: u64, short_count: u64, repeats: u64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Self::OneLeap { time_unit: 0.035, leap: 2, steps: 800 }
    }
}

impl Schedule {
    pub fn time_unit(&self) -> f64 {
        match self {
            Self::OneLeap { time_unit, .. } | Self::TwoLeap { time_unit, .. } => *time_unit,
        }
    }

    /// Leap lengths in units, in execution order.
    pub fn leaps(&self) -> impl Iterator<Item = u64> + '_ {
        let (outer, inner): (u64, Vec<u64>) = match *self {
            Self::OneLeap { leap, steps, .. } => (1, vec![leap; steps as usize]),
            Self::TwoLeap { long_leap, short_leap, short_count, repeats, .. } => {
                let mut burst = Vec::with_capacity(short_count as usize + 1);
                if long_leap > 0 {
                    burst.push(long_leap);
                }
                burst.extend(std::iter::repeat_n(short_leap, short_count as usize));
                (repeats, burst)
            }
        };
        (0..outer).flat_map(move |_| inner.clone())
    }

    /// Total duration in units.
    pub fn total_units(&self) -> u64 {
        match *self {
            Self::OneLeap { leap, steps, .. } => leap * steps,
            Self::TwoLeap { long_leap, short_leap, short_count, repeats, .. } => {
                repeats * (long_leap + short_leap * short_count)
            }
        }
    }

    /// Distinct leap lengths in units, ascending.
    pub fn distinct_leaps(&self) -> Vec<u64> {
        let mut v: Vec<u64> = match *self {
            Self::OneLeap { leap, .. } => vec![leap],
            Self::TwoLeap { long_leap, short_leap, .. } => {
                [long_leap, short_leap].into_iter().filter(|&l| l > 0).collect()
            }
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    fn validate(&self) -> Result<()> {
        let unit = self.time_unit();
        if !(unit.is_finite() && unit > 0.0) {
            return Err(ExperimentError::invalid(
                "schedule.time_unit",
                format!("must be positive and finite, got {unit}"),
            ));
        }
        let positive = |field: &str, v: u64| {
            if v == 0 {
                Err(ExperimentError::invalid(format!("schedule.{field}"), "must be positive"))
            } else {
                Ok(())
            }
        };
        match *self {
            Self::OneLeap { leap, steps, .. } => {
                positive("leap", leap)?;
                positive("steps", steps)?;
            }
            Self::TwoLeap { short_leap, short_count, repeats, .. } => {
                // long_leap = 0 is the degenerate single-burst schedule
                positive("short_leap", short_leap)?;
                positive("short_count", short_count)?;
                positive("repeats", repeats)?;
            }
        }
        if self.total_units() as f64 * unit > 1e12 {
            return Err(ExperimentError::invalid("schedule", "total duration is unreasonably long"));
        }
        Ok(())
    }

    /// The warning the two-leap scheduler raises when the long leap does not
    /// dominate the burst.
    pub fn warnings(&self) -> Vec<String> {
        match *self {
            Self::TwoLeap { long_leap, short_leap, short_count, .. }
                if long_leap > 0 && long_leap <= short_leap * short_count =>
            {
                vec![format!(
                    "long leap ({long_leap} units) does not exceed the burst length ({} units)",
                    short_leap * short_count
                )]
            }
            _ => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "raw::Propagator", into = "raw::Propagator")]
pub enum PropagatorConfig {
    Chebyshev {
        epsilon: f64,
    },
    /// Symmetric Trotter splitting; `dt` defaults to the schedule time unit.
    Trotter {
        dt: Option<f64>,
        order: TermOrder,
    },
    /// Chebyshev at the reference cutoff.
    Reference,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self::Chebyshev { epsilon: DEFAULT_EPSILON }
    }
}

impl PropagatorConfig {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Chebyshev { .. } => "Ch",
            Self::Trotter { .. } => "ST",
            Self::Reference => "Ref",
        }
    }

    /// Chebyshev cutoff, if this is a Chebyshev configuration.
    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Self::Chebyshev { epsilon } => Some(epsilon),
            Self::Reference => Some(REFERENCE_EPSILON),
            Self::Trotter { .. } => None,
        }
    }

    /// Trotter step with the schedule default applied.
    pub fn trotter_dt(&self, schedule: &Schedule) -> Option<f64> {
        match *self {
            Self::Trotter { dt, .. } => Some(dt.unwrap_or(schedule.time_unit())),
            _ => None,
        }
    }

    fn validate(&self, field: &str, schedule: &Schedule) -> Result<()> {
        if let Some(eps) = self.epsilon() {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(ExperimentError::invalid(
                    format!("{field}.epsilon"),
                    format!("must lie in (0, 1), got {eps}"),
                ));
            }
        }
        if let Some(dt) = self.trotter_dt(schedule) {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(ExperimentError::invalid(
                    format!("{field}.dt"),
                    format!("must be positive and finite, got {dt}"),
                ));
            }
            let unit = schedule.time_unit();
            for leap in schedule.distinct_leaps() {
                let t = leap as f64 * unit;
                let steps = (t / dt).round();
                if steps < 1.0 || (steps * dt - t).abs() > COMMENSURATE_TOL * t.max(dt) {
                    return Err(ExperimentError::invalid(
                        format!("{field}.dt"),
                        format!("leap of {t} is not an integer multiple of dt = {dt}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The three propagators of a benchmark comparison over one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_reference")]
    pub reference: PropagatorConfig,
    #[serde(default)]
    pub candidate: PropagatorConfig,
    #[serde(default = "default_baseline")]
    pub baseline: PropagatorConfig,
}

fn default_reference() -> PropagatorConfig {
    PropagatorConfig::Reference
}
fn default_baseline() -> PropagatorConfig {
    PropagatorConfig::Trotter { dt: None, order: TermOrder::default() }
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { reference: default_reference(), candidate: PropagatorConfig::default(), baseline: default_baseline() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV destination; the CLI `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// Seeds are stored as TOML integers, which are signed 64-bit.
const MAX_SEED: u64 = i64::MAX as u64;

impl ExperimentConfig {
    /// A config with every section at its default.
    pub fn new(model: ModelConfig) -> Self {
        Self {
            model,
            initial: InitialConfig::default(),
            schedule: Schedule::default(),
            propagator: PropagatorConfig::default(),
            observables: ObservableSpec::default(),
            compare: None,
            output: OutputConfig::default(),
        }
    }

    pub fn system_state(&self) -> SystemState {
        self.initial.system.unwrap_or_else(|| self.model.default_system())
    }

    pub fn basis(&self) -> Result<Basis> {
        Ok(Basis::new(self.model.central_spins(), self.model.bath_spins())?)
    }

    /// Checks everything that can be checked without building the model.
    pub fn validate(&self) -> Result<()> {
        let basis = Basis::new(self.model.central_spins(), self.model.bath_spins())
            .map_err(|e| ExperimentError::invalid("model", e.to_string()))?;
        self.validate_model(&basis)?;
        self.validate_initial(&basis)?;
        self.schedule.validate()?;
        self.propagator.validate("propagator", &self.schedule)?;
        if let Some(cmp) = &self.compare {
            cmp.reference.validate("compare.reference", &self.schedule)?;
            cmp.candidate.validate("compare.candidate", &self.schedule)?;
            cmp.baseline.validate("compare.baseline", &self.schedule)?;
        }
        self.observables
            .validate(&basis)
            .map_err(|e| ExperimentError::invalid("observables.correlator_pair", e.to_string()))
    }

    fn validate_model(&self, basis: &Basis) -> Result<()> {
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ExperimentError::invalid(format!("model.{field}"), "must be finite"))
            }
        };
        let range = |r: [f64; 2]| {
            if r.iter().all(|v| v.is_finite()) && r[0] <= r[1] {
                Ok(())
            } else {
                Err(ExperimentError::invalid("model.a_range", format!("need finite lo <= hi, got {r:?}")))
            }
        };
        let seed = |s: u64| {
            if s <= MAX_SEED {
                Ok(())
            } else {
                Err(ExperimentError::invalid("model.seed", "must fit in a signed 64-bit integer"))
            }
        };
        match self.model {
            ModelConfig::Oscillation { bath_spins, j, a_range, seed: s } => {
                if bath_spins == 0 {
                    return Err(ExperimentError::invalid(
                        "model.bath_spins",
                        "oscillation preset needs at least one bath spin",
                    ));
                }
                finite("j", j)?;
                range(a_range)?;
                seed(s)
            }
            ModelConfig::Pointer { bath_spins, j, h, u_max, a_range, seed: s } => {
                if bath_spins < 2 {
                    return Err(ExperimentError::invalid(
                        "model.bath_spins",
                        "pointer preset needs at least two bath spins",
                    ));
                }
                finite("j", j)?;
                finite("h", h)?;
                if !(u_max.is_finite() && u_max >= 0.0) {
                    return Err(ExperimentError::invalid("model.u_max", "must be finite and non-negative"));
                }
                range(a_range)?;
                seed(s)
            }
            ModelConfig::Custom { ref terms, .. } => {
                for (i, t) in terms.iter().enumerate() {
                    t.validate(basis.spins())
                        .map_err(|e| ExperimentError::invalid(format!("model.terms[{i}]"), e.to_string()))?;
                }
                Ok(())
            }
        }
    }

    fn validate_initial(&self, basis: &Basis) -> Result<()> {
        if self.initial.bath_seed > MAX_SEED {
            return Err(ExperimentError::invalid("initial.bath_seed", "must fit in a signed 64-bit integer"));
        }
        let dim = 1usize << basis.central();
        match (self.system_state(), &self.initial.amplitudes) {
            (SystemState::Custom, None) => {
                Err(ExperimentError::invalid("initial.amplitudes", "required when system = \"custom\""))
            }
            (SystemState::Custom, Some(a)) => {
                if a.len() != dim {
                    return Err(ExperimentError::invalid(
                        "initial.amplitudes",
                        format!("expected {dim} amplitudes for {} central spins, got {}", basis.central(), a.len()),
                    ));
                }
                let norm: f64 = a.iter().map(|[re, im]| re * re + im * im).sum();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(ExperimentError::invalid("initial.amplitudes", "must be finite and not all zero"));
                }
                Ok(())
            }
            (_, Some(_)) => {
                Err(ExperimentError::invalid("initial.amplitudes", "only allowed with system = \"custom\""))
            }
            (_, None) if basis.central() != 2 => Err(ExperimentError::invalid(
                "initial.system",
                "named states need exactly two central spins; use system = \"custom\"",
            )),
            _ => Ok(()),
        }
    }

    /// Overrides the model seed with `seed` and the bath seed with `seed + 1`.
    pub fn override_seed(&mut self, seed: u64) {
        self.model.set_seed(seed);
        self.initial.bath_seed = seed.wrapping_add(1);
    }
}

/// Parses and validates a config. Syntax and schema errors carry the line
/// and key; semantic errors name the offending field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn emit_config(cfg: &ExperimentConfig) -> Result<String> {
    Ok(toml::to_string(cfg)?)
}

/// Flat on-disk forms of the tagged sections. Going through plain structs
/// keeps key-level spans in TOML errors, which tagged enums lose.
mod raw {
    use serde::{Deserialize, Serialize};
    use spinbath_core::trotter::TermOrder;
    use spinbath_core::HamiltonianTerm;

    #[derive(Clone, Copy, Serialize, Deserialize)]
    #[serde(rename_all = "kebab-case")]
    pub enum Preset {
        Oscillation,
        Pointer,
        Custom,
    }

    #[derive(Clone, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Model {
        pub preset: Preset,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub central_spins: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub bath_spins: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub j: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub h: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub u_max: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub a_range: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub terms: Option<Vec<HamiltonianTerm>>,
    }

    #[derive(Clone, Copy, Serialize, Deserialize)]
    #[serde(rename_all = "kebab-case")]
    pub enum ScheduleKind {
        OneLeap,
        TwoLeap,
    }

    #[derive(Clone, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Schedule {
        pub kind: ScheduleKind,
        pub time_unit: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub leap: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub steps: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub long_leap: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub short_leap: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub short_count: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub repeats: Option<u64>,
    }

    #[derive(Clone, Copy, Serialize, Deserialize)]
    #[serde(rename_all = "kebab-case")]
    pub enum PropagatorKind {
        Chebyshev,
        Trotter,
        Reference,
    }

    #[derive(Clone, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Propagator {
        pub kind: PropagatorKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub epsilon: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub dt: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub order: Option<TermOrder>,
    }

    /// Rejects keys that are present but belong to another variant.
    pub fn reject(section: &str, variant: &str, present: &[(&str, bool)]) -> Result<(), String> {
        match present.iter().find(|(_, p)| *p) {
            Some((key, _)) => Err(format!("{section}.{key}: not a parameter of `{variant}`")),
            None => Ok(()),
        }
    }

    pub fn required<T>(section: &str, key: &str, variant: &str, v: Option<T>) -> Result<T, String> {
        v.ok_or_else(|| format!("{section}.{key}: required for `{variant}`"))
    }
}

impl TryFrom<raw::Model> for ModelConfig {
    type Error = String;

    fn try_from(r: raw::Model) -> std::result::Result<Self, String> {
        use raw::{reject, required, Preset};
        match r.preset {
            Preset::Oscillation => {
                reject(
                    "model",
                    "oscillation",
                    &[
                        ("central_spins", r.central_spins.is_some()),
                        ("h", r.h.is_some()),
                        ("u_max", r.u_max.is_some()),
                        ("terms", r.terms.is_some()),
                    ],
                )?;
                Ok(Self::Oscillation {
                    bath_spins: r.bath_spins.unwrap_or_else(default_bath_spins),
                    j: r.j.unwrap_or_else(default_oscillation_j),
                    a_range: r.a_range.unwrap_or_else(default_a_range),
                    seed: r.seed.unwrap_or_else(default_seed),
                })
            }
            Preset::Pointer => {
                reject(
                    "model",
                    "pointer",
                    &[("central_spins", r.central_spins.is_some()), ("terms", r.terms.is_some())],
                )?;
                Ok(Self::Pointer {
                    bath_spins: r.bath_spins.unwrap_or_else(default_bath_spins),
                    j: r.j.unwrap_or_else(default_pointer_j),
                    h: r.h.unwrap_or_else(default_pointer_h),
                    u_max: r.u_max.unwrap_or_else(default_u_max),
                    a_range: r.a_range.unwrap_or_else(default_a_range),
                    seed: r.seed.unwrap_or_else(default_seed),
                })
            }
            Preset::Custom => {
                reject(
                    "model",
                    "custom",
                    &[
                        ("j", r.j.is_some()),
                        ("h", r.h.is_some()),
                        ("u_max", r.u_max.is_some()),
                        ("a_range", r.a_range.is_some()),
                        ("seed", r.seed.is_some()),
                    ],
                )?;
                Ok(Self::Custom {
                    central_spins: r.central_spins.unwrap_or_else(default_central_spins),
                    bath_spins: required("model", "bath_spins", "custom", r.bath_spins)?,
                    terms: r.terms.unwrap_or_default(),
                })
            }
        }
    }
}

impl From<ModelConfig> for raw::Model {
    fn from(m: ModelConfig) -> Self {
        let blank = |preset| raw::Model {
            preset,
            central_spins: None,
            bath_spins: None,
            j: None,
            h: None,
            u_max: None,
            a_range: None,
            seed: None,
            terms: None,
        };
        match m {
            ModelConfig::Oscillation { bath_spins, j, a_range, seed } => raw::Model {
                bath_spins: Some(bath_spins),
                j: Some(j),
                a_range: Some(a_range),
                seed: Some(seed),
                ..blank(raw::Preset::Oscillation)
            },
            ModelConfig::Pointer { bath_spins, j, h, u_max, a_range, seed } => raw::Model {
                bath_spins: Some(bath_spins),
                j: Some(j),
                h: Some(h),
                u_max: Some(u_max),
                a_range: Some(a_range),
                seed: Some(seed),
                ..blank(raw::Preset::Pointer)
            },
            ModelConfig::Custom { central_spins, bath_spins, terms } => raw::Model {
                central_spins: Some(central_spins),
                bath_spins: Some(bath_spins),
                terms: Some(terms),
                ..blank(raw::Preset::Custom)
            },
        }
    }
}

impl TryFrom<raw::Schedule> for Schedule {
    type Error = String;

    fn try_from(r: raw::Schedule) -> std::result::Result<Self, String> {
        use raw::{reject, required, ScheduleKind};
        match r.kind {
            ScheduleKind::OneLeap => {
                reject(
                    "schedule",
                    "one-leap",
                    &[
                        ("long_leap", r.long_leap.is_some()),
                        ("short_leap", r.short_leap.is_some()),
                        ("short_count", r.short_count.is_some()),
                        ("repeats", r.repeats.is_some()),
                    ],
                )?;
                Ok(Self::OneLeap {
                    time_unit: r.time_unit,
                    leap: required("schedule", "leap", "one-leap", r.leap)?,
                    steps: required("schedule", "steps", "one-leap", r.steps)?,
                })
            }
            ScheduleKind::TwoLeap => {
                reject("schedule", "two-leap", &[("leap", r.leap.is_some()), ("steps", r.steps.is_some())])?;
                Ok(Self::TwoLeap {
                    time_unit: r.time_unit,
                    long_leap: required("schedule", "long_leap", "two-leap", r.long_leap)?,
                    short_leap: required("schedule", "short_leap", "two-leap", r.short_leap)?,
                    short_count: required("schedule", "short_count", "two-leap", r.short_count)?,
                    repeats: required("schedule", "repeats", "two-leap", r.repeats)?,
                })
            }
        }
    }
}

impl From<Schedule> for raw::Schedule {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::OneLeap { time_unit, leap, steps } => raw::Schedule {
                kind: raw::ScheduleKind::OneLeap,
                time_unit,
                leap: Some(leap),
                steps: Some(steps),
                long_leap: None,
                short_leap: None,
                short_count: None,
                repeats: None,
            },
            Schedule::TwoLeap { time_unit, long_leap, short_leap, short_count, repeats } => raw::Schedule {
                kind: raw::ScheduleKind::TwoLeap,
                time_unit,
                leap: None,
                steps: None,
                long_leap: Some(long_leap),
                short_leap: Some(short_leap),
                short_count: Some(short_count),
                repeats: Some(repeats),
            },
        }
    }
}

impl TryFrom<raw::Propagator> for PropagatorConfig {
    type Error = String;

    fn try_from(r: raw::Propagator) -> std::result::Result<Self, String> {
        use raw::{reject, PropagatorKind};
        match r.kind {
            PropagatorKind::Chebyshev => {
                reject("propagator", "chebyshev", &[("dt", r.dt.is_some()), ("order", r.order.is_some())])?;
                Ok(Self::Chebyshev { epsilon: r.epsilon.unwrap_or_else(default_epsilon) })
            }
            PropagatorKind::Trotter => {
                reject("propagator", "trotter", &[("epsilon", r.epsilon.is_some())])?;
                Ok(Self::Trotter { dt: r.dt, order: r.order.unwrap_or_default() })
            }
            PropagatorKind::Reference => {
                reject(
                    "propagator",
                    "reference",
                    &[("epsilon", r.epsilon.is_some()), ("dt", r.dt.is_some()), ("order", r.order.is_some())],
                )?;
                Ok(Self::Reference)
            }
        }
    }
}

impl From<PropagatorConfig> for raw::Propagator {
    fn from(p: PropagatorConfig) -> Self {
        let (kind, epsilon, dt, order) = match p {
            PropagatorConfig::Chebyshev { epsilon } => (raw::PropagatorKind::Chebyshev, Some(epsilon), None, None),
            PropagatorConfig::Trotter { dt, order } => (raw::PropagatorKind::Trotter, None, dt, Some(order)),
            PropagatorConfig::Reference => (raw::PropagatorKind::Reference, None, None, None),
        };
        raw::Propagator { kind, epsilon, dt, order }
    }
}
