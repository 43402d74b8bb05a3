//! Declarative scenario description.
//!
//! Configs are JSON documents. Only `engine`, `n_disks` and `seed` are
//! required; [`ScenarioConfig::resolved`] fills every other field so that the
//! echoed config is enough to re-run a scenario exactly.

use serde::{Deserialize, Serialize};

use crate::engine::bitrev::{BitrevParams, SCALE};
use crate::engine::{Disk, Table};
use crate::error::{Error, Result};
use crate::observables::Resolution;
use crate::vec2::Vec2;

pub const DEFAULT_TABLE_SIDE: f64 = 4.0;
pub const DEFAULT_RADIUS: f64 = 0.04;
pub const DEFAULT_RUN_LENGTH: f64 = 500.0;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 5.0;
pub const DEFAULT_CLUSTER_GAP: f64 = 0.05;
pub const DEFAULT_EQUILIBRIUM_SEEDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Event,
    Bitrev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDisk {
    pub position: Vec2,
    pub velocity: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Close-packed block of `n - 1` disks at rest in the table centre plus
    /// one incident disk aimed at the block centre.
    OrderedCluster,
    /// Uniform non-overlapping positions, Gaussian velocities rescaled to the
    /// configured energy, zero total momentum.
    Thermal,
    Explicit { disks: Vec<ExplicitDisk> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Reversal {
    /// Reverse all momenta at this simulated time.
    AtTime(f64),
    /// Reverse right after this many events (event engine only).
    AfterCollisions(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub disk: usize,
    /// Offset length in table lengths; the bit-reversible engine moves at
    /// least one quantum.
    pub delta: f64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Region {
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn intersects(&self, t: &Table) -> bool {
        self.x_min < t.width && self.x_max > 0.0 && self.y_min < t.height && self.y_max > 0.0
    }
}

/// Which aggregates an annihilation event preserves besides the particle count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservedSet {
    /// Count, total momentum and total kinetic energy.
    #[default]
    CountMomentumEnergy,
    /// Count only: velocities are redrawn with no correction.
    CountOnly,
}

/// Information-destroying resampling of every disk inside `region`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnihilationEvent {
    pub time: f64,
    pub region: Region,
    pub seed: u64,
    #[serde(default)]
    pub conserved: ConservedSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitrevSettings {
    pub dt: f64,
    pub stiffness: i64,
    pub stiffness_shift: u32,
}

impl Default for BitrevSettings {
    fn default() -> Self {
        BitrevSettings {
            dt: 0.025,
            stiffness: 1 << 15,
            stiffness_shift: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictThresholds {
    /// "reversed" needs final entropy below this fraction of the reference.
    pub reversed_entropy_fraction: f64,
    /// "realigned" needs final entropy at or above this fraction.
    pub realigned_entropy_fraction: f64,
    /// Maximum echo distance for "reversed"; defaults to 1e-6 (event) or 0 (bitrev).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub echo_tolerance: Option<f64>,
    /// Equipartition index below which the gas counts as equilibrated.
    pub equilibration_cv: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            reversed_entropy_fraction: 0.5,
            realigned_entropy_fraction: 0.9,
            echo_tolerance: None,
            equilibration_cv: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSettings {
    /// Number of thermal runs averaged for the reference entropy.
    pub seeds: usize,
    /// Fixed reference; skips the thermal runs when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl Default for EquilibriumSettings {
    fn default() -> Self {
        EquilibriumSettings {
            seeds: DEFAULT_EQUILIBRIUM_SEEDS,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub engine: EngineKind,
    pub n_disks: usize,
    pub seed: u64,
    #[serde(default = "default_table")]
    pub table: Table,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_initial")]
    pub initial: InitialCondition,
    #[serde(default = "default_speed")]
    pub incident_speed: f64,
    /// Total kinetic energy; defaults to that of the incident disk.
    #[serde(default)]
    pub total_energy: Option<f64>,
    /// Gap between neighbouring block disks, as a fraction of the diameter.
    #[serde(default = "default_gap")]
    pub cluster_gap: f64,
    #[serde(default = "default_run_length")]
    pub run_length: f64,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    #[serde(default)]
    pub reversal: Option<Reversal>,
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    #[serde(default)]
    pub annihilation: Option<AnnihilationEvent>,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub bitrev: BitrevSettings,
    #[serde(default)]
    pub verdict: VerdictThresholds,
    #[serde(default)]
    pub equilibrium: EquilibriumSettings,
}

fn default_table() -> Table {
    Table::square(DEFAULT_TABLE_SIDE)
}
fn default_radius() -> f64 {
    DEFAULT_RADIUS
}
fn default_mass() -> f64 {
    1.0
}
fn default_initial() -> InitialCondition {
    InitialCondition::OrderedCluster
}
fn default_speed() -> f64 {
    1.0
}
fn default_gap() -> f64 {
    DEFAULT_CLUSTER_GAP
}
fn default_run_length() -> f64 {
    DEFAULT_RUN_LENGTH
}
fn default_sample_interval() -> f64 {
    DEFAULT_SAMPLE_INTERVAL
}

impl ScenarioConfig {
    /// Minimal config with every optional field at its default.
    pub fn new(engine: EngineKind, n_disks: usize, seed: u64) -> Self {
        ScenarioConfig {
            engine,
            n_disks,
            seed,
            table: default_table(),
            radius: DEFAULT_RADIUS,
            mass: 1.0,
            initial: InitialCondition::OrderedCluster,
            incident_speed: 1.0,
            total_energy: None,
            cluster_gap: DEFAULT_CLUSTER_GAP,
            run_length: DEFAULT_RUN_LENGTH,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            reversal: None,
            perturbation: None,
            annihilation: None,
            resolution: Resolution::default(),
            bitrev: BitrevSettings::default(),
            verdict: VerdictThresholds::default(),
            equilibrium: EquilibriumSettings::default(),
        }
    }

    /// Fills engine-dependent defaults so the config echoes completely.
    pub fn resolved(mut self) -> Self {
        if self.total_energy.is_none() {
            self.total_energy = Some(self.default_energy());
        }
        if self.verdict.echo_tolerance.is_none() {
            self.verdict.echo_tolerance = Some(match self.engine {
                EngineKind::Event => 1e-6,
                EngineKind::Bitrev => 0.0,
            });
        }
        self
    }

    fn default_energy(&self) -> f64 {
        0.5 * self.mass * self.incident_speed * self.incident_speed
    }

    pub fn energy(&self) -> f64 {
        self.total_energy.unwrap_or_else(|| self.default_energy())
    }

    pub fn echo_tolerance(&self) -> f64 {
        self.verdict.echo_tolerance.unwrap_or(match self.engine {
            EngineKind::Event => 1e-6,
            EngineKind::Bitrev => 0.0,
        })
    }

    pub fn disk_count(&self) -> usize {
        match &self.initial {
            InitialCondition::Explicit { disks } => disks.len(),
            _ => self.n_disks,
        }
    }

    pub fn bitrev_params(&self) -> BitrevParams {
        let q = |x: f64| (x * SCALE as f64).round() as i64;
        // even diameter so the wall radius σ/2 is exact
        let diameter = (q(2.0 * self.radius) / 2) * 2;
        BitrevParams {
            stiffness: self.bitrev.stiffness,
            stiffness_shift: self.bitrev.stiffness_shift,
            diameter,
            width: q(self.table.width),
            height: q(self.table.height),
            dt: self.bitrev.dt,
        }
    }

    /// Simulated time of `k` bit-reversible steps.
    pub fn steps_to_time(&self, k: u64) -> f64 {
        k as f64 * self.bitrev.dt
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, reason: String| Err(Error::param(field, reason));
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.table.width) || !positive(self.table.height) {
            return fail("table", "width and height must be positive".into());
        }
        if !positive(self.radius) {
            return fail("radius", "must be positive".into());
        }
        if !positive(self.mass) {
            return fail("mass", "must be positive".into());
        }
        if !(self.incident_speed >= 0.0 && self.incident_speed.is_finite()) {
            return fail("incident_speed", "must be non-negative".into());
        }
        if let Some(e) = self.total_energy {
            if !(e >= 0.0 && e.is_finite()) {
                return fail("total_energy", "must be non-negative".into());
            }
        }
        if !(self.cluster_gap >= 0.0 && self.cluster_gap.is_finite()) {
            return fail("cluster_gap", "must be non-negative".into());
        }
        if !(self.run_length >= 0.0 && self.run_length.is_finite()) {
            return fail("run_length", "must be non-negative".into());
        }
        if !positive(self.sample_interval) {
            return fail("sample_interval", "must be positive".into());
        }
        if self.run_length / self.sample_interval > 1e6 {
            return fail("sample_interval", "more than 10^6 samples per run".into());
        }
        let n = self.disk_count();
        if n == 0 {
            return fail("n_disks", "must be at least 1".into());
        }
        if let InitialCondition::Explicit { disks } = &self.initial {
            if disks.len() != self.n_disks {
                return fail(
                    "initial.disks",
                    format!("{} disks listed but n_disks is {}", disks.len(), self.n_disks),
                );
            }
        }
        if matches!(self.initial, InitialCondition::OrderedCluster) && n < 2 {
            return fail("n_disks", "ordered cluster needs at least 2 disks".into());
        }
        match self.reversal {
            Some(Reversal::AtTime(t)) => {
                if !(t >= 0.0 && t <= self.run_length) {
                    return fail(
                        "reversal.at_time",
                        format!("{t} lies outside the run length {}", self.run_length),
                    );
                }
                if 2.0 * t > self.run_length {
                    return fail(
                        "reversal.at_time",
                        format!("echo point 2 * {t} exceeds the run length {}", self.run_length),
                    );
                }
            }
            Some(Reversal::AfterCollisions(_)) if self.engine == EngineKind::Bitrev => {
                return fail(
                    "reversal.after_collisions",
                    "the bit-reversible engine has no discrete collisions; use at_time".into(),
                );
            }
            _ => {}
        }
        if let Some(p) = self.perturbation {
            if p.disk >= n {
                return fail("perturbation.disk", format!("no disk {} among {n}", p.disk));
            }
            if !(p.delta >= 0.0 && p.delta.is_finite()) {
                return fail("perturbation.delta", "must be non-negative".into());
            }
            if !(p.time >= 0.0 && p.time <= self.run_length) {
                return fail(
                    "perturbation.time",
                    format!("{} lies outside the run length {}", p.time, self.run_length),
                );
            }
        }
        if let Some(a) = self.annihilation {
            let r = a.region;
            if !(r.x_min < r.x_max && r.y_min < r.y_max) {
                return fail("annihilation.region", "needs x_min < x_max and y_min < y_max".into());
            }
            if !r.intersects(&self.table) {
                return fail("annihilation.region", "does not intersect the table".into());
            }
            if !(a.time >= 0.0 && a.time <= self.run_length) {
                return fail(
                    "annihilation.time",
                    format!("{} lies outside the run length {}", a.time, self.run_length),
                );
            }
        }
        let res = self.resolution;
        if res.grid_x == 0 || res.grid_y == 0 || res.velocity_bins == 0 {
            return fail("resolution", "grid and histogram need at least one cell".into());
        }
        let v = self.verdict;
        if !(0.0..=1.0).contains(&v.reversed_entropy_fraction) {
            return fail("verdict.reversed_entropy_fraction", "must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&v.realigned_entropy_fraction) {
            return fail("verdict.realigned_entropy_fraction", "must lie in [0, 1]".into());
        }
        if v.echo_tolerance.is_some_and(|t| !(t >= 0.0)) {
            return fail("verdict.echo_tolerance", "must be non-negative".into());
        }
        if self.equilibrium.seeds == 0 && self.equilibrium.reference.is_none() {
            return fail("equilibrium.seeds", "needs at least one seed or a fixed reference".into());
        }
        if self.engine == EngineKind::Bitrev {
            if !positive(self.bitrev.dt) {
                return fail("bitrev.dt", "must be positive".into());
            }
            if self.sample_interval < self.bitrev.dt {
                return fail("sample_interval", "must be at least one bitrev step".into());
            }
            self.bitrev_params().validate().map_err(|e| match e {
                Error::InvalidParam { field, reason } => Error::param(format!("bitrev.{field}"), reason),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Explicit disks with defaults for omitted radius and mass.
    pub fn explicit_disks(&self) -> Option<Vec<Disk>> {
        match &self.initial {
            InitialCondition::Explicit { disks } => Some(
                disks
                    .iter()
                    .enumerate()
                    .map(|(i, d)| {
                        Disk::new(i, d.position, d.velocity, d.radius.unwrap_or(self.radius))
                            .with_mass(d.mass.unwrap_or(self.mass))
                    })
                    .collect(),
            ),
            _ => None,
        }
    }
}
