//! Scenario runner and the thought experiments built on it.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::config::{EngineKind, InitialCondition, Perturbation, Reversal, ScenarioConfig};
use super::dynamics::Dynamics;
use super::ensemble::{self, Execution};
use super::init::build_initial;
use super::ops::AnnihilationOutcome;
use crate::engine::event::EventEngine;
use crate::engine::SimState;
use crate::error::{Error, Result};
use crate::observables::{
    divergence_rate, equipartition_index, phase_distance, positional_entropy, sample, DivergenceRate, EntropyTrace,
};
use crate::rng::{derive_seed, SplitMix64};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Forward,
    Reversed,
    Realigned,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Forward => "forward",
            Verdict::Reversed => "reversed",
            Verdict::Realigned => "realigned",
        })
    }
}

/// Disk positions at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: f64,
    pub positions: Vec<Vec2>,
}

/// Distance between the initial state and the state reached `t_rev` after
/// the reversal, once its momenta are flipped back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoDistance {
    pub time: f64,
    pub pos_rms: f64,
    pub vel_rms: f64,
    /// Bit-reversible engine only: frames identical to the start, bit for bit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bitwise: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRecord {
    pub time: f64,
    pub disk: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub collisions: u64,
    pub pair_collisions: u64,
    pub wall_collisions: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversal_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annihilation: Option<AnnihilationOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhiteHoleSummary {
    pub initial_entropy: f64,
    pub min_entropy: f64,
    pub min_ratio: f64,
    /// The entropy dropped below the realignment fraction of its start.
    pub reordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    /// Fully resolved config; enough to re-run the scenario.
    pub config: ScenarioConfig,
    pub equilibrium_reference: f64,
    pub trace: EntropyTrace,
    pub trajectory: Vec<Frame>,
    pub initial: SimState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reversal_point: Option<SimState>,
    pub final_state: SimState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub echo: Option<EchoDistance>,
    pub final_entropy: f64,
    pub final_cv: Option<f64>,
    pub equilibrated: bool,
    pub verdict: Verdict,
    pub events: EventSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_hole: Option<WhiteHoleSummary>,
}

impl ScenarioReport {
    /// Mean positional entropy over samples with `t0 <= t < t1`.
    pub fn entropy_window(&self, t0: f64, t1: f64) -> Option<f64> {
        entropy_window(&self.trace, t0, t1)
    }
}

pub fn entropy_window(trace: &EntropyTrace, t0: f64, t1: f64) -> Option<f64> {
    let xs: Vec<f64> = trace
        .samples
        .iter()
        .filter(|s| s.t >= t0 && s.t < t1)
        .map(|s| s.s_pos)
        .collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Raw outcome of one timeline, before the verdict.
struct Run {
    trace: EntropyTrace,
    trajectory: Vec<Frame>,
    initial: SimState,
    reversal_point: Option<SimState>,
    final_state: SimState,
    echo: Option<EchoDistance>,
    events: EventSummary,
}

fn take_sample(d: &Dynamics, initial: &SimState, cfg: &ScenarioConfig, mirrored: bool) -> Result<(crate::observables::TraceSample, Frame)> {
    let now = d.snapshot();
    let mut s = sample(&now, cfg.resolution, None)?;
    let aligned = if mirrored { d.mirrored_snapshot() } else { now.clone() };
    let (p, v) = phase_distance(initial, &aligned)?;
    s.dist_pos = Some(p);
    s.dist_vel = Some(v);
    let frame = Frame {
        t: s.t,
        positions: now.disks.iter().map(|d| d.position).collect(),
    };
    Ok((s, frame))
}

/// Runs the configured timeline from `start`. At a shared instant the order
/// is perturbation, annihilation, reversal, then echo and sample.
fn simulate(cfg: &ScenarioConfig, mut start: SimState, reverse_first: bool, record: bool) -> Result<Run> {
    start.time = 0.0;
    start.collision_count = 0;
    let mut dy = Dynamics::new(cfg, start)?;
    if reverse_first {
        dy.reverse()?;
    }
    let initial = dy.snapshot();
    let initial_bitrev = dy.as_bitrev().cloned();

    let mut run_end = dy.snap(cfg.run_length);
    let mut reversal_at = match cfg.reversal {
        Some(Reversal::AtTime(t)) => Some(dy.snap(t)),
        _ => None,
    };
    let mut reversal_after = match cfg.reversal {
        Some(Reversal::AfterCollisions(k)) => Some(k),
        _ => None,
    };
    let mut perturb_at = cfg.perturbation.map(|p| (dy.snap(p.time), p));
    let mut annihilate_at = cfg.annihilation.map(|a| (dy.snap(a.time), a));
    let mut echo_at = reversal_at.map(|t| dy.snap(2.0 * t));
    let mut perturb_rng = SplitMix64::stream(cfg.seed, "perturbation");

    let mut mirrored = false;
    let mut trace = EntropyTrace::default();
    let mut trajectory = Vec::new();
    let mut reversal_point = None;
    let mut echo = None;
    let mut events = EventSummary::default();
    let mut sample_k: u64 = 0;

    loop {
        let next_sample = Some(dy.snap(sample_k as f64 * cfg.sample_interval)).filter(|&t| record && t <= run_end);
        let t_next = [
            next_sample,
            reversal_at,
            perturb_at.map(|p| p.0),
            annihilate_at.map(|a| a.0),
            echo_at,
            Some(run_end),
        ]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);

        if let Some(k) = reversal_after {
            if dy.advance_events(t_next, k - dy.collisions())? {
                let t = dy.time();
                reversal_point = Some(dy.snapshot());
                dy.reverse()?;
                mirrored = true;
                events.reversal_time = Some(t);
                echo_at = Some(2.0 * t);
                run_end = run_end.max(2.0 * t);
                reversal_after = None;
                continue;
            }
        } else {
            dy.advance_to(t_next)?;
        }

        if let Some((_, p)) = perturb_at.filter(|p| p.0 <= t_next) {
            dy.perturb(p.disk, p.delta, &mut perturb_rng)?;
            events.perturbation = Some(PerturbationRecord {
                time: dy.time(),
                disk: p.disk,
                delta: p.delta,
            });
            perturb_at = None;
        }
        if let Some((_, a)) = annihilate_at.filter(|a| a.0 <= t_next) {
            events.annihilation = Some(dy.annihilate(&a)?);
            annihilate_at = None;
        }
        if reversal_at.is_some_and(|t| t <= t_next) {
            reversal_point = Some(dy.snapshot());
            dy.reverse()?;
            mirrored = true;
            events.reversal_time = Some(dy.time());
            reversal_at = None;
        }
        if echo_at.is_some_and(|t| t <= t_next) {
            let view = dy.mirrored_snapshot();
            let (pos_rms, vel_rms) = phase_distance(&initial, &view)?;
            let bitwise = match (&initial_bitrev, dy.as_bitrev()) {
                (Some(a), Some(b)) => Some(a.x_prev == b.x_cur && a.x_cur == b.x_prev),
                _ => None,
            };
            echo = Some(EchoDistance {
                time: dy.time(),
                pos_rms,
                vel_rms,
                bitwise,
            });
            echo_at = None;
        }
        if next_sample.is_some_and(|t| t <= t_next) {
            let (s, f) = take_sample(&dy, &initial, cfg, mirrored)?;
            trace.push(s)?;
            trajectory.push(f);
            sample_k += 1;
        }
        if t_next >= run_end {
            break;
        }
    }
    if let Some(k) = reversal_after {
        return Err(Error::param(
            "reversal.after_collisions",
            format!("only {} of {k} collisions happened within the run length", dy.collisions()),
        ));
    }

    let stats = dy.stats();
    events.collisions = dy.collisions();
    events.pair_collisions = stats.pair;
    events.wall_collisions = stats.wall;
    Ok(Run {
        trace,
        trajectory,
        initial,
        reversal_point,
        final_state: dy.snapshot(),
        echo,
        events,
    })
}

fn reference_cache() -> &'static Mutex<HashMap<String, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<String, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Mean final positional entropy of thermal hard-disk runs matching the
/// scenario's disk count, energy, table and grid. A fixed
/// `equilibrium.reference` short-circuits the runs.
pub fn equilibrium_reference(cfg: &ScenarioConfig) -> Result<f64> {
    if let Some(r) = cfg.equilibrium.reference {
        return Ok(r);
    }
    let mut base = ScenarioConfig::new(EngineKind::Event, cfg.disk_count(), 0);
    base.table = cfg.table;
    base.radius = cfg.radius;
    base.mass = cfg.mass;
    base.initial = InitialCondition::Thermal;
    base.total_energy = Some(cfg.energy());
    base.run_length = cfg.run_length;
    base.resolution = cfg.resolution;
    base.equilibrium.seeds = cfg.equilibrium.seeds;
    let key = serde_json::to_string(&base)?;
    if let Some(&r) = reference_cache().lock().expect("cache lock").get(&key) {
        return Ok(r);
    }
    let seeds: Vec<u64> = (0..cfg.equilibrium.seeds as u64)
        .map(|i| derive_seed(0, "equilibrium", i))
        .collect();
    let finals = ensemble::try_map(Execution::Parallel, &seeds, |&seed| {
        let mut c = base.clone();
        c.seed = seed;
        let mut e = EventEngine::new(build_initial(&c)?)?;
        e.advance_until(c.run_length, None)?;
        positional_entropy(e.state(), c.resolution.grid_x, c.resolution.grid_y)
    })?;
    let r = finals.iter().sum::<f64>() / finals.len() as f64;
    reference_cache().lock().expect("cache lock").insert(key, r);
    Ok(r)
}

/// The verdict decision procedure.
///
/// * `reversed`: final entropy below `reversed_entropy_fraction` of the
///   reference and an echo distance within `echo_tolerance`;
/// * `realigned`: a reversed run that was perturbed or annihilated and ends
///   at or above `realigned_entropy_fraction` of the reference;
/// * `forward` otherwise.
pub fn decide(cfg: &ScenarioConfig, reference: f64, final_entropy: f64, echo: Option<&EchoDistance>, disturbed: bool) -> Verdict {
    let v = cfg.verdict;
    let tol = cfg.echo_tolerance();
    if final_entropy < v.reversed_entropy_fraction * reference && echo.is_some_and(|e| e.pos_rms <= tol) {
        return Verdict::Reversed;
    }
    if cfg.reversal.is_some() && disturbed && final_entropy >= v.realigned_entropy_fraction * reference {
        return Verdict::Realigned;
    }
    Verdict::Forward
}

fn finish(cfg: ScenarioConfig, run: Run, reference: f64) -> Result<ScenarioReport> {
    let r = cfg.resolution;
    let final_entropy = positional_entropy(&run.final_state, r.grid_x, r.grid_y)?;
    let final_cv = equipartition_index(&run.final_state).ok();
    let disturbed = run.events.perturbation.is_some() || run.events.annihilation.is_some();
    let verdict = decide(&cfg, reference, final_entropy, run.echo.as_ref(), disturbed);
    let equilibrated = final_cv.is_some_and(|c| c <= cfg.verdict.equilibration_cv)
        && final_entropy >= cfg.verdict.realigned_entropy_fraction * reference;
    Ok(ScenarioReport {
        config: cfg,
        equilibrium_reference: reference,
        trace: run.trace,
        trajectory: run.trajectory,
        initial: run.initial,
        reversal_point: run.reversal_point,
        final_state: run.final_state,
        echo: run.echo,
        final_entropy,
        final_cv,
        equilibrated,
        verdict,
        events: run.events,
        white_hole: None,
    })
}

fn prepare(cfg: &ScenarioConfig) -> Result<ScenarioConfig> {
    let cfg = cfg.clone().resolved();
    cfg.validate()?;
    Ok(cfg)
}

/// Builds the initial state, runs the timeline and classifies the outcome.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let cfg = prepare(cfg)?;
    let run = simulate(&cfg, build_initial(&cfg)?, false, true)?;
    let reference = equilibrium_reference(&cfg)?;
    finish(cfg, run, reference)
}

/// Runs every seed of `seeds` on `cfg`, in seed order.
pub fn run_ensemble(cfg: &ScenarioConfig, seeds: &[u64], exec: Execution) -> Result<Vec<ScenarioReport>> {
    // shared reference computed once, outside the parallel region
    let mut cfg = prepare(cfg)?;
    cfg.equilibrium.reference = Some(equilibrium_reference(&cfg)?);
    ensemble::try_map(exec, seeds, |&seed| {
        let mut c = cfg.clone();
        c.seed = seed;
        run_scenario(&c)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrowPair {
    pub forward: ScenarioReport,
    pub reversed: ScenarioReport,
}

impl ArrowPair {
    /// Forward run stays `forward` and the reversed run is `realigned`.
    pub fn as_expected(&self) -> bool {
        self.forward.verdict == Verdict::Forward && self.reversed.verdict == Verdict::Realigned
    }
}

/// Runs `cfg` (which must reverse and annihilate) next to the same config
/// without the reversal.
pub fn run_arrow_experiment(cfg: &ScenarioConfig) -> Result<ArrowPair> {
    if cfg.reversal.is_none() {
        return Err(Error::param("reversal", "the arrow experiment needs a reversed run"));
    }
    if cfg.annihilation.is_none() {
        return Err(Error::param("annihilation", "the arrow experiment needs an annihilation event"));
    }
    let mut cfg = prepare(cfg)?;
    cfg.equilibrium.reference = Some(equilibrium_reference(&cfg)?);
    let mut forward = cfg.clone();
    forward.reversal = None;
    let mut reports = ensemble::try_map(Execution::Parallel, &[forward, cfg], run_scenario)?;
    let reversed = reports.pop().expect("two reports");
    let forward = reports.pop().expect("two reports");
    Ok(ArrowPair { forward, reversed })
}

/// Reverses `start` and runs it for the configured length, tracking how far
/// the positional entropy falls below its starting value.
pub fn run_reversed_from(cfg: &ScenarioConfig, start: SimState) -> Result<ScenarioReport> {
    let mut cfg = prepare(cfg)?;
    cfg.reversal = None;
    cfg.perturbation = None;
    cfg.annihilation = None;
    let run = simulate(&cfg, start, true, true)?;
    let reference = equilibrium_reference(&cfg)?;
    let mut report = finish(cfg, run, reference)?;
    let s: Vec<f64> = report.trace.positional().collect();
    let initial_entropy = s[0];
    let min_entropy = s.iter().copied().fold(f64::INFINITY, f64::min);
    let min_ratio = if initial_entropy > 0.0 { min_entropy / initial_entropy } else { 1.0 };
    report.white_hole = Some(WhiteHoleSummary {
        initial_entropy,
        min_entropy,
        min_ratio,
        reordered: min_ratio < report.config.verdict.realigned_entropy_fraction,
    });
    Ok(report)
}

/// Reverses a freshly built thermal state and checks that no order emerges.
pub fn run_white_hole_attempt(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    if cfg.initial != InitialCondition::Thermal {
        return Err(Error::param("initial", "the white-hole attempt starts from a thermal state"));
    }
    let cfg = prepare(cfg)?;
    let start = build_initial(&cfg)?;
    run_reversed_from(&cfg, start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Reversal point: steps (bitrev) or collisions (event).
    K,
    /// Perturbation size in table lengths.
    Delta,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(SweepParam::K),
            "delta" => Ok(SweepParam::Delta),
            _ => Err(Error::param("param", format!("expected K or delta, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub pos_rms: f64,
    pub vel_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ScenarioConfig,
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
    /// Fit of `ln(pos_rms)` against the parameter; absent when too few
    /// points have a positive distance.
    pub divergence: Option<DivergenceRate>,
}

/// Config of one sweep point.
fn sweep_config(cfg: &ScenarioConfig, param: SweepParam, value: f64) -> Result<ScenarioConfig> {
    let mut c = cfg.clone();
    match param {
        SweepParam::K => {
            if !(value >= 0.0 && value.fract() == 0.0) {
                return Err(Error::param("values", format!("K must be a whole number, got {value}")));
            }
            let k = value as u64;
            match c.engine {
                EngineKind::Bitrev => {
                    let t_rev = c.steps_to_time(k);
                    c.reversal = Some(Reversal::AtTime(t_rev));
                    c.run_length = c.steps_to_time(2 * k);
                    if let Some(p) = c.perturbation.as_mut() {
                        p.time = t_rev;
                    }
                    c.sample_interval = c.sample_interval.min(c.run_length).max(c.bitrev.dt);
                }
                EngineKind::Event => c.reversal = Some(Reversal::AfterCollisions(k)),
            }
        }
        SweepParam::Delta => {
            if !(value >= 0.0) {
                return Err(Error::param("values", format!("delta must be non-negative, got {value}")));
            }
            let t_rev = match c.reversal {
                Some(Reversal::AtTime(t)) => t,
                _ => return Err(Error::param("reversal", "a delta sweep needs reversal.at_time")),
            };
            let p = c.perturbation.get_or_insert(Perturbation {
                disk: 0,
                delta: value,
                time: t_rev,
            });
            p.delta = value;
        }
    }
    Ok(c)
}

/// Repeats the echo experiment for each value and fits the divergence rate.
pub fn echo_sweep(cfg: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Result<SweepReport> {
    if values.len() < 2 {
        return Err(Error::param("values", "a sweep needs at least two values"));
    }
    let base = cfg.clone().resolved();
    let configs = values
        .iter()
        .map(|&v| sweep_config(&base, param, v).map(ScenarioConfig::resolved))
        .collect::<Result<Vec<_>>>()?;
    let points = ensemble::try_map(Execution::Parallel, &configs, |c| {
        c.validate()?;
        let run = simulate(c, build_initial(c)?, false, false)?;
        let e = run.echo.ok_or_else(|| Error::ContractViolation("sweep run produced no echo".into()))?;
        Ok((e.pos_rms, e.vel_rms))
    })?
    .into_iter()
    .zip(values)
    .map(|((pos_rms, vel_rms), &value)| SweepPoint { value, pos_rms, vel_rms })
    .collect::<Vec<_>>();
    let data: Vec<(f64, f64)> = points.iter().map(|p| (p.value, p.pos_rms)).collect();
    let divergence = match divergence_rate(&data) {
        Ok(d) => Some(d),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(SweepReport {
        config: base,
        param,
        points,
        divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::{AnnihilationEvent, ConservedSet, Region};

    fn fast(mut c: ScenarioConfig) -> ScenarioConfig {
        c.equilibrium.reference = Some(50.0);
        c
    }

    #[test]
    fn forward_run_has_samples_and_no_echo() {
        let mut c = fast(ScenarioConfig::new(EngineKind::Event, 26, 1));
        c.run_length = 20.0;
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.trace.len(), 5);
        assert_eq!(r.trajectory.len(), 5);
        assert!(r.echo.is_none());
        assert_eq!(r.verdict, Verdict::Forward);
        assert_eq!(r.trace.samples[0].dist_pos, Some(0.0));
    }

    #[test]
    fn bitrev_echo_is_bitwise() {
        let mut c = fast(ScenarioConfig::new(EngineKind::Bitrev, 26, 2));
        c.run_length = 50.0;
        c.reversal = Some(Reversal::AtTime(25.0));
        let r = run_scenario(&c).unwrap();
        let e = r.echo.unwrap();
        assert_eq!(e.bitwise, Some(true));
        assert_eq!((e.pos_rms, e.vel_rms), (0.0, 0.0));
        assert_eq!(e.time, 50.0);
        assert_eq!(r.verdict, Verdict::Reversed);
    }

    #[test]
    fn event_echo_after_collisions() {
        let mut c = fast(ScenarioConfig::new(EngineKind::Event, 26, 3));
        c.reversal = Some(Reversal::AfterCollisions(20));
        let r = run_scenario(&c).unwrap();
        let e = r.echo.unwrap();
        assert!(e.pos_rms <= 1e-6, "{e:?}");
        assert!((e.time - 2.0 * r.events.reversal_time.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn too_few_collisions_is_reported() {
        let mut c = fast(ScenarioConfig::new(EngineKind::Event, 26, 3));
        c.run_length = 1.0;
        c.reversal = Some(Reversal::AfterCollisions(10_000));
        assert!(matches!(run_scenario(&c), Err(Error::InvalidParam { field, .. }) if field == "reversal.after_collisions"));
    }

    #[test]
    fn annihilation_in_forward_run_is_logged() {
        let mut c = fast(ScenarioConfig::new(EngineKind::Event, 26, 4));
        c.run_length = 10.0;
        c.annihilation = Some(AnnihilationEvent {
            time: 5.0,
            region: Region { x_min: 1.0, y_min: 1.0, x_max: 3.0, y_max: 3.0 },
            seed: 5,
            conserved: ConservedSet::CountMomentumEnergy,
        });
        let r = run_scenario(&c).unwrap();
        let a = r.events.annihilation.as_ref().unwrap();
        assert_eq!(a.time, 5.0);
        assert!(a.affected.len() >= 2);
    }

    #[test]
    fn white_hole_needs_thermal_start() {
        let c = ScenarioConfig::new(EngineKind::Event, 26, 1);
        assert!(run_white_hole_attempt(&c).is_err());
        let mut c = fast(c);
        c.initial = InitialCondition::Thermal;
        c.run_length = 0.0;
        let r = run_white_hole_attempt(&c).unwrap();
        let w = r.white_hole.unwrap();
        assert_eq!(w.min_ratio, 1.0);
        assert!(!w.reordered);
    }

    #[test]
    fn sweeps_are_deterministic() {
        let mut c = ScenarioConfig::new(EngineKind::Bitrev, 26, 9);
        c.perturbation = Some(Perturbation { disk: 0, delta: 0.0, time: 0.0 });
        let a = echo_sweep(&c, SweepParam::K, &[100.0, 200.0, 300.0]).unwrap();
        let b = echo_sweep(&c, SweepParam::K, &[100.0, 200.0, 300.0]).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| p.pos_rms == 0.0));
        assert_eq!(a.divergence, Some(DivergenceRate::ExactEcho));
    }

    #[test]
    fn verdict_rules() {
        let mut c = ScenarioConfig::new(EngineKind::Bitrev, 26, 1).resolved();
        let exact = EchoDistance { time: 1.0, pos_rms: 0.0, vel_rms: 0.0, bitwise: Some(true) };
        let off = EchoDistance { pos_rms: 1e-9, ..exact };
        assert_eq!(decide(&c, 50.0, 10.0, Some(&exact), false), Verdict::Reversed);
        assert_eq!(decide(&c, 50.0, 10.0, Some(&off), false), Verdict::Forward);
        assert_eq!(decide(&c, 50.0, 10.0, None, false), Verdict::Forward);
        c.reversal = Some(Reversal::AtTime(1.0));
        assert_eq!(decide(&c, 50.0, 45.0, Some(&off), true), Verdict::Realigned);
        assert_eq!(decide(&c, 50.0, 44.0, Some(&off), true), Verdict::Forward);
        assert_eq!(decide(&c, 50.0, 45.0, Some(&off), false), Verdict::Forward);
    }
}
