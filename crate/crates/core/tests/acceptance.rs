//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the table.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use arrowlab::engine::bitrev::SCALE;
use arrowlab::engine::event::{Budget, EventEngine};
use arrowlab::io::{write_artifacts, TraceFormat};
use arrowlab::lab::ensemble::seeds;
use arrowlab::lab::{
    apply_annihilation, build_initial, echo_sweep, entropy_window, equilibrium_reference, run_arrow_experiment,
    run_ensemble, run_reversed_from, run_scenario, run_white_hole_attempt, AnnihilationEvent, ConservedSet,
    EngineKind, Execution, InitialCondition, Perturbation, Region, Reversal, ScenarioConfig, SweepParam, Verdict,
};
use arrowlab::observables::DivergenceRate;
use arrowlab::rng::SplitMix64;
use arrowlab::stats::{mean, welch_t_test};
use arrowlab::Vec2;

const SEEDS: usize = 20;
const K_STEPS: u64 = 10_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ensemble_seeds() -> Vec<u64> {
    seeds(1, SEEDS)
}

fn at_least_95_percent(hits: usize, n: usize) -> bool {
    hits * 100 >= 95 * n
}

fn bitrev_echo_config(seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(EngineKind::Bitrev, 26, seed);
    c.reversal = Some(Reversal::AtTime(c.steps_to_time(K_STEPS)));
    c.run_length = c.steps_to_time(2 * K_STEPS);
    c
}

fn one_quantum(time: f64) -> Perturbation {
    Perturbation {
        disk: 0,
        delta: 1.0 / SCALE as f64,
        time,
    }
}

fn dispersal() -> Outcome {
    let start = Instant::now();
    let cfg = ScenarioConfig::new(EngineKind::Event, 26, 0);
    let runs = run_ensemble(&cfg, &ensemble_seeds(), Execution::Parallel).unwrap();
    let elapsed = start.elapsed();
    let reference = runs[0].equilibrium_reference;
    let ok = |r: &&arrowlab::lab::ScenarioReport| {
        r.events.pair_collisions >= 300
            && r.final_entropy >= 0.9 * reference
            && r.final_cv.is_some_and(|cv| cv <= 1.5)
    };
    let hits = runs.iter().filter(ok).count();
    let min_pairs = runs.iter().map(|r| r.events.pair_collisions).min().unwrap();
    let min_ratio = runs.iter().map(|r| r.final_entropy / reference).fold(f64::INFINITY, f64::min);
    let max_cv = runs.iter().filter_map(|r| r.final_cv).fold(0.0, f64::max);
    outcome(
        at_least_95_percent(hits, SEEDS) && elapsed < Duration::from_secs(10),
        format!(
            "{hits}/{SEEDS} seeds; min pair collisions {min_pairs}, min S/S_eq {min_ratio:.3}, max CV {max_cv:.3}, {elapsed:.2?}"
        ),
    )
}

fn exact_echo() -> Outcome {
    let start = Instant::now();
    let runs = run_ensemble(&bitrev_echo_config(0), &ensemble_seeds(), Execution::Parallel).unwrap();
    let elapsed = start.elapsed();
    let exact = runs
        .iter()
        .filter(|r| {
            let e = r.echo.as_ref().unwrap();
            e.bitwise == Some(true) && e.pos_rms == 0.0 && e.vel_rms == 0.0
        })
        .count();
    let reversed = runs.iter().filter(|r| r.verdict == Verdict::Reversed).count();
    outcome(
        exact == SEEDS && elapsed < Duration::from_secs(10),
        format!("{exact}/{SEEDS} bitwise echoes at K = {K_STEPS} ({reversed} verdicts reversed), {elapsed:.2?}"),
    )
}

fn short_event_echo() -> Outcome {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for k in [10u64, 20, 30] {
        let mut c = ScenarioConfig::new(EngineKind::Event, 26, 0);
        c.reversal = Some(Reversal::AfterCollisions(k));
        for r in run_ensemble(&c, &ensemble_seeds(), Execution::Parallel).unwrap() {
            worst = worst.max(r.echo.unwrap().pos_rms / c.table.width);
            runs += 1;
        }
    }
    outcome(worst <= 1e-6, format!("worst pos_rms {worst:.2e} table lengths over {runs} runs with K <= 30"))
}

fn perturbation_dichotomy() -> Outcome {
    let seeds = ensemble_seeds();
    let base = bitrev_echo_config(0);
    let t_rev = base.steps_to_time(K_STEPS);
    let t_end = base.run_length;

    let mut plain = base.clone();
    plain.reversal = None;
    let mut nudged = plain.clone();
    nudged.perturbation = Some(one_quantum(t_rev));
    let late = |cfg: &ScenarioConfig| -> Vec<f64> {
        run_ensemble(cfg, &seeds, Execution::Parallel)
            .unwrap()
            .iter()
            .map(|r| entropy_window(&r.trace, t_rev, t_end + 1e-9).unwrap())
            .collect()
    };
    let (a, b) = (late(&plain), late(&nudged));
    let p = welch_t_test(&a, &b);

    let mut rev = base.clone();
    rev.perturbation = Some(one_quantum(t_rev));
    let runs = run_ensemble(&rev, &seeds, Execution::Parallel).unwrap();
    let reference = runs[0].equilibrium_reference;
    let broken = runs
        .iter()
        .filter(|r| r.echo.as_ref().unwrap().pos_rms / rev.table.width >= 0.1 && r.final_entropy >= 0.9 * reference)
        .count();
    let min_echo = runs
        .iter()
        .map(|r| r.echo.as_ref().unwrap().pos_rms / rev.table.width)
        .fold(f64::INFINITY, f64::min);
    outcome(
        p >= 0.01 && at_least_95_percent(broken, SEEDS),
        format!(
            "forward Welch p = {p:.3} (means {:.3} vs {:.3}); reversed echo broken in {broken}/{SEEDS}, min echo {min_echo:.3} table lengths",
            mean(&a),
            mean(&b)
        ),
    )
}

fn arrow_config(seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(EngineKind::Event, 26, seed);
    c.reversal = Some(Reversal::AtTime(200.0));
    c.annihilation = Some(AnnihilationEvent {
        time: 200.0,
        region: Region {
            x_min: 0.0,
            y_min: 0.0,
            x_max: 2.0,
            y_max: 4.0,
        },
        seed: 7,
        conserved: ConservedSet::CountMomentumEnergy,
    });
    c
}

fn arrow_realignment() -> Outcome {
    let expected = ensemble_seeds()
        .into_iter()
        .filter(|&s| run_arrow_experiment(&arrow_config(s)).unwrap().as_expected())
        .count();

    // the same event applied to a gas that starts at maximum entropy
    let mut control = arrow_config(0);
    control.initial = InitialCondition::Thermal;
    let runs = run_ensemble(&control, &ensemble_seeds(), Execution::Parallel).unwrap();
    let t_a = 200.0;
    let before = mean(&runs.iter().map(|r| entropy_window(&r.trace, 0.0, t_a).unwrap()).collect::<Vec<_>>());
    let after = mean(
        &runs
            .iter()
            .map(|r| entropy_window(&r.trace, t_a, control.run_length + 1e-9).unwrap())
            .collect::<Vec<_>>(),
    );
    let band = (after / before - 1.0).abs();
    outcome(
        at_least_95_percent(expected, SEEDS) && band <= 0.02,
        format!("{expected}/{SEEDS} forward/realigned pairs; control entropy shift {:.2}%", 100.0 * band),
    )
}

fn white_hole() -> Outcome {
    let mut thermal = ScenarioConfig::new(EngineKind::Event, 26, 0);
    thermal.initial = InitialCondition::Thermal;
    let ratios: Vec<f64> = ensemble_seeds()
        .into_iter()
        .map(|s| {
            let mut c = thermal.clone();
            c.seed = s;
            run_white_hole_attempt(&c).unwrap().white_hole.unwrap().min_ratio
        })
        .collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);

    let mut forward = ScenarioConfig::new(EngineKind::Bitrev, 26, 0);
    forward.run_length = forward.steps_to_time(K_STEPS);
    let contrast: Vec<f64> = ensemble_seeds()
        .into_iter()
        .map(|s| {
            let mut c = forward.clone();
            c.seed = s;
            let end = run_scenario(&c).unwrap().final_state;
            run_reversed_from(&c, end).unwrap().white_hole.unwrap().min_ratio
        })
        .collect();
    let reordered = contrast.iter().filter(|&&r| r < 0.9).count();
    outcome(
        min_ratio >= 0.9 && reordered == SEEDS,
        format!("thermal min S/S0 {min_ratio:.3} over {SEEDS} seeds; ordered endpoints re-order in {reordered}/{SEEDS}"),
    )
}

fn thermal_gas(n: usize, seed: u64) -> arrowlab::engine::SimState {
    let mut c = ScenarioConfig::new(EngineKind::Event, n, seed);
    c.initial = InitialCondition::Thermal;
    build_initial(&c).unwrap()
}

fn conservation() -> Outcome {
    let mut worst_drift = 0.0f64;
    for seed in 0..1000u64 {
        let s = thermal_gas(20, seed);
        let e0 = s.kinetic_energy();
        let mut e = EventEngine::new(s).unwrap();
        e.advance(Budget::Collisions(1000)).unwrap();
        worst_drift = worst_drift.max(((e.state().kinetic_energy() - e0) / e0).abs());
    }

    let mut rng = SplitMix64::stream(99, "acceptance");
    let (mut worst_p, mut worst_e, mut count_ok) = (0.0f64, 0.0f64, true);
    for case in 0..1000u64 {
        let n = 2 + (rng.next() % 29) as usize;
        let mut s = thermal_gas(n, case);
        let (x0, y0) = (rng.uniform_in(0.0, 3.0), rng.uniform_in(0.0, 3.0));
        let region = Region {
            x_min: x0,
            y_min: y0,
            x_max: rng.uniform_in(x0 + 0.2, 4.0),
            y_max: rng.uniform_in(y0 + 0.2, 4.0),
        };
        let inside: Vec<usize> = s.disks.iter().filter(|d| region.contains(d.position)).map(|d| d.id).collect();
        let totals = |s: &arrowlab::engine::SimState| {
            inside
                .iter()
                .fold((Vec2::ZERO, 0.0), |(p, e), &i| (p + s.disks[i].momentum(), e + s.disks[i].kinetic_energy()))
        };
        let (p0, e0) = totals(&s);
        let ev = AnnihilationEvent {
            time: 0.0,
            region,
            seed: rng.next(),
            conserved: ConservedSet::CountMomentumEnergy,
        };
        apply_annihilation(&mut s, &ev).unwrap();
        count_ok &= s.disks.len() == n;
        let (p1, e1) = totals(&s);
        if e0 > 0.0 {
            worst_p = worst_p.max((p1 - p0).norm() / (p0.norm() + (2.0 * e0).sqrt()));
            worst_e = worst_e.max((e1 - e0).abs() / e0);
        }
    }
    outcome(
        worst_drift <= 1e-12 && count_ok && worst_p <= 1e-9 && worst_e <= 1e-9,
        format!(
            "event drift {worst_drift:.1e} per 1e3 collisions (1000 gases); annihilation dp {worst_p:.1e}, dE {worst_e:.1e}, N exact: {count_ok} (1000 cases)"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let gaps: Vec<(f64, u64, u64)> = std::thread::scope(|s| {
        let handles: Vec<_> = common::CASES
            .iter()
            .map(|&(n, seed, ev)| s.spawn(move || common::oracle_gap(n, seed, ev)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let worst = gaps.iter().map(|g| g.0).fold(0.0, f64::max);
    let max_events = gaps.iter().map(|g| g.1 + g.2).max().unwrap();
    outcome(
        worst <= 1e-6 && max_events <= 20,
        format!("worst position gap {worst:.2e} over {} gases of 1-4 disks, <= {max_events} events", gaps.len()),
    )
}

fn divergence() -> Outcome {
    let c = ScenarioConfig::new(EngineKind::Event, 26, 3);
    let ks: Vec<f64> = (1..=10).map(|i| f64::from(i) * 10.0).collect();
    let sweep = echo_sweep(&c, SweepParam::K, &ks).unwrap();
    let (lambda, lower) = match sweep.divergence {
        Some(DivergenceRate::Fitted { lambda, lower95, .. }) => (lambda, lower95),
        _ => (f64::NAN, f64::NAN),
    };

    let mut b = ScenarioConfig::new(EngineKind::Bitrev, 26, 3);
    b.perturbation = Some(Perturbation {
        disk: 0,
        delta: 0.0,
        time: 0.0,
    });
    let exact = echo_sweep(&b, SweepParam::K, &[500.0, 1000.0, 2000.0, 4000.0]).unwrap();
    let flagged = exact.divergence == Some(DivergenceRate::ExactEcho);
    outcome(
        lambda > 0.0 && lower > 0.0 && flagged,
        format!("event lambda {lambda:.3} per collision, lower95 {lower:.3}; bitrev delta = 0 flagged exact: {flagged}"),
    )
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut configs = [ScenarioConfig::new(EngineKind::Event, 26, 5), bitrev_echo_config(5)];
    configs[0].reversal = Some(Reversal::AtTime(100.0));
    configs[1].perturbation = Some(one_quantum(100.0));
    let mut identical = true;
    let mut files = 0;
    for (i, cfg) in configs.iter().enumerate() {
        for format in [TraceFormat::Csv, TraceFormat::Json] {
            let dirs: Vec<_> = (0..2).map(|k| tmp.path().join(format!("{i}-{format:?}-{k}"))).collect();
            for d in &dirs {
                write_artifacts(&run_scenario(cfg).unwrap(), d, "acc", format).unwrap();
            }
            let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
            names.sort();
            for name in names {
                files += 1;
                identical &= fs::read(dirs[0].join(&name)).unwrap() == fs::read(dirs[1].join(&name)).unwrap();
            }
        }
    }
    outcome(identical && files > 0, format!("{files} artifact files compared byte for byte"))
}

#[test]
fn acceptance() {
    // warm the shared equilibrium reference so criterion timings measure the runs
    equilibrium_reference(&ScenarioConfig::new(EngineKind::Event, 26, 0).resolved()).unwrap();

    let criteria: [Criterion; 10] = [
        ("dispersal and equipartition", dispersal),
        ("exact bit-reversible echo", exact_echo),
        ("short event-engine echo", short_event_echo),
        ("one-quantum perturbation dichotomy", perturbation_dichotomy),
        ("arrow realignment", arrow_realignment),
        ("white-hole attempt", white_hole),
        ("conservation suite", conservation),
        ("oracle equivalence", oracle_equivalence),
        ("divergence rate", divergence),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("{} {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
