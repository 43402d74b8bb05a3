//! Perturbation and information-annihilation operators.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{AnnihilationEvent, ConservedSet};
use crate::engine::bitrev::{BitrevState, IVec2, SCALE};
use crate::engine::{SimState, CONTACT_TOLERANCE};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::vec2::Vec2;

/// Fresh directions tried before a perturbation gives up.
pub const PERTURB_RETRIES: usize = 64;
const PLACEMENT_ATTEMPTS: usize = 100_000;

fn random_direction(rng: &mut SplitMix64) -> Vec2 {
    let a = rng.uniform_in(0.0, std::f64::consts::TAU);
    Vec2::new(a.cos(), a.sin())
}

/// Offsets disk `id` by `delta` along a seeded random direction.
pub fn perturb(state: &mut SimState, id: usize, delta: f64, rng: &mut SplitMix64) -> Result<()> {
    if id >= state.disks.len() {
        return Err(Error::param("perturbation.disk", format!("no disk {id}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::param("perturbation.delta", "must be non-negative"));
    }
    if delta == 0.0 {
        return Ok(());
    }
    let t = state.table;
    let d = &state.disks[id];
    for _ in 0..PERTURB_RETRIES {
        let p = d.position + random_direction(rng) * delta;
        let r = d.radius;
        let inside = p.x >= r && p.x <= t.width - r && p.y >= r && p.y <= t.height - r;
        let clear = state
            .disks
            .iter()
            .filter(|o| o.id != id)
            .all(|o| (o.position - p).norm() >= o.radius + r);
        if inside && clear {
            state.disks[id].position = p;
            return Ok(());
        }
    }
    Err(Error::Placement(format!(
        "perturbing disk {id} by {delta} overlaps a neighbour in {PERTURB_RETRIES} tries"
    )))
}

/// Offset in quanta: one axis-aligned quantum at the minimum, otherwise the
/// rounded random direction scaled to `max(1, round(delta * SCALE))`.
fn quantum_offset(delta: f64, rng: &mut SplitMix64) -> IVec2 {
    let n = (delta * SCALE as f64).round().max(1.0);
    if n == 1.0 {
        let sign = if rng.next() & 1 == 0 { 1 } else { -1 };
        return if rng.next() & 1 == 0 {
            IVec2::new(sign, 0)
        } else {
            IVec2::new(0, sign)
        };
    }
    let u = random_direction(rng) * n;
    IVec2::new(u.x.round() as i64, u.y.round() as i64)
}

/// Shifts both frames of disk `id`, leaving its implicit velocity intact.
pub fn perturb_bitrev(s: &mut BitrevState, id: usize, delta: f64, rng: &mut SplitMix64) -> Result<()> {
    if id >= s.len() {
        return Err(Error::param("perturbation.disk", format!("no disk {id}")));
    }
    if !(delta >= 0.0) {
        return Err(Error::param("perturbation.delta", "must be non-negative"));
    }
    if delta == 0.0 {
        return Ok(());
    }
    let sigma = s.params.diameter as f64;
    let dist = |a: IVec2, b: IVec2| ((a.x - b.x) as f64).hypot((a.y - b.y) as f64);
    let here = s.x_cur[id];
    for _ in 0..PERTURB_RETRIES {
        let off = quantum_offset(delta, rng);
        let moved = here + off;
        // never push deeper into a neighbour than the disk already is
        let ok = s.x_cur.iter().enumerate().filter(|&(j, _)| j != id).all(|(_, &o)| {
            let after = dist(moved, o);
            after >= sigma || after >= dist(here, o)
        });
        if ok {
            s.x_cur[id] = moved;
            s.x_prev[id] = s.x_prev[id] + off;
            return Ok(());
        }
    }
    Err(Error::Placement(format!(
        "perturbing disk {id} by {delta} overlaps a neighbour in {PERTURB_RETRIES} tries"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnihilationOutcome {
    pub time: f64,
    /// Ids of the resampled disks.
    pub affected: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// New velocities with the subset's momentum and kinetic energy restored.
///
/// Draws isotropic Gaussians, removes their centre-of-mass motion, rescales
/// the internal part to the internal energy `E - |P|²/2M` and adds back the
/// centre-of-mass velocity `P/M`.
fn corrected_velocities(
    masses: &[f64],
    momentum: Vec2,
    energy: f64,
    conserved: ConservedSet,
    rng: &mut SplitMix64,
) -> Vec<Vec2> {
    let raw: Vec<Vec2> = masses
        .iter()
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            let y: f64 = StandardNormal.sample(rng);
            Vec2::new(x, y)
        })
        .collect();
    if conserved == ConservedSet::CountOnly {
        // same energy scale per disk, no conservation
        let per = (2.0 * energy / masses.iter().sum::<f64>() / 2.0).sqrt();
        return raw.into_iter().map(|u| u * per).collect();
    }
    let m_total: f64 = masses.iter().sum();
    let v_cm = momentum / m_total;
    let u_cm = raw.iter().zip(masses).fold(Vec2::ZERO, |a, (u, m)| a + *u * *m) / m_total;
    let w: Vec<Vec2> = raw.iter().map(|u| *u - u_cm).collect();
    let k_int: f64 = w.iter().zip(masses).map(|(w, m)| 0.5 * m * w.norm_sq()).sum();
    let target = (energy - 0.5 * m_total * v_cm.norm_sq()).max(0.0);
    let s = if k_int > 0.0 { (target / k_int).sqrt() } else { 0.0 };
    w.into_iter().map(|w| v_cm + w * s).collect()
}

/// Uniform non-overlapping position inside `region` and the table.
fn place_in_region(
    rng: &mut SplitMix64,
    ev: &AnnihilationEvent,
    table: crate::engine::Table,
    radius: f64,
    occupied: &[(Vec2, f64)],
) -> Result<Vec2> {
    let r = ev.region;
    let (x0, x1) = (r.x_min.max(radius), r.x_max.min(table.width - radius));
    let (y0, y1) = (r.y_min.max(radius), r.y_max.min(table.height - radius));
    if !(x0 <= x1 && y0 <= y1) {
        return Err(Error::Placement("annihilation region leaves no room for a disk".into()));
    }
    for _ in 0..PLACEMENT_ATTEMPTS {
        let p = Vec2::new(rng.uniform_in(x0, x1), rng.uniform_in(y0, y1));
        if occupied
            .iter()
            .all(|&(q, rq)| (p - q).norm() >= radius + rq + CONTACT_TOLERANCE)
        {
            return Ok(p);
        }
    }
    Err(Error::Placement("annihilation region too crowded to resample".into()))
}

/// Replaces the microstate of every disk whose centre lies in the region.
pub fn apply_annihilation(state: &mut SimState, ev: &AnnihilationEvent) -> Result<AnnihilationOutcome> {
    let affected: Vec<usize> = state
        .disks
        .iter()
        .filter(|d| ev.region.contains(d.position))
        .map(|d| d.id)
        .collect();
    let mut outcome = AnnihilationOutcome {
        time: state.time,
        affected: affected.clone(),
        note: None,
    };
    if affected.is_empty() {
        outcome.note = Some("region holds no disks; state unchanged".into());
        return Ok(outcome);
    }
    if affected.len() == 1 && ev.conserved == ConservedSet::CountMomentumEnergy {
        outcome.note = Some("single disk: momentum and energy fix it; state unchanged".into());
        return Ok(outcome);
    }
    let mut rng = SplitMix64::stream(ev.seed, "annihilation");
    let masses: Vec<f64> = affected.iter().map(|&i| state.disks[i].mass).collect();
    let momentum = affected.iter().fold(Vec2::ZERO, |a, &i| a + state.disks[i].momentum());
    let energy: f64 = affected.iter().map(|&i| state.disks[i].kinetic_energy()).sum();

    let mut occupied: Vec<(Vec2, f64)> = state
        .disks
        .iter()
        .filter(|d| !affected.contains(&d.id))
        .map(|d| (d.position, d.radius))
        .collect();
    for &i in &affected {
        let r = state.disks[i].radius;
        let p = place_in_region(&mut rng, ev, state.table, r, &occupied)?;
        occupied.push((p, r));
        state.disks[i].position = p;
    }
    let v = corrected_velocities(&masses, momentum, energy, ev.conserved, &mut rng);
    for (&i, v) in affected.iter().zip(v) {
        state.disks[i].velocity = v;
    }
    Ok(outcome)
}

/// Annihilation on the fixed-point engine: positions are quantized samples,
/// per-step displacements are rounded and then nudged by single quanta so
/// the subset's total displacement (momentum) is restored exactly.
pub fn apply_annihilation_bitrev(s: &mut BitrevState, ev: &AnnihilationEvent, time: f64) -> Result<AnnihilationOutcome> {
    let view = s.to_simstate();
    let affected: Vec<usize> = view
        .disks
        .iter()
        .filter(|d| ev.region.contains(d.position))
        .map(|d| d.id)
        .collect();
    let mut outcome = AnnihilationOutcome {
        time,
        affected: affected.clone(),
        note: None,
    };
    if affected.is_empty() {
        outcome.note = Some("region holds no disks; state unchanged".into());
        return Ok(outcome);
    }
    if affected.len() == 1 && ev.conserved == ConservedSet::CountMomentumEnergy {
        outcome.note = Some("single disk: momentum and energy fix it; state unchanged".into());
        return Ok(outcome);
    }
    let mut rng = SplitMix64::stream(ev.seed, "annihilation");
    let disp: Vec<IVec2> = s.displacements().collect();
    let p_int = affected.iter().fold(IVec2::ZERO, |a, &i| a + disp[i]);
    let e: f64 = affected
        .iter()
        .map(|&i| 0.5 * ((disp[i].x as f64).powi(2) + (disp[i].y as f64).powi(2)))
        .sum();

    let scale = SCALE as f64;
    let radius = s.params.diameter as f64 / 2.0 / scale;
    let mut occupied: Vec<(Vec2, f64)> = view
        .disks
        .iter()
        .filter(|d| !affected.contains(&d.id))
        .map(|d| (d.position, radius))
        .collect();
    let mut positions = Vec::with_capacity(affected.len());
    for _ in &affected {
        // one extra quantum of clearance absorbs the quantization
        let p = place_in_region(&mut rng, ev, view.table, radius + 1.0 / scale, &occupied)?;
        occupied.push((p, radius + 1.0 / scale));
        positions.push(IVec2::new((p.x * scale).round() as i64, (p.y * scale).round() as i64));
    }
    let masses = vec![1.0; affected.len()];
    let p_f = Vec2::new(p_int.x as f64, p_int.y as f64);
    let v = corrected_velocities(&masses, p_f, e, ev.conserved, &mut rng);
    let mut rounded: Vec<IVec2> = v.iter().map(|w| IVec2::new(w.x.round() as i64, w.y.round() as i64)).collect();
    if ev.conserved == ConservedSet::CountMomentumEnergy {
        let total = rounded.iter().fold(IVec2::ZERO, |a, &b| a + b);
        let mut residual = p_int - total;
        let len = rounded.len();
        // spread the rounding residual one quantum at a time
        let mut k = 0usize;
        while residual != IVec2::ZERO {
            let r = &mut rounded[k % len];
            if residual.x != 0 {
                r.x += residual.x.signum();
                residual.x -= residual.x.signum();
            }
            if residual.y != 0 {
                r.y += residual.y.signum();
                residual.y -= residual.y.signum();
            }
            k += 1;
            debug_assert!(k <= 4 * len);
        }
    }
    for ((&i, pos), d) in affected.iter().zip(positions).zip(rounded) {
        s.x_cur[i] = pos;
        s.x_prev[i] = pos - d;
    }
    Ok(outcome)
}
