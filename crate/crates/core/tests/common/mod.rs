//! Soft-disk reference integrator shared by the oracle and acceptance tests.
//!
//! Contacts become a stiff harmonic penalty, integrated with velocity Verlet
//! at a step far below the contact period; the finite-stiffness error is
//! removed by Richardson extrapolation in `h = 1/sqrt(k)`.

#![allow(dead_code)]

use arrowlab::engine::event::{Budget, EventEngine};
use arrowlab::engine::{Disk, SimState, Table};
use arrowlab::Vec2;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn accelerations(pos: &[Vec2], disks: &[Disk], table: Table, k: f64, out: &mut [Vec2]) {
    for (i, d) in disks.iter().enumerate() {
        let p = pos[i];
        let r = d.radius;
        let mut f = Vec2::ZERO;
        if p.x < r {
            f.x += k * (r - p.x);
        }
        if p.x > table.width - r {
            f.x -= k * (p.x - (table.width - r));
        }
        if p.y < r {
            f.y += k * (r - p.y);
        }
        if p.y > table.height - r {
            f.y -= k * (p.y - (table.height - r));
        }
        out[i] = f;
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let delta = pos[i] - pos[j];
            let d = delta.norm();
            let sigma = disks[i].radius + disks[j].radius;
            if d < sigma {
                let f = delta * (k * (sigma - d) / d);
                out[i] += f;
                out[j] -= f;
            }
        }
    }
    for (a, d) in out.iter_mut().zip(disks) {
        *a = *a / d.mass;
    }
}

/// Positions at time `t` under penalty stiffness `k`.
pub fn penalty_positions(s: &SimState, k: f64, t: f64) -> Vec<Vec2> {
    let m_min = s.disks.iter().map(|d| d.mass).fold(f64::INFINITY, f64::min);
    let omega = (2.0 * k / m_min).sqrt();
    let steps = (t * omega / 5e-4).ceil() as usize;
    let dt = t / steps as f64;
    let mut x: Vec<Vec2> = s.disks.iter().map(|d| d.position).collect();
    let mut v: Vec<Vec2> = s.disks.iter().map(|d| d.velocity).collect();
    let mut a = vec![Vec2::ZERO; x.len()];
    accelerations(&x, &s.disks, s.table, k, &mut a);
    for _ in 0..steps {
        for i in 0..x.len() {
            v[i] += a[i] * (0.5 * dt);
            x[i] += v[i] * dt;
        }
        accelerations(&x, &s.disks, s.table, k, &mut a);
        for i in 0..x.len() {
            v[i] += a[i] * (0.5 * dt);
        }
    }
    x
}

/// Richardson extrapolation over `k0, 4 k0, 16 k0`, cancelling the `h` and
/// `h²` terms of the stiffness error.
pub fn oracle_positions(s: &SimState, k0: f64, t: f64) -> Vec<Vec2> {
    let p: Vec<Vec<Vec2>> = [1.0, 4.0, 16.0].iter().map(|m| penalty_positions(s, k0 * m, t)).collect();
    (0..s.disks.len())
        .map(|i| {
            let r1 = p[1][i] * 2.0 - p[0][i];
            let r2 = p[2][i] * 2.0 - p[1][i];
            (r2 * 4.0 - r1) / 3.0
        })
        .collect()
}

pub fn random_gas(n: usize, seed: u64) -> SimState {
    let mut rng = StdRng::seed_from_u64(seed);
    let table = Table::new(1.0, 1.0);
    let mut disks: Vec<Disk> = Vec::new();
    while disks.len() < n {
        let r = rng.random_range(0.06..0.12);
        let p = Vec2::new(rng.random_range(r..1.0 - r), rng.random_range(r..1.0 - r));
        if disks.iter().all(|d| (d.position - p).norm() > d.radius + r + 0.02) {
            let v = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let m = rng.random_range(0.5..2.0);
            disks.push(Disk::new(disks.len(), p, v, r).with_mass(m));
        }
    }
    SimState::new(table, disks)
}

/// Midpoint between the `k`-th and next event, so no contact is in progress.
pub fn quiet_time(s: &SimState, k: u64) -> f64 {
    let mut e = EventEngine::new(s.clone()).unwrap();
    e.advance(Budget::Collisions(k)).unwrap();
    let t0 = e.time();
    let t1 = e.next_event().map_or(t0 + 0.1, |ev| ev.time);
    0.5 * (t0 + t1)
}

pub const K0: f64 = 3.2e6;

/// Largest position difference between the event engine and the oracle
/// after the `events`-th event of a random `n`-disk gas, and the pair and
/// wall event counts.
pub fn oracle_gap(n: usize, seed: u64, events: u64) -> (f64, u64, u64) {
    let s = random_gas(n, seed);
    let t = quiet_time(&s, events);
    let mut e = EventEngine::new(s.clone()).unwrap();
    e.advance(Budget::Duration(t)).unwrap();
    let st = e.stats();
    let oracle = oracle_positions(&s, K0, t);
    let worst = e
        .state()
        .disks
        .iter()
        .zip(&oracle)
        .map(|(d, o)| (d.position - *o).norm())
        .fold(0.0, f64::max);
    (worst, st.pair, st.wall)
}

/// Scenarios with at most two pair contacts: each contact magnifies the
/// soft-disk error, and beyond that the lowest stiffness leaves the regime
/// where the extrapolation holds.
pub const CASES: [(usize, u64, u64); 7] = [(1, 1, 20), (2, 0, 10), (2, 3, 10), (3, 1, 10), (3, 11, 10), (4, 0, 10), (4, 5, 10)];
