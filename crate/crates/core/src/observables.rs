//! Coarse-grained entropy, equipartition and reversal-quality metrics.
//!
//! Entropies are `S = ln W` (Boltzmann constant set to one) where `W` is the
//! number of ways to realise an occupancy histogram: `W = N! / Π n_i!`. The
//! log-factorials are summed exactly, never approximated.

use serde::{Deserialize, Serialize};

use crate::engine::SimState;
use crate::error::{Error, Result};
use crate::stats::{linear_fit, t_quantile};
use crate::vec2::Vec2;

/// Cell counts of a `nx x ny` grid laid over the table, row-major from the
/// bottom-left cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub nx: usize,
    pub ny: usize,
    pub counts: Vec<u32>,
    pub total: u32,
}

impl OccupancyGrid {
    pub fn from_counts(nx: usize, ny: usize, counts: Vec<u32>) -> Self {
        assert_eq!(counts.len(), nx * ny);
        let total = counts.iter().sum();
        OccupancyGrid { nx, ny, counts, total }
    }
}

/// Cell index along one axis. Coordinates exactly on a grid line go to the
/// lower cell.
#[inline]
fn cell_of(x: f64, lo: f64, hi: f64, cells: usize) -> usize {
    let u = (x - lo) / (hi - lo) * cells as f64;
    (u.ceil() as isize - 1).clamp(0, cells as isize - 1) as usize
}

pub fn coarse_grain(state: &SimState, nx: usize, ny: usize) -> Result<OccupancyGrid> {
    if nx == 0 || ny == 0 {
        return Err(Error::param("grid", "needs at least one cell per axis"));
    }
    let t = state.table;
    let mut counts = vec![0u32; nx * ny];
    for d in &state.disks {
        let p = d.position;
        if !(0.0..=t.width).contains(&p.x) || !(0.0..=t.height).contains(&p.y) {
            return Err(Error::CorruptState(format!(
                "disk {} centre ({}, {}) lies outside the table",
                d.id, p.x, p.y
            )));
        }
        let ix = cell_of(p.x, 0.0, t.width, nx);
        let iy = cell_of(p.y, 0.0, t.height, ny);
        counts[iy * nx + ix] += 1;
    }
    Ok(OccupancyGrid::from_counts(nx, ny, counts))
}

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// `ln(N! / Π n_i!)`.
pub fn entropy_of_counts(counts: &[u32]) -> f64 {
    let total: u32 = counts.iter().sum();
    ln_factorial(total) - counts.iter().map(|&c| ln_factorial(c)).sum::<f64>()
}

pub fn boltzmann_entropy(g: &OccupancyGrid) -> f64 {
    entropy_of_counts(&g.counts)
}

/// Positional entropy on an `nx x ny` grid.
pub fn positional_entropy(state: &SimState, nx: usize, ny: usize) -> Result<f64> {
    coarse_grain(state, nx, ny).map(|g| boltzmann_entropy(&g))
}

/// Largest speed any disk could reach if it held all the kinetic energy.
pub fn max_speed(state: &SimState) -> f64 {
    let m_min = state.disks.iter().map(|d| d.mass).fold(f64::INFINITY, f64::min);
    (2.0 * state.kinetic_energy() / m_min).sqrt()
}

/// `ln W` of the velocity histogram on `[-v_max, v_max]²` with `bins` cells
/// per axis.
pub fn velocity_entropy_in_range(state: &SimState, bins: usize, v_max: f64) -> Result<f64> {
    if bins == 0 {
        return Err(Error::param("bins", "needs at least one bin per axis"));
    }
    let mut counts = vec![0u32; bins * bins];
    if v_max > 0.0 {
        for d in &state.disks {
            let v = d.velocity;
            if v.x.abs() > v_max || v.y.abs() > v_max {
                return Err(Error::param("v_max", format!("disk {} is faster than the histogram range", d.id)));
            }
            let ix = cell_of(v.x, -v_max, v_max, bins);
            let iy = cell_of(v.y, -v_max, v_max, bins);
            counts[iy * bins + ix] += 1;
        }
    } else {
        counts[0] = state.disks.len() as u32;
    }
    Ok(entropy_of_counts(&counts))
}

/// Velocity entropy with the range fixed by the total energy, so it stays
/// comparable along an energy-conserving run.
pub fn velocity_entropy(state: &SimState, bins: usize) -> Result<f64> {
    if state.disks.is_empty() {
        return Err(Error::param("state", "needs at least one disk"));
    }
    // a hair of headroom so the speed bound itself never falls outside
    velocity_entropy_in_range(state, bins, max_speed(state) * (1.0 + 1e-12))
}

/// Coefficient of variation (population std / mean) of per-disk kinetic
/// energies. Zero means perfect equipartition.
pub fn equipartition_index(state: &SimState) -> Result<f64> {
    if state.disks.len() < 2 {
        return Err(Error::param("state", "equipartition needs at least two disks"));
    }
    let e: Vec<f64> = state.disks.iter().map(|d| d.kinetic_energy()).collect();
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let var = e.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

/// RMS over disks of position and velocity differences.
pub fn phase_distance(a: &SimState, b: &SimState) -> Result<(f64, f64)> {
    phase_distance_signed(a, b, false)
}

/// As [`phase_distance`], comparing `b`'s negated velocities when
/// `reverse_b` is set (the echo of a reversed run points the other way).
pub fn phase_distance_signed(a: &SimState, b: &SimState, reverse_b: bool) -> Result<(f64, f64)> {
    if a.disks.len() != b.disks.len() {
        return Err(Error::SizeMismatch(a.disks.len(), b.disks.len()));
    }
    if a.disks.is_empty() {
        return Ok((0.0, 0.0));
    }
    let sign = if reverse_b { -1.0 } else { 1.0 };
    let (mut sp, mut sv) = (0.0, 0.0);
    for (da, db) in a.disks.iter().zip(&b.disks) {
        sp += (da.position - db.position).norm_sq();
        sv += (da.velocity - db.velocity * sign).norm_sq();
    }
    let n = a.disks.len() as f64;
    Ok(((sp / n).sqrt(), (sv / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DivergenceRate {
    /// Every distance was exactly zero: the echo is perfect and no rate exists.
    ExactEcho,
    Fitted {
        /// Slope of `ln(distance)` against the sweep parameter.
        lambda: f64,
        stderr: f64,
        /// One-sided 95% lower confidence bound on `lambda`.
        lower95: f64,
        samples: usize,
    },
}

impl DivergenceRate {
    pub fn lambda(&self) -> Option<f64> {
        match self {
            DivergenceRate::ExactEcho => None,
            DivergenceRate::Fitted { lambda, .. } => Some(*lambda),
        }
    }
}

/// Least-squares slope of `ln(distance)` versus the parameter. Zero
/// distances carry no logarithm and are left out of the fit.
pub fn divergence_rate(trace: &[(f64, f64)]) -> Result<DivergenceRate> {
    if trace.iter().any(|&(_, d)| !(d >= 0.0)) {
        return Err(Error::param("trace", "distances must be non-negative"));
    }
    let positive: Vec<(f64, f64)> = trace.iter().copied().filter(|&(_, d)| d > 0.0).collect();
    if positive.is_empty() && !trace.is_empty() {
        return Ok(DivergenceRate::ExactEcho);
    }
    if positive.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "divergence fit needs at least 3 positive distances, got {}",
            positive.len()
        )));
    }
    let xs: Vec<f64> = positive.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = positive.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys);
    let dof = (fit.n - 2) as f64;
    let lower95 = if dof > 0.0 {
        fit.slope - t_quantile(0.95, dof) * fit.slope_stderr
    } else {
        fit.slope
    };
    Ok(DivergenceRate::Fitted {
        lambda: fit.slope,
        stderr: fit.slope_stderr,
        lower95,
        samples: fit.n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub s_pos: f64,
    pub s_vel: f64,
    /// Undefined when the gas carries no kinetic energy.
    pub cv: Option<f64>,
    pub dist_pos: Option<f64>,
    pub dist_vel: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub samples: Vec<TraceSample>,
}

impl EntropyTrace {
    /// Appends a sample; times must be strictly increasing.
    pub fn push(&mut self, s: TraceSample) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(s.t > last.t) {
                return Err(Error::ContractViolation(format!(
                    "trace times must increase ({} after {})",
                    s.t, last.t
                )));
            }
        }
        self.samples.push(s);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positional(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.s_pos)
    }
}

/// Grid and histogram resolution used when sampling a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub grid_x: usize,
    pub grid_y: usize,
    pub velocity_bins: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            grid_x: 11,
            grid_y: 11,
            velocity_bins: 8,
        }
    }
}

/// All per-sample observables of one state. `reference` adds the phase
/// distance, with `reversed` flipping the velocity comparison.
pub fn sample(
    state: &SimState,
    res: Resolution,
    reference: Option<(&SimState, bool)>,
) -> Result<TraceSample> {
    let (dist_pos, dist_vel) = match reference {
        Some((r, reversed)) => {
            let (p, v) = phase_distance_signed(r, state, reversed)?;
            (Some(p), Some(v))
        }
        None => (None, None),
    };
    Ok(TraceSample {
        t: state.time,
        s_pos: positional_entropy(state, res.grid_x, res.grid_y)?,
        s_vel: velocity_entropy(state, res.velocity_bins)?,
        cv: equipartition_index(state).ok(),
        dist_pos,
        dist_vel,
    })
}

/// Mean velocity, handy for momentum checks on subsets.
pub fn mean_velocity(state: &SimState) -> Vec2 {
    state.momentum() / state.disks.iter().map(|d| d.mass).sum::<f64>()
}
