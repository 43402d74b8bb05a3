//! Bit-exact time-reversible soft-disk dynamics.
//!
//! Positions are 64-bit fixed-point integers and the state is the pair of the
//! two most recent frames. The leapfrog update
//!
//! ```text
//! x[n+1] = 2 x[n] - x[n-1] + F(x[n])
//! ```
//!
//! uses only integer addition and an integer force that depends on `x[n]`
//! alone, so it can be run backwards exactly by swapping the two frames.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Neg, Sub};

use super::{Disk, SimState, Table};
use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Fixed-point units per table length.
pub const SCALE: i64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct IVec2 {
    pub x: i64,
    pub y: i64,
}

impl IVec2 {
    pub const ZERO: IVec2 = IVec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        IVec2 { x, y }
    }

    fn checked_leapfrog(cur: IVec2, prev: IVec2, force: IVec2) -> Option<IVec2> {
        let step = |c: i64, p: i64, f: i64| c.checked_mul(2)?.checked_sub(p)?.checked_add(f);
        Some(IVec2::new(step(cur.x, prev.x, force.x)?, step(cur.y, prev.y, force.y)?))
    }
}

impl From<[i64; 2]> for IVec2 {
    fn from(a: [i64; 2]) -> Self {
        IVec2::new(a[0], a[1])
    }
}

impl From<IVec2> for [i64; 2] {
    fn from(v: IVec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for IVec2 {
    type Output = IVec2;
    fn add(self, o: IVec2) -> IVec2 {
        IVec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for IVec2 {
    type Output = IVec2;
    fn sub(self, o: IVec2) -> IVec2 {
        IVec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for IVec2 {
    type Output = IVec2;
    fn neg(self) -> IVec2 {
        IVec2::new(-self.x, -self.y)
    }
}

/// Integer division rounded half away from zero.
#[inline]
pub fn div_round_half_away(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let q = (num.abs() * 2 + den) / (den * 2);
    if num < 0 {
        -q
    } else {
        q
    }
}

/// Force-law and geometry parameters, all in fixed-point units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitrevParams {
    /// Stiffness numerator: the per-step velocity kick per quantum of
    /// penetration is `stiffness / 2^stiffness_shift`.
    pub stiffness: i64,
    pub stiffness_shift: u32,
    /// Interaction diameter: centers closer than this repel.
    pub diameter: i64,
    pub width: i64,
    pub height: i64,
    /// Simulated time per step, used only when converting to continuous units.
    pub dt: f64,
}

impl BitrevParams {
    pub fn radius(&self) -> i64 {
        self.diameter / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.stiffness < 0 {
            return Err(Error::param("stiffness", "must be non-negative"));
        }
        if self.stiffness_shift > 62 {
            return Err(Error::param("stiffness_shift", "must be at most 62"));
        }
        if self.diameter <= 0 || self.diameter >= 1 << 40 {
            return Err(Error::param("diameter", "must be in (0, 2^40) quanta"));
        }
        if self.width <= self.diameter || self.height <= self.diameter {
            return Err(Error::param("table", "must be wider than one diameter"));
        }
        if self.width >= 1 << 60 || self.height >= 1 << 60 {
            return Err(Error::param("table", "must be below 2^60 quanta"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "must be positive"));
        }
        Ok(())
    }

    pub fn table(&self) -> Table {
        Table::new(self.width as f64 / SCALE as f64, self.height as f64 / SCALE as f64)
    }
}

/// Repulsion on disk `i` from one neighbour displaced by `delta = x_i - x_j`.
#[inline]
fn pair_term(delta: IVec2, p: &BitrevParams) -> IVec2 {
    let sigma = p.diameter;
    if delta.x.abs() >= sigma || delta.y.abs() >= sigma {
        return IVec2::ZERO;
    }
    let (dx, dy) = (i128::from(delta.x), i128::from(delta.y));
    let d2 = (dx * dx + dy * dy) as u128;
    let s2 = (i128::from(sigma) * i128::from(sigma)) as u128;
    if d2 >= s2 || d2 == 0 {
        // coincident centres have no defined direction
        return IVec2::ZERO;
    }
    let d = d2.isqrt() as i128;
    let depth = i128::from(sigma) - d;
    let k = i128::from(p.stiffness);
    let den = d << p.stiffness_shift;
    IVec2::new(
        div_round_half_away(k * depth * dx, den) as i64,
        div_round_half_away(k * depth * dy, den) as i64,
    )
}

#[inline]
fn wall_term(x: IVec2, p: &BitrevParams) -> IVec2 {
    let r = p.radius();
    let k = i128::from(p.stiffness);
    let den = 1i128 << p.stiffness_shift;
    let push = |depth: i64| div_round_half_away(k * i128::from(depth), den) as i64;
    let mut f = IVec2::ZERO;
    if x.x < r {
        f.x += push(r - x.x);
    }
    if x.x > p.width - r {
        f.x -= push(x.x - (p.width - r));
    }
    if x.y < r {
        f.y += push(r - x.y);
    }
    if x.y > p.height - r {
        f.y -= push(x.y - (p.height - r));
    }
    f
}

/// Integer force (per-step velocity kick) on disk `i`.
///
/// Harmonic repulsion `k (σ - d)` along the line of centres for every
/// neighbour closer than `σ`, plus `k * depth` for wall penetration; each
/// term is rounded half away from zero on its own.
pub fn force_at(x_cur: &[IVec2], i: usize, params: &BitrevParams) -> IVec2 {
    let xi = x_cur[i];
    let mut f = wall_term(xi, params);
    for (j, &xj) in x_cur.iter().enumerate() {
        if j != i {
            f = f + pair_term(xi - xj, params);
        }
    }
    f
}

/// Forces on every disk, one pass over pairs. Equal to calling
/// [`force_at`] for each index, since each pair term is odd in `delta`.
pub fn forces(x_cur: &[IVec2], params: &BitrevParams, out: &mut Vec<IVec2>) {
    out.clear();
    out.extend(x_cur.iter().map(|&x| wall_term(x, params)));
    let n = x_cur.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let t = pair_term(x_cur[i] - x_cur[j], params);
            if t != IVec2::ZERO {
                out[i] = out[i] + t;
                out[j] = out[j] - t;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BitrevState {
    pub x_prev: Vec<IVec2>,
    pub x_cur: Vec<IVec2>,
    pub params: BitrevParams,
    pub step: u64,
    #[serde(skip)]
    scratch: Vec<IVec2>,
}

impl PartialEq for BitrevState {
    fn eq(&self, other: &Self) -> bool {
        self.x_prev == other.x_prev && self.x_cur == other.x_cur && self.params == other.params && self.step == other.step
    }
}

impl BitrevState {
    pub fn new(x_prev: Vec<IVec2>, x_cur: Vec<IVec2>, params: BitrevParams) -> Result<Self> {
        params.validate()?;
        if x_prev.len() != x_cur.len() {
            return Err(Error::SizeMismatch(x_prev.len(), x_cur.len()));
        }
        Ok(BitrevState {
            x_prev,
            x_cur,
            params,
            step: 0,
            scratch: Vec::new(),
        })
    }

    /// Quantizes a continuous state: `x_cur = round(x * SCALE)` and
    /// `x_prev = x_cur - round(v * dt * SCALE)`.
    pub fn from_simstate(state: &SimState, params: BitrevParams) -> Result<Self> {
        let q = |x: f64| (x * SCALE as f64).round() as i64;
        let x_cur: Vec<IVec2> = state
            .disks
            .iter()
            .map(|d| IVec2::new(q(d.position.x), q(d.position.y)))
            .collect();
        let x_prev = state
            .disks
            .iter()
            .zip(&x_cur)
            .map(|(d, &c)| c - IVec2::new(q(d.velocity.x * params.dt), q(d.velocity.y * params.dt)))
            .collect();
        let mut s = BitrevState::new(x_prev, x_cur, params)?;
        s.step = (state.time / params.dt).round() as u64;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.x_cur.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_cur.is_empty()
    }

    /// Implicit per-step displacement `x_cur - x_prev` of every disk.
    pub fn displacements(&self) -> impl Iterator<Item = IVec2> + '_ {
        self.x_cur.iter().zip(&self.x_prev).map(|(&c, &p)| c - p)
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.params.dt
    }

    pub fn step_forward(&mut self) -> Result<()> {
        let mut f = std::mem::take(&mut self.scratch);
        forces(&self.x_cur, &self.params, &mut f);
        for (i, ((prev, cur), force)) in self.x_prev.iter_mut().zip(self.x_cur.iter_mut()).zip(&f).enumerate() {
            let next = IVec2::checked_leapfrog(*cur, *prev, *force).ok_or(Error::Overflow {
                step: self.step,
                disk: i,
            })?;
            *prev = *cur;
            *cur = next;
        }
        self.scratch = f;
        self.step += 1;
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step_forward()?;
        }
        Ok(())
    }

    /// Swaps the two frames, negating every implicit velocity exactly.
    pub fn reverse(&mut self) {
        std::mem::swap(&mut self.x_prev, &mut self.x_cur);
    }

    /// Continuous view: positions in table lengths, velocities from the
    /// last displacement, unit masses, radius `σ / 2`.
    pub fn to_simstate(&self) -> SimState {
        let scale = SCALE as f64;
        let radius = self.params.diameter as f64 / 2.0 / scale;
        let disks = self
            .x_cur
            .iter()
            .zip(self.displacements())
            .enumerate()
            .map(|(id, (&c, dv))| {
                Disk::new(
                    id,
                    Vec2::new(c.x as f64 / scale, c.y as f64 / scale),
                    Vec2::new(dv.x as f64 / scale / self.params.dt, dv.y as f64 / scale / self.params.dt),
                    radius,
                )
            })
            .collect();
        SimState {
            time: self.time(),
            disks,
            table: self.params.table(),
            collision_count: 0,
            event_log: None,
        }
    }

    /// Kinetic energy in fixed-point units, `½ Σ |x_cur - x_prev|²`.
    pub fn kinetic_energy_fixed(&self) -> f64 {
        0.5 * self
            .displacements()
            .map(|d| {
                let (x, y) = (i128::from(d.x), i128::from(d.y));
                (x * x + y * y) as f64
            })
            .sum::<f64>()
    }

    /// Penalty energy `½ κ Σ depth²` over overlapping pairs and wall
    /// contacts, in the same units as [`Self::kinetic_energy_fixed`].
    pub fn potential_energy_fixed(&self) -> f64 {
        let p = &self.params;
        let kappa = p.stiffness as f64 / (1u64 << p.stiffness_shift) as f64;
        let sigma = p.diameter as f64;
        let r = p.radius();
        let mut e = 0.0;
        for (i, &a) in self.x_cur.iter().enumerate() {
            for depth in [r - a.x, a.x - (p.width - r), r - a.y, a.y - (p.height - r)] {
                if depth > 0 {
                    e += 0.5 * kappa * (depth as f64).powi(2);
                }
            }
            for &b in &self.x_cur[i + 1..] {
                let d = ((a.x - b.x) as f64).hypot((a.y - b.y) as f64);
                if d < sigma {
                    e += 0.5 * kappa * (sigma - d).powi(2);
                }
            }
        }
        e
    }

    pub fn total_energy_fixed(&self) -> f64 {
        self.kinetic_energy_fixed() + self.potential_energy_fixed()
    }
}
