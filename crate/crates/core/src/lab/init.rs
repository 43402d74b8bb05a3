use rand_distr::{Distribution, StandardNormal};

use super::config::{InitialCondition, ScenarioConfig};
use crate::engine::{Disk, SimState, Table};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::vec2::Vec2;

const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

/// Builds the continuous initial state described by `cfg`.
pub fn build_initial(cfg: &ScenarioConfig) -> Result<SimState> {
    cfg.validate()?;
    let state = match &cfg.initial {
        InitialCondition::OrderedCluster => ordered_cluster(cfg)?,
        InitialCondition::Thermal => thermal(cfg)?,
        InitialCondition::Explicit { .. } => {
            SimState::new(cfg.table, cfg.explicit_disks().expect("explicit initial condition"))
        }
    };
    state.validate()?;
    Ok(state)
}

/// Lattice offsets of a near-square `cols x rows` block holding `n` disks,
/// centred on the origin.
fn block_offsets(n: usize, spacing: f64) -> Vec<Vec2> {
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let x0 = -0.5 * (cols - 1) as f64 * spacing;
    let y0 = -0.5 * (rows - 1) as f64 * spacing;
    (0..n)
        .map(|k| Vec2::new(x0 + (k % cols) as f64 * spacing, y0 + (k / cols) as f64 * spacing))
        .collect()
}

fn ordered_cluster(cfg: &ScenarioConfig) -> Result<SimState> {
    let n = cfg.n_disks;
    let t = cfg.table;
    let r = cfg.radius;
    let centre = Vec2::new(t.width / 2.0, t.height / 2.0);
    let spacing = 2.0 * r * (1.0 + cfg.cluster_gap);
    let block = block_offsets(n - 1, spacing);
    let half_extent = block
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0, f64::max)
        + r;
    if half_extent > 0.5 * t.width.min(t.height) {
        return Err(Error::param(
            "n_disks",
            format!("a block of {} disks does not fit on the table", n - 1),
        ));
    }

    // incident disk on a circle around the block, at a seeded angle
    let block_radius = half_extent * std::f64::consts::SQRT_2;
    let ring = 0.5 * (block_radius + r + 0.5 * t.width.min(t.height) - r);
    if ring <= block_radius + r {
        return Err(Error::param(
            "n_disks",
            "no room left between the block and the walls for the incident disk",
        ));
    }
    let mut rng = SplitMix64::stream(cfg.seed, "incident");
    let angle = rng.uniform_in(0.0, std::f64::consts::TAU);
    let dir = Vec2::new(angle.cos(), angle.sin());
    let start = centre + dir * ring;

    let mut disks = Vec::with_capacity(n);
    disks.push(Disk::new(0, start, -dir * cfg.incident_speed, r).with_mass(cfg.mass));
    for (k, off) in block.into_iter().enumerate() {
        disks.push(Disk::new(k + 1, centre + off, Vec2::ZERO, r).with_mass(cfg.mass));
    }
    let mut state = SimState::new(t, disks);
    if cfg.total_energy.is_some() {
        rescale_energy(&mut state, cfg.energy());
    }
    Ok(state)
}

fn rescale_energy(state: &mut SimState, energy: f64) {
    let e = state.kinetic_energy();
    if e > 0.0 {
        let s = (energy / e).sqrt();
        for d in &mut state.disks {
            d.velocity = d.velocity * s;
        }
    }
}

/// Uniform rejection sampling of non-overlapping centres.
pub(crate) fn place_uniform(
    rng: &mut SplitMix64,
    table: Table,
    radius: f64,
    n: usize,
) -> Result<Vec<Vec2>> {
    let packing = n as f64 * std::f64::consts::PI * radius * radius / table.area();
    if packing > 0.5 || 2.0 * radius >= table.width.min(table.height) {
        return Err(Error::param(
            "n_disks",
            format!("{n} disks of radius {radius} cannot be placed at random on this table"),
        ));
    }
    let mut out: Vec<Vec2> = Vec::with_capacity(n);
    for i in 0..n {
        let mut attempts = 0;
        let p = loop {
            if attempts == MAX_PLACEMENT_ATTEMPTS {
                return Err(Error::Placement(format!("no room for disk {i} after {attempts} attempts")));
            }
            attempts += 1;
            let p = Vec2::new(
                rng.uniform_in(radius, table.width - radius),
                rng.uniform_in(radius, table.height - radius),
            );
            if out.iter().all(|q| (p - *q).norm() >= 2.0 * radius) {
                break p;
            }
        };
        out.push(p);
    }
    Ok(out)
}

fn thermal(cfg: &ScenarioConfig) -> Result<SimState> {
    let n = cfg.n_disks;
    let mut pos_rng = SplitMix64::stream(cfg.seed, "thermal-positions");
    let positions = place_uniform(&mut pos_rng, cfg.table, cfg.radius, n)?;
    let mut vel_rng = SplitMix64::stream(cfg.seed, "thermal-velocities");
    let mut v: Vec<Vec2> = (0..n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut vel_rng);
            let y: f64 = StandardNormal.sample(&mut vel_rng);
            Vec2::new(x, y)
        })
        .collect();
    if n > 1 {
        let mean = v.iter().fold(Vec2::ZERO, |a, &b| a + b) / n as f64;
        for w in &mut v {
            *w -= mean;
        }
        let e: f64 = v.iter().map(|w| 0.5 * cfg.mass * w.norm_sq()).sum();
        let s = if e > 0.0 { (cfg.energy() / e).sqrt() } else { 0.0 };
        for w in &mut v {
            *w = *w * s;
        }
        // the last velocity cancels the in-order momentum sum exactly
        let rest = v[..n - 1].iter().fold(Vec2::ZERO, |a, &b| a + b * cfg.mass);
        v[n - 1] = -rest / cfg.mass;
    } else {
        v[0] = Vec2::ZERO;
    }
    let disks = positions
        .into_iter()
        .zip(v)
        .enumerate()
        .map(|(i, (p, w))| Disk::new(i, p, w, cfg.radius).with_mass(cfg.mass))
        .collect();
    Ok(SimState::new(cfg.table, disks))
}
