use serde::{Deserialize, Serialize};

use super::{CONTACT_TOLERANCE, OVERLAP_TOLERANCE};
use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Axis-aligned rectangular table `[0, width] x [0, height]` with reflecting walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub width: f64,
    pub height: f64,
}

impl Table {
    pub fn new(width: f64, height: f64) -> Self {
        Table { width, height }
    }

    pub fn square(side: f64) -> Self {
        Table::new(side, side)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// The four walls, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    /// x = 0
    Left,
    /// x = width
    Right,
    /// y = 0
    Bottom,
    /// y = height
    Top,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Left, Wall::Right, Wall::Bottom, Wall::Top];

    /// Unit normal pointing into the table.
    pub fn inward_normal(self) -> Vec2 {
        match self {
            Wall::Left => Vec2::new(1.0, 0.0),
            Wall::Right => Vec2::new(-1.0, 0.0),
            Wall::Bottom => Vec2::new(0.0, 1.0),
            Wall::Top => Vec2::new(0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub id: usize,
    pub position: Vec2,
    pub velocity: Vec2,
    pub radius: f64,
    pub mass: f64,
}

impl Disk {
    pub fn new(id: usize, position: Vec2, velocity: Vec2, radius: f64) -> Self {
        Disk {
            id,
            position,
            velocity,
            radius,
            mass: 1.0,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocity.norm_sq()
    }

    pub fn momentum(&self) -> Vec2 {
        self.velocity * self.mass
    }
}

/// Pair events sort before wall events at equal times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Pair,
    Wall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub time: f64,
    pub kind: EventKind,
    pub ids: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall: Option<Wall>,
}

/// Continuous phase-space state shared by both engines and all observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub time: f64,
    pub disks: Vec<Disk>,
    pub table: Table,
    pub collision_count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub event_log: Option<Vec<LoggedEvent>>,
}

impl SimState {
    pub fn new(table: Table, disks: Vec<Disk>) -> Self {
        SimState {
            time: 0.0,
            disks,
            table,
            collision_count: 0,
            event_log: None,
        }
    }

    pub fn with_logging(mut self) -> Self {
        self.event_log.get_or_insert_with(Vec::new);
        self
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.disks.iter().map(Disk::kinetic_energy).sum()
    }

    /// Total momentum, summed in disk order.
    pub fn momentum(&self) -> Vec2 {
        self.disks
            .iter()
            .fold(Vec2::ZERO, |acc, d| acc + d.momentum())
    }

    /// Checks radii, masses, wall clearance and pairwise overlap.
    pub fn validate(&self) -> Result<()> {
        let t = self.table;
        if !(t.width > 0.0 && t.height > 0.0) {
            return Err(Error::CorruptState(format!(
                "table must have positive size, got {} x {}",
                t.width, t.height
            )));
        }
        for (i, d) in self.disks.iter().enumerate() {
            if d.id != i {
                return Err(Error::CorruptState(format!(
                    "disk at index {i} carries id {}",
                    d.id
                )));
            }
            if !(d.radius > 0.0 && d.mass > 0.0) {
                return Err(Error::CorruptState(format!(
                    "disk {i} has non-positive radius or mass"
                )));
            }
            if !(d.position.is_finite() && d.velocity.is_finite()) {
                return Err(Error::CorruptState(format!("disk {i} is not finite")));
            }
            check_inside(d, &t)?;
        }
        for i in 0..self.disks.len() {
            for j in (i + 1)..self.disks.len() {
                check_no_overlap(&self.disks[i], &self.disks[j])?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_inside(d: &Disk, t: &Table) -> Result<()> {
    let p = d.position;
    let r = d.radius - CONTACT_TOLERANCE;
    if p.x < r || p.x > t.width - r || p.y < r || p.y > t.height - r {
        return Err(Error::CorruptState(format!(
            "disk {} at ({}, {}) is outside the table",
            d.id, p.x, p.y
        )));
    }
    Ok(())
}

pub(crate) fn check_no_overlap(a: &Disk, b: &Disk) -> Result<()> {
    let dist = (a.position - b.position).norm();
    if dist < a.radius + b.radius - OVERLAP_TOLERANCE {
        return Err(Error::CorruptState(format!(
            "disks {} and {} overlap (distance {dist}, contact {})",
            a.id,
            b.id,
            a.radius + b.radius
        )));
    }
    Ok(())
}
