//! One interface over both engines so scenarios are engine-agnostic.

use super::config::{AnnihilationEvent, EngineKind, ScenarioConfig};
use super::ops::{self, AnnihilationOutcome};
use crate::engine::bitrev::BitrevState;
use crate::engine::event::{reverse_momenta, EventEngine, EventStats};
use crate::engine::SimState;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::vec2::Vec2;

#[derive(Debug, Clone)]
pub enum Dynamics {
    Event(EventEngine),
    Bitrev(BitrevState),
}

impl Dynamics {
    /// Starts `engine` from a continuous state. The bit-reversible engine
    /// quantizes it.
    pub fn new(cfg: &ScenarioConfig, initial: SimState) -> Result<Self> {
        Ok(match cfg.engine {
            EngineKind::Event => Dynamics::Event(EventEngine::new(initial)?),
            EngineKind::Bitrev => Dynamics::Bitrev(BitrevState::from_simstate(&initial, cfg.bitrev_params())?),
        })
    }

    /// Rounds `t` to a time the engine can actually stop at.
    pub fn snap(&self, t: f64) -> f64 {
        match self {
            Dynamics::Event(_) => t,
            Dynamics::Bitrev(s) => (t / s.params.dt).round() * s.params.dt,
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Dynamics::Event(e) => e.time(),
            Dynamics::Bitrev(s) => s.time(),
        }
    }

    pub fn collisions(&self) -> u64 {
        match self {
            Dynamics::Event(e) => e.state().collision_count,
            Dynamics::Bitrev(_) => 0,
        }
    }

    pub fn stats(&self) -> EventStats {
        match self {
            Dynamics::Event(e) => e.stats(),
            Dynamics::Bitrev(_) => EventStats::default(),
        }
    }

    pub fn snapshot(&self) -> SimState {
        match self {
            Dynamics::Event(e) => e.state().clone(),
            Dynamics::Bitrev(s) => observable(s),
        }
    }

    /// The state as it looks after one more reversal: velocities negated
    /// (event) or frames swapped (bitrev). Used to compare a reversed run
    /// with the forward reference.
    pub fn mirrored_snapshot(&self) -> SimState {
        match self {
            Dynamics::Event(e) => {
                let mut s = e.state().clone();
                reverse_momenta(&mut s);
                s
            }
            Dynamics::Bitrev(s) => {
                let mut m = s.clone();
                m.reverse();
                observable(&m)
            }
        }
    }

    pub fn as_bitrev(&self) -> Option<&BitrevState> {
        match self {
            Dynamics::Bitrev(s) => Some(s),
            Dynamics::Event(_) => None,
        }
    }

    /// Advances to time `t` (snapped for the bitrev engine).
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        match self {
            Dynamics::Event(e) => {
                e.advance_until(t, None)?;
            }
            Dynamics::Bitrev(s) => {
                let target = (t / s.params.dt).round() as u64;
                if target > s.step {
                    s.run(target - s.step)?;
                }
            }
        }
        Ok(())
    }

    /// Advances to `t` but stops right after the `max_events`-th event.
    /// Returns `true` if the event limit was reached first.
    pub fn advance_events(&mut self, t: f64, max_events: u64) -> Result<bool> {
        match self {
            Dynamics::Event(e) => e.advance_until(t, Some(max_events)),
            Dynamics::Bitrev(_) => Err(Error::Unsupported(
                "the bit-reversible engine has no discrete events".into(),
            )),
        }
    }

    pub fn reverse(&mut self) -> Result<()> {
        match self {
            Dynamics::Event(e) => e.reverse_momenta(),
            Dynamics::Bitrev(s) => {
                s.reverse();
                Ok(())
            }
        }
    }

    pub fn perturb(&mut self, disk: usize, delta: f64, rng: &mut SplitMix64) -> Result<()> {
        match self {
            Dynamics::Event(e) => {
                let mut res = Ok(());
                e.modify(|s| res = ops::perturb(s, disk, delta, rng))?;
                res
            }
            Dynamics::Bitrev(s) => ops::perturb_bitrev(s, disk, delta, rng),
        }
    }

    pub fn annihilate(&mut self, ev: &AnnihilationEvent) -> Result<AnnihilationOutcome> {
        match self {
            Dynamics::Event(e) => {
                let mut res = None;
                e.modify(|s| res = Some(ops::apply_annihilation(s, ev)))?;
                res.expect("closure ran")
            }
            Dynamics::Bitrev(s) => {
                let t = s.time();
                ops::apply_annihilation_bitrev(s, ev, t)
            }
        }
    }
}

// Soft walls let a fast disk's centre sit briefly past the edge; the
// coarse-grained view pins it to the boundary.
fn observable(s: &BitrevState) -> SimState {
    let mut st = s.to_simstate();
    let (w, h) = (st.table.width, st.table.height);
    for d in &mut st.disks {
        d.position = Vec2::new(d.position.x.clamp(0.0, w), d.position.y.clamp(0.0, h));
    }
    st
}
