//! Event-driven elastic hard-disk dynamics.
//!
//! The engine jumps from collision to collision: every pair and every
//! disk/wall combination has a predicted contact time, all disks drift
//! ballistically to the earliest one, it is resolved, and only the rows of the
//! prediction table that involve the participants are recomputed.

use super::state::{check_inside, check_no_overlap};
use super::{Disk, EventKind, LoggedEvent, SimState, Table, Wall, CONTACT_TOLERANCE};
use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Events whose predicted times differ by less than this are simultaneous.
pub const TIE_WINDOW: f64 = 1e-12;

/// Earliest time in `[0, t_max]` at which two disks touch while approaching.
///
/// A pair already in contact (within tolerance) and approaching collides at
/// `t = 0`; this is what lets a reversal taken exactly at a collision undo it.
pub fn predict_pair_collision(d1: &Disk, d2: &Disk, t_max: f64) -> Result<Option<f64>> {
    check_no_overlap(d1, d2)?;
    let dx = d2.position - d1.position;
    let dv = d2.velocity - d1.velocity;
    let b = dx.dot(dv);
    if b >= 0.0 {
        return Ok(None);
    }
    let sigma = d1.radius + d2.radius;
    let a = dv.norm_sq();
    let c = dx.norm_sq() - sigma * sigma;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return Ok(None);
    }
    // smaller root written as c / (-b + sqrt(disc)) to avoid cancellation
    let t = if c <= 0.0 { 0.0 } else { c / (-b + disc.sqrt()) };
    Ok((t <= t_max).then_some(t))
}

/// Earliest time the disk surface reaches a wall, with the wall hit.
pub fn predict_wall_collision(d: &Disk, table: &Table) -> Result<Option<(f64, Wall)>> {
    check_inside(d, table)?;
    let mut best: Option<(f64, Wall)> = None;
    for wall in Wall::ALL {
        let t = match wall {
            Wall::Left if d.velocity.x < 0.0 => (d.position.x - d.radius) / -d.velocity.x,
            Wall::Right if d.velocity.x > 0.0 => (table.width - d.radius - d.position.x) / d.velocity.x,
            Wall::Bottom if d.velocity.y < 0.0 => (d.position.y - d.radius) / -d.velocity.y,
            Wall::Top if d.velocity.y > 0.0 => (table.height - d.radius - d.position.y) / d.velocity.y,
            _ => continue,
        };
        let t = t.max(0.0);
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, wall));
        }
    }
    Ok(best)
}

/// Elastic resolution of a touching, approaching pair.
///
/// Only the velocity components along the line of centers change.
pub fn resolve_pair_collision(d1: &Disk, d2: &Disk) -> Result<(Vec2, Vec2)> {
    let dx = d2.position - d1.position;
    let dist = dx.norm();
    let sigma = d1.radius + d2.radius;
    if (dist - sigma).abs() > CONTACT_TOLERANCE {
        return Err(Error::ContractViolation(format!(
            "disks {} and {} are not in contact (distance {dist}, contact {sigma})",
            d1.id, d2.id
        )));
    }
    let n = dx / dist;
    let closing = (d1.velocity - d2.velocity).dot(n);
    if closing <= 0.0 {
        return Err(Error::ContractViolation(format!(
            "disks {} and {} are not approaching",
            d1.id, d2.id
        )));
    }
    if d1.mass == d2.mass {
        let dv = n * closing;
        return Ok((d1.velocity - dv, d2.velocity + dv));
    }
    let m = d1.mass + d2.mass;
    let j = 2.0 * d1.mass * d2.mass / m * closing;
    Ok((
        d1.velocity - n * (j / d1.mass),
        d2.velocity + n * (j / d2.mass),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallBounce {
    pub velocity: Vec2,
    /// Zero normal velocity: nothing to reflect.
    pub degenerate: bool,
}

/// Specular reflection off `wall`.
pub fn resolve_wall_collision(d: &Disk, wall: Wall) -> Result<WallBounce> {
    let n = wall.inward_normal();
    let vn = d.velocity.dot(n);
    if vn == 0.0 {
        return Ok(WallBounce {
            velocity: d.velocity,
            degenerate: true,
        });
    }
    if vn > 0.0 {
        return Err(Error::ContractViolation(format!(
            "disk {} is moving away from wall {wall:?}",
            d.id
        )));
    }
    let mut v = d.velocity;
    match wall {
        Wall::Left | Wall::Right => v.x = -v.x,
        Wall::Bottom | Wall::Top => v.y = -v.y,
    }
    Ok(WallBounce {
        velocity: v,
        degenerate: false,
    })
}

/// Negates every velocity; positions, time and log are untouched.
pub fn reverse_momenta(state: &mut SimState) {
    for d in &mut state.disks {
        d.velocity = -d.velocity;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Simulated time to advance by.
    Duration(f64),
    /// Number of events (pair or wall) to process.
    Collisions(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventTarget {
    Pair(usize, usize),
    Wall(usize, Wall),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    pub target: EventTarget,
}

impl CollisionEvent {
    pub fn kind(&self) -> EventKind {
        match self.target {
            EventTarget::Pair(..) => EventKind::Pair,
            EventTarget::Wall(..) => EventKind::Wall,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventStats {
    pub pair: u64,
    pub wall: u64,
}

/// Owns a [`SimState`] together with its table of predicted event times.
#[derive(Debug, Clone)]
pub struct EventEngine {
    state: SimState,
    /// Absolute predicted times, upper triangle in row-major order.
    pair_times: Vec<f64>,
    wall_times: Vec<Option<(f64, Wall)>>,
    stats: EventStats,
}

impl EventEngine {
    pub fn new(state: SimState) -> Result<Self> {
        state.validate()?;
        let n = state.disks.len();
        let mut engine = EventEngine {
            state,
            pair_times: vec![f64::INFINITY; n * n.saturating_sub(1) / 2],
            wall_times: vec![None; n],
            stats: EventStats::default(),
        };
        engine.rebuild()?;
        Ok(engine)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn into_state(self) -> SimState {
        self.state
    }

    pub fn stats(&self) -> EventStats {
        self.stats
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    /// Applies `f` to the state, then re-validates and re-predicts everything.
    pub fn modify<F: FnOnce(&mut SimState)>(&mut self, f: F) -> Result<()> {
        f(&mut self.state);
        self.state.validate()?;
        self.rebuild()
    }

    pub fn reverse_momenta(&mut self) -> Result<()> {
        self.modify(reverse_momenta)
    }

    #[inline]
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        let n = self.state.disks.len();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn rebuild(&mut self) -> Result<()> {
        for i in 0..self.state.disks.len() {
            self.repredict_disk(i)?;
        }
        Ok(())
    }

    fn repredict_disk(&mut self, i: usize) -> Result<()> {
        let now = self.state.time;
        let n = self.state.disks.len();
        for j in 0..n {
            if j == i {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let t = predict_pair_collision(&self.state.disks[a], &self.state.disks[b], f64::INFINITY)?
                .map_or(f64::INFINITY, |dt| now + dt);
            let k = self.pair_index(a, b);
            self.pair_times[k] = t;
        }
        self.wall_times[i] =
            predict_wall_collision(&self.state.disks[i], &self.state.table)?.map(|(dt, w)| (now + dt, w));
        Ok(())
    }

    /// The next event after deterministic tie-breaking: among events within
    /// [`TIE_WINDOW`] of the earliest, pairs win over walls, then the lowest
    /// participant ids.
    pub fn next_event(&self) -> Option<CollisionEvent> {
        let t_pair = self.pair_times.iter().copied().fold(f64::INFINITY, f64::min);
        let t_wall = self
            .wall_times
            .iter()
            .flatten()
            .map(|&(t, _)| t)
            .fold(f64::INFINITY, f64::min);
        let t_min = t_pair.min(t_wall);
        if !t_min.is_finite() {
            return None;
        }
        let cutoff = t_min + TIE_WINDOW;
        let n = self.state.disks.len();
        if t_pair <= cutoff {
            for i in 0..n {
                for j in (i + 1)..n {
                    let t = self.pair_times[self.pair_index(i, j)];
                    if t <= cutoff {
                        return Some(CollisionEvent {
                            time: t,
                            target: EventTarget::Pair(i, j),
                        });
                    }
                }
            }
        }
        self.wall_times.iter().enumerate().find_map(|(i, w)| match *w {
            Some((t, wall)) if t <= cutoff => Some(CollisionEvent {
                time: t,
                target: EventTarget::Wall(i, wall),
            }),
            _ => None,
        })
    }

    fn drift(&mut self, dt: f64) {
        if dt > 0.0 {
            for d in &mut self.state.disks {
                d.position += d.velocity * dt;
            }
        }
    }

    fn resolve(&mut self, ev: CollisionEvent) -> Result<()> {
        let disks = &mut self.state.disks;
        match ev.target {
            EventTarget::Pair(i, j) => {
                let (v1, v2) = resolve_pair_collision(&disks[i], &disks[j])?;
                disks[i].velocity = v1;
                disks[j].velocity = v2;
                self.stats.pair += 1;
            }
            EventTarget::Wall(i, wall) => {
                let bounce = resolve_wall_collision(&disks[i], wall)?;
                disks[i].velocity = bounce.velocity;
                self.stats.wall += 1;
            }
        }
        self.state.collision_count += 1;
        if let Some(log) = self.state.event_log.as_mut() {
            let (ids, wall) = match ev.target {
                EventTarget::Pair(i, j) => (vec![i, j], None),
                EventTarget::Wall(i, w) => (vec![i], Some(w)),
            };
            log.push(LoggedEvent {
                time: ev.time.max(self.state.time),
                kind: ev.kind(),
                ids,
                wall,
            });
        }
        match ev.target {
            EventTarget::Pair(i, j) => {
                self.repredict_disk(i)?;
                self.repredict_disk(j)?;
            }
            EventTarget::Wall(i, _) => self.repredict_disk(i)?,
        }
        Ok(())
    }

    /// Processes events up to time `t_end` or until `max_events` have been
    /// handled, whichever comes first. Returns `true` when the event limit
    /// stopped the run (the state then sits exactly at the last event).
    pub fn advance_until(&mut self, t_end: f64, max_events: Option<u64>) -> Result<bool> {
        let mut handled = 0u64;
        loop {
            if max_events.is_some_and(|m| handled >= m) {
                return Ok(true);
            }
            match self.next_event() {
                Some(ev) if ev.time <= t_end => {
                    let dt = ev.time - self.state.time;
                    self.drift(dt);
                    self.state.time = self.state.time.max(ev.time);
                    self.resolve(ev)?;
                    handled += 1;
                }
                _ => {
                    if t_end.is_finite() {
                        let dt = t_end - self.state.time;
                        self.drift(dt);
                        self.state.time = self.state.time.max(t_end);
                    }
                    return Ok(false);
                }
            }
        }
    }

    pub fn advance(&mut self, budget: Budget) -> Result<()> {
        match budget {
            Budget::Duration(dt) => {
                if !(dt >= 0.0) {
                    return Err(Error::param("budget", "duration must be non-negative"));
                }
                self.advance_until(self.state.time + dt, None)?;
            }
            Budget::Collisions(k) => {
                // event starvation: with nothing left to collide the state stays put
                self.advance_until(f64::INFINITY, Some(k))?;
            }
        }
        Ok(())
    }
}

/// Convenience wrapper: advance a bare state by `budget`.
pub fn advance(state: SimState, budget: Budget) -> Result<SimState> {
    let mut engine = EventEngine::new(state)?;
    engine.advance(budget)?;
    Ok(engine.into_state())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(id: usize, p: (f64, f64), v: (f64, f64), r: f64) -> Disk {
        Disk::new(id, Vec2::new(p.0, p.1), Vec2::new(v.0, v.1), r)
    }

    /// First root of g(t) = |Δx + Δv t|² - σ² by bisection in exact rational
    /// arithmetic on [0, t*], t* being the time of closest approach.
    fn bisection_contact(d1: &Disk, d2: &Disk, t_max: f64) -> Option<f64> {
        use num_rational::BigRational;
        use num_traits::{ToPrimitive, Zero};
        let q = |x: f64| BigRational::from_float(x).unwrap();
        let (dx, dy) = (q(d2.position.x) - q(d1.position.x), q(d2.position.y) - q(d1.position.y));
        let (vx, vy) = (q(d2.velocity.x) - q(d1.velocity.x), q(d2.velocity.y) - q(d1.velocity.y));
        let sigma = q(d1.radius) + q(d2.radius);
        let g = |t: &BigRational| {
            let x = &dx + &vx * t;
            let y = &dy + &vy * t;
            &x * &x + &y * &y - &sigma * &sigma
        };
        let vv = &vx * &vx + &vy * &vy;
        if vv.is_zero() {
            return None;
        }
        let t_star = -(&dx * &vx + &dy * &vy) / vv;
        if t_star <= BigRational::zero() || t_star > q(t_max) || g(&t_star) > BigRational::zero() {
            return None;
        }
        let (mut a, mut b) = (BigRational::zero(), t_star);
        let two = q(2.0);
        for _ in 0..80 {
            let m = (&a + &b) / &two;
            if g(&m) > BigRational::zero() {
                a = m;
            } else {
                b = m;
            }
        }
        b.to_f64()
    }

    #[test]
    fn head_on_gap_closure() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (4.0, 0.0), (0.0, 0.0), 0.5);
        assert_eq!(predict_pair_collision(&a, &b, 10.0).unwrap(), Some(3.0));
        assert_eq!(predict_pair_collision(&a, &b, 2.0).unwrap(), None);
    }

    #[test]
    fn receding_pair_never_collides() {
        let a = disk(0, (0.0, 0.0), (-1.0, 0.0), 0.5);
        let b = disk(1, (4.0, 0.0), (1.0, 0.0), 0.5);
        assert_eq!(predict_pair_collision(&a, &b, 100.0).unwrap(), None);
    }

    #[test]
    fn oblique_contact_matches_bisection() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (3.0, 1.0), (0.0, 0.0), 0.5);
        let t = predict_pair_collision(&a, &b, 10.0).unwrap().unwrap();
        let oracle = bisection_contact(&a, &b, 10.0).unwrap();
        assert!((t - oracle).abs() < 1e-9, "{t} vs {oracle}");
        // grazing by y-offset 1 == contact distance 1: the oracle value is 3.0
        assert!((t - 3.0).abs() < 1e-9);
    }

    #[test]
    fn overlapping_pair_is_corrupt() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (0.5, 0.0), (0.0, 0.0), 0.5);
        assert!(matches!(
            predict_pair_collision(&a, &b, 10.0),
            Err(Error::CorruptState(_))
        ));
    }

    #[test]
    fn touching_and_approaching_collides_now() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (1.0, 0.0), (0.0, 0.0), 0.5);
        assert_eq!(predict_pair_collision(&a, &b, 1.0).unwrap(), Some(0.0));
    }

    #[test]
    fn wall_prediction_examples() {
        let t = Table::square(10.0);
        let d = disk(0, (1.0, 1.0), (1.0, 0.0), 0.5);
        assert_eq!(predict_wall_collision(&d, &t).unwrap(), Some((8.5, Wall::Right)));
        let still = disk(0, (1.0, 1.0), (0.0, 0.0), 0.5);
        assert_eq!(predict_wall_collision(&still, &t).unwrap(), None);
    }

    #[test]
    fn wall_prediction_matches_brute_force_enumeration() {
        let table = Table::square(10.0);
        let d = disk(0, (5.0, 5.0), (2.0, -1.0), 0.5);
        // independent enumeration of the four walls
        let candidates = [
            ((10.0 - 0.5 - 5.0) / 2.0, Wall::Right),
            ((5.0 - 0.5) / 1.0, Wall::Bottom),
        ];
        let expected = candidates
            .iter()
            .copied()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap();
        assert_eq!(predict_wall_collision(&d, &table).unwrap(), Some(expected));
        assert_eq!(expected, (2.25, Wall::Right));
    }

    #[test]
    fn disk_outside_table_is_corrupt() {
        let t = Table::square(10.0);
        let d = disk(0, (10.2, 5.0), (1.0, 0.0), 0.5);
        assert!(matches!(predict_wall_collision(&d, &t), Err(Error::CorruptState(_))));
    }

    #[test]
    fn equal_mass_head_on_exchange() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (1.0, 0.0), (0.0, 0.0), 0.5);
        let (v1, v2) = resolve_pair_collision(&a, &b).unwrap();
        assert_eq!(v1, Vec2::new(0.0, 0.0));
        assert_eq!(v2, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn resolution_is_an_involution() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.3), 0.5);
        let b = disk(1, (0.6, 0.8), (-0.2, 0.1), 0.5);
        let (v1, v2) = resolve_pair_collision(&a, &b).unwrap();
        let a2 = Disk { velocity: -v1, ..a.clone() };
        let b2 = Disk { velocity: -v2, ..b.clone() };
        let (w1, w2) = resolve_pair_collision(&a2, &b2).unwrap();
        assert!(((-w1) - a.velocity).norm() < 1e-15);
        assert!(((-w2) - b.velocity).norm() < 1e-15);
    }

    #[test]
    fn oblique_resolution_obeys_conservation_laws() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let b = disk(1, (0.6, 0.8), (0.0, 0.0), 0.5);
        let (v1, v2) = resolve_pair_collision(&a, &b).unwrap();
        let n = Vec2::new(0.6, 0.8);
        let t = Vec2::new(-0.8, 0.6);
        let p_before = a.velocity + b.velocity;
        let p_after = v1 + v2;
        assert!((p_after - p_before).norm() <= 1e-12);
        let e_before = a.velocity.norm_sq() + b.velocity.norm_sq();
        let e_after = v1.norm_sq() + v2.norm_sq();
        assert!((e_after - e_before).abs() <= 1e-12);
        assert!((v1.dot(t) - a.velocity.dot(t)).abs() <= 1e-12);
        assert!((v2.dot(t) - b.velocity.dot(t)).abs() <= 1e-12);
        let _ = n;
    }

    #[test]
    fn unequal_masses_conserve_momentum_and_energy() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.2), 0.5).with_mass(3.0);
        let b = disk(1, (1.0, 0.0), (-0.5, 0.0), 0.5).with_mass(1.0);
        let (v1, v2) = resolve_pair_collision(&a, &b).unwrap();
        let p0 = a.momentum() + b.momentum();
        let p1 = v1 * 3.0 + v2;
        assert!((p1 - p0).norm() < 1e-14);
        let e0 = a.kinetic_energy() + b.kinetic_energy();
        let e1 = 0.5 * 3.0 * v1.norm_sq() + 0.5 * v2.norm_sq();
        assert!((e1 - e0).abs() < 1e-14);
    }

    #[test]
    fn non_contacting_or_receding_pair_is_rejected() {
        let a = disk(0, (0.0, 0.0), (1.0, 0.0), 0.5);
        let far = disk(1, (3.0, 0.0), (0.0, 0.0), 0.5);
        assert!(matches!(resolve_pair_collision(&a, &far), Err(Error::ContractViolation(_))));
        let receding = disk(1, (1.0, 0.0), (2.0, 0.0), 0.5);
        assert!(matches!(resolve_pair_collision(&a, &receding), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn wall_reflection() {
        let d = disk(0, (9.5, 5.0), (2.0, 3.0), 0.5);
        let b = resolve_wall_collision(&d, Wall::Right).unwrap();
        assert_eq!(b.velocity, Vec2::new(-2.0, 3.0));
        assert!(!b.degenerate);
        let back = Disk { velocity: -b.velocity, ..d.clone() };
        let again = resolve_wall_collision(&back, Wall::Right).unwrap();
        assert_eq!(-again.velocity, d.velocity);

        let graze = disk(0, (9.5, 5.0), (0.0, 3.0), 0.5);
        let g = resolve_wall_collision(&graze, Wall::Right).unwrap();
        assert_eq!(g.velocity, Vec2::new(0.0, 3.0));
        assert!(g.degenerate);

        let away = disk(0, (9.5, 5.0), (-1.0, 0.0), 0.5);
        assert!(matches!(resolve_wall_collision(&away, Wall::Right), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn zero_budget_is_identity() {
        let s = SimState::new(
            Table::square(10.0),
            vec![disk(0, (2.0, 2.0), (1.0, 0.5), 0.5), disk(1, (6.0, 6.0), (-0.3, 0.2), 0.5)],
        );
        assert_eq!(advance(s.clone(), Budget::Duration(0.0)).unwrap(), s);
        assert_eq!(advance(s.clone(), Budget::Collisions(0)).unwrap(), s);
    }

    #[test]
    fn free_flight_is_ballistic() {
        let s = SimState::new(Table::square(10.0), vec![disk(0, (2.0, 3.0), (1.0, 0.5), 0.5)]);
        let out = advance(s, Budget::Duration(2.0)).unwrap();
        assert_eq!(out.disks[0].position, Vec2::new(4.0, 4.0));
        assert_eq!(out.time, 2.0);
        assert_eq!(out.collision_count, 0);
    }

    #[test]
    fn reverse_momenta_is_an_involution() {
        let mut s = SimState::new(
            Table::square(10.0),
            vec![disk(0, (2.0, 2.0), (1.0, 2.0), 0.5), disk(1, (6.0, 6.0), (1.0, 2.0), 0.5)],
        );
        let orig = s.clone();
        reverse_momenta(&mut s);
        assert!(s.disks.iter().all(|d| d.velocity == Vec2::new(-1.0, -2.0)));
        assert_eq!(s.time, orig.time);
        reverse_momenta(&mut s);
        assert_eq!(s, orig);
    }

    #[test]
    fn one_collision_echo() {
        let s = SimState::new(
            Table::square(20.0),
            vec![disk(0, (3.0, 10.0), (1.0, 0.1), 0.5), disk(1, (7.0, 10.3), (-0.5, 0.0), 0.5)],
        );
        let mut e = EventEngine::new(s.clone()).unwrap();
        e.advance(Budget::Collisions(1)).unwrap();
        assert_eq!(e.stats().pair, 1);
        let elapsed = e.time() - s.time;
        e.reverse_momenta().unwrap();
        e.advance(Budget::Duration(elapsed)).unwrap();
        for (a, b) in e.state().disks.iter().zip(&s.disks) {
            assert!((a.position - b.position).norm() < 1e-9);
            assert!((a.velocity + b.velocity).norm() < 1e-9);
        }
    }

    #[test]
    fn tie_break_prefers_pairs_then_low_ids() {
        // disk 0 hits the left wall and disk 1 at the same instant
        let s = SimState::new(
            Table::square(10.0),
            vec![
                disk(0, (1.5, 5.0), (-1.0, 0.0), 0.5),
                disk(1, (3.5, 5.0), (-1.0, 0.0), 0.5),
                disk(2, (5.0, 5.0), (-1.5, 0.0), 0.5),
            ],
        );
        let e = EventEngine::new(s).unwrap();
        let ev = e.next_event().unwrap();
        assert_eq!(ev.target, EventTarget::Pair(1, 2));
        assert!((ev.time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn event_log_records_collisions() {
        let s = SimState::new(Table::square(10.0), vec![disk(0, (5.0, 5.0), (1.0, 0.0), 0.5)]).with_logging();
        let out = advance(s, Budget::Collisions(2)).unwrap();
        let log = out.event_log.unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log[0].wall, Some(Wall::Right));
        assert_eq!(log[1].wall, Some(Wall::Left));
        assert!(log[0].time < log[1].time);
        assert_eq!(out.collision_count, 2);
    }
}
