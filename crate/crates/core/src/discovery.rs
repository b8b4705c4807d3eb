//! Hello exchange, neighbour-table upkeep, the forwarding sector and
//! LST-driven hello scheduling.

use alloc::collections::BTreeMap;

use crate::engine::UavState;
use crate::link::LstResult;
use crate::mobility::{Kinematics, Position3};
use crate::node::NodeId;

/// Boundary slack for the sector test (radians and relative distance).
const SECTOR_EPS: f64 = 1e-9;

/// Per-layer delivery ratios, each in [0, 1].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReceptionRatios {
    pub l2: f64,
    pub l3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelloMessage {
    pub origin: NodeId,
    pub position: Position3,
    /// Carried so receivers can classify relative motion for link sustenance
    /// time.
    pub kinematics: Kinematics,
    pub residual_energy: f64,
    pub reception: ReceptionRatios,
    pub beta: f64,
    pub gamma: f64,
    pub best_q: f64,
    /// Sender's current hello period, ticks.
    pub interval_ticks: u64,
}

/// Snapshot of a UAV's advertised state. `best_q` is 0 for an empty Q-table.
pub fn broadcast_hello(uav: &UavState, beta: f64, gamma: f64) -> HelloMessage {
    HelloMessage {
        origin: uav.id,
        position: uav.position,
        kinematics: uav.kinematics,
        residual_energy: uav.battery.residual(),
        reception: uav.counters.ratios(),
        beta,
        gamma,
        best_q: uav.q.max_value(),
        interval_ticks: uav.hello_period,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighbourRecord {
    pub hello: HelloMessage,
    pub last_heard: u64,
    /// Inside the receiver's forwarding sector.
    pub candidate: bool,
}

/// A cone of radius `radius` and half-aperture `half_angle` around `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub apex: Position3,
    /// Unit vector.
    pub axis: Position3,
    pub radius: f64,
    pub half_angle: f64,
}

impl Sector {
    /// Sector at `apex` pointing at `target`. A degenerate axis points down.
    pub fn toward(apex: Position3, target: Position3, radius: f64, half_angle: f64) -> Self {
        let v = target - apex;
        let n = v.norm();
        let axis = if n > 0.0 { v.scale(1.0 / n) } else { Position3::new(0.0, 0.0, -1.0) };
        Sector { apex, axis, radius, half_angle }
    }

    /// Angle between the axis and `p − apex`; zero at the apex.
    pub fn divergence(&self, p: &Position3) -> f64 {
        let v = *p - self.apex;
        let d = v.norm();
        if d == 0.0 {
            return 0.0;
        }
        libm::acos((v.dot(&self.axis) / d).max(-1.0).min(1.0))
    }
}

/// Inclusive on both the radius and the half-angle.
pub fn in_sector(candidate: &Position3, sector: &Sector) -> bool {
    let d = (*candidate - sector.apex).norm();
    d <= sector.radius * (1.0 + SECTOR_EPS) && sector.divergence(candidate) <= sector.half_angle + SECTOR_EPS
}

/// Neighbours heard recently, keyed by originator.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighbourTable {
    records: BTreeMap<NodeId, NeighbourRecord>,
}

impl NeighbourTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Upserts the sender and purges stale entries. Returns `true` when the
    /// originator was not in the table before.
    pub fn process_hello(&mut self, msg: HelloMessage, sector: &Sector, now: u64, expiry_ticks: u64) -> bool {
        let candidate = in_sector(&msg.position, sector);
        let fresh = self
            .records
            .insert(msg.origin, NeighbourRecord { hello: msg, last_heard: now, candidate })
            .is_none();
        self.purge(now, expiry_ticks);
        fresh
    }

    /// Drops records not refreshed in time. A record lives for `expiry_ticks`
    /// or the sender's advertised hello period, whichever is longer.
    pub fn purge(&mut self, now: u64, expiry_ticks: u64) -> usize {
        let before = self.records.len();
        self.records.retain(|_, r| now.saturating_sub(r.last_heard) <= record_lifetime(&r.hello, expiry_ticks));
        before - self.records.len()
    }

    /// Re-evaluates candidate flags after the owner moved.
    pub fn refresh_sector(&mut self, sector: &Sector) {
        for r in self.records.values_mut() {
            r.candidate = in_sector(&r.hello.position, sector);
        }
    }

    pub fn get(&self, id: NodeId) -> Option<&NeighbourRecord> {
        self.records.get(&id)
    }

    pub fn remove(&mut self, id: NodeId) -> Option<NeighbourRecord> {
        self.records.remove(&id)
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &NeighbourRecord> {
        self.records.values()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &NeighbourRecord> {
        self.records.values().filter(|r| r.candidate)
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates().count()
    }
}

pub fn record_lifetime(hello: &HelloMessage, expiry_ticks: u64) -> u64 {
    expiry_ticks.max(hello.interval_ticks)
}

/// Hello cadence in ticks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelloSchedule {
    pub tick_seconds: f64,
    pub base_ticks: u64,
    pub max_ticks: u64,
}

/// Tick of the next hello: `now + clamp(LST, base, max)`, or `now + base`
/// when the geometry is static.
pub fn next_hello_interval(now: u64, lst: LstResult, schedule: &HelloSchedule) -> u64 {
    let base = schedule.base_ticks.max(1);
    let wait = match lst {
        LstResult::Finite(t) => {
            let ticks = libm::floor(t / schedule.tick_seconds);
            if ticks >= schedule.max_ticks as f64 {
                schedule.max_ticks
            } else {
                (ticks.max(0.0) as u64).max(base)
            }
        }
        LstResult::Equidistant => base,
    };
    now + wait.max(base).min(schedule.max_ticks.max(base))
}

/// The most urgent of several per-neighbour LSTs.
pub fn aggregate_lst(values: impl IntoIterator<Item = LstResult>) -> LstResult {
    values
        .into_iter()
        .filter_map(|l| l.seconds())
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
        .map_or(LstResult::Equidistant, LstResult::Finite)
}
