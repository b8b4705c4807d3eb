//! Runtime invariant checks. Violations are recorded, never panicked on, so a
//! long run can report every breach at the end.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::uav::{is_allowed_transition, Mode, ReceptionCounters, UavState};
use crate::discovery::record_lifetime;
use crate::link::relative_distance;
use crate::node::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    Conservation,
    Counters,
    ChargingActivity,
    ModeEdge,
    EnergyCeiling,
    EnergyMonotone,
    QBounds,
    RecordAge,
    EnergyGate,
    NeighbourRange,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub tick: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Limits the checks are measured against.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Limits {
    pub capacity: f64,
    pub threshold: f64,
    pub q_ceiling: f64,
    pub expiry_ticks: u64,
    pub range: f64,
    pub max_speed: f64,
    pub tick_seconds: f64,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Monitor {
    violations: Vec<Violation>,
    counters: Vec<ReceptionCounters>,
    residual: Vec<f64>,
    charged: Vec<bool>,
}

impl Monitor {
    pub fn new(uavs: &[UavState]) -> Self {
        Monitor {
            violations: Vec::new(),
            counters: uavs.iter().map(|u| u.counters).collect(),
            residual: uavs.iter().map(|u| u.battery.residual()).collect(),
            charged: alloc::vec![false; uavs.len()],
        }
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    fn flag(&mut self, tick: u64, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { tick, kind, detail });
    }

    pub fn on_transition(&mut self, tick: u64, id: NodeId, from: Mode, to: Mode) {
        if !is_allowed_transition(from, to) {
            self.flag(tick, ViolationKind::ModeEdge, format!("{id}: {from:?} -> {to:?}"));
        }
    }

    /// A charge step must never lower the battery. The rest of the interval
    /// may hold flight or transmission drain, so it is not checked for growth.
    pub fn on_charge(&mut self, tick: u64, uav: &UavState, index: usize, before: f64) {
        if uav.battery.residual() < before {
            self.flag(tick, ViolationKind::EnergyMonotone, format!("{} lost energy while charging", uav.id));
        }
        self.charged[index] = true;
    }

    pub fn on_transmit(&mut self, tick: u64, uav: &UavState) {
        if !uav.is_active() {
            self.flag(tick, ViolationKind::ChargingActivity, format!("{} transmitted while {:?}", uav.id, uav.mode));
        }
    }

    pub fn check_interferers(&mut self, tick: u64, uavs: &[UavState], interferers: &[NodeId]) {
        for id in interferers {
            let u = &uavs[id.index().expect("interferers are UAVs")];
            if !u.is_active() {
                self.flag(tick, ViolationKind::ChargingActivity, format!("{id} counted as interferer while inactive"));
            }
        }
    }

    pub fn check_flow(&mut self, tick: u64, injected: u64, delivered: u64, dropped: u64, in_flight: u64) {
        if injected != delivered + dropped + in_flight {
            self.flag(
                tick,
                ViolationKind::Conservation,
                format!("injected {injected} != delivered {delivered} + dropped {dropped} + in flight {in_flight}"),
            );
        }
    }

    pub fn check_state(&mut self, tick: u64, uavs: &[UavState], limits: &Limits) {
        let mut total = 0.0;
        for (i, u) in uavs.iter().enumerate() {
            let c = u.counters;
            let p = self.counters[i];
            if c.ack_l2 > c.pac_l2 || c.ack_l3 > c.pac_l3 {
                self.flag(tick, ViolationKind::Counters, format!("{}: ACK exceeds PAC {c:?}", u.id));
            }
            if c.pac_l2 < p.pac_l2 || c.ack_l2 < p.ack_l2 || c.pac_l3 < p.pac_l3 || c.ack_l3 < p.ack_l3 {
                self.flag(tick, ViolationKind::Counters, format!("{}: counter went backwards", u.id));
            }
            self.counters[i] = c;

            let e = u.battery.residual();
            total += e;
            let before = self.residual[i];
            if !self.charged[i] && e > before + 1e-9 {
                self.flag(tick, ViolationKind::EnergyMonotone, format!("{} gained energy outside Charge", u.id));
            }
            self.residual[i] = e;
            self.charged[i] = false;

            if u.is_active() && e < limits.threshold {
                self.flag(tick, ViolationKind::EnergyGate, format!("{} airborne with {e} J", u.id));
            }

            for (a, q) in u.q.iter() {
                if !q.is_finite() || q < 0.0 || q > limits.q_ceiling {
                    self.flag(tick, ViolationKind::QBounds, format!("Q({}, {a}) = {q}", u.id));
                }
            }

            if !u.is_active() && !u.table.is_empty() {
                self.flag(tick, ViolationKind::ChargingActivity, format!("{} keeps a table while inactive", u.id));
            }
            for r in u.table.records() {
                let age = tick.saturating_sub(r.last_heard);
                if age > record_lifetime(&r.hello, limits.expiry_ticks) {
                    self.flag(tick, ViolationKind::RecordAge, format!("{} holds a {age}-tick-old record", u.id));
                }
                let other = &uavs[r.hello.origin.index().expect("records are UAVs")];
                if !other.is_active() {
                    self.flag(tick, ViolationKind::ChargingActivity, format!("{} lists inactive {}", u.id, other.id));
                    continue;
                }
                let slack = 2.0 * limits.max_speed * (age + 1) as f64 * limits.tick_seconds + 1e-6;
                let d = relative_distance(&u.position, &other.position);
                if d > limits.range + slack {
                    self.flag(tick, ViolationKind::NeighbourRange, format!("{} lists {} at {d:.1} m", u.id, other.id));
                }
            }
        }
        let ceiling = limits.capacity * uavs.len() as f64;
        if total > ceiling * (1.0 + 1e-12) {
            self.flag(tick, ViolationKind::EnergyCeiling, format!("network energy {total} J above {ceiling} J"));
        }
    }
}
