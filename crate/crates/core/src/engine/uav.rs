use crate::discovery::{NeighbourTable, ReceptionRatios};
use crate::energetics::Battery;
use crate::mobility::{Kinematics, Position3};
use crate::node::NodeId;
use crate::routing::QTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Mode {
    NeighbourDiscovery,
    Receive,
    Transmit,
    Charge,
}

impl Mode {
    pub fn is_airborne(self) -> bool {
        self != Mode::Charge
    }
}

/// Whether `from -> to` is one of the allowed mode edges. Staying put is
/// always allowed.
pub fn is_allowed_transition(from: Mode, to: Mode) -> bool {
    use Mode::*;
    from == to
        || matches!(
            (from, to),
            (NeighbourDiscovery, Receive)
                | (Receive, Transmit)
                | (Transmit, Receive)
                | (Receive, NeighbourDiscovery)
                | (Transmit, NeighbourDiscovery)
                | (NeighbourDiscovery, Charge)
                | (Receive, Charge)
                | (Transmit, Charge)
                | (Charge, NeighbourDiscovery)
        )
}

/// What the mode machine looks at in one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModeInputs {
    pub below_threshold: bool,
    pub fully_charged: bool,
    /// A hello broadcast starts this tick.
    pub hello_due: bool,
    /// No candidate neighbours.
    pub fragmented: bool,
    /// Holds a packet waiting to be forwarded.
    pub holding: bool,
}

pub fn transition_mode(mode: Mode, input: ModeInputs) -> Mode {
    use Mode::*;
    match mode {
        Charge if input.fully_charged => NeighbourDiscovery,
        Charge => Charge,
        _ if input.below_threshold => Charge,
        _ if input.hello_due || input.fragmented => NeighbourDiscovery,
        NeighbourDiscovery => Receive,
        Receive if input.holding => Transmit,
        Transmit if !input.holding => Receive,
        m => m,
    }
}

/// Cumulative per-layer transmission and acknowledgement counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReceptionCounters {
    pub pac_l2: u64,
    pub ack_l2: u64,
    pub pac_l3: u64,
    pub ack_l3: u64,
}

impl ReceptionCounters {
    /// ACK/PAC per layer; 0 before the first transmission.
    pub fn ratios(&self) -> ReceptionRatios {
        let ratio = |ack: u64, pac: u64| if pac == 0 { 0.0 } else { ack as f64 / pac as f64 };
        ReceptionRatios { l2: ratio(self.ack_l2, self.pac_l2), l3: ratio(self.ack_l3, self.pac_l3) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UavState {
    pub id: NodeId,
    pub position: Position3,
    pub kinematics: Kinematics,
    /// Heading the Gauss-Markov process reverts to.
    pub mean_direction: f64,
    pub battery: Battery,
    pub mode: Mode,
    pub counters: ReceptionCounters,
    pub q: QTable,
    pub table: NeighbourTable,
    /// Learning rate and discount factor last used, advertised in hellos.
    pub beta: f64,
    pub gamma: f64,
    /// Tick of the next scheduled hello.
    pub next_hello: u64,
    /// Current hello period in ticks, advertised in each hello.
    pub hello_period: u64,
    /// Remaining flight time of the current leg, seconds.
    pub leg_left: f64,
    /// Remaining hover time, seconds.
    pub pause_left: f64,
    /// Pick a fresh random heading at the next tick.
    pub relocate: bool,
    /// Removed from the airspace by a fragmentation event.
    pub offline: bool,
}

impl UavState {
    pub fn new(id: NodeId, position: Position3, kinematics: Kinematics, battery: Battery) -> Self {
        UavState {
            id,
            position,
            kinematics,
            mean_direction: kinematics.direction,
            battery,
            mode: Mode::NeighbourDiscovery,
            counters: ReceptionCounters::default(),
            q: QTable::new(),
            table: NeighbourTable::new(),
            beta: 1.0,
            gamma: 0.1,
            next_hello: 0,
            hello_period: 1,
            leg_left: 0.0,
            pause_left: 0.0,
            relocate: false,
            offline: false,
        }
    }

    /// In the airspace: neither charging nor knocked out.
    pub fn is_active(&self) -> bool {
        self.mode.is_airborne() && !self.offline
    }
}
