//! The episode loop: mobility, hellos and modes on a 100 ms tick, packets hop
//! by hop in between.
//!
//! The clock runs in microseconds. Every hop attempt occupies the channel for
//! one packet air time; when the clock crosses a tick boundary the tick is
//! processed (mobility, flight drain, charging, hellos, mode changes). A
//! holder with no feasible next hop waits for the next tick. Each episode
//! injects one packet at a round-robin source and follows it until it is
//! delivered or dropped.

mod monitor;
mod scenario;
pub mod uav;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

pub use monitor::{Violation, ViolationKind};
pub use scenario::{rejoin_schedule, select_targets, STAGGER_STEP_US};
pub use uav::{is_allowed_transition, transition_mode, Mode, ModeInputs, ReceptionCounters, UavState};

use crate::config::{Baseline, EventKind, SimConfig};
use crate::discovery::{aggregate_lst, broadcast_hello, next_hello_interval, HelloMessage, HelloSchedule, Sector};
use crate::energetics::{charge_step, debit, flight_drain, transmission_energy, Battery, EnergyParams};
use crate::error::ConfigError;
use crate::link::{classify_relative_motion, collision_probability, link_sustenance_time, relative_distance, CollisionParams};
use crate::mobility::{gmm_step, move_within, Domain, Kinematics, MobilityNoise, MobilityParams, Position3};
use crate::node::NodeId;
use crate::radio::{coverage_probability, sample_sir, ChannelParams};
use crate::rng::{stream, substream, SimRng, Stream};
use crate::routing::{
    adaptive_discount_factor, adaptive_learning_rate, compute_reward, q_ceiling, q_update, select_next_hop,
    update_eligibility, Candidate, Constraints, EligibilityTraces, RewardWeights, Selection, StateSnapshot,
};
use monitor::{Limits, Monitor};

/// Where the base station sits.
pub const TBS_POSITION: Position3 = Position3::ORIGIN;

/// One row of per-episode output. Counts are cumulative over the run except
/// `fragmented`, which is the number of airborne UAVs without candidates when
/// the episode ended.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeMetrics {
    pub episode: u64,
    pub cum_reward: f64,
    pub residual_energy_j: f64,
    pub delivered: u64,
    pub dropped: u64,
    pub fragmented: u64,
    pub mean_q: f64,
}

/// A surveillance packet in flight.
#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub id: u64,
    pub source: NodeId,
    pub created_episode: u64,
    pub bits: f64,
    /// Nodes visited so far, source first.
    pub path: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Delivered,
    Dropped(DropReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    RetryLimit,
    TickBudget,
    HopLimit,
    HolderLeft,
}

/// Dropped packets by cause.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub retry_limit: u64,
    pub tick_budget: u64,
    pub hop_limit: u64,
    pub holder_left: u64,
}

/// Parameters derived once from the config.
#[derive(Clone, Debug)]
struct Derived {
    mobility: MobilityParams,
    domain: Domain,
    channel: ChannelParams,
    energy: EnergyParams,
    collision: CollisionParams,
    schedule: HelloSchedule,
    expiry: u64,
    constraints: Constraints,
    weights: RewardWeights,
    tick_us: u64,
    tick_s: f64,
    hop_us: u64,
    bits: f64,
    range: f64,
    half_angle: f64,
    q_ceiling: f64,
}

impl Derived {
    fn new(cfg: &SimConfig) -> Self {
        let mut constraints = cfg.constraints();
        if cfg.sim.baseline == Baseline::PlainQ {
            constraints.enforce = Baseline::PLAIN_CONSTRAINTS;
        }
        let gamma_max = match cfg.sim.baseline {
            Baseline::Iqmr => cfg.rl.gamma_max,
            Baseline::PlainQ => Baseline::PLAIN_GAMMA,
        };
        Derived {
            mobility: cfg.mobility_params(),
            domain: cfg.domain(),
            channel: cfg.channel_params(),
            energy: cfg.energy_params(),
            collision: cfg.collision_params(),
            schedule: cfg.hello_schedule(),
            expiry: cfg.expiry_ticks(),
            constraints,
            weights: cfg.weights(),
            tick_us: cfg.tick_us(),
            tick_s: cfg.tick_seconds(),
            hop_us: cfg.hop_time_us(),
            bits: cfg.packet_bits(),
            range: cfg.radio_range_m,
            half_angle: cfg.discovery.sector_half_angle_rad,
            q_ceiling: q_ceiling(gamma_max),
        }
    }
}

/// The simulated network.
#[derive(Clone, Debug)]
pub struct World {
    cfg: SimConfig,
    p: Derived,
    uavs: Vec<UavState>,
    now_us: u64,
    tick: u64,
    episode: u64,
    cursor: usize,
    policy_rng: SimRng,
    scenario_rng: SimRng,
    placement_rng: SimRng,
    /// UAVs on the air this tick besides the link under test.
    interferers: Vec<NodeId>,
    coverage_cache: BTreeMap<(NodeId, NodeId), f64>,
    rejoins: Vec<(u64, usize)>,
    traces: EligibilityTraces,
    holder: Option<usize>,
    hop_attempts: u64,
    injected: u64,
    delivered: u64,
    dropped: u64,
    in_flight: u64,
    cum_reward: f64,
    episode_reward: f64,
    fragmentation_events: u64,
    drops: DropCounts,
    monitor: Monitor,
}

fn uniform_noise<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * half_width
}

fn random_heading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    PI - 2.0 * PI * rng.random::<f64>()
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, d: &Domain) -> Position3 {
    let rho = d.radius * libm::sqrt(rng.random::<f64>());
    let theta = 2.0 * PI * rng.random::<f64>();
    let h = d.h_min + (d.h_max - d.h_min) * rng.random::<f64>();
    Position3::new(rho * libm::cos(theta), rho * libm::sin(theta), h)
}

impl World {
    /// Builds a world with UAVs placed uniformly at random in the domain.
    pub fn new(cfg: SimConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut rng = stream(cfg.sim.seed, Stream::Placement);
        let domain = cfg.domain();
        let positions: Vec<Position3> = (0..cfg.sim.num_uavs).map(|_| random_point(&mut rng, &domain)).collect();
        Self::build(cfg, &positions, rng)
    }

    /// Builds a world with UAVs at the given positions.
    pub fn with_positions(cfg: SimConfig, positions: &[Position3]) -> Result<Self, ConfigError> {
        cfg.validate()?;
        if positions.len() != cfg.sim.num_uavs as usize {
            return Err(ConfigError::range("sim.num_uavs", "must match the number of supplied positions"));
        }
        let rng = stream(cfg.sim.seed, Stream::Placement);
        Self::build(cfg, positions, rng)
    }

    fn build(cfg: SimConfig, positions: &[Position3], mut placement_rng: SimRng) -> Result<Self, ConfigError> {
        let p = Derived::new(&cfg);
        let uavs: Vec<UavState> = positions
            .iter()
            .enumerate()
            .map(|(i, pos)| {
                let heading = random_heading(&mut placement_rng);
                let kin = Kinematics::new(p.mobility.mean.speed, heading, p.mobility.mean.pitch);
                let mut u = UavState::new(NodeId::uav(i), *pos, kin, Battery::full(p.energy.initial));
                u.leg_left = cfg.mobility.update_interval_s;
                u.beta = cfg.rl.beta_max;
                u.gamma = cfg.rl.gamma_min;
                u
            })
            .collect();
        let seed = cfg.sim.seed;
        let mut world = World {
            monitor: Monitor::new(&uavs),
            cfg,
            p,
            uavs,
            now_us: 0,
            tick: 0,
            episode: 0,
            cursor: 0,
            policy_rng: stream(seed, Stream::Policy),
            scenario_rng: stream(seed, Stream::Scenario),
            placement_rng,
            interferers: Vec::new(),
            coverage_cache: BTreeMap::new(),
            rejoins: Vec::new(),
            traces: EligibilityTraces::new(),
            holder: None,
            hop_attempts: 0,
            injected: 0,
            delivered: 0,
            dropped: 0,
            in_flight: 0,
            cum_reward: 0.0,
            episode_reward: 0.0,
            fragmentation_events: 0,
            drops: DropCounts::default(),
        };
        world.discovery_phase();
        world.check_invariants();
        Ok(world)
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn uavs(&self) -> &[UavState] {
        &self.uavs
    }

    pub fn now_us(&self) -> u64 {
        self.now_us
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Index of the next episode to run.
    pub fn episode(&self) -> u64 {
        self.episode
    }

    pub fn injected(&self) -> u64 {
        self.injected
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn cum_reward(&self) -> f64 {
        self.cum_reward
    }

    /// Reward collected during the last completed episode.
    pub fn episode_reward(&self) -> f64 {
        self.episode_reward
    }

    /// Times a holder found no feasible next hop and had to wait a tick.
    pub fn fragmentation_events(&self) -> u64 {
        self.fragmentation_events
    }

    /// UAVs counted as interferers this tick.
    pub fn interferers(&self) -> &[NodeId] {
        &self.interferers
    }

    pub fn drop_counts(&self) -> DropCounts {
        self.drops
    }

    pub fn violations(&self) -> &[Violation] {
        self.monitor.violations()
    }

    pub fn position(&self, node: NodeId) -> Position3 {
        match node.index() {
            Some(i) => self.uavs[i].position,
            None => TBS_POSITION,
        }
    }

    fn tbs_in_range(&self, i: usize) -> bool {
        relative_distance(&self.uavs[i].position, &TBS_POSITION) <= self.p.range
    }

    /// Candidate neighbours of UAV `i`, base station included.
    pub fn candidates(&self, i: usize) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.uavs[i].table.candidates().map(|r| r.hello.origin).collect();
        if self.tbs_in_range(i) {
            out.push(NodeId::TBS);
        }
        out
    }

    pub fn candidate_count(&self, i: usize) -> usize {
        self.uavs[i].table.candidate_count() + usize::from(self.tbs_in_range(i))
    }

    fn sector(&self, i: usize) -> Sector {
        Sector::toward(self.uavs[i].position, TBS_POSITION, self.p.range, self.p.half_angle)
    }

    fn set_mode(&mut self, i: usize, to: Mode) {
        let from = self.uavs[i].mode;
        if from != to {
            self.monitor.on_transition(self.tick, self.uavs[i].id, from, to);
            self.uavs[i].mode = to;
        }
    }

    /// Steps the mode machine until it settles. A UAV without candidates is
    /// always fragmented, whatever the caller passed.
    fn settle_mode(&mut self, i: usize, mut input: ModeInputs) {
        input.fragmented |= self.uavs[i].is_active() && self.candidate_count(i) == 0;
        for _ in 0..3 {
            let next = transition_mode(self.uavs[i].mode, input);
            if next == self.uavs[i].mode {
                break;
            }
            self.set_mode(i, next);
        }
    }

    /// Removes UAV `i` from every neighbour table and clears its own.
    fn leave_airspace(&mut self, i: usize) {
        let id = self.uavs[i].id;
        for u in &mut self.uavs {
            u.table.remove(id);
        }
        self.uavs[i].table.clear();
        self.interferers.retain(|&n| n != id);
        self.coverage_cache.clear();
    }

    // ---- clock ----------------------------------------------------------

    fn advance_clock(&mut self, dt_us: u64) {
        let target = self.now_us + dt_us;
        loop {
            let next_tick = (self.tick + 1) * self.p.tick_us;
            let next_rejoin = self.rejoins.first().map_or(u64::MAX, |r| r.0);
            let next = next_tick.min(next_rejoin);
            if next > target {
                break;
            }
            self.now_us = next;
            if next_rejoin <= next_tick {
                self.process_rejoins();
            } else {
                self.process_tick();
            }
        }
        self.now_us = target;
    }

    fn wait_for_next_tick(&mut self) {
        let next_tick = (self.tick + 1) * self.p.tick_us;
        self.advance_clock(next_tick - self.now_us);
    }

    fn process_rejoins(&mut self) {
        while let Some(&(t, i)) = self.rejoins.first() {
            if t > self.now_us {
                break;
            }
            self.rejoins.remove(0);
            if !self.uavs[i].offline {
                continue;
            }
            self.uavs[i].offline = false;
            self.uavs[i].table.clear();
            self.set_mode(i, Mode::NeighbourDiscovery);
            self.uavs[i].next_hello = self.tick + 1;
            self.uavs[i].hello_period = 1;
            let msg = broadcast_hello(&self.uavs[i], self.uavs[i].beta, self.uavs[i].gamma);
            self.deliver_hellos(&[msg]);
            let id = self.uavs[i].id;
            if !self.interferers.contains(&id) {
                self.interferers.push(id);
                self.interferers.sort_unstable();
            }
            self.coverage_cache.clear();
        }
    }

    fn process_tick(&mut self) {
        self.tick += 1;
        let dt = self.p.tick_s;
        self.charge_phase(dt);
        self.mobility_phase(dt);
        self.energy_gate();
        self.discovery_phase();
        self.check_invariants();
    }

    fn charge_phase(&mut self, dt: f64) {
        for i in 0..self.uavs.len() {
            if self.uavs[i].mode != Mode::Charge {
                continue;
            }
            let before = self.uavs[i].battery.residual();
            let (battery, full) = charge_step(self.uavs[i].battery, dt, &self.p.energy);
            self.uavs[i].battery = battery;
            self.monitor.on_charge(self.tick, &self.uavs[i], i, before);
            if full {
                let pos = random_point(&mut self.placement_rng, &self.p.domain);
                let heading = random_heading(&mut self.placement_rng);
                let u = &mut self.uavs[i];
                u.position = pos;
                u.kinematics = Kinematics::new(self.p.mobility.mean.speed, heading, self.p.mobility.mean.pitch);
                u.mean_direction = heading;
                u.leg_left = self.cfg.mobility.update_interval_s;
                u.pause_left = 0.0;
                u.next_hello = self.tick;
                u.hello_period = 1;
                self.settle_mode(i, ModeInputs { fully_charged: true, ..Default::default() });
            }
        }
    }

    fn mobility_phase(&mut self, dt: f64) {
        let seed = self.cfg.sim.seed;
        let mp = self.p.mobility;
        let half = |b: crate::mobility::Bounds| 0.5 * b.width();
        for i in 0..self.uavs.len() {
            if !self.uavs[i].is_active() {
                continue;
            }
            let mut rng = substream(seed, Stream::Mobility, self.tick, i as u64, 0);
            let noise = MobilityNoise {
                speed: uniform_noise(&mut rng, half(mp.speed)),
                direction: uniform_noise(&mut rng, half(mp.direction)),
                pitch: uniform_noise(&mut rng, half(mp.pitch)),
            };
            let fresh_heading = random_heading(&mut rng);
            let u = &mut self.uavs[i];
            if u.relocate {
                u.kinematics.direction = fresh_heading;
                u.relocate = false;
            }
            if u.pause_left > 0.0 {
                u.pause_left -= dt;
                if u.pause_left <= 1e-9 {
                    u.pause_left = 0.0;
                    u.kinematics = gmm_step(&u.kinematics, &mp.with_mean_direction(u.mean_direction), noise);
                    u.leg_left = self.cfg.mobility.update_interval_s;
                }
            } else {
                let (pos, kin) = move_within(u.position, &u.kinematics, dt, &self.p.domain);
                u.position = pos;
                u.kinematics = kin;
                u.leg_left -= dt;
                if u.leg_left <= 1e-9 {
                    if mp.pause_time > 0.0 {
                        u.pause_left = mp.pause_time;
                    } else {
                        u.kinematics = gmm_step(&u.kinematics, &mp.with_mean_direction(u.mean_direction), noise);
                        u.leg_left = self.cfg.mobility.update_interval_s;
                    }
                }
            }
            u.battery = debit(u.battery, flight_drain(dt, &self.p.energy));
        }
    }

    fn energy_gate(&mut self) {
        for i in 0..self.uavs.len() {
            if self.uavs[i].is_active() && self.uavs[i].battery.residual() < self.p.energy.threshold {
                self.settle_mode(i, ModeInputs { below_threshold: true, ..Default::default() });
                self.leave_airspace(i);
            }
        }
    }

    /// Hello exchange for the current tick, then mode settling and the
    /// interferer set.
    fn discovery_phase(&mut self) {
        let tick = self.tick;
        let expiry = self.p.expiry;
        for i in 0..self.uavs.len() {
            if self.uavs[i].is_active() {
                let sector = self.sector(i);
                let u = &mut self.uavs[i];
                u.table.purge(tick, expiry);
                u.table.refresh_sector(&sector);
            }
        }

        let speakers: Vec<usize> = (0..self.uavs.len())
            .filter(|&i| {
                let u = &self.uavs[i];
                u.is_active() && (u.next_hello <= tick || u.mode == Mode::NeighbourDiscovery || self.candidate_count(i) == 0)
            })
            .collect();
        let mut messages = Vec::with_capacity(speakers.len());
        for &i in &speakers {
            let holding = self.holder == Some(i);
            self.settle_mode(i, ModeInputs { hello_due: true, holding, ..Default::default() });
            self.schedule_hello(i);
            let u = &self.uavs[i];
            messages.push(broadcast_hello(u, u.beta, u.gamma));
        }
        self.deliver_hellos(&messages);

        self.interferers.clear();
        for i in 0..self.uavs.len() {
            if !self.uavs[i].is_active() {
                continue;
            }
            let fragmented = self.candidate_count(i) == 0;
            let holding = self.holder == Some(i);
            self.settle_mode(i, ModeInputs { fragmented, holding, ..Default::default() });
            if fragmented || speakers.contains(&i) {
                self.interferers.push(self.uavs[i].id);
            }
        }
        self.coverage_cache.clear();
    }

    /// Delivers hellos to every active UAV in range. Hearing a new neighbour
    /// pulls the listener's own hello forward to the next tick.
    fn deliver_hellos(&mut self, messages: &[HelloMessage]) {
        let tick = self.tick;
        let expiry = self.p.expiry;
        for r in 0..self.uavs.len() {
            if !self.uavs[r].is_active() {
                continue;
            }
            let sector = self.sector(r);
            for msg in messages {
                if msg.origin == self.uavs[r].id {
                    continue;
                }
                if relative_distance(&msg.position, &self.uavs[r].position) > self.p.range {
                    continue;
                }
                let u = &mut self.uavs[r];
                if u.table.process_hello(*msg, &sector, tick, expiry) && u.next_hello > tick + 1 {
                    u.next_hello = tick + 1;
                }
            }
        }
    }

    fn schedule_hello(&mut self, i: usize) {
        let u = &self.uavs[i];
        let lsts = u.table.candidates().map(|r| {
            let d = relative_distance(&u.position, &r.hello.position);
            let rel = classify_relative_motion(&u.position, &u.kinematics, &r.hello.position, &r.hello.kinematics);
            link_sustenance_time(d, u.kinematics.speed, r.hello.kinematics.speed, rel, self.p.range, self.p.collision.r_min)
        });
        let next = next_hello_interval(self.tick, aggregate_lst(lsts), &self.p.schedule);
        let u = &mut self.uavs[i];
        u.next_hello = next;
        u.hello_period = next - self.tick;
    }

    fn check_invariants(&mut self) {
        let limits = Limits {
            capacity: self.p.energy.initial,
            threshold: self.p.energy.threshold,
            q_ceiling: self.p.q_ceiling,
            expiry_ticks: self.p.expiry,
            range: self.p.range,
            max_speed: self.p.mobility.speed.max,
            tick_seconds: self.p.tick_s,
        };
        self.monitor.check_flow(self.tick, self.injected, self.delivered, self.dropped, self.in_flight);
        self.monitor.check_interferers(self.tick, &self.uavs, &self.interferers);
        self.monitor.check_state(self.tick, &self.uavs, &limits);
    }

    // ---- link estimates -------------------------------------------------

    fn interferer_positions(&self, exclude: [NodeId; 2]) -> Vec<Position3> {
        self.interferers
            .iter()
            .filter(|id| !exclude.contains(id))
            .filter_map(|id| id.index())
            .filter(|&i| self.uavs[i].is_active())
            .map(|i| self.uavs[i].position)
            .collect()
    }

    /// Coverage probability of `tx -> rx` this tick, memoised per tick.
    fn coverage(&mut self, tx: usize, rx: NodeId) -> f64 {
        let key = (self.uavs[tx].id, rx);
        if let Some(&c) = self.coverage_cache.get(&key) {
            return c;
        }
        let interferers = self.interferer_positions([key.0, rx]);
        let mut rng = substream(self.cfg.sim.seed, Stream::Coverage, self.tick, u64::from(key.0 .0), u64::from(rx.0));
        let c = coverage_probability(&self.position(rx), &self.uavs[tx].position, &interferers, &self.p.channel, &mut rng)
            .unwrap_or(0.0);
        self.coverage_cache.insert(key, c);
        c
    }

    fn pair_collision(&self, i: usize, j: NodeId) -> f64 {
        if j.is_tbs() {
            return 0.0;
        }
        collision_probability(relative_distance(&self.uavs[i].position, &self.position(j)), &self.p.collision)
    }

    /// Mean coverage and worst-case collision risk over `i`'s candidates.
    fn link_state(&mut self, i: usize) -> (f64, f64, usize) {
        let cands = self.candidates(i);
        if cands.is_empty() {
            return (0.0, 0.0, 0);
        }
        let mut cov = 0.0;
        let mut coll: f64 = 0.0;
        for &c in &cands {
            cov += self.coverage(i, c);
            coll = coll.max(self.pair_collision(i, c));
        }
        (cov / cands.len() as f64, coll, cands.len())
    }

    fn snapshot(&mut self, node: NodeId) -> (StateSnapshot, usize) {
        let Some(j) = node.index() else {
            return (StateSnapshot::SINK, 1);
        };
        let (coverage, collision, n) = self.link_state(j);
        let u = &self.uavs[j];
        let ratios = u.counters.ratios();
        let s = StateSnapshot { energy: u.battery.normalized(), rs_l2: ratios.l2, rs_l3: ratios.l3, coverage, collision };
        (s, n)
    }

    /// β and γ for a decision taken at UAV `i`, plus the trace decay.
    fn learning_params(&mut self, i: usize) -> (f64, f64, f64) {
        let rl = &self.cfg.rl;
        let (beta, gamma, lambda) = match self.cfg.sim.baseline {
            Baseline::PlainQ => (Baseline::PLAIN_BETA, Baseline::PLAIN_GAMMA, 0.0),
            Baseline::Iqmr => {
                let (bmode, bmin, bmax, gmin, gmax, lambda) =
                    (rl.beta_mode, rl.beta_min, rl.beta_max, rl.gamma_min, rl.gamma_max, rl.lambda);
                let (p_cov, _, n) = self.link_state(i);
                let m = self.uavs.len();
                (adaptive_learning_rate(p_cov, bmode, bmin, bmax), adaptive_discount_factor(n.min(m), m, gmin, gmax), lambda)
            }
        };
        self.uavs[i].beta = beta;
        self.uavs[i].gamma = gamma;
        (beta, gamma, lambda)
    }

    fn candidate_views(&mut self, i: usize) -> Vec<Candidate> {
        let sector = self.sector(i);
        let cands = self.candidates(i);
        let mut out = Vec::with_capacity(cands.len());
        for node in cands {
            let pos = self.position(node);
            let residual_energy = match node.index() {
                Some(_) => self.uavs[i].table.get(node).map_or(0.0, |r| r.hello.residual_energy),
                None => f64::INFINITY,
            };
            let distance = relative_distance(&self.uavs[i].position, &pos);
            if let Some(j) = node.index() {
                if distance < self.p.collision.r_min {
                    self.uavs[j].relocate = true;
                }
            }
            out.push(Candidate {
                node,
                q: self.uavs[i].q.get(node),
                residual_energy,
                coverage: self.coverage(i, node),
                collision: self.pair_collision(i, node),
                distance,
                divergence: sector.divergence(&pos),
            });
        }
        out
    }

    // ---- learning -------------------------------------------------------

    /// Applies `δ = r + γ·max_next − Q(current)` to every traced pair.
    fn apply_td(&mut self, current: (NodeId, NodeId), reward: f64, max_next: f64, beta: f64, gamma: f64) {
        let holder = current.0.index().expect("decisions are taken at UAVs");
        let q_cur = self.uavs[holder].q.get(current.1);
        let delta = reward + gamma * max_next - q_cur;
        let traced: Vec<((NodeId, NodeId), f64)> = self.traces.iter().collect();
        for ((node, action), e) in traced {
            let Some(n) = node.index() else { continue };
            let q = self.uavs[n].q.get(action);
            let updated = (q + beta * delta * e).max(0.0).min(self.p.q_ceiling);
            self.uavs[n].q.set(action, updated);
        }
    }

    // ---- scenario -------------------------------------------------------

    fn apply_scenario(&mut self, episode: u64) {
        let events: Vec<_> = self.cfg.scenario.event.iter().filter(|e| e.episode == episode).cloned().collect();
        for ev in events {
            match ev.kind {
                EventKind::SweepParam => {
                    if let (Some(param), Some(value)) = (ev.param.as_deref(), ev.value) {
                        if self.cfg.set_numeric(param, value).is_ok() {
                            self.p = Derived::new(&self.cfg);
                            self.coverage_cache.clear();
                        }
                    }
                }
                EventKind::DepleteEnergy => {
                    for i in select_targets(&self.uavs, &ev, &mut self.scenario_rng) {
                        let low = self.p.energy.threshold * 0.5;
                        self.uavs[i].battery = Battery::with_residual(self.p.energy.initial, low);
                        self.settle_mode(i, ModeInputs { below_threshold: true, ..Default::default() });
                        self.leave_airspace(i);
                    }
                }
                EventKind::Fragment => {
                    let targets = select_targets(&self.uavs, &ev, &mut self.scenario_rng);
                    for &i in &targets {
                        self.uavs[i].offline = true;
                        self.leave_airspace(i);
                    }
                    let duration = libm::round(ev.duration_ms * 1000.0) as u64;
                    self.rejoins.extend(rejoin_schedule(&targets, self.now_us, duration, ev.rejoin));
                    self.rejoins.sort_unstable();
                }
            }
        }
    }

    // ---- episodes -------------------------------------------------------

    fn next_source(&mut self) -> Option<usize> {
        let n = self.uavs.len();
        (0..n).map(|k| (self.cursor + k) % n).find(|&i| self.uavs[i].is_active()).inspect(|&i| self.cursor = (i + 1) % n)
    }

    /// Runs one episode: inject a packet and follow it until it is delivered
    /// or dropped.
    pub fn run_episode(&mut self) -> EpisodeMetrics {
        let episode = self.episode;
        self.apply_scenario(episode);
        let start_tick = self.tick;
        let before = self.cum_reward;
        let budget = self.cfg.sim.tick_budget;
        let source = loop {
            if let Some(s) = self.next_source() {
                break Some(s);
            }
            if self.tick - start_tick >= budget {
                break None;
            }
            self.wait_for_next_tick();
        };
        if let Some(src) = source {
            self.forward(src, start_tick);
        }
        self.episode += 1;
        self.episode_reward = self.cum_reward - before;
        self.check_invariants();
        self.metrics(episode)
    }

    pub fn run(&mut self, episodes: u64) -> Vec<EpisodeMetrics> {
        (0..episodes).map(|_| self.run_episode()).collect()
    }

    fn forward(&mut self, src: usize, start_tick: u64) {
        let budget = self.cfg.sim.tick_budget;
        let retry_limit = self.cfg.sim.l2_retry_limit;
        let max_hops = self.cfg.rl.max_hops as usize;
        let epsilon = self.cfg.rl.epsilon;

        self.injected += 1;
        self.in_flight = 1;
        self.uavs[src].counters.pac_l3 += 1;
        let mut packet =
            Packet { id: self.injected - 1, source: NodeId::uav(src), created_episode: self.episode, bits: self.p.bits, path: vec![NodeId::uav(src)] };
        self.traces.clear();
        self.holder = Some(src);
        let mut holder = src;
        let mut failures = 0u32;

        let outcome = loop {
            if !self.uavs[holder].is_active() {
                break Outcome::Dropped(DropReason::HolderLeft);
            }
            if self.tick - start_tick >= budget {
                break Outcome::Dropped(DropReason::TickBudget);
            }
            if packet.path.len() > max_hops {
                break Outcome::Dropped(DropReason::HopLimit);
            }
            let views = self.candidate_views(holder);
            let constraints = self.p.constraints;
            let choice = select_next_hop(&views, &packet.path, epsilon, &constraints, &mut self.policy_rng);
            let Selection::Hop { node: next, greedy } = choice else {
                self.fragmentation_events += 1;
                self.wait_for_next_tick();
                continue;
            };
            self.settle_mode(holder, ModeInputs { holding: true, ..Default::default() });

            let (beta, gamma, lambda) = self.learning_params(holder);
            let delivered_l2 = self.attempt_hop(holder, next, packet.bits);
            let here = self.uavs[holder].id;
            if delivered_l2 {
                failures = 0;
                let (snap, n_c) = self.snapshot(next);
                let reward = compute_reward(&snap, n_c, &self.p.weights);
                let max_next = next.index().map_or(0.0, |j| self.uavs[j].q.max_value());
                update_eligibility(&mut self.traces, (here, next), greedy, beta, lambda);
                self.apply_td((here, next), reward, max_next, beta, gamma);
                self.cum_reward += reward;
                self.advance_clock(self.p.hop_us);
                let Some(j) = next.index() else {
                    break Outcome::Delivered;
                };
                packet.path.push(next);
                self.holder = Some(j);
                self.settle_mode(holder, ModeInputs::default());
                self.settle_mode(j, ModeInputs { holding: true, ..Default::default() });
                holder = j;
            } else {
                failures += 1;
                if failures >= retry_limit {
                    update_eligibility(&mut self.traces, (here, next), greedy, beta, lambda);
                    self.apply_td((here, next), 0.0, 0.0, beta, gamma);
                    self.advance_clock(self.p.hop_us);
                    break Outcome::Dropped(DropReason::RetryLimit);
                }
                let own_best = self.uavs[holder].q.max_value();
                let q = self.uavs[holder].q.get(next);
                let updated = q_update(q, 0.0, own_best, beta, gamma, 1.0).max(0.0).min(self.p.q_ceiling);
                self.uavs[holder].q.set(next, updated);
                self.advance_clock(self.p.hop_us);
            }
        };

        self.in_flight = 0;
        self.traces.clear();
        match outcome {
            Outcome::Delivered => {
                self.delivered += 1;
                self.uavs[src].counters.ack_l3 += 1;
            }
            Outcome::Dropped(reason) => {
                self.dropped += 1;
                let d = &mut self.drops;
                match reason {
                    DropReason::RetryLimit => d.retry_limit += 1,
                    DropReason::TickBudget => d.tick_budget += 1,
                    DropReason::HopLimit => d.hop_limit += 1,
                    DropReason::HolderLeft => d.holder_left += 1,
                }
            }
        }
        if let Some(h) = self.holder.take() {
            if self.uavs[h].is_active() {
                self.settle_mode(h, ModeInputs::default());
            }
        }
    }

    /// One transmission attempt. Energy and the L2 counters are charged
    /// whatever the outcome.
    fn attempt_hop(&mut self, from: usize, to: NodeId, bits: f64) -> bool {
        self.monitor.on_transmit(self.tick, &self.uavs[from]);
        let tx = self.uavs[from].position;
        let rx = self.position(to);
        let interferers = self.interferer_positions([self.uavs[from].id, to]);
        let mut rng = substream(self.cfg.sim.seed, Stream::Hop, self.episode, self.hop_attempts, 0);
        self.hop_attempts += 1;
        let sir = sample_sir(&rx, &tx, &interferers, &self.p.channel, &mut Vec::new(), &mut rng).unwrap_or(0.0);
        let ok = sir >= self.p.channel.sir_threshold;
        let cost = transmission_energy(bits, relative_distance(&tx, &rx), &self.p.energy);
        let u = &mut self.uavs[from];
        u.battery = debit(u.battery, cost);
        u.counters.pac_l2 += 1;
        if ok {
            u.counters.ack_l2 += 1;
        }
        if u.battery.residual() < self.p.energy.threshold {
            self.settle_mode(from, ModeInputs { below_threshold: true, ..Default::default() });
            self.leave_airspace(from);
        }
        ok
    }

    fn metrics(&self, episode: u64) -> EpisodeMetrics {
        let residual: f64 = self.uavs.iter().map(|u| u.battery.residual()).sum();
        let (sum_q, n_q) = self.uavs.iter().fold((0.0, 0usize), |(s, n), u| (s + u.q.sum(), n + u.q.len()));
        let fragmented = (0..self.uavs.len()).filter(|&i| self.uavs[i].is_active() && self.candidate_count(i) == 0).count();
        EpisodeMetrics {
            episode,
            cum_reward: self.cum_reward,
            residual_energy_j: residual,
            delivered: self.delivered,
            dropped: self.dropped,
            fragmented: fragmented as u64,
            mean_q: if n_q == 0 { 0.0 } else { sum_q / n_q as f64 },
        }
    }
}
