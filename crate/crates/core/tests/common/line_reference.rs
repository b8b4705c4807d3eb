//! Five static UAVs on a line towards the base station, with a hand-written
//! one-step Q-learning model of the same network: its own path loss, SIR
//! test, reward and counters.

use std::collections::BTreeMap;

use uavnet_core::{Baseline, NodeId, Position3, SimConfig, World};

pub const N: usize = 5;
const SPACING: f64 = 210.0;
const ALTITUDE: f64 = 150.0;
const ZETA: f64 = 2.7;
const THRESHOLD_DB: f64 = -1.5;
const ALPHA: f64 = 0.5;
const GAMMA: f64 = 0.9;
const RETRIES: u32 = 3;
const W: [f64; 5] = [16.0 / 31.0, 8.0 / 31.0, 4.0 / 31.0, 2.0 / 31.0, 1.0 / 31.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Hop {
    Uav(usize),
    Base,
}

fn position(k: usize) -> (f64, f64) {
    (SPACING * k as f64, ALTITUDE)
}

/// Received power ratio from UAV `tx` at `rx_x` (the line lies on the x axis).
fn gain(tx: usize, rx_x: f64) -> f64 {
    let (x, h) = position(tx);
    let r = x - rx_x;
    (r * r + h * h).powf(-ZETA / 2.0)
}

/// Whether `k -> next` clears the threshold with every other UAV talking.
pub fn link_ok(k: usize) -> bool {
    let rx_x = if k == 0 { 0.0 } else { position(k - 1).0 };
    let interference: f64 = (0..N).filter(|&u| u != k && (k == 0 || u != k - 1)).map(|u| gain(u, rx_x)).sum();
    10.0 * (gain(k, rx_x) / interference).log10() >= THRESHOLD_DB
}

#[derive(Default)]
struct Reference {
    q: BTreeMap<(usize, Hop), f64>,
    sent_l2: [u64; N],
    acked_l2: [u64; N],
    sent_l3: [u64; N],
    acked_l3: [u64; N],
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Reference {
    fn q(&self, k: usize, a: Hop) -> f64 {
        self.q.get(&(k, a)).copied().unwrap_or(0.0)
    }

    fn best(&self, k: usize) -> f64 {
        self.q.range((k, Hop::Uav(0))..=(k, Hop::Base)).map(|(_, v)| *v).fold(0.0, f64::max)
    }

    fn reward_at(&self, j: usize) -> f64 {
        let collision = if j == 0 { 0.0 } else { 1.0 - (-(SPACING * SPACING) / (2.0 * 3.0 * 3.0)).exp() };
        let coverage = if link_ok(j) { 1.0 } else { 0.0 };
        W[0] * (1.0 - collision)
            + W[1] * ratio(self.acked_l3[j], self.sent_l3[j])
            + W[2] * ratio(self.acked_l2[j], self.sent_l2[j])
            + W[3] * coverage
            + W[4] * 1.0
    }

    fn learn(&mut self, k: usize, a: Hop, target: f64) {
        let q = self.q(k, a);
        self.q.insert((k, a), q + ALPHA * (target - q));
    }

    fn episode(&mut self, src: usize) {
        self.sent_l3[src] += 1;
        let mut k = src;
        let mut failures = 0;
        loop {
            let next = if k == 0 { Hop::Base } else { Hop::Uav(k - 1) };
            self.sent_l2[k] += 1;
            if link_ok(k) {
                self.acked_l2[k] += 1;
                failures = 0;
                match next {
                    Hop::Base => {
                        let sink = W[0] * (1.0 - 0.0) + W[1] * 1.0 + W[2] * 1.0 + W[3] * 1.0 + W[4] * 1.0;
                        self.learn(k, next, sink + GAMMA * 0.0);
                        self.acked_l3[src] += 1;
                        return;
                    }
                    Hop::Uav(j) => {
                        let target = self.reward_at(j) + GAMMA * self.best(j);
                        self.learn(k, next, target);
                        k = j;
                    }
                }
            } else {
                failures += 1;
                if failures == RETRIES {
                    self.learn(k, next, 0.0 + GAMMA * 0.0);
                    return;
                }
                let target = 0.0 + GAMMA * self.best(k);
                self.learn(k, next, target);
            }
        }
    }
}

fn line_world() -> World {
    let mut cfg = SimConfig::default();
    cfg.sim.num_uavs = N as u32;
    cfg.sim.baseline = Baseline::PlainQ;
    cfg.sim.l2_retry_limit = RETRIES;
    cfg.rl.epsilon = 0.0;
    cfg.channel.fading = false;
    cfg.channel.sir_threshold_db = THRESHOLD_DB;
    cfg.channel.zeta = ZETA;
    cfg.mobility.speed_range = [0.0, 0.0];
    cfg.mobility.mean_speed = 0.0;
    cfg.mobility.pitch_range = [0.0, 0.0];
    cfg.energy.eps_elec = 0.0;
    cfg.energy.eps_amp_fs = 0.0;
    cfg.energy.eps_amp_mp = 0.0;
    cfg.energy.payload_kw_per_kg = 0.0;
    let positions: Vec<Position3> = (0..N).map(|k| Position3::new(position(k).0, 0.0, ALTITUDE)).collect();
    World::with_positions(cfg, &positions).unwrap()
}

/// Runs both for `episodes` episodes and reports the first divergence.
/// Returns (delivered, dropped) on success.
pub fn compare(episodes: u64) -> Result<(u64, u64), String> {
    let mut world = line_world();
    let mut reference = Reference::default();
    for episode in 0..episodes {
        world.run_episode();
        reference.episode(episode as usize % N);
        for (k, u) in world.uavs().iter().enumerate() {
            let got: Vec<(Hop, u64)> = u
                .q
                .iter()
                .map(|(a, v)| (if a == NodeId::TBS { Hop::Base } else { Hop::Uav(a.0 as usize) }, v.to_bits()))
                .collect();
            let want: Vec<(Hop, u64)> = reference.q.iter().filter(|((i, _), _)| *i == k).map(|((_, a), v)| (*a, v.to_bits())).collect();
            if got != want {
                return Err(format!("episode {episode}, UAV {k}: Q {got:?} != {want:?}"));
            }
            if u.counters.pac_l2 != reference.sent_l2[k] || u.counters.ack_l3 != reference.acked_l3[k] {
                return Err(format!("episode {episode}, UAV {k}: counters differ"));
            }
        }
    }
    if !world.violations().is_empty() {
        return Err(format!("{:?}", world.violations()));
    }
    Ok((world.delivered(), world.dropped()))
}
