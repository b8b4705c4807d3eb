//! Module invariants as property checks. Every entry runs a deterministic
//! proptest runner and returns the shrunk counterexample on failure, so the
//! core tests and the acceptance suite can share them.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::Rng;
use uavnet_core::config::{EventKind, Rejoin, ScenarioEvent, Selector};
use uavnet_core::discovery::{in_sector, Sector};
use uavnet_core::energetics::{charge_step, debit, transmission_energy, Battery, EnergyParams};
use uavnet_core::engine::Mode;
use uavnet_core::link::{
    collision_probability, denormalize, link_sustenance_time, normalize, relative_distance, CollisionParams, LstResult,
    RelativeMotion,
};
use uavnet_core::mobility::{
    advance_position, gmm_step, reflect_into_domain, Bounds, Domain, Kinematics, MobilityNoise, MobilityParams,
};
use uavnet_core::radio::{compute_sir, coverage_probability, path_loss, sample_fading_gain, ChannelParams, Emitter};
use uavnet_core::rng::{substream, Stream};
use uavnet_core::routing::{
    adaptive_discount_factor, compute_reward, greedy_index, q_update, select_next_hop, Candidate, Constraints,
    RewardWeights, Selection, StateSnapshot,
};
use uavnet_core::{Baseline, NodeId, Position3, SimConfig, World};

use super::line_reference;

pub const CASES: u32 = 128;

pub type Check = fn() -> Result<(), String>;

/// Every invariant, by module.
pub const ALL: &[(&str, Check)] = &[
    ("mobility: alpha one is a fixed point", gmm_fixed_point),
    ("mobility: speed reverts to its mean", gmm_mean_speed),
    ("mobility: reflection lands in the cylinder", reflection_in_domain),
    ("mobility: advance is translation equivariant", advance_equivariant),
    ("radio: path loss decreases with distance", path_loss_decreasing),
    ("radio: coverage non-increasing in threshold", coverage_monotone),
    ("radio: fading gains average to one", fading_mean),
    ("radio: SIR is invariant to common gain", sir_scale_invariant),
    ("energetics: debit and charge move one way", battery_monotone),
    ("energetics: amplifier branch follows r0", energy_branch),
    ("link: collision probability in [0,1) and increasing", collision_increasing),
    ("link: LST monotone in distance", lst_monotone),
    ("link: distance obeys the triangle inequality", triangle_inequality),
    ("link: normalize inverts denormalize", normalize_round_trip),
    ("discovery: sector test is rotation invariant", sector_rotation),
    ("discovery: fragmented UAVs hello every tick", fragmented_hello),
    ("routing: Q stays within [0, 10]", q_bounded),
    ("routing: reward monotone in each component", reward_monotone),
    ("routing: reward zero without candidates", reward_zero_when_fragmented),
    ("routing: discount linear in candidates", discount_linear),
    ("routing: lambda zero reduces to one-step Q-learning", one_step_equivalence),
    ("routing: greedy choice is scale invariant", greedy_scale_invariant),
    ("routing: exploration frequency", exploration_frequency),
    ("engine: runtime assertions hold on random networks", engine_runtime),
    ("engine: neighbour sets nest", neighbour_sets_nest),
    ("engine: identical seeds give identical runs", engine_deterministic),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn prop<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(CASES).run(&strategy, test).map_err(|e| e.to_string())
}

fn position(extent: f64) -> impl Strategy<Value = Position3> {
    (-extent..extent, -extent..extent, 0.0..extent).prop_map(|(x, y, h)| Position3::new(x, y, h))
}

fn mobility(alpha: f64) -> MobilityParams {
    MobilityParams {
        alpha,
        mean: Kinematics::new(15.0, 0.0, 0.0),
        speed: Bounds::new(10.0, 20.0),
        direction: Bounds::new(-PI / 2.0, PI / 2.0),
        pitch: Bounds::new(-PI / 4.0, PI / 4.0),
        pause_time: 1.0,
    }
}

fn kinematics() -> impl Strategy<Value = Kinematics> {
    (10.0..=20.0, -PI + 1e-9..=PI, -PI / 4.0..=PI / 4.0).prop_map(|(s, d, p)| Kinematics::new(s, d, p))
}

pub fn gmm_fixed_point() -> Result<(), String> {
    prop((kinematics(), -PI..PI), |(k, mean_dir)| {
        let params = mobility(1.0).with_mean_direction(mean_dir);
        let mut next = k;
        for _ in 0..50 {
            next = gmm_step(&next, &params, MobilityNoise::default());
        }
        prop_assert_eq!(next, k);
        Ok(())
    })
}

pub fn gmm_mean_speed() -> Result<(), String> {
    prop((0.0..0.9f64, 0.5..5.0f64, any::<u64>()), |(alpha, width, seed)| {
        let params = mobility(alpha);
        let mut rng = substream(seed, Stream::Mobility, 0, 0, 0);
        let mut k = Kinematics::new(10.0, 0.0, 0.0);
        let steps = 100_000;
        let mut sum = 0.0;
        for _ in 0..steps {
            let noise = MobilityNoise { speed: rng.random_range(-width..width), direction: 0.0, pitch: 0.0 };
            k = gmm_step(&k, &params, noise);
            sum += k.speed;
        }
        let mean = sum / steps as f64;
        prop_assert!((mean - 15.0).abs() <= 0.05 * 15.0, "mean speed {mean}");
        Ok(())
    })
}

pub fn reflection_in_domain() -> Result<(), String> {
    let domain = (100.0..1000.0f64, 0.0..200.0f64, 10.0..300.0f64);
    let overshoot = (0.0..2.5f64, -PI..PI, -1.0..2.0f64);
    prop((domain, overshoot), |((radius, h_min, span), (rho, theta, hf))| {
        let d = Domain { radius, h_min, h_max: h_min + span };
        let p = Position3::new(rho * radius * theta.cos(), rho * radius * theta.sin(), h_min + hf * span);
        let q = reflect_into_domain(p, &d);
        prop_assert!(d.contains(&q), "{p:?} -> {q:?}");
        Ok(())
    })
}

pub fn advance_equivariant() -> Result<(), String> {
    prop((position(1000.0), kinematics(), 0.0..1.0f64, -1000.0..1000.0f64, -1000.0..1000.0f64), |(p, k, dt, sx, sy)| {
        let shift = Position3::new(sx, sy, 0.0);
        let a = advance_position(p + shift, &k, dt);
        let b = advance_position(p, &k, dt) + shift;
        prop_assert!((a - b).norm() <= 1e-9, "{a:?} vs {b:?}");
        prop_assert_eq!(a.h, b.h);
        Ok(())
    })
}

pub fn path_loss_decreasing() -> Result<(), String> {
    prop((0.0..1000.0f64, 0.01..1000.0f64, 1.0..500.0f64, 1.5..5.0f64), |(r, dr, h, zeta)| {
        let near = path_loss(r, h, zeta).unwrap();
        let far = path_loss(r + dr, h, zeta).unwrap();
        prop_assert!(near > far, "l({r}) = {near} <= l({}) = {far}", r + dr);
        Ok(())
    })
}

fn channel(threshold: f64, rician_k: f64) -> ChannelParams {
    ChannelParams { zeta: 2.7, rician_k, sir_threshold: threshold, coverage_samples: 100, noise_floor: 1e-9, fading: true }
}

pub fn coverage_monotone() -> Result<(), String> {
    let geometry = (position(300.0), position(300.0), prop::collection::vec(position(300.0), 1..4));
    prop((geometry, 0.01..10.0f64, 0.0..10.0f64, 0.0..5.0f64, any::<u64>()), |((rx, tx, others), t, dt, k, seed)| {
        prop_assume!(rx != tx && others.iter().all(|o| *o != rx));
        let at = |threshold| {
            let mut rng = substream(seed, Stream::Coverage, 0, 0, 0);
            coverage_probability(&rx, &tx, &others, &channel(threshold, k), &mut rng).unwrap()
        };
        let (low, high) = (at(t), at(t + dt));
        prop_assert!(low >= high, "{low} < {high}");
        Ok(())
    })
}

pub fn fading_mean() -> Result<(), String> {
    prop((1.0..20.0f64, any::<u64>()), |(m, seed)| {
        let n = 4000;
        let mut rng = substream(seed, Stream::Coverage, 1, 0, 0);
        let mean = (0..n).map(|_| sample_fading_gain(m, &mut rng)).sum::<f64>() / n as f64;
        let sigma = (1.0 / (m * n as f64)).sqrt();
        prop_assert!((mean - 1.0).abs() <= 3.0 * sigma, "m = {m}: mean {mean}, sigma {sigma}");
        Ok(())
    })
}

pub fn sir_scale_invariant() -> Result<(), String> {
    let emitter = || (position(300.0), 0.01..10.0f64).prop_map(|(pos, gain)| Emitter { pos, gain });
    let geometry = (position(300.0), emitter(), prop::collection::vec(emitter(), 1..6));
    prop((geometry, 1e-3..1e3f64, 1.5..5.0f64), |((rx, tx, others), c, zeta)| {
        prop_assume!(tx.pos != rx && others.iter().all(|o| o.pos != rx));
        let base = compute_sir(&rx, &tx, &others, zeta).unwrap();
        let scale = |e: &Emitter| Emitter { pos: e.pos, gain: e.gain * c };
        let scaled: Vec<Emitter> = others.iter().map(scale).collect();
        let sir = compute_sir(&rx, &scale(&tx), &scaled, zeta).unwrap();
        prop_assert!((sir - base).abs() <= 1e-12 * base, "{base} vs {sir}");
        Ok(())
    })
}

fn energy_params(charge_rate: f64) -> EnergyParams {
    EnergyParams {
        eps_elec: 50e-9,
        eps_amp_fs: 41e-6,
        eps_amp_mp: 100e-12,
        r0: 100.0,
        payload_w_per_kg: 217.0,
        mass_kg: 2.0,
        initial: 207_792.0,
        threshold: 100.0,
        charge_rate,
    }
}

pub fn battery_monotone() -> Result<(), String> {
    prop((0.0..=207_792.0f64, 0.0..1e6f64, 0.0..10.0f64, 1.0..1e5f64), |(residual, amount, dt, rate)| {
        let p = energy_params(rate);
        let b = Battery::with_residual(p.initial, residual);
        let after = debit(b, amount);
        prop_assert!(after.residual() <= b.residual() && after.residual() >= 0.0);
        let (charged, _) = charge_step(b, dt, &p);
        prop_assert!(charged.residual() >= b.residual() && charged.residual() <= p.initial);
        Ok(())
    })
}

pub fn energy_branch() -> Result<(), String> {
    prop((0.0..1e5f64, 0.0..1000.0f64), |(bits, r)| {
        let p = energy_params(2000.0);
        let got = transmission_energy(bits, r, &p);
        let want = if r <= p.r0 {
            p.eps_elec * bits + p.eps_amp_fs * bits * r * r
        } else {
            p.eps_elec * bits + p.eps_amp_mp * bits * r * r * r * r
        };
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300), "{got} vs {want}");
        Ok(())
    })
}

pub fn collision_increasing() -> Result<(), String> {
    prop((1.0..5.0f64, 1.0..5.0f64, 0.0..1.0f64, 0.0..1.0f64), |(xi_x, xi_y, u, v)| {
        let p = CollisionParams { xi_x, xi_y, r_min: 1.0, threshold: 1.0, r_scale: 1.0 };
        // Keep the exponent below 20 so the upper end is still representable.
        let r_max = (40.0 * xi_x * xi_y).sqrt();
        let (a, b) = (u.min(v) * r_max, u.max(v) * r_max);
        prop_assume!(b - a >= 1e-3);
        let (pa, pb) = (collision_probability(a, &p), collision_probability(b, &p));
        prop_assert!((0.0..1.0).contains(&pa) && (0.0..1.0).contains(&pb), "{pa} {pb}");
        prop_assert!(pa < pb, "P({a}) = {pa} >= P({b}) = {pb}");
        Ok(())
    })
}

pub fn lst_monotone() -> Result<(), String> {
    prop((1.0..500.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..30.0f64, 0.0..30.0f64), |(range, u, v, si, sj)| {
        let (lo, hi) = (u.min(v), u.max(v));
        prop_assume!(hi - lo >= 1e-6);
        let secs = |d, rel| link_sustenance_time(d, si, sj, rel, range, 1.0).seconds();
        if si + sj > 0.0 {
            let (a, b) = (secs(2.0 * range * lo, RelativeMotion::Receding), secs(2.0 * range * hi, RelativeMotion::Receding));
            prop_assert!(a > b, "receding {a:?} <= {b:?}");
        }
        if (si - sj).abs() >= 0.1 {
            let d = |x: f64| 1.0 + x * (range - 1.0).max(1.0);
            let (a, b) = (secs(d(lo), RelativeMotion::Approaching), secs(d(hi), RelativeMotion::Approaching));
            prop_assert!(a < b, "approaching {a:?} >= {b:?}");
        }
        prop_assert_eq!(
            link_sustenance_time(range, si, sj, RelativeMotion::Equidistant, range, 1.0),
            LstResult::Equidistant
        );
        Ok(())
    })
}

pub fn triangle_inequality() -> Result<(), String> {
    prop((position(1e4), position(1e4), position(1e4)), |(a, b, c)| {
        let direct = relative_distance(&a, &c);
        let via = relative_distance(&a, &b) + relative_distance(&b, &c);
        prop_assert!(direct <= via * (1.0 + 1e-12), "{direct} > {via}");
        Ok(())
    })
}

pub fn normalize_round_trip() -> Result<(), String> {
    prop((-1e4..1e4f64, 1e-3..1e4f64, 0.0..=1.0f64), |(min, width, u)| {
        let max = min + width;
        let x = denormalize(u, min, max);
        let back = normalize(x, min, max).unwrap();
        prop_assert!((back - u).abs() <= 1e-9, "{u} -> {x} -> {back}");
        let again = denormalize(back, min, max);
        prop_assert!((again - x).abs() <= 1e-9 * x.abs().max(1.0), "{x} -> {again}");
        Ok(())
    })
}

/// Rotation about z by `a`, then y by `b`, then x by `c`.
fn rotate(p: Position3, (a, b, c): (f64, f64, f64)) -> Position3 {
    let (x, y, z) = (p.x * a.cos() - p.y * a.sin(), p.x * a.sin() + p.y * a.cos(), p.h);
    let (x, z) = (x * b.cos() + z * b.sin(), -x * b.sin() + z * b.cos());
    let (y, z) = (y * c.cos() - z * c.sin(), y * c.sin() + z * c.cos());
    Position3::new(x, y, z)
}

pub fn sector_rotation() -> Result<(), String> {
    let angles = (-PI..PI, -PI..PI, -PI..PI);
    prop((position(500.0), position(500.0), position(500.0), 50.0..400.0f64, 0.1..1.5f64, angles), |(apex, target, cand, radius, half, rot)| {
        prop_assume!(apex != target);
        let s = Sector::toward(apex, target, radius, half);
        // Skip points whose membership hinges on rounding.
        prop_assume!((s.divergence(&cand) - half).abs() > 1e-6);
        prop_assume!(((cand - apex).norm() - radius).abs() > 1e-6);
        let r = Sector::toward(rotate(apex, rot), rotate(target, rot), radius, half);
        prop_assert_eq!(in_sector(&cand, &s), in_sector(&rotate(cand, rot), &r));
        Ok(())
    })
}

fn static_config(num_uavs: u32, seed: u64) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.sim.num_uavs = num_uavs;
    cfg.sim.seed = seed;
    cfg.sim.tick_budget = 20;
    cfg.mobility.speed_range = [0.0, 0.0];
    cfg.mobility.mean_speed = 0.0;
    cfg
}

pub fn fragmented_hello() -> Result<(), String> {
    let cluster = prop::collection::vec((0.0..150.0f64, -PI..PI, 100.0..300.0f64), 1..6);
    prop((cluster, 600.0..950.0f64, -PI..PI, 100.0..300.0f64, any::<u64>()), |(cluster, rho, theta, h, seed)| {
        let mut positions: Vec<Position3> =
            cluster.iter().map(|&(r, t, h)| Position3::new(r * t.cos(), r * t.sin(), h)).collect();
        positions.push(Position3::new(rho * theta.cos(), rho * theta.sin(), h));
        let lonely = positions.len() - 1;
        let mut world = World::with_positions(static_config(positions.len() as u32, seed), &positions).unwrap();
        for _ in 0..10 {
            world.run_episode();
            prop_assert_eq!(world.candidate_count(lonely), 0);
            prop_assert_eq!(world.uavs()[lonely].mode, Mode::NeighbourDiscovery);
            prop_assert!(world.interferers().contains(&NodeId(lonely as u32)));
            prop_assert!(world.uavs()[lonely].next_hello <= world.tick() + 1);
        }
        Ok(())
    })
}

pub fn q_bounded() -> Result<(), String> {
    let update = (0usize..4, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=0.9f64, 0.0..=1.0f64);
    prop(prop::collection::vec(update, 1..300), |stream| {
        let mut q = [0.0f64; 4];
        for (a, reward, beta, gamma, trace) in stream {
            let best = q.iter().copied().fold(0.0, f64::max);
            q[a] = q_update(q[a], reward, best, beta, gamma, trace);
            prop_assert!((0.0..=10.0).contains(&q[a]), "Q = {}", q[a]);
        }
        Ok(())
    })
}

fn snapshot() -> impl Strategy<Value = StateSnapshot> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64)
        .prop_map(|(energy, rs_l2, rs_l3, coverage, collision)| StateSnapshot { energy, rs_l2, rs_l3, coverage, collision })
}

pub fn reward_monotone() -> Result<(), String> {
    prop((snapshot(), 0usize..5, 1e-6..1.0f64, 1usize..20), |(s, field, delta, n)| {
        let w = RewardWeights::DEFAULT;
        let base = compute_reward(&s, n, &w);
        let mut t = s;
        let slot = match field {
            0 => &mut t.energy,
            1 => &mut t.rs_l2,
            2 => &mut t.rs_l3,
            3 => &mut t.coverage,
            _ => &mut t.collision,
        };
        prop_assume!(*slot + delta <= 1.0);
        *slot += delta;
        let moved = compute_reward(&t, n, &w);
        if field == 4 {
            prop_assert!(moved < base, "collision up: {base} -> {moved}");
        } else {
            prop_assert!(moved > base, "component {field} up: {base} -> {moved}");
        }
        Ok(())
    })
}

pub fn reward_zero_when_fragmented() -> Result<(), String> {
    prop(snapshot(), |s| {
        prop_assert_eq!(compute_reward(&s, 0, &RewardWeights::DEFAULT), 0.0);
        Ok(())
    })
}

pub fn discount_linear() -> Result<(), String> {
    prop((0usize..100, 0usize..100, 0usize..100, 100usize..300, 0.0..0.5f64, 0.5..1.0f64), |(a1, a2, b, m, lo, hi)| {
        let g = |n| adaptive_discount_factor(n, m, lo, hi);
        let (d1, d2) = (g(a1 + b) - g(a1), g(a2 + b) - g(a2));
        prop_assert!((d1 - d2).abs() <= 1e-12, "{d1} vs {d2}");
        Ok(())
    })
}

pub fn one_step_equivalence() -> Result<(), String> {
    line_reference::compare(1000).map(|_| ())
}

fn candidates(max: usize) -> impl Strategy<Value = Vec<Candidate>> {
    prop::collection::vec((0u32..80, 0u32..8), 1..max).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (q, div))| Candidate {
                node: NodeId(i as u32),
                q: f64::from(q) / 8.0,
                residual_energy: 1e5,
                coverage: 1.0,
                collision: 0.0,
                distance: 100.0,
                divergence: f64::from(div) / 8.0,
            })
            .collect()
    })
}

pub fn greedy_scale_invariant() -> Result<(), String> {
    prop((candidates(9), 0.01..100.0f64), |(cs, c)| {
        let scaled: Vec<Candidate> = cs.iter().map(|x| Candidate { q: x.q * c, ..*x }).collect();
        prop_assert_eq!(greedy_index(&cs), greedy_index(&scaled));
        Ok(())
    })
}

pub fn exploration_frequency() -> Result<(), String> {
    let open = Constraints { energy_threshold: 0.0, coverage_threshold: 0.0, collision_threshold: 1.0, r_min: 0.0, enforce: true };
    let distinct = prop::sample::subsequence((0u32..80).collect::<Vec<_>>(), 4).prop_shuffle();
    prop((distinct, any::<u64>()), |(qs, seed)| {
        let cs: Vec<Candidate> = qs
            .iter()
            .enumerate()
            .map(|(i, &q)| Candidate {
                node: NodeId(i as u32),
                q: f64::from(q),
                residual_energy: 1e5,
                coverage: 1.0,
                collision: 0.0,
                distance: 100.0,
                divergence: 0.0,
            })
            .collect();
        let mut rng = substream(seed, Stream::Policy, 0, 0, 0);
        let draws = 100_000;
        let mut off = 0u32;
        for _ in 0..draws {
            if let Selection::Hop { greedy: false, .. } = select_next_hop(&cs, &[], 0.5, &open, &mut rng) {
                off += 1;
            }
        }
        let p = 0.5 * 0.75;
        let sigma = (p * (1.0 - p) / f64::from(draws)).sqrt();
        let freq = f64::from(off) / f64::from(draws);
        prop_assert!((freq - p).abs() <= 3.0 * sigma, "{freq} vs {p} ± {}", 3.0 * sigma);
        Ok(())
    })
}

/// Small, stressed networks: short batteries so charging happens, optional
/// fragmentation or depletion events.
fn stressed_config() -> impl Strategy<Value = SimConfig> {
    let event = (0u64..15, 0u8..4, 0.1..0.9f64, 100.0..800.0f64, any::<bool>());
    let knobs = (any::<u64>(), 2u32..16, 150.0..500.0f64, 0.0..=1.0f64, any::<bool>(), any::<bool>(), -5.0..10.0f64, 1500.0..8000.0f64);
    (knobs, prop::option::of(event)).prop_map(|((seed, m, radius, eps, plain, fading, sir, energy), event)| {
        let mut cfg = SimConfig::default();
        cfg.sim.seed = seed;
        cfg.sim.num_uavs = m;
        cfg.sim.tick_budget = 50;
        cfg.domain.radius_m = radius;
        cfg.rl.epsilon = eps;
        cfg.sim.baseline = if plain { Baseline::PlainQ } else { Baseline::Iqmr };
        cfg.channel.fading = fading;
        cfg.channel.coverage_samples = 20;
        cfg.channel.sir_threshold_db = sir;
        cfg.energy.initial_j = energy;
        if let Some((episode, kind, fraction, duration_ms, staggered)) = event {
            let mut ev = ScenarioEvent::new(episode, if kind == 0 { EventKind::DepleteEnergy } else { EventKind::Fragment });
            ev.selector = [Selector::RandomFraction, Selector::TopQHalf, Selector::BottomQHalf][kind as usize % 3];
            ev.fraction = fraction;
            ev.duration_ms = duration_ms;
            ev.rejoin = if staggered { Rejoin::StaggeredQuarters } else { Rejoin::AllAtOnce };
            cfg.scenario.event.push(ev);
        }
        cfg
    })
}

pub fn engine_runtime() -> Result<(), String> {
    prop(stressed_config(), |cfg| {
        let mut world = World::new(cfg).unwrap();
        world.run(40);
        prop_assert!(world.violations().is_empty(), "{:?}", &world.violations()[..world.violations().len().min(5)]);
        Ok(())
    })
}

pub fn neighbour_sets_nest() -> Result<(), String> {
    prop(stressed_config(), |cfg| {
        let range = 250.0;
        let slack_per_tick = 2.0 * cfg.mobility.speed_range[1] * cfg.sim.tick_ms / 1000.0;
        let mut world = World::new(cfg).unwrap();
        for _ in 0..30 {
            world.run_episode();
            let uavs = world.uavs();
            for (i, u) in uavs.iter().enumerate() {
                for c in world.candidates(i) {
                    if c == NodeId::TBS {
                        continue;
                    }
                    prop_assert!(u.table.get(c).is_some(), "{c} is a candidate of {} but not a neighbour", u.id);
                }
                for r in u.table.records() {
                    let other = &uavs[r.hello.origin.0 as usize];
                    let age = world.tick().saturating_sub(r.last_heard);
                    let d = relative_distance(&u.position, &other.position);
                    prop_assert!(other.is_active());
                    prop_assert!(d <= range + slack_per_tick * (age + 1) as f64 + 1e-6, "{} lists {} at {d} m", u.id, other.id);
                }
            }
        }
        Ok(())
    })
}

pub fn engine_deterministic() -> Result<(), String> {
    prop(stressed_config(), |cfg| {
        let a = World::new(cfg.clone()).unwrap().run(20);
        let b = World::new(cfg).unwrap().run(20);
        let bits = |m: &[uavnet_core::EpisodeMetrics]| {
            m.iter().map(|r| (r.cum_reward.to_bits(), r.residual_energy_j.to_bits(), r.delivered, r.dropped, r.mean_q.to_bits())).collect::<Vec<_>>()
        };
        prop_assert_eq!(bits(&a), bits(&b));
        Ok(())
    })
}
