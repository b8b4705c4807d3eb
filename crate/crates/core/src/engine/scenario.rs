use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::uav::UavState;
use crate::config::{Rejoin, ScenarioEvent, Selector};

/// Offset between consecutive rejoining quarters, µs.
pub const STAGGER_STEP_US: u64 = 2_500;

/// Indices of the UAVs an event applies to, in ascending order. Only UAVs
/// currently in the airspace are eligible.
pub fn select_targets<R: Rng + ?Sized>(uavs: &[UavState], ev: &ScenarioEvent, rng: &mut R) -> Vec<usize> {
    let mut active: Vec<usize> = (0..uavs.len()).filter(|&i| uavs[i].is_active()).collect();
    let mut out = match ev.selector {
        Selector::ExplicitIds => active.into_iter().filter(|&i| ev.ids.contains(&(i as u32))).collect(),
        Selector::RandomFraction => {
            let n = libm::round(ev.fraction * active.len() as f64) as usize;
            let n = n.max(1).min(active.len());
            active.shuffle(rng);
            active.truncate(n);
            active
        }
        Selector::TopQHalf | Selector::BottomQHalf => {
            let n = active.len() / 2;
            active.sort_by(|&a, &b| {
                let (qa, qb) = (uavs[a].q.max_value(), uavs[b].q.max_value());
                let ord = if ev.selector == Selector::TopQHalf { qb.total_cmp(&qa) } else { qa.total_cmp(&qb) };
                ord.then(a.cmp(&b))
            });
            active.truncate(n);
            active
        }
    };
    out.sort_unstable();
    out
}

/// Rejoin times (µs) for a fragmented cohort, paired with UAV indices.
pub fn rejoin_schedule(targets: &[usize], start_us: u64, duration_us: u64, policy: Rejoin) -> Vec<(u64, usize)> {
    let back = start_us + duration_us;
    match policy {
        Rejoin::AllAtOnce => targets.iter().map(|&i| (back, i)).collect(),
        Rejoin::StaggeredQuarters => {
            let chunk = targets.len().div_ceil(4).max(1);
            targets
                .iter()
                .enumerate()
                .map(|(k, &i)| (back + (k / chunk + 1) as u64 * STAGGER_STEP_US, i))
                .collect()
        }
    }
}
