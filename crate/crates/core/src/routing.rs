//! Q(λ) next-hop learning.
//!
//! The tabular state is the node currently holding a packet and an action is
//! the choice of next hop, so each UAV keeps one Q-value per neighbour. The
//! continuous link state (energy, reception ratios, coverage, collision risk)
//! reaches the learner through the reward and the adaptive learning rate and
//! discount factor.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::node::NodeId;

/// Per-UAV action values, keyed by next hop. Missing entries read as 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QTable {
    values: BTreeMap<NodeId, f64>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, action: NodeId) -> f64 {
        self.values.get(&action).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, action: NodeId, value: f64) {
        self.values.insert(action, value);
    }

    /// Largest stored value, 0 for an empty table.
    pub fn max_value(&self) -> f64 {
        self.values.values().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }

    pub fn sum(&self) -> f64 {
        self.values.values().sum()
    }
}

/// Eligibility of `(holder, next hop)` pairs along the current packet's path.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EligibilityTraces {
    traces: BTreeMap<(NodeId, NodeId), f64>,
}

impl EligibilityTraces {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, node: NodeId, action: NodeId) -> f64 {
        self.traces.get(&(node, action)).copied().unwrap_or(0.0)
    }

    pub fn clear(&mut self) {
        self.traces.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = ((NodeId, NodeId), f64)> + '_ {
        self.traces.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Accumulating traces with Watkins' cut.
///
/// Greedy step: every trace decays by `β·λ`, then the visited pair gains 1.
/// Exploratory step: all traces are zeroed and the visited pair is set to 1.
pub fn update_eligibility(traces: &mut EligibilityTraces, visited: (NodeId, NodeId), greedy: bool, beta: f64, lambda: f64) {
    if greedy {
        let decay = beta * lambda;
        traces.traces.retain(|_, e| {
            *e *= decay;
            *e > 0.0
        });
        *traces.traces.entry(visited).or_insert(0.0) += 1.0;
    } else {
        traces.traces.clear();
        traces.traces.insert(visited, 1.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum WeightError {
    #[error("reward weights must be positive")]
    NotPositive,
    #[error("reward weights must be strictly decreasing")]
    NotDecreasing,
    #[error("reward weights must sum to 1 (got {0})")]
    BadSum(f64),
}

/// Weights for collision, L3 reception, L2 reception, coverage and energy,
/// in that order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardWeights([f64; 5]);

impl RewardWeights {
    /// `(16, 8, 4, 2, 1) / 31`.
    pub const DEFAULT: RewardWeights =
        RewardWeights([16.0 / 31.0, 8.0 / 31.0, 4.0 / 31.0, 2.0 / 31.0, 1.0 / 31.0]);

    pub fn new(w: [f64; 5]) -> Result<Self, WeightError> {
        if w.iter().any(|x| !(*x > 0.0)) {
            return Err(WeightError::NotPositive);
        }
        if w.windows(2).any(|p| p[0] <= p[1]) {
            return Err(WeightError::NotDecreasing);
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(WeightError::BadSum(sum));
        }
        Ok(RewardWeights(w))
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.0
    }
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Normalized link state of one node at one instant. All fields in [0, 1].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateSnapshot {
    pub energy: f64,
    pub rs_l2: f64,
    pub rs_l3: f64,
    pub coverage: f64,
    pub collision: f64,
}

impl StateSnapshot {
    /// The base station: mains powered, never drops a packet, cannot collide.
    pub const SINK: StateSnapshot = StateSnapshot { energy: 1.0, rs_l2: 1.0, rs_l3: 1.0, coverage: 1.0, collision: 0.0 };
}

/// `w1·(1−P_coll) + w2·P_rs(L3) + w3·P_rs(L2) + w4·P_cov + w5·E_res`, or 0
/// for a node with no candidate neighbours.
pub fn compute_reward(s: &StateSnapshot, n_candidates: usize, w: &RewardWeights) -> f64 {
    if n_candidates == 0 {
        return 0.0;
    }
    let [w1, w2, w3, w4, w5] = w.0;
    w1 * (1.0 - s.collision) + w2 * s.rs_l3 + w3 * s.rs_l2 + w4 * s.coverage + w5 * s.energy
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BetaMode {
    /// `(β_max − β_min)·e^(−P_cov) + β_min`.
    ExpDecay,
    /// `(β_max − β_min)/(1 − e^(−P_cov)) + β_min`, clamped to `[β_min, β_max]`.
    ReciprocalClamped,
}

pub fn adaptive_learning_rate(p_cov: f64, mode: BetaMode, beta_min: f64, beta_max: f64) -> f64 {
    let span = beta_max - beta_min;
    match mode {
        BetaMode::ExpDecay => span * libm::exp(-p_cov) + beta_min,
        BetaMode::ReciprocalClamped => {
            if p_cov <= 0.0 {
                return beta_max;
            }
            (span / -libm::expm1(-p_cov) + beta_min).max(beta_min).min(beta_max)
        }
    }
}

/// Linear in the candidate count: `N_C·(γ_max − γ_min)/M + γ_min`.
pub fn adaptive_discount_factor(n_candidates: usize, total_uavs: usize, gamma_min: f64, gamma_max: f64) -> f64 {
    n_candidates as f64 * (gamma_max - gamma_min) / total_uavs as f64 + gamma_min
}

/// `q + β·(r + γ·max_q_next − q)·e`.
pub fn q_update(q_old: f64, reward: f64, max_q_next: f64, beta: f64, gamma: f64, trace: f64) -> f64 {
    q_old + beta * (reward + gamma * max_q_next - q_old) * trace
}

/// Upper bound on any Q-value for rewards in [0, 1].
pub fn q_ceiling(gamma_max: f64) -> f64 {
    1.0 / (1.0 - gamma_max)
}

/// What the forwarding UAV knows about one candidate next hop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub node: NodeId,
    pub q: f64,
    pub residual_energy: f64,
    pub coverage: f64,
    pub collision: f64,
    pub distance: f64,
    /// Angle off the holder-to-base-station axis, radians.
    pub divergence: f64,
}

/// Feasibility gates applied before ε-greedy selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constraints {
    pub energy_threshold: f64,
    pub coverage_threshold: f64,
    pub collision_threshold: f64,
    pub r_min: f64,
    /// When false only the loop guard applies.
    pub enforce: bool,
}

impl Constraints {
    pub fn admits(&self, c: &Candidate) -> bool {
        !self.enforce
            || (c.residual_energy >= self.energy_threshold
                && c.coverage >= self.coverage_threshold
                && c.collision <= self.collision_threshold
                && c.distance >= self.r_min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selection {
    Hop { node: NodeId, greedy: bool },
    Fragmented,
}

/// Index of the highest-Q candidate; ties go to the smaller axis divergence,
/// then to the smaller id.
pub fn greedy_index(candidates: &[Candidate]) -> Option<usize> {
    (0..candidates.len()).reduce(|best, i| {
        let (a, b) = (&candidates[best], &candidates[i]);
        let better = b.q > a.q
            || (b.q == a.q && (b.divergence < a.divergence || (b.divergence == a.divergence && b.node < a.node)));
        if better {
            i
        } else {
            best
        }
    })
}

/// ε-greedy choice among the feasible candidates not already on the path.
pub fn select_next_hop<R: Rng + ?Sized>(
    candidates: &[Candidate],
    visited: &[NodeId],
    epsilon: f64,
    constraints: &Constraints,
    rng: &mut R,
) -> Selection {
    let feasible: Vec<Candidate> = candidates
        .iter()
        .filter(|c| !visited.contains(&c.node) && constraints.admits(c))
        .copied()
        .collect();
    let Some(greedy) = greedy_index(&feasible) else {
        return Selection::Fragmented;
    };
    let explore = rng.random::<f64>() < epsilon;
    let chosen = if explore { rng.random_range(0..feasible.len()) } else { greedy };
    Selection::Hop { node: feasible[chosen].node, greedy: chosen == greedy }
}
