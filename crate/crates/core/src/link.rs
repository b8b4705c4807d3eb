//! Pairwise link quantities: distance, link sustenance time, collision
//! probability, and min-max normalization.

use crate::error::DegenerateRange;
use crate::mobility::{Kinematics, Position3};

/// Closing speeds below this are treated as zero, m/s.
pub const EQUIDISTANT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionParams {
    pub xi_x: f64,
    pub xi_y: f64,
    pub r_min: f64,
    pub threshold: f64,
    /// Multiplier applied to the separation before it enters the collision
    /// model. 1 reproduces the plain inter-UAV distance.
    pub r_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeMotion {
    Receding,
    Approaching,
    Equidistant,
}

/// Seconds until a link breaks, or `Equidistant` when the geometry is static.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LstResult {
    Finite(f64),
    Equidistant,
}

impl LstResult {
    pub fn seconds(&self) -> Option<f64> {
        match *self {
            LstResult::Finite(t) => Some(t),
            LstResult::Equidistant => None,
        }
    }
}

pub fn relative_distance(a: &Position3, b: &Position3) -> f64 {
    (*a - *b).norm()
}

/// Sign of d/dt‖p_i − p_j‖ from the current velocity vectors.
pub fn classify_relative_motion(pos_i: &Position3, kin_i: &Kinematics, pos_j: &Position3, kin_j: &Kinematics) -> RelativeMotion {
    let sep = *pos_i - *pos_j;
    let d = sep.norm();
    if d == 0.0 {
        return RelativeMotion::Equidistant;
    }
    let rate = sep.dot(&(kin_i.velocity() - kin_j.velocity())) / d;
    if rate.abs() < EQUIDISTANT_TOLERANCE {
        RelativeMotion::Equidistant
    } else if rate > 0.0 {
        RelativeMotion::Receding
    } else {
        RelativeMotion::Approaching
    }
}

/// Receding: `(2·R_t − D)/(s_i + s_j)`. Approaching: `(D − r_min)/|s_i − s_j|`.
/// Zero closing or opening speed degrades to `Equidistant`; results are
/// floored at zero.
pub fn link_sustenance_time(d: f64, s_i: f64, s_j: f64, relation: RelativeMotion, range: f64, r_min: f64) -> LstResult {
    match relation {
        RelativeMotion::Receding => {
            let opening = s_i + s_j;
            if opening <= 0.0 {
                return LstResult::Equidistant;
            }
            LstResult::Finite(((2.0 * range - d) / opening).max(0.0))
        }
        RelativeMotion::Approaching => {
            let closing = (s_i - s_j).abs();
            if closing < EQUIDISTANT_TOLERANCE {
                return LstResult::Equidistant;
            }
            LstResult::Finite(((d - r_min) / closing).max(0.0))
        }
        RelativeMotion::Equidistant => LstResult::Equidistant,
    }
}

/// `1 − exp(−r² / (2·ξ_x·ξ_y))`, evaluated at the scaled separation.
///
/// Note that the probability grows with separation, so a wider swept radius
/// is treated as riskier.
pub fn collision_probability(r: f64, p: &CollisionParams) -> f64 {
    let r = r * p.r_scale;
    -libm::expm1(-(r * r) / (2.0 * p.xi_x * p.xi_y))
}

/// Min-max normalization with clamping into `[min, max]`.
pub fn normalize(x: f64, min: f64, max: f64) -> Result<f64, DegenerateRange> {
    if max == min {
        return Err(DegenerateRange);
    }
    let x = x.max(min.min(max)).min(max.max(min));
    Ok((x - min) / (max - min))
}

pub fn denormalize(unit: f64, min: f64, max: f64) -> f64 {
    min + unit * (max - min)
}
