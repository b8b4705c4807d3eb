//! Power-law path loss with Nakagami-m power fading, SIR and Monte Carlo
//! coverage probability.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::RadioError;
use crate::mobility::Position3;
use crate::node::NodeId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Path loss exponent ζ.
    pub zeta: f64,
    /// Rician K-factor; the Nakagami shape is derived from it.
    pub rician_k: f64,
    /// SIR threshold, linear.
    pub sir_threshold: f64,
    /// Fading redraws per coverage estimate.
    pub coverage_samples: u32,
    /// Received-power floor substituted for interference when no other UAV
    /// is transmitting.
    pub noise_floor: f64,
    /// When false every gain is exactly 1 (deterministic channel).
    pub fading: bool,
}

impl ChannelParams {
    /// `m = 2(K+1)/(2K+1)`.
    pub fn nakagami_m(&self) -> f64 {
        nakagami_m(self.rician_k)
    }
}

pub fn nakagami_m(rician_k: f64) -> f64 {
    2.0 * (rician_k + 1.0) / (2.0 * rician_k + 1.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// `(r² + h²)^(-ζ/2)` for horizontal separation `r` and transmitter altitude `h`.
pub fn path_loss(r: f64, h: f64, zeta: f64) -> Result<f64, RadioError> {
    let d2 = r * r + h * h;
    if d2 == 0.0 {
        return Err(RadioError::DegenerateGeometry);
    }
    Ok(libm::pow(d2, -zeta / 2.0))
}

/// Path loss from `tx` to `rx` using the horizontal distance and the
/// transmitter's altitude.
pub fn link_loss(tx: &Position3, rx: &Position3, zeta: f64) -> Result<f64, RadioError> {
    path_loss(libm::hypot(tx.x - rx.x, tx.y - rx.y), tx.h, zeta)
}

/// Draws a power gain from Γ(m, 1/m). An infinite shape means no fading.
pub fn sample_fading_gain<R: Rng + ?Sized>(m: f64, rng: &mut R) -> f64 {
    if !m.is_finite() {
        return 1.0;
    }
    Gamma::new(m, 1.0 / m).expect("Nakagami shape must be positive").sample(rng)
}

/// A transmitter as seen by one receiver: position and the fading gain of its
/// link to that receiver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emitter {
    pub pos: Position3,
    pub gain: f64,
}

/// Interference-limited SIR at `rx`: `g·l(r, h_tx) / Σ g_u·l(r_u, h_u)`.
pub fn compute_sir(rx: &Position3, tx: &Emitter, interferers: &[Emitter], zeta: f64) -> Result<f64, RadioError> {
    if interferers.is_empty() {
        return Err(RadioError::NoInterferers);
    }
    let signal = tx.gain * link_loss(&tx.pos, rx, zeta)?;
    let mut interference = 0.0;
    for u in interferers {
        interference += u.gain * link_loss(&u.pos, rx, zeta)?;
    }
    Ok(signal / interference)
}

/// SIR with the noise-floor fallback used when nobody else is on the air.
pub fn effective_sir(rx: &Position3, tx: &Emitter, interferers: &[Emitter], params: &ChannelParams) -> Result<f64, RadioError> {
    match compute_sir(rx, tx, interferers, params.zeta) {
        Err(RadioError::NoInterferers) => Ok(tx.gain * link_loss(&tx.pos, rx, params.zeta)? / params.noise_floor),
        other => other,
    }
}

/// One SIR observation on a directed link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSample {
    pub tx: NodeId,
    pub rx: NodeId,
    pub sir: f64,
    pub tick: u64,
}

/// Draws one SIR for the link `tx -> rx` against the given interferer
/// positions. Gains are drawn tx first, then interferers in order.
pub fn sample_sir<R: Rng + ?Sized>(
    rx: &Position3,
    tx: &Position3,
    interferers: &[Position3],
    params: &ChannelParams,
    scratch: &mut alloc::vec::Vec<Emitter>,
    rng: &mut R,
) -> Result<f64, RadioError> {
    let m = params.nakagami_m();
    let gain = |rng: &mut R| if params.fading { sample_fading_gain(m, rng) } else { 1.0 };
    let desired = Emitter { pos: *tx, gain: gain(rng) };
    scratch.clear();
    for p in interferers {
        scratch.push(Emitter { pos: *p, gain: gain(rng) });
    }
    effective_sir(rx, &desired, scratch, params)
}

/// Monte Carlo estimate of `P[SIR ≥ threshold]` over `params.coverage_samples`
/// independent fading draws. Deterministic for a given `rng` state, so
/// callers can reuse one substream across thresholds.
pub fn coverage_probability<R: Rng + ?Sized>(
    rx: &Position3,
    tx: &Position3,
    interferers: &[Position3],
    params: &ChannelParams,
    rng: &mut R,
) -> Result<f64, RadioError> {
    if !params.fading {
        let sir = sample_sir(rx, tx, interferers, params, &mut alloc::vec::Vec::new(), rng)?;
        return Ok(if sir >= params.sir_threshold { 1.0 } else { 0.0 });
    }
    let n = params.coverage_samples.max(1);
    let mut scratch = alloc::vec::Vec::with_capacity(interferers.len());
    let mut hits = 0u32;
    for _ in 0..n {
        if sample_sir(rx, tx, interferers, params, &mut scratch, rng)? >= params.sir_threshold {
            hits += 1;
        }
    }
    Ok(f64::from(hits) / f64::from(n))
}
