//! Battery accounting: first-order radio energy, flight drain and charging.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParams {
    /// Electronics energy, J/bit.
    pub eps_elec: f64,
    /// Free-space amplifier energy, J/bit/m².
    pub eps_amp_fs: f64,
    /// Multipath amplifier energy, J/bit/m⁴.
    pub eps_amp_mp: f64,
    /// Crossover distance between the two amplifier regimes, m.
    pub r0: f64,
    /// Flight power density, W/kg.
    pub payload_w_per_kg: f64,
    pub mass_kg: f64,
    /// Full battery, J.
    pub initial: f64,
    /// Below this the UAV must leave to charge, J.
    pub threshold: f64,
    pub charge_rate: f64,
}

/// Remaining charge of one UAV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Battery {
    residual: f64,
    capacity: f64,
}

impl Battery {
    pub fn full(capacity: f64) -> Self {
        Battery { residual: capacity, capacity }
    }

    pub fn with_residual(capacity: f64, residual: f64) -> Self {
        Battery { residual: residual.max(0.0).min(capacity), capacity }
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// `E_res / E`, in [0, 1].
    pub fn normalized(&self) -> f64 {
        self.residual / self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.residual >= self.capacity
    }
}

/// Energy to transmit `bits` over `r` metres: `ε_elec·k + ε_fs·k·r²` up to
/// `r0`, `ε_elec·k + ε_mp·k·r⁴` beyond it.
pub fn transmission_energy(bits: f64, r: f64, p: &EnergyParams) -> f64 {
    let amp = if r <= p.r0 { p.eps_amp_fs * r * r } else { p.eps_amp_mp * r * r * r * r };
    p.eps_elec * bits + amp * bits
}

/// Energy burnt keeping the airframe aloft for `dt` seconds.
pub fn flight_drain(dt: f64, p: &EnergyParams) -> f64 {
    p.payload_w_per_kg * p.mass_kg * dt
}

/// Saturating debit; the battery never goes negative.
pub fn debit(battery: Battery, amount: f64) -> Battery {
    Battery { residual: (battery.residual - amount).max(0.0), ..battery }
}

/// One charging interval. Returns the new battery and whether it is now full.
pub fn charge_step(battery: Battery, dt: f64, p: &EnergyParams) -> (Battery, bool) {
    let residual = (battery.residual + p.charge_rate * dt).min(battery.capacity);
    let b = Battery { residual, ..battery };
    (b, b.is_full())
}
