//! 3D Gauss-Markov mobility inside a cylinder centred on the base station.

use core::f64::consts::PI;
use core::ops::{Add, Sub};

/// A point in the simulation frame. The base station sits at the origin and
/// `h` is altitude above ground.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Position3 {
    pub const ORIGIN: Position3 = Position3 { x: 0.0, y: 0.0, h: 0.0 };

    pub const fn new(x: f64, y: f64, h: f64) -> Self {
        Position3 { x, y, h }
    }

    pub fn radial(&self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn dot(&self, other: &Position3) -> f64 {
        self.x * other.x + self.y * other.y + self.h * other.h
    }

    pub fn scale(&self, k: f64) -> Position3 {
        Position3::new(self.x * k, self.y * k, self.h * k)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.h.is_finite()
    }
}

impl Add for Position3 {
    type Output = Position3;
    fn add(self, o: Position3) -> Position3 {
        Position3::new(self.x + o.x, self.y + o.y, self.h + o.h)
    }
}

impl Sub for Position3 {
    type Output = Position3;
    fn sub(self, o: Position3) -> Position3 {
        Position3::new(self.x - o.x, self.y - o.y, self.h - o.h)
    }
}

/// Speed (m/s), heading (rad, counter-clockwise from +x) and pitch (rad above
/// the ground plane).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Kinematics {
    pub speed: f64,
    pub direction: f64,
    pub pitch: f64,
}

impl Kinematics {
    pub const fn new(speed: f64, direction: f64, pitch: f64) -> Self {
        Kinematics { speed, direction, pitch }
    }

    /// Velocity vector in m/s.
    pub fn velocity(&self) -> Position3 {
        let horizontal = self.speed * libm::cos(self.pitch);
        Position3::new(
            horizontal * libm::cos(self.direction),
            horizontal * libm::sin(self.direction),
            self.speed * libm::sin(self.pitch),
        )
    }
}

/// Closed interval `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub const fn new(min: f64, max: f64) -> Self {
        Bounds { min, max }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.min).min(self.max)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn is_ordered(&self) -> bool {
        self.min <= self.max
    }
}

/// Gauss-Markov parameters. `speed` and `pitch` bound the state itself;
/// `direction` bounds the per-update heading perturbation, while the heading
/// is a free angle wrapped to (-π, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityParams {
    pub alpha: f64,
    pub mean: Kinematics,
    pub speed: Bounds,
    pub direction: Bounds,
    pub pitch: Bounds,
    /// Hover time between legs, seconds.
    pub pause_time: f64,
}

impl MobilityParams {
    pub fn with_mean_direction(mut self, direction: f64) -> Self {
        self.mean.direction = direction;
        self
    }
}

/// Random perturbation fed into one Gauss-Markov update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MobilityNoise {
    pub speed: f64,
    pub direction: f64,
    pub pitch: f64,
}

/// The cylinder `sqrt(x² + y²) ≤ radius`, `h_min ≤ h ≤ h_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub radius: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Domain {
    pub fn contains(&self, p: &Position3) -> bool {
        p.radial() <= self.radius && p.h >= self.h_min && p.h <= self.h_max
    }
}

/// Wraps an angle into (-π, π]. Angles already in range are returned untouched.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut w = libm::fmod(a + PI, 2.0 * PI);
    if w <= 0.0 {
        w += 2.0 * PI;
    }
    w - PI
}

/// One Gauss-Markov update of speed, heading and pitch.
///
/// `s' = α·s + (1-α)·s̄ + sqrt(1-α²)·n` for each component. The mean heading
/// is unwrapped to the branch nearest the current heading so that mean
/// reversion takes the short way round.
pub fn gmm_step(k: &Kinematics, params: &MobilityParams, noise: MobilityNoise) -> Kinematics {
    let a = params.alpha;
    let memory = libm::sqrt((1.0 - a * a).max(0.0));
    let mix = |prev: f64, mean: f64, n: f64| a * prev + (1.0 - a) * mean + memory * n;

    let mean_direction = k.direction + wrap_angle(params.mean.direction - k.direction);
    Kinematics {
        speed: params.speed.clamp(mix(k.speed, params.mean.speed, noise.speed)),
        direction: wrap_angle(mix(k.direction, mean_direction, noise.direction)),
        pitch: params.pitch.clamp(mix(k.pitch, params.mean.pitch, noise.pitch)),
    }
}

/// Straight-line displacement over `dt` seconds. With `dt = 1` this is the
/// unit-step update `x + s·cos d·cos p`, `y + s·sin d·cos p`, `h + s·sin p`.
pub fn advance_position(pos: Position3, k: &Kinematics, dt: f64) -> Position3 {
    pos + k.velocity().scale(dt)
}

fn fold(value: f64, lo: f64, hi: f64) -> f64 {
    let mut v = value;
    // Repeated mirroring handles overshoots larger than the interval.
    for _ in 0..8 {
        if v > hi {
            v = 2.0 * hi - v;
        } else if v < lo {
            v = 2.0 * lo - v;
        } else {
            return v;
        }
    }
    v.max(lo).min(hi)
}

/// Mirrors a point back across whichever cylinder boundary it crossed.
pub fn reflect_into_domain(pos: Position3, domain: &Domain) -> Position3 {
    let h = fold(pos.h, domain.h_min, domain.h_max);
    let rho = pos.radial();
    if rho <= domain.radius {
        return Position3::new(pos.x, pos.y, h);
    }
    let reflected = fold(rho, -domain.radius, domain.radius);
    // A fold through the axis lands on the opposite ray.
    let k = reflected / rho;
    Position3::new(pos.x * k, pos.y * k, h)
}

/// Advances one step and reflects into the domain. Heading and pitch are
/// mirrored to match the reflected displacement.
pub fn move_within(pos: Position3, k: &Kinematics, dt: f64, domain: &Domain) -> (Position3, Kinematics) {
    let raw = advance_position(pos, k, dt);
    let next = reflect_into_domain(raw, domain);
    let mut kin = *k;
    if raw.h != next.h {
        kin.pitch = -kin.pitch;
    }
    if raw.radial() > domain.radius {
        kin.direction = mirror_heading(kin.direction, &next);
    }
    (next, kin)
}

/// Reflects a heading about the radial normal through `at`.
pub fn mirror_heading(direction: f64, at: &Position3) -> f64 {
    let rho = at.radial();
    if rho == 0.0 {
        return wrap_angle(direction + PI);
    }
    let (nx, ny) = (at.x / rho, at.y / rho);
    let (vx, vy) = (libm::cos(direction), libm::sin(direction));
    let dot = vx * nx + vy * ny;
    if dot <= 0.0 {
        return direction;
    }
    libm::atan2(vy - 2.0 * dot * ny, vx - 2.0 * dot * nx)
}
