//! Planar vectors, body states and the polar frame attached to each position vector.
//!
//! Angles are never reduced modulo 2π once they leave [`cartesian_to_polar`]; any
//! continuous angle sequence built on top of them is unwrapped by the caller.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar vector. Used for positions, velocities and accelerations alike.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta` from the x axis.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Scalar (z) component of the planar cross product.
    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn unit(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroRadius);
        }
        Ok(self / n)
    }

    /// Counter-clockwise rotation by `angle` radians.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// One of the three bodies. Displayed and serialized 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "usize", try_from = "usize")]
pub enum Body {
    One,
    Two,
    Three,
}

impl Body {
    pub const ALL: [Body; 3] = [Body::One, Body::Two, Body::Three];

    /// Zero-based array index.
    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Body::One => 0,
            Body::Two => 1,
            Body::Three => 2,
        }
    }

    /// One-based label, as used in file names and messages.
    #[inline]
    pub const fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Option<Body> {
        match n {
            1 => Some(Body::One),
            2 => Some(Body::Two),
            3 => Some(Body::Three),
            _ => None,
        }
    }

    /// The two other bodies, in ascending order.
    pub const fn partners(self) -> (Body, Body) {
        match self {
            Body::One => (Body::Two, Body::Three),
            Body::Two => (Body::One, Body::Three),
            Body::Three => (Body::One, Body::Two),
        }
    }
}

impl From<Body> for usize {
    fn from(body: Body) -> usize {
        body.number()
    }
}

impl TryFrom<usize> for Body {
    type Error = String;

    fn try_from(n: usize) -> std::result::Result<Body, String> {
        Body::from_number(n).ok_or_else(|| format!("body number must be 1, 2 or 3, got {n}"))
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub position: Vec2,
    pub velocity: Vec2,
}

impl BodyState {
    pub const fn new(position: Vec2, velocity: Vec2) -> Self {
        Self { position, velocity }
    }
}

/// Masses, gravitational constant and initial states of the three bodies.
///
/// At most one mass may be zero (a test particle); the pair centre of mass of
/// any two bodies is then still defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub masses: [f64; 3],
    pub g: f64,
    pub bodies: [BodyState; 3],
    pub t0: f64,
}

impl SystemConfig {
    pub fn new(masses: [f64; 3], g: f64, bodies: [BodyState; 3], t0: f64) -> Result<Self> {
        let config = Self { masses, g, bodies, t0 };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "gravitational constant must be positive and finite, got {}",
                self.g
            )));
        }
        if !self.t0.is_finite() {
            return Err(Error::InvalidConfig("t0 must be finite".into()));
        }
        for body in Body::ALL {
            let m = self.mass(body);
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "body {body}: mass must be non-negative and finite, got {m}"
                )));
            }
            let s = self.state(body);
            if !(s.position.is_finite() && s.velocity.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "body {body}: state has non-finite components"
                )));
            }
        }
        if self.masses.iter().filter(|&&m| m == 0.0).count() > 1 {
            return Err(Error::InvalidConfig("at most one body may have zero mass".into()));
        }
        for (a, b) in [
            (Body::One, Body::Two),
            (Body::One, Body::Three),
            (Body::Two, Body::Three),
        ] {
            if self.state(a).position == self.state(b).position {
                return Err(Error::InvalidConfig(format!(
                    "bodies {a} and {b} share the same position"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn mass(&self, body: Body) -> f64 {
        self.masses[body.index()]
    }

    #[inline]
    pub fn state(&self, body: Body) -> &BodyState {
        &self.bodies[body.index()]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Largest distance of any body from the origin.
    pub fn max_position_norm(&self) -> f64 {
        self.bodies.iter().map(|b| b.position.norm()).fold(0.0, f64::max)
    }

    pub fn min_pair_distance(&self) -> f64 {
        let p = |b: Body| self.state(b).position;
        [
            (p(Body::One) - p(Body::Two)).norm(),
            (p(Body::One) - p(Body::Three)).norm(),
            (p(Body::Two) - p(Body::Three)).norm(),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

/// Radial distance, unwrapped rotation angle and their rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
    pub r_dot: f64,
    pub theta_dot: f64,
}

pub fn barycenter(config: &SystemConfig) -> Vec2 {
    let total = config.total_mass();
    let weighted = Body::ALL
        .into_iter()
        .fold(Vec2::ZERO, |acc, b| acc + config.mass(b) * config.state(b).position);
    weighted / total
}

fn barycentric_velocity(config: &SystemConfig) -> Vec2 {
    let total = config.total_mass();
    let weighted = Body::ALL
        .into_iter()
        .fold(Vec2::ZERO, |acc, b| acc + config.mass(b) * config.state(b).velocity);
    weighted / total
}

/// Shift positions and velocities so the barycentre sits at rest at the origin.
pub fn to_barycentric(config: &SystemConfig) -> SystemConfig {
    let center = barycenter(config);
    let drift = barycentric_velocity(config);
    let mut out = config.clone();
    for state in out.bodies.iter_mut() {
        state.position -= center;
        state.velocity -= drift;
    }
    out
}

/// Whether [`to_barycentric`] would move anything.
pub fn is_barycentric(config: &SystemConfig) -> bool {
    barycenter(config) == Vec2::ZERO && barycentric_velocity(config) == Vec2::ZERO
}

pub fn cartesian_to_polar(state: &BodyState) -> Result<PolarState> {
    let p = state.position;
    let v = state.velocity;
    let r2 = p.norm_squared();
    if r2 == 0.0 {
        return Err(Error::ZeroRadius);
    }
    let r = p.norm();
    Ok(PolarState {
        r,
        theta: p.angle(),
        r_dot: p.dot(v) / r,
        theta_dot: p.cross(v) / r2,
    })
}

pub fn polar_to_cartesian(state: &PolarState) -> BodyState {
    let radial = Vec2::from_angle(state.theta);
    let transverse = Vec2::new(-radial.y, radial.x);
    BodyState {
        position: state.r * radial,
        velocity: state.r_dot * radial + (state.r * state.theta_dot) * transverse,
    }
}

/// Shift `angle` by a multiple of 2π so it lies within π of `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    use std::f64::consts::TAU;
    angle + TAU * ((reference - angle) / TAU).round()
}
