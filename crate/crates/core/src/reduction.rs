//! Reduction of each body to a two-body problem against the combined mass of
//! the other two, placed at their centre of mass.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{
    cartesian_to_polar, is_barycentric, to_barycentric, Body, BodyState, PolarState, SystemConfig,
};

/// Scalar initial radius and radial rate of the subject body, `x_{i,o}` and `ẋ_{i,o}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubjectInitial {
    pub radius: f64,
    pub radial_rate: f64,
}

/// One body against the combined mass of its two partners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub subject: Body,
    /// Sum of the two partner masses.
    pub combined_mass: f64,
    pub total_mass: f64,
    /// `combined_mass / total_mass`.
    pub mass_ratio: f64,
    pub g: f64,
    /// Polar state of (partner centre of mass − subject) at `t0`.
    pub rel_initial: PolarState,
    pub subject_initial: SubjectInitial,
    pub t0: f64,
    /// The input configuration was not barycentric and had to be shifted.
    pub frame_shifted: bool,
}

impl ReducedProblem {
    /// Angle of the subject's own position vector at `t0`, in (−π, π]; the relative vector
    /// points the opposite way.
    pub fn subject_theta0(&self) -> f64 {
        let theta = self.rel_initial.theta + PI;
        if theta > PI {
            theta - TAU
        } else {
            theta
        }
    }

    /// Specific angular momentum of the relative motion, `x₀²θ̇₀` (signed).
    pub fn angular_momentum(&self) -> f64 {
        self.rel_initial.r * self.rel_initial.r * self.rel_initial.theta_dot
    }

    /// `G·(m₁+m₂+m₃)`.
    pub fn gravitational_parameter(&self) -> f64 {
        self.g * self.total_mass
    }

    /// Whether the subject scalars are the ones implied by the barycentric
    /// identity `x_{i,o} = ρ·x₀`, `ẋ_{i,o} = ρ·ẋ₀`.
    pub fn is_barycentric_consistent(&self, rel_tol: f64) -> bool {
        let rho = self.mass_ratio;
        let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= rel_tol * scale;
        let speed = self.rel_initial.r_dot.abs() + (self.rel_initial.r * self.rel_initial.theta_dot).abs();
        close(
            self.subject_initial.radius,
            rho * self.rel_initial.r,
            rho * self.rel_initial.r,
        ) && close(
            self.subject_initial.radial_rate,
            rho * self.rel_initial.r_dot,
            rho * speed,
        )
    }
}

/// Position and velocity of the mass-weighted centre of the two bodies other than `exclude`.
pub fn pair_center_of_mass(config: &SystemConfig, exclude: Body) -> BodyState {
    let (a, b) = exclude.partners();
    let (ma, mb) = (config.mass(a), config.mass(b));
    let (sa, sb) = (config.state(a), config.state(b));
    let m = ma + mb;
    BodyState {
        position: (ma * sa.position + mb * sb.position) / m,
        velocity: (ma * sa.velocity + mb * sb.velocity) / m,
    }
}

/// Build the reduced problem for `subject`. The configuration is moved to the
/// barycentric frame first; `frame_shifted` records whether that changed it.
pub fn reduce(config: &SystemConfig, subject: Body) -> Result<ReducedProblem> {
    let frame_shifted = !is_barycentric(config);
    let config = to_barycentric(config);
    let own = config.state(subject);
    let own_polar = cartesian_to_polar(own)?;

    let partner = pair_center_of_mass(&config, subject);
    let relative = BodyState {
        position: partner.position - own.position,
        velocity: partner.velocity - own.velocity,
    };
    let h = relative.position.cross(relative.velocity);
    if h.abs() <= 1e-12 * relative.position.norm() * relative.velocity.norm() {
        return Err(Error::DegenerateRotation);
    }
    let rel_initial = cartesian_to_polar(&relative)?;

    let (a, b) = subject.partners();
    let combined_mass = config.mass(a) + config.mass(b);
    let total_mass = config.total_mass();
    Ok(ReducedProblem {
        subject,
        combined_mass,
        total_mass,
        mass_ratio: combined_mass / total_mass,
        g: config.g,
        rel_initial,
        subject_initial: SubjectInitial {
            radius: own_polar.r,
            radial_rate: own_polar.r_dot,
        },
        t0: config.t0,
        frame_shifted,
    })
}

/// `ê_{xᵢ}·ê_{x_jk} + 1` for the configuration as given (no frame shift).
/// Zero when the subject and its partner centre of mass are exactly anti-parallel.
pub fn collinearity_defect(config: &SystemConfig, subject: Body) -> Result<f64> {
    let own = config.state(subject).position.unit()?;
    let partner = pair_center_of_mass(config, subject).position.unit()?;
    Ok(own.dot(partner) + 1.0)
}
