//! Closed-form conic solution of the reduced polar equations,
//! `x(θ) = 1 / (k1·cos(θ − φ) + k2)`.
//!
//! With `u = 1/x` the reduced problem becomes `u'' + u = GM/h²` in θ, so the
//! two integration constants follow from `u(θ₀) = 1/x₀` and
//! `u'(θ₀) = −ẋ₀/(x₀²θ̇₀)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::ReducedProblem;

/// Relative width of the band around `k1 = k2` classified as parabolic.
pub const PARABOLIC_TOL: f64 = 1e-12;

/// Denominators at or below this fraction of `k1 + k2` count as divergent.
pub const DIVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitClass {
    EllipticLike,
    ParabolicLike,
    HyperbolicLike,
}

impl OrbitClass {
    pub fn classify(k1: f64, k2: f64) -> OrbitClass {
        if (k2 - k1).abs() <= PARABOLIC_TOL * k2 {
            OrbitClass::ParabolicLike
        } else if k2 > k1 {
            OrbitClass::EllipticLike
        } else {
            OrbitClass::HyperbolicLike
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicParams {
    pub c1: f64,
    pub c2: f64,
    /// Amplitude `√(c1² + c2²)`, never negative.
    pub k1: f64,
    /// `GM/h²`.
    pub k2: f64,
    pub phi: f64,
    /// Specific angular momentum `x₀²θ̇₀`, signed.
    pub h: f64,
    pub orbit_class: OrbitClass,
}

impl ConicParams {
    /// Build from amplitude, offset and phase directly.
    pub fn from_amplitude(k1: f64, k2: f64, phi: f64, h: f64) -> ConicParams {
        assert!(k1 >= 0.0 && k2 > 0.0, "conic requires k1 >= 0 and k2 > 0");
        let (s, c) = phi.sin_cos();
        ConicParams {
            c1: k1 * c,
            c2: k1 * s,
            k1,
            k2,
            phi,
            h,
            orbit_class: OrbitClass::classify(k1, k2),
        }
    }

    /// `k1·cos(θ − φ) + k2`, i.e. `1/x(θ)`.
    #[inline]
    pub fn denominator(&self, theta: f64) -> f64 {
        self.k1 * (theta - self.phi).cos() + self.k2
    }

    /// `k1/k2`.
    pub fn eccentricity(&self) -> f64 {
        self.k1 / self.k2
    }

    /// Angular rate `h/x(θ)²` along the conic.
    pub fn theta_rate(&self, theta: f64) -> f64 {
        let d = self.denominator(theta);
        self.h * d * d
    }

    /// `dx/dθ` along the conic.
    pub fn radius_slope(&self, theta: f64) -> f64 {
        let d = self.denominator(theta);
        self.k1 * (theta - self.phi).sin() / (d * d)
    }

    /// Half-width of the angular window (around `φ + π`'s opposite, i.e. centred
    /// on `φ`) where the denominator stays positive. `None` when bound.
    pub fn escape_half_angle(&self) -> Option<f64> {
        match self.orbit_class {
            OrbitClass::EllipticLike => None,
            OrbitClass::ParabolicLike => Some(PI),
            OrbitClass::HyperbolicLike => Some((-self.k2 / self.k1).clamp(-1.0, 1.0).acos()),
        }
    }
}

/// Fit the integration constants of the conic to the reduced problem's initial state.
pub fn fit_conic(problem: &ReducedProblem) -> Result<ConicParams> {
    let rel = &problem.rel_initial;
    if rel.theta_dot == 0.0 || !rel.theta_dot.is_finite() {
        return Err(Error::DegenerateRotation);
    }
    if rel.r <= 0.0 {
        return Err(Error::ZeroRadius);
    }
    let h = rel.r * rel.r * rel.theta_dot;
    let k2 = problem.gravitational_parameter() / (h * h);

    // u(θ₀) − k2 and u'(θ₀)
    let a = 1.0 / rel.r - k2;
    let b = -rel.r_dot / h;
    let (s, c) = rel.theta.sin_cos();
    let c1 = a * c - b * s;
    let c2 = a * s + b * c;
    let k1 = c1.hypot(c2);
    let phi = c2.atan2(c1);
    Ok(ConicParams {
        c1,
        c2,
        k1,
        k2,
        phi,
        h,
        orbit_class: OrbitClass::classify(k1, k2),
    })
}

pub fn eval_radius(params: &ConicParams, theta: f64) -> Result<f64> {
    let d = params.denominator(theta);
    if !(d > DIVERGENCE_TOL * (params.k1 + params.k2)) {
        return Err(Error::RadiusDivergence { theta, denominator: d });
    }
    Ok(1.0 / d)
}

/// Re-express the conic in the subject's angle: evaluating the result at `θᵢ`
/// equals evaluating the input at `θᵢ − π`.
pub fn shift_subject_angle(params: &ConicParams) -> ConicParams {
    ConicParams {
        c1: -params.c1,
        c2: -params.c2,
        phi: params.phi + PI,
        ..*params
    }
}
