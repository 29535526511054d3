//! Time of flight along the conic, `t(θ) = t₀ + (1/h)·∫_{θ₀}^{θ} [k1·cos(θ' − φ) + k2]⁻² dθ'`,
//! and its inverse.
//!
//! For bound orbits (`k2 > k1`) the integral has the closed form
//!
//! ```text
//! ∫ dψ / (k1·cos ψ + k2)² = k2 / (k2² − k1²)^{3/2} · (E − e·sin E),   e = k1/k2
//! tan(E/2) = √((k2 − k1)/(k2 + k1)) · tan(ψ/2)
//! ```
//!
//! which is Kepler's equation in disguise. The half-angle arctangent jumps by
//! 2π in `E` each time `ψ` crosses an odd multiple of π, so `ψ` is split into a
//! whole number of turns plus a remainder in `[−π, π]` and each turn contributes
//! one full-revolution offset. The result is continuous and strictly monotone.
//!
//! Unbound orbits have no real closed form here and are integrated numerically
//! within the angular window where the radius stays finite.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::conic::{eval_radius, ConicParams, OrbitClass};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::roots::{bracketed_root, RootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Relative part of the quadrature tolerance, and the factor applied to
/// [`TimeLaw::time_scale`] for the absolute part.
pub const QUADRATURE_REL_TOL: f64 = 1e-13;
pub const QUADRATURE_ABS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeLaw {
    pub params: ConicParams,
    /// Specific angular momentum, signed; equals `params.h`.
    pub h: f64,
    pub theta0: f64,
    pub t0: f64,
    /// Sign of the angular rate: +1 when θ grows with time.
    pub sweep_sign: f64,
    pub method: Method,
    anchor: f64,
}

impl TimeLaw {
    pub fn new(params: ConicParams, theta0: f64, t0: f64) -> Result<TimeLaw> {
        if params.h == 0.0 || !params.h.is_finite() {
            return Err(Error::DegenerateRotation);
        }
        // the starting point must itself be on the finite part of the conic
        eval_radius(&params, theta0)?;
        let method = match params.orbit_class {
            OrbitClass::EllipticLike => Method::ClosedForm,
            _ => Method::Quadrature,
        };
        let mut law = TimeLaw {
            params,
            h: params.h,
            theta0,
            t0,
            sweep_sign: params.h.signum(),
            method,
            anchor: 0.0,
        };
        if method == Method::ClosedForm {
            law.anchor = law.antiderivative(theta0);
        }
        Ok(law)
    }

    /// Force numerical integration even for bound orbits.
    pub fn with_quadrature(mut self) -> TimeLaw {
        self.method = Method::Quadrature;
        self
    }

    /// `dt/dθ = 1/(h·(k1·cos(θ − φ) + k2)²)`.
    #[inline]
    pub fn integrand(&self, theta: f64) -> f64 {
        let d = self.params.denominator(theta);
        1.0 / (self.h * d * d)
    }

    /// Time to sweep one full turn, for bound orbits.
    pub fn period(&self) -> Option<f64> {
        let ConicParams { k1, k2, .. } = self.params;
        (self.params.orbit_class == OrbitClass::EllipticLike)
            .then(|| TAU * k2 / (((k2 - k1) * (k2 + k1)).powf(1.5) * self.h.abs()))
    }

    /// Time to sweep 2π at the initial angular rate.
    pub fn time_scale(&self) -> f64 {
        TAU * self.integrand(self.theta0).abs()
    }

    /// Continuous antiderivative of `(k1·cos ψ + k2)⁻²` at `ψ = θ − φ`, bound orbits only.
    fn antiderivative(&self, theta: f64) -> f64 {
        let ConicParams { k1, k2, phi, .. } = self.params;
        let psi = theta - phi;
        let turns = (psi / TAU).round();
        let rem = psi - TAU * turns;
        let diff = k2 - k1;
        let sum = k2 + k1;
        let beta = (diff / sum).sqrt();
        let ecc_anomaly = 2.0 * (beta * (0.5 * rem).tan()).atan();
        let e = k1 / k2;
        let sin_e = (diff * sum).sqrt() * rem.sin() / (k2 + k1 * rem.cos());
        let scale = k2 / (diff * sum).powf(1.5);
        scale * (ecc_anomaly + TAU * turns - e * sin_e)
    }

    fn quadrature_options(&self) -> QuadratureOptions {
        QuadratureOptions {
            abs_tol: QUADRATURE_ABS_TOL * self.time_scale(),
            rel_tol: QUADRATURE_REL_TOL,
            ..QuadratureOptions::default()
        }
    }

    /// Angular window `(lo, hi)` containing `theta0` where an unbound conic is finite.
    pub fn reachable_window(&self) -> Option<(f64, f64)> {
        let half = self.params.escape_half_angle()?;
        let phi = self.params.phi;
        let center = phi + TAU * ((self.theta0 - phi) / TAU).round();
        Some((center - half, center + half))
    }

    /// Elapsed time from `theta0` by adaptive quadrature, independent of the closed form.
    pub fn quadrature_time(&self, theta: f64) -> Result<f64> {
        if let Some((lo, hi)) = self.reachable_window() {
            if theta <= lo || theta >= hi {
                return Err(Error::RadiusDivergence {
                    theta,
                    denominator: self.params.denominator(theta),
                });
            }
            eval_radius(&self.params, theta)?;
        }
        let q = integrate(|x| self.integrand(x), self.theta0, theta, &self.quadrature_options())?;
        Ok(self.t0 + q.value)
    }
}

pub fn time_at(law: &TimeLaw, theta: f64) -> Result<f64> {
    match law.method {
        Method::ClosedForm => Ok(law.t0 + (law.antiderivative(theta) - law.anchor) / law.h),
        Method::Quadrature => law.quadrature_time(theta),
    }
}

pub fn theta_at(law: &TimeLaw, t: f64) -> Result<f64> {
    if t == law.t0 {
        return Ok(law.theta0);
    }
    let residual = |theta: f64| time_at(law, theta).map(|x| x - t);
    // θ moves in this direction as time advances towards t
    let dir = law.sweep_sign * (t - law.t0).signum();

    let (near, far) = match law.period() {
        Some(period) if law.method == Method::ClosedForm => {
            let estimate = law.theta0 + law.sweep_sign * TAU * (t - law.t0) / period;
            let mut near = estimate - dir * TAU;
            let mut far = estimate + dir * TAU;
            // mean-motion estimate is within one turn of the answer; widen defensively
            let mut widen = 0;
            while residual(near)?.signum() == residual(far)?.signum() {
                near -= dir * TAU;
                far += dir * TAU;
                widen += 1;
                if widen > 64 {
                    return Err(Error::Unreachable { t });
                }
            }
            (near, far)
        }
        Some(period) => {
            // bound orbit integrated numerically: march whole turns
            let mut far = law.theta0;
            let mut near = law.theta0;
            let turns = ((t - law.t0).abs() / period).floor() + 1.0;
            far += dir * TAU * turns;
            while residual(far)? * (law.t0 - t) > 0.0 {
                near = far;
                far += dir * TAU;
            }
            (near, far)
        }
        None => unbound_bracket(law, t, dir)?,
    };

    let (lo, hi) = if near < far { (near, far) } else { (far, near) };
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let opts = RootOptions {
        x_tol: 4.0 * f64::EPSILON * scale,
        f_tol: 0.0,
        max_iter: 400,
    };
    let mut failure = None;
    let root = bracketed_root(
        |theta| match residual(theta) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        &opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    root.map(|r| r.x).map_err(|_| Error::Unreachable { t })
}

/// March from `theta0` towards the escape angle until the time passes `t`.
fn unbound_bracket(law: &TimeLaw, t: f64, dir: f64) -> Result<(f64, f64)> {
    let (lo, hi) = law.reachable_window().expect("unbound orbit has a window");
    let edge = if dir > 0.0 { hi } else { lo };
    let mut near = law.theta0;
    let mut gap = edge - law.theta0;
    loop {
        gap *= 0.5;
        let candidate = edge - gap;
        let reached = match time_at(law, candidate) {
            Ok(tc) => (tc - t) * (law.t0 - t) <= 0.0,
            Err(Error::RadiusDivergence { .. }) | Err(Error::QuadratureFailure { .. }) => {
                return Err(Error::Unreachable { t })
            }
            Err(e) => return Err(e),
        };
        if reached {
            return Ok((near, candidate));
        }
        near = candidate;
        if gap.abs() < 1e-15 * edge.abs().max(PI) {
            return Err(Error::Unreachable { t });
        }
    }
}
