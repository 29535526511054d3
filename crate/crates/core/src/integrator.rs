//! Reference solution: direct integration of the planar three-body equations of motion.
//!
//! The default force model is the exact pairwise Newtonian sum. The pair
//! centre-of-mass model replaces the two partners of each body by their
//! combined mass at their centre of mass, which isolates the force-replacement
//! part of the approximation error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{Body, BodyState, SystemConfig, Vec2};
use crate::series::{Source, TrajectorySeries};

const DIM: usize = 12;
type State = [f64; DIM];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceModel {
    #[default]
    Pairwise,
    PairCenterOfMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum IntegratorMethod {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4 { step: f64 },
    /// Dormand–Prince 5(4) with PI step-size control.
    DormandPrince { rtol: f64, atol: f64 },
}

impl Default for IntegratorMethod {
    fn default() -> Self {
        IntegratorMethod::DormandPrince {
            rtol: 1e-12,
            atol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub method: IntegratorMethod,
    pub horizon: f64,
    pub sample_interval: f64,
    pub force_model: ForceModel,
    /// Collision threshold as a fraction of the initial minimum pair distance.
    pub collision_factor: f64,
}

impl IntegratorSettings {
    pub fn new(method: IntegratorMethod, horizon: f64, sample_interval: f64) -> Self {
        Self {
            method,
            horizon,
            sample_interval,
            force_model: ForceModel::Pairwise,
            collision_factor: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match self.method {
            IntegratorMethod::Rk4 { step } if !(step > 0.0 && step.is_finite()) => {
                return bad(format!("integrator step must be positive, got {step}"))
            }
            IntegratorMethod::DormandPrince { rtol, atol } if !(rtol > 0.0 && atol >= 0.0 && rtol.is_finite()) => {
                return bad(format!(
                    "integrator tolerances must be positive, got rtol={rtol} atol={atol}"
                ))
            }
            _ => {}
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.sample_interval > 0.0) {
            return bad(format!(
                "sample_interval must be positive, got {}",
                self.sample_interval
            ));
        }
        if self.sample_interval > self.horizon {
            return bad(format!(
                "sample_interval {} exceeds horizon {}",
                self.sample_interval, self.horizon
            ));
        }
        if !(self.collision_factor >= 0.0) {
            return bad("collision_factor must be non-negative".into());
        }
        Ok(())
    }

    /// `t0, t0 + Δ, …` up to and including `t0 + horizon` (within rounding).
    pub fn sample_times(&self, t0: f64) -> Vec<f64> {
        let n = (self.horizon / self.sample_interval * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|k| t0 + k as f64 * self.sample_interval).collect()
    }
}

/// Energy, momentum and angular momentum drift between the first and last state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub relative_energy_drift: f64,
    /// Magnitude of the change in total linear momentum.
    pub momentum_drift: f64,
    /// `momentum_drift` over `Σ mᵢ|vᵢ|` at the start.
    pub relative_momentum_drift: f64,
    pub angular_momentum_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub series: [TrajectorySeries; 3],
    pub conservation: ConservationReport,
    /// State at the last accepted step.
    pub final_state: SystemConfig,
    /// Why the run stopped early, if it did. The series then end at the last sample before the abort.
    pub aborted: Option<Error>,
}

impl OracleRun {
    pub fn into_result(self) -> Result<OracleRun> {
        match self.aborted {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

pub fn total_energy(config: &SystemConfig) -> f64 {
    let kinetic: f64 = Body::ALL
        .iter()
        .map(|&b| 0.5 * config.mass(b) * config.state(b).velocity.norm_squared())
        .sum();
    let mut potential = 0.0;
    for (a, b) in PAIRS {
        let d = (config.state(a).position - config.state(b).position).norm();
        potential -= config.g * config.mass(a) * config.mass(b) / d;
    }
    kinetic + potential
}

pub fn total_momentum(config: &SystemConfig) -> Vec2 {
    Body::ALL
        .iter()
        .fold(Vec2::ZERO, |acc, &b| acc + config.mass(b) * config.state(b).velocity)
}

/// Scalar planar angular momentum about the origin.
pub fn total_angular_momentum(config: &SystemConfig) -> f64 {
    Body::ALL
        .iter()
        .map(|&b| {
            let s = config.state(b);
            config.mass(b) * s.position.cross(s.velocity)
        })
        .sum()
}

/// Orbital period of the closest pair treated as a two-body system with the total mass.
pub fn characteristic_period(config: &SystemConfig) -> f64 {
    let d = config.min_pair_distance();
    std::f64::consts::TAU * (d * d * d / (config.g * config.total_mass())).sqrt()
}

const PAIRS: [(Body, Body); 3] = [
    (Body::One, Body::Two),
    (Body::One, Body::Three),
    (Body::Two, Body::Three),
];

fn positions(y: &State) -> [Vec2; 3] {
    [Vec2::new(y[0], y[1]), Vec2::new(y[2], y[3]), Vec2::new(y[4], y[5])]
}

fn velocities(y: &State) -> [Vec2; 3] {
    [Vec2::new(y[6], y[7]), Vec2::new(y[8], y[9]), Vec2::new(y[10], y[11])]
}

fn pack(config: &SystemConfig) -> State {
    let mut y = [0.0; DIM];
    for (i, s) in config.bodies.iter().enumerate() {
        y[2 * i] = s.position.x;
        y[2 * i + 1] = s.position.y;
        y[6 + 2 * i] = s.velocity.x;
        y[6 + 2 * i + 1] = s.velocity.y;
    }
    y
}

fn unpack(template: &SystemConfig, y: &State, t: f64) -> SystemConfig {
    let p = positions(y);
    let v = velocities(y);
    SystemConfig {
        bodies: [0, 1, 2].map(|i| BodyState::new(p[i], v[i])),
        t0: t,
        ..template.clone()
    }
}

fn force_accelerations(masses: &[f64; 3], g: f64, p: &[Vec2; 3], model: ForceModel) -> [Vec2; 3] {
    let mut acc = [Vec2::ZERO; 3];
    match model {
        ForceModel::Pairwise => {
            for (a, b) in PAIRS {
                let (i, j) = (a.index(), b.index());
                let d = p[j] - p[i];
                let r2 = d.norm_squared();
                let inv_r3 = 1.0 / (r2 * r2.sqrt());
                acc[i] += (g * masses[j] * inv_r3) * d;
                acc[j] -= (g * masses[i] * inv_r3) * d;
            }
        }
        ForceModel::PairCenterOfMass => {
            for body in Body::ALL {
                let (a, b) = body.partners();
                let (ma, mb) = (masses[a.index()], masses[b.index()]);
                let center = (ma * p[a.index()] + mb * p[b.index()]) / (ma + mb);
                let d = center - p[body.index()];
                let r2 = d.norm_squared();
                acc[body.index()] = (g * (ma + mb) / (r2 * r2.sqrt())) * d;
            }
        }
    }
    acc
}

/// Exact pairwise gravitational accelerations.
pub fn accelerations(config: &SystemConfig) -> Result<[Vec2; 3]> {
    let p = config.bodies.map(|s| s.position);
    if let Some((pair, distance)) = closest_pair(&p) {
        if distance == 0.0 {
            return Err(Error::Collision {
                t: config.t0,
                pair,
                distance,
            });
        }
    }
    Ok(force_accelerations(&config.masses, config.g, &p, ForceModel::Pairwise))
}

fn closest_pair(p: &[Vec2; 3]) -> Option<((Body, Body), f64)> {
    PAIRS
        .iter()
        .map(|&(a, b)| ((a, b), (p[a.index()] - p[b.index()]).norm()))
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

struct Dynamics {
    masses: [f64; 3],
    g: f64,
    model: ForceModel,
}

impl Dynamics {
    fn rhs(&self, y: &State) -> State {
        let acc = force_accelerations(&self.masses, self.g, &positions(y), self.model);
        let mut dy = [0.0; DIM];
        dy[..6].copy_from_slice(&y[6..]);
        for i in 0..3 {
            dy[6 + 2 * i] = acc[i].x;
            dy[6 + 2 * i + 1] = acc[i].y;
        }
        dy
    }
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..DIM {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn rk4_step(sys: &Dynamics, y: &State, h: f64) -> State {
    let k1 = sys.rhs(y);
    let k2 = sys.rhs(&axpy(y, 0.5 * h, &[(1.0, &k1)]));
    let k3 = sys.rhs(&axpy(y, 0.5 * h, &[(1.0, &k2)]));
    let k4 = sys.rhs(&axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)])
}

// Dormand–Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct DpStep {
    y: State,
    k_last: State,
    error: f64,
}

fn dopri_step(sys: &Dynamics, y: &State, k1: &State, h: f64, rtol: f64, atol: f64) -> DpStep {
    let k2 = sys.rhs(&axpy(y, h, &[(A21, k1)]));
    let k3 = sys.rhs(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = sys.rhs(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.rhs(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = sys.rhs(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ));
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.rhs(&y_new);
    let err = axpy(
        &[0.0; DIM],
        h,
        &[(E1, k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
    );

    // per-body length and speed scales, so the error norm is rotation invariant
    let mut sum = 0.0;
    for i in (0..DIM).step_by(2) {
        let size = y[i].hypot(y[i + 1]).max(y_new[i].hypot(y_new[i + 1]));
        let sc = atol + rtol * size;
        sum += (err[i] / sc).powi(2) + (err[i + 1] / sc).powi(2);
    }
    DpStep {
        y: y_new,
        k_last: k7,
        error: (sum / DIM as f64).sqrt(),
    }
}

/// Integrate and sample at `t0, t0 + sample_interval, …, t0 + horizon`.
pub fn integrate(config: &SystemConfig, settings: &IntegratorSettings) -> Result<OracleRun> {
    settings.validate()?;
    integrate_on_grid(config, settings, &settings.sample_times(config.t0))
}

/// Integrate and sample at the given times (ascending, none before `t0`).
/// `settings.horizon` and `settings.sample_interval` are ignored.
pub fn integrate_on_grid(config: &SystemConfig, settings: &IntegratorSettings, times: &[f64]) -> Result<OracleRun> {
    config.validate()?;
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("sample times must be strictly increasing".into()));
    }
    if times.first().is_some_and(|&t| t < config.t0) {
        return Err(Error::InvalidConfig("sample times must not precede t0".into()));
    }

    let sys = Dynamics {
        masses: config.masses,
        g: config.g,
        model: settings.force_model,
    };
    let min_distance = settings.collision_factor * config.min_pair_distance();
    let mut series = Body::ALL.map(|b| TrajectorySeries::new(b, Source::Oracle, None));
    let mut y = pack(config);
    let mut t = config.t0;
    let mut aborted = None;

    let record = |series: &mut [TrajectorySeries; 3], t: f64, y: &State| {
        for (s, p) in series.iter_mut().zip(positions(y)) {
            s.push_position(t, p);
        }
    };
    let check = |t: f64, y: &State| -> Result<()> {
        let (pair, distance) = closest_pair(&positions(y)).expect("three bodies");
        if distance <= min_distance || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::Collision { t, pair, distance });
        }
        Ok(())
    };

    let span = times.last().map_or(0.0, |&tl| tl - config.t0).max(f64::MIN_POSITIVE);
    let result = match settings.method {
        IntegratorMethod::Rk4 { step } => (|| {
            for &target in times {
                if target > t {
                    let n = ((target - t) / step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                    let h = (target - t) / n as f64;
                    for _ in 0..n {
                        y = rk4_step(&sys, &y, h);
                        t += h;
                        check(t, &y)?;
                    }
                    t = target;
                }
                record(&mut series, t, &y);
            }
            Ok(())
        })(),
        IntegratorMethod::DormandPrince { rtol, atol } => (|| {
            let mut k1 = sys.rhs(&y);
            let mut h = initial_step(&sys, &y, &k1, span, rtol, atol);
            let mut err_prev: f64 = 1e-4;
            let mut steps = 0usize;
            for &target in times {
                while target > t {
                    let last = t + h >= target;
                    let h_try = if last { target - t } else { h };
                    let step = dopri_step(&sys, &y, &k1, h_try, rtol, atol);
                    steps += 1;
                    if steps > 50_000_000 {
                        return Err(Error::StepFailure { t, step: h_try });
                    }
                    let err = step.error;
                    if err <= 1.0 && err.is_finite() {
                        // PI controller
                        let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
                        let fac = fac.clamp(0.2, 5.0);
                        err_prev = err.max(1e-4);
                        t = if last { target } else { t + h_try };
                        y = step.y;
                        k1 = step.k_last;
                        check(t, &y)?;
                        let proposed = h_try * fac;
                        h = if last { proposed.max(h) } else { proposed };
                    } else {
                        let fac = if err.is_finite() {
                            (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                        } else {
                            0.1
                        };
                        h = h_try * fac;
                    }
                    if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
                        return Err(Error::StepFailure { t, step: h });
                    }
                }
                record(&mut series, t, &y);
            }
            Ok(())
        })(),
    };
    if let Err(e) = result {
        aborted = Some(e);
    }

    let final_state = unpack(config, &y, t);
    let conservation = conservation_between(config, &final_state);
    Ok(OracleRun {
        series,
        conservation,
        final_state,
        aborted,
    })
}

fn initial_step(sys: &Dynamics, y: &State, f0: &State, span: f64, rtol: f64, atol: f64) -> f64 {
    // Hairer–Wanner starting step heuristic
    let sc = |i: usize| atol + rtol * y[i].abs().max(1e-300);
    let norm = |v: &State| (v.iter().enumerate().map(|(i, x)| (x / sc(i)).powi(2)).sum::<f64>() / DIM as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let f1 = sys.rhs(&y1);
    let diff: State = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

fn conservation_between(start: &SystemConfig, end: &SystemConfig) -> ConservationReport {
    let e0 = total_energy(start);
    let p0 = total_momentum(start);
    let l0 = total_angular_momentum(start);
    let momentum_scale: f64 = Body::ALL
        .iter()
        .map(|&b| start.mass(b) * start.state(b).velocity.norm())
        .sum();
    let momentum_drift = (total_momentum(end) - p0).norm();
    let l_scale = Body::ALL
        .iter()
        .map(|&b| start.mass(b) * start.state(b).position.norm() * start.state(b).velocity.norm())
        .sum::<f64>()
        .max(l0.abs());
    ConservationReport {
        relative_energy_drift: ((total_energy(end) - e0) / e0).abs(),
        momentum_drift,
        relative_momentum_drift: if momentum_scale > 0.0 {
            momentum_drift / momentum_scale
        } else {
            momentum_drift
        },
        angular_momentum_drift: if l_scale > 0.0 {
            (total_angular_momentum(end) - l0).abs() / l_scale
        } else {
            0.0
        },
    }
}
