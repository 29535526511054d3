//! Approximate trajectories of all three bodies.
//!
//! Per body: reduce → fit the conic in the relative angle → shift it to the
//! subject's own angle → build the time law → sample. The subject radius is
//!
//! ```text
//! xᵢ(θ) = x_{i,o} − ρ·x₀ + (ẋ_{i,o} − ρ·ẋ₀)·(t(θ) − t₀) + ρ·x(θ),   ρ = combined/total mass
//! ```
//!
//! which reduces to `ρ·x(θ)` when the subject scalars are the barycentric ones.

use serde::{Deserialize, Serialize};

use crate::conic::{eval_radius, fit_conic, shift_subject_angle, ConicParams};
use crate::error::{BodyError, Error, Result, Stage};
use crate::kinematics::{Body, SystemConfig, Vec2};
use crate::reduction::{reduce, ReducedProblem};
use crate::series::{SeriesRow, Source, TrajectorySeries};
use crate::time_law::{theta_at, time_at, TimeLaw};

/// Replacement subject scalars `x_{i,o}`, `ẋ_{i,o}` for studying inconsistent initial conditions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SubjectOverride {
    pub radius: Option<f64>,
    pub radial_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub overrides: [Option<SubjectOverride>; 3],
}

/// Everything needed to evaluate one body's approximate trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyPipeline {
    pub problem: ReducedProblem,
    /// Conic expressed in the subject's angle.
    pub params: ConicParams,
    pub law: TimeLaw,
}

impl BodyPipeline {
    pub fn build(config: &SystemConfig, subject: Body, options: &AssemblyOptions) -> Result<BodyPipeline, BodyError> {
        let fail = |stage| {
            move |source| BodyError {
                body: subject,
                stage,
                source,
            }
        };
        let mut problem = reduce(config, subject).map_err(fail(Stage::Reduce))?;
        if let Some(o) = options.overrides[subject.index()] {
            if let Some(radius) = o.radius {
                problem.subject_initial.radius = radius;
            }
            if let Some(rate) = o.radial_rate {
                problem.subject_initial.radial_rate = rate;
            }
        }
        let relative = fit_conic(&problem).map_err(fail(Stage::FitConic))?;
        let params = shift_subject_angle(&relative);
        let law = TimeLaw::new(params, problem.subject_theta0(), problem.t0).map_err(fail(Stage::TimeLaw))?;
        Ok(BodyPipeline { problem, params, law })
    }

    pub fn subject(&self) -> Body {
        self.problem.subject
    }

    pub fn radius(&self, theta: f64) -> Result<f64> {
        radius_of_subject(&self.problem, &self.params, &self.law, theta)
    }

    pub fn row_at_angle(&self, theta: f64) -> Result<SeriesRow> {
        let t = time_at(&self.law, theta)?;
        self.row(t, theta)
    }

    pub fn row_at_time(&self, t: f64) -> Result<SeriesRow> {
        let theta = theta_at(&self.law, t)?;
        self.row(t, theta)
    }

    fn row(&self, t: f64, theta: f64) -> Result<SeriesRow> {
        let r = radius_at(&self.problem, &self.params, theta, t)?;
        Ok(SeriesRow {
            t,
            theta,
            r,
            position: r * Vec2::from_angle(theta),
        })
    }

    fn empty_series(&self) -> TrajectorySeries {
        TrajectorySeries::new(self.subject(), Source::Approximate, Some(self.law.method))
    }
}

fn radius_at(problem: &ReducedProblem, params: &ConicParams, theta: f64, t: f64) -> Result<f64> {
    let rho = problem.mass_ratio;
    let rel = &problem.rel_initial;
    let own = &problem.subject_initial;
    let x = eval_radius(params, theta)?;
    let r = (own.radius - rho * rel.r) + (own.radial_rate - rho * rel.r_dot) * (t - problem.t0) + rho * x;
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius { theta, radius: r });
    }
    Ok(r)
}

/// Radius of the subject body at its own angle `theta_i`.
pub fn radius_of_subject(problem: &ReducedProblem, params: &ConicParams, law: &TimeLaw, theta_i: f64) -> Result<f64> {
    let t = time_at(law, theta_i)?;
    radius_at(problem, params, theta_i, t)
}

/// Per-body results of [`assemble_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub bodies: [Result<TrajectorySeries, BodyError>; 3],
}

impl Assembly {
    pub fn series(&self, body: Body) -> Option<&TrajectorySeries> {
        self.bodies[body.index()].as_ref().ok()
    }

    pub fn errors(&self) -> Vec<&BodyError> {
        self.bodies.iter().filter_map(|b| b.as_ref().err()).collect()
    }
}

fn sample_times(pipeline: &BodyPipeline, times: &[f64]) -> Result<TrajectorySeries, BodyError> {
    let mut series = pipeline.empty_series();
    series.rows.reserve(times.len());
    for &t in times {
        let row = pipeline.row_at_time(t).map_err(|source| BodyError {
            body: pipeline.subject(),
            stage: Stage::Sample,
            source,
        })?;
        series.rows.push(row);
    }
    Ok(series)
}

/// Sample all three approximate trajectories on `time_grid` (sorted ascending).
/// A failure for one body leaves the others intact.
pub fn assemble_all(config: &SystemConfig, time_grid: &[f64], options: &AssemblyOptions) -> Assembly {
    let mut grid = time_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let run = |body: Body| BodyPipeline::build(config, body, options).and_then(|p| sample_times(&p, &grid));
    let bodies = std::thread::scope(|scope| {
        let handles = Body::ALL.map(|body| scope.spawn(move || run(body)));
        handles.map(|h| h.join().expect("body pipeline panicked"))
    });
    Assembly { bodies }
}

/// Sample one body at the given values of its own rotation angle.
pub fn trajectory_vs_angle(
    config: &SystemConfig,
    subject: Body,
    theta_grid: &[f64],
    options: &AssemblyOptions,
) -> Result<TrajectorySeries, BodyError> {
    let pipeline = BodyPipeline::build(config, subject, options)?;
    let mut series = pipeline.empty_series();
    for &theta in theta_grid {
        let row = pipeline.row_at_angle(theta).map_err(|source| BodyError {
            body: subject,
            stage: Stage::Sample,
            source,
        })?;
        series.rows.push(row);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{to_barycentric, BodyState};
    use crate::time_law::Method;
    use std::f64::consts::TAU;

    fn state(x: f64, y: f64, vx: f64, vy: f64) -> BodyState {
        BodyState::new(Vec2::new(x, y), Vec2::new(vx, vy))
    }

    fn equilateral(speed: f64) -> SystemConfig {
        let bodies = [0.0f64, 120.0, 240.0].map(|deg| {
            let u = Vec2::from_angle(deg.to_radians());
            BodyState::new(u, speed * Vec2::new(-u.y, u.x))
        });
        SystemConfig::new([1.0; 3], 1.0, bodies, 0.0).unwrap()
    }

    #[test]
    fn empty_grid_gives_empty_series() {
        let a = assemble_all(&equilateral(0.6), &[], &AssemblyOptions::default());
        for b in &a.bodies {
            assert!(b.as_ref().unwrap().is_empty());
        }
    }

    #[test]
    fn equilateral_series_are_rotations_of_each_other() {
        let c = equilateral(0.6);
        let grid: Vec<f64> = (0..60).map(|i| 0.25 * i as f64).collect();
        let a = assemble_all(&c, &grid, &AssemblyOptions::default());
        let s: Vec<_> = Body::ALL.map(|b| a.series(b).unwrap().clone()).into();
        for k in 1..3 {
            let angle = TAU / 3.0 * k as f64;
            for (r0, rk) in s[0].rows.iter().zip(&s[k].rows) {
                let rotated = r0.position.rotated(angle);
                assert!(
                    (rotated - rk.position).norm() < 1e-9,
                    "{rotated:?} vs {:?}",
                    rk.position
                );
            }
        }
    }

    #[test]
    fn anchored_at_initial_state() {
        let c = to_barycentric(
            &SystemConfig::new(
                [1.0, 0.6, 0.2],
                1.0,
                [
                    state(1.0, 0.2, -0.1, 0.6),
                    state(-1.3, 0.0, 0.2, -0.8),
                    state(0.4, 3.0, -0.5, 0.1),
                ],
                2.5,
            )
            .unwrap(),
        );
        let a = assemble_all(&c, &[2.5, 3.0], &AssemblyOptions::default());
        for body in Body::ALL {
            let row = a.series(body).unwrap().rows[0];
            let p = c.state(body).position;
            assert!((row.position - p).norm() <= 1e-12 * p.norm(), "body {body}");
        }
    }

    #[test]
    fn circular_radius_is_scaled() {
        // two equal masses on a circle, third body light and far away
        // separation 2: v²/1 = 1/2²
        let v = 0.5;
        let c = SystemConfig::new(
            [1.0, 1.0, 1e-14],
            1.0,
            [
                state(1.0, 0.0, 0.0, v),
                state(-1.0, 0.0, 0.0, -v),
                state(0.0, 1e3, 0.03, 0.0),
            ],
            0.0,
        )
        .unwrap();
        let p = BodyPipeline::build(&c, Body::One, &AssemblyOptions::default()).unwrap();
        assert!((p.problem.mass_ratio - 0.5).abs() < 1e-13);
        for theta in [0.0, 1.0, 4.0, 10.0] {
            assert!((p.radius(theta).unwrap() - 1.0).abs() < 1e-9);
        }
        assert_eq!(p.law.method, Method::ClosedForm);
    }

    #[test]
    fn single_angle_sample_is_initial_state() {
        let c = equilateral(0.5);
        let p = BodyPipeline::build(&c, Body::Two, &AssemblyOptions::default()).unwrap();
        let s = trajectory_vs_angle(&c, Body::Two, &[p.law.theta0], &AssemblyOptions::default()).unwrap();
        assert_eq!(s.rows[0].t, 0.0);
        assert!((s.rows[0].r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn drift_terms_follow_overrides() {
        let c = equilateral(0.5);
        let mut options = AssemblyOptions::default();
        options.overrides[0] = Some(SubjectOverride {
            radius: Some(1.1),
            radial_rate: Some(0.05),
        });
        let base = BodyPipeline::build(&c, Body::One, &AssemblyOptions::default()).unwrap();
        let moved = BodyPipeline::build(&c, Body::One, &options).unwrap();
        let theta = base.law.theta0 + 2.0;
        let t = time_at(&base.law, theta).unwrap();
        let expected = base.radius(theta).unwrap() + 0.1 + 0.05 * t;
        assert!((moved.radius(theta).unwrap() - expected).abs() < 1e-12);
        assert!((moved.radius(base.law.theta0).unwrap() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_body_does_not_block_others() {
        let c = SystemConfig::new(
            [1.0; 3],
            1.0,
            [
                state(1.0, -0.5, 0.3, 0.5),
                state(0.0, 1.0, 0.0, 0.0),
                state(-1.0, -0.5, -0.3, -0.5),
            ],
            0.0,
        )
        .unwrap();
        let a = assemble_all(&c, &[0.0, 0.1], &AssemblyOptions::default());
        let err = a.bodies[1].as_ref().unwrap_err();
        assert_eq!(err.body, Body::Two);
        assert_eq!(err.stage, Stage::Reduce);
        assert_eq!(err.source, Error::DegenerateRotation);
        assert!(a.series(Body::One).is_some() && a.series(Body::Three).is_some());
        assert!(err.to_string().contains("body 2"));
    }
}
