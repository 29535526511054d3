//! Closed-form approximate trajectories for the planar three-body problem.
//!
//! Each body is paired with the combined mass of the other two, placed at their
//! centre of mass. The resulting two-body problem has a conic solution in the
//! rotation angle and a time-of-flight law that can be inverted to sample the
//! trajectory in time. A direct integrator of the full pairwise equations of
//! motion serves as the reference, and [`metrics`] quantifies the gap.
//!
//! ```
//! use threebody::{assemble_all, BodyState, SystemConfig, Vec2};
//!
//! let config = SystemConfig::new(
//!     [1.0, 1.0, 1e-6],
//!     1.0,
//!     [
//!         BodyState::new(Vec2::new(0.5, 0.0), Vec2::new(0.0, 0.7)),
//!         BodyState::new(Vec2::new(-0.5, 0.0), Vec2::new(0.0, -0.7)),
//!         BodyState::new(Vec2::new(20.0, 0.0), Vec2::new(0.0, 0.3)),
//!     ],
//!     0.0,
//! )
//! .unwrap();
//! let grid: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
//! let assembly = assemble_all(&config, &grid, &Default::default());
//! assert!(assembly.errors().is_empty());
//! ```

// validity checks are written `!(x > 0.0)` so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod conic;
pub mod error;
pub mod integrator;
pub mod kinematics;
pub mod metrics;
pub mod quadrature;
pub mod reduction;
pub mod roots;
pub mod series;
pub mod time_law;

pub use assembly::{assemble_all, radius_of_subject, trajectory_vs_angle, Assembly, AssemblyOptions, SubjectOverride};
pub use conic::{eval_radius, fit_conic, shift_subject_angle, ConicParams, OrbitClass};
pub use error::{BodyError, Error, Result, Stage};
pub use integrator::{
    accelerations, integrate, ConservationReport, ForceModel, IntegratorMethod, IntegratorSettings, OracleRun,
};
pub use kinematics::{
    barycenter, cartesian_to_polar, polar_to_cartesian, to_barycentric, Body, BodyState, PolarState, SystemConfig, Vec2,
};
pub use metrics::{
    collinearity_series, compare, regime_check, BodyComparison, ComparisonReport, RegimeFlag, RegimeReport,
};
pub use reduction::{collinearity_defect, pair_center_of_mass, reduce, ReducedProblem, SubjectInitial};
pub use series::{SeriesRow, Source, TrajectorySeries};
pub use time_law::{theta_at, time_at, Method, TimeLaw};
