//! Scenario files.
//!
//! ```toml
//! units = "dimensionless"      # or "si"; selects the default G
//! # G = 1.0                    # optional override
//! t0 = 0.0
//!
//! [[body]]                     # exactly three
//! mass = 1.0
//! position = [0.5, 0.0]
//! velocity = [0.0, 0.7]
//! # radius_override = 0.5      # optional x_{i,o}
//! # radial_rate_override = 0.0 # optional ẋ_{i,o}
//!
//! [grid]
//! kind = "time"                # or "theta": offsets swept from each body's initial angle
//! start = 0.0
//! stop = 10.0
//! samples = 101
//!
//! [integrator]                 # optional
//! method = "dormand-prince"    # or "rk4"
//! rtol = 1e-12
//! atol = 1e-15
//! # step = 1e-3                # rk4 only
//! # horizon = 10.0             # defaults to the end of the time grid
//! # sample_interval = 0.1
//! # force_model = "pairwise"   # or "pair-center-of-mass"
//! ```

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use threebody::{
    AssemblyOptions, BodyState, ForceModel, IntegratorMethod, IntegratorSettings, SubjectOverride, SystemConfig, Vec2,
};
use toml::Spanned;

/// Gravitational constant in m³ kg⁻¹ s⁻².
pub const G_SI: f64 = 6.6743e-11;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Invalid { path: String, line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Dimensionless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Time,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

impl GridSpec {
    /// `samples` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        match self.samples {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.stop
                        } else {
                            self.start + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodySpec {
    mass: f64,
    position: [f64; 2],
    velocity: [f64; 2],
    radius_override: Option<f64>,
    radial_rate_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum MethodName {
    DormandPrince,
    Rk4,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorSpec {
    method: Option<MethodName>,
    rtol: Option<f64>,
    atol: Option<f64>,
    step: Option<f64>,
    horizon: Option<f64>,
    sample_interval: Option<f64>,
    force_model: Option<ForceModel>,
    collision_factor: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    units: Option<Units>,
    #[serde(rename = "G")]
    g: Option<Spanned<f64>>,
    t0: Option<f64>,
    body: Spanned<Vec<Spanned<BodySpec>>>,
    grid: Option<Spanned<GridSpec>>,
    integrator: Option<Spanned<IntegratorSpec>>,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub grid: GridSpec,
    pub options: AssemblyOptions,
    pub integrator: IntegratorSettings,
    /// Horizon and sample interval came from the file rather than the grid.
    pub explicit_sampling: bool,
}

impl Scenario {
    pub fn load(path: &Path, dimensionless: bool) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::parse(&text, &path.display().to_string(), dimensionless)
    }

    /// Parse scenario text; `origin` names the source in error messages.
    /// `dimensionless` forces G = 1.
    pub fn parse(text: &str, origin: &str, dimensionless: bool) -> Result<Scenario, ScenarioError> {
        let invalid = |span: Option<Range<usize>>, message: String| ScenarioError::Invalid {
            path: origin.to_string(),
            line: span.map_or(1, |s| line_of(text, s.start)),
            message,
        };
        let file: ScenarioFile = toml::from_str(text).map_err(|e| invalid(e.span(), e.message().to_string()))?;

        let g = if dimensionless {
            1.0
        } else {
            match (&file.g, file.units.unwrap_or(Units::Dimensionless)) {
                (Some(g), _) => {
                    if !(*g.get_ref() > 0.0 && g.get_ref().is_finite()) {
                        return Err(invalid(
                            Some(g.span()),
                            format!("G must be positive, got {}", g.get_ref()),
                        ));
                    }
                    *g.get_ref()
                }
                (None, Units::Si) => G_SI,
                (None, Units::Dimensionless) => 1.0,
            }
        };

        let bodies = file.body.get_ref();
        if bodies.len() != 3 {
            return Err(invalid(
                Some(file.body.span()),
                format!("expected exactly 3 [[body]] entries, found {}", bodies.len()),
            ));
        }
        let states: [BodyState; 3] = std::array::from_fn(|i| {
            let b = bodies[i].get_ref();
            BodyState::new(
                Vec2::new(b.position[0], b.position[1]),
                Vec2::new(b.velocity[0], b.velocity[1]),
            )
        });
        let masses = std::array::from_fn(|i| bodies[i].get_ref().mass);
        let config = SystemConfig::new(masses, g, states, file.t0.unwrap_or(0.0))
            .map_err(|e| invalid(Some(file.body.span()), e.to_string()))?;

        let mut options = AssemblyOptions::default();
        for (i, b) in bodies.iter().enumerate() {
            let spec = b.get_ref();
            for v in [spec.radius_override, spec.radial_rate_override].into_iter().flatten() {
                if !v.is_finite() {
                    return Err(invalid(
                        Some(b.span()),
                        format!("body {}: override must be finite", i + 1),
                    ));
                }
            }
            if spec.radius_override.is_some() || spec.radial_rate_override.is_some() {
                options.overrides[i] = Some(SubjectOverride {
                    radius: spec.radius_override,
                    radial_rate: spec.radial_rate_override,
                });
            }
        }

        let Some(grid_spanned) = &file.grid else {
            return Err(invalid(None, "missing [grid] section".into()));
        };
        let grid = *grid_spanned.get_ref();
        let grid_err = |message: String| invalid(Some(grid_spanned.span()), message);
        if !(grid.start.is_finite() && grid.stop.is_finite()) {
            return Err(grid_err("grid bounds must be finite".into()));
        }
        if grid.samples == 0 {
            return Err(grid_err("grid needs at least one sample".into()));
        }
        if grid.samples > 1 && !(grid.stop > grid.start) {
            return Err(grid_err(format!(
                "grid stop {} must exceed start {}",
                grid.stop, grid.start
            )));
        }
        if grid.kind == GridKind::Time && grid.start < config.t0 {
            return Err(grid_err(format!(
                "time grid starts at {} before t0 = {}",
                grid.start, config.t0
            )));
        }

        let spec = file.integrator.as_ref();
        let int_err = |message: String| invalid(spec.map(|s| s.span()), message);
        let s = spec.map(|s| s.get_ref().clone());
        let s = s.as_ref();
        let method = match s.and_then(|s| s.method).unwrap_or(MethodName::DormandPrince) {
            MethodName::DormandPrince => {
                if s.is_some_and(|s| s.step.is_some()) {
                    return Err(int_err("`step` applies to rk4 only".into()));
                }
                let IntegratorMethod::DormandPrince { rtol, atol } = IntegratorMethod::default() else {
                    unreachable!("default method is adaptive")
                };
                IntegratorMethod::DormandPrince {
                    rtol: s.and_then(|s| s.rtol).unwrap_or(rtol),
                    atol: s.and_then(|s| s.atol).unwrap_or(atol),
                }
            }
            MethodName::Rk4 => match s.and_then(|s| s.step) {
                Some(step) => IntegratorMethod::Rk4 { step },
                None => return Err(int_err("rk4 needs `step`".into())),
            },
        };
        let explicit_sampling = s.is_some_and(|s| s.horizon.is_some() || s.sample_interval.is_some());
        let default_horizon = match grid.kind {
            GridKind::Time => grid.stop - config.t0,
            GridKind::Theta => 0.0,
        };
        let horizon = s.and_then(|s| s.horizon).unwrap_or(default_horizon);
        let sample_interval = s.and_then(|s| s.sample_interval).unwrap_or(match grid.samples {
            1 => horizon,
            n => horizon / (n - 1) as f64,
        });
        let mut integrator = IntegratorSettings::new(method, horizon, sample_interval);
        if let Some(model) = s.and_then(|s| s.force_model) {
            integrator.force_model = model;
        }
        if let Some(f) = s.and_then(|s| s.collision_factor) {
            integrator.collision_factor = f;
        }
        if spec.is_some() || grid.kind == GridKind::Time {
            integrator.validate().map_err(|e| int_err(e.to_string()))?;
        }

        Ok(Scenario {
            config,
            grid,
            options,
            integrator,
            explicit_sampling,
        })
    }

    /// Sample times for the reference integration: the explicit horizon and
    /// interval when given, otherwise the time grid.
    pub fn oracle_times(&self) -> Option<Vec<f64>> {
        if self.explicit_sampling {
            Some(self.integrator.sample_times(self.config.t0))
        } else if self.grid.kind == GridKind::Time {
            Some(self.grid.values())
        } else {
            None
        }
    }
}

/// 1-based line number of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
units = "dimensionless"

[[body]]
mass = 1.0
position = [0.5, 0.0]
velocity = [0.0, 0.7]

[[body]]
mass = 1.0
position = [-0.5, 0.0]
velocity = [0.0, -0.7]

[[body]]
mass = 1e-6
position = [20.0, 0.0]
velocity = [0.0, 0.3]

[grid]
kind = "time"
start = 0.0
stop = 2.0
samples = 5
"#;

    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse(text, "s.toml", false)
    }

    fn line(err: ScenarioError) -> usize {
        match err {
            ScenarioError::Invalid { line, .. } => line,
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn defaults() {
        let s = parse(BASE).unwrap();
        assert_eq!(s.config.g, 1.0);
        assert_eq!(s.grid.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(s.integrator.method, IntegratorMethod::default());
        assert_eq!(s.oracle_times().unwrap(), s.grid.values());
        assert!(s.options.overrides.iter().all(Option::is_none));
    }

    #[test]
    fn si_units_and_dimensionless_flag() {
        let si = BASE.replace("\"dimensionless\"", "\"si\"");
        assert_eq!(parse(&si).unwrap().config.g, G_SI);
        assert_eq!(Scenario::parse(&si, "s.toml", true).unwrap().config.g, 1.0);
        let explicit = format!("G = 2.5\n{BASE}");
        assert_eq!(parse(&explicit).unwrap().config.g, 2.5);
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = BASE.replace("samples = 5", "samples = ");
        assert_eq!(line(parse(&text).unwrap_err()), 23);
    }

    #[test]
    fn wrong_type_reports_line() {
        let text = BASE.replace("mass = 1e-6", "mass = \"light\"");
        assert_eq!(line(parse(&text).unwrap_err()), 15);
    }

    #[test]
    fn body_count() {
        let text = BASE.replacen(
            "[[body]]\nmass = 1.0\nposition = [0.5, 0.0]\nvelocity = [0.0, 0.7]\n",
            "",
            1,
        );
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("exactly 3"), "{err}");
    }

    #[test]
    fn sample_interval_beyond_horizon() {
        let text = format!("{BASE}\n[integrator]\nhorizon = 1.0\nsample_interval = 2.0\n");
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().contains("exceeds horizon"), "{err}");
        assert_eq!(line(err), 25);
    }

    #[test]
    fn overrides_and_rk4() {
        let text = BASE.replacen(
            "velocity = [0.0, 0.7]\n",
            "velocity = [0.0, 0.7]\nradius_override = 0.6\n",
            1,
        ) + "\n[integrator]\nmethod = \"rk4\"\nstep = 0.01\nforce_model = \"pair-center-of-mass\"\n";
        let s = parse(&text).unwrap();
        assert_eq!(s.options.overrides[0].unwrap().radius, Some(0.6));
        assert_eq!(s.integrator.method, IntegratorMethod::Rk4 { step: 0.01 });
        assert_eq!(s.integrator.force_model, ForceModel::PairCenterOfMass);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BASE.replace("samples = 5", "samples = 5\nspacing = 2");
        assert!(parse(&text).is_err());
    }
}
