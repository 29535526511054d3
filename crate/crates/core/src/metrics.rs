//! Approximation quality against the reference integration.

use serde::{Deserialize, Serialize};

use crate::assembly::Assembly;
use crate::error::{Error, Result};
use crate::integrator::{ConservationReport, OracleRun};
use crate::kinematics::{Body, BodyState, SystemConfig, Vec2};
use crate::reduction::collinearity_defect;
use crate::series::{Source, TrajectorySeries};
use crate::time_law::Method;

/// Maximum allowed disagreement between sample times of compared series.
pub const GRID_TOL: f64 = 1e-12;

/// Angular rate at or above which a sample violates the slow-rotation regime.
pub const ANGULAR_RATE_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub t: f64,
    pub err_radial_rel: f64,
    pub err_pos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyComparison {
    pub body: Body,
    pub max_rel_radial_error: f64,
    pub mean_rel_radial_error: f64,
    pub max_position_error: f64,
    pub mean_position_error: f64,
    /// Per-sample errors; left out of serialized reports, which carry only the aggregates.
    #[serde(skip_serializing, default)]
    pub rows: Vec<ErrorRow>,
}

/// Row-by-row errors of `approx` against `oracle`; both must share a time grid.
/// Radial errors are relative to the oracle radius.
pub fn compare(approx: &TrajectorySeries, oracle: &TrajectorySeries) -> Result<BodyComparison> {
    if approx.len() != oracle.len() {
        let index = approx.len().min(oracle.len());
        let time = |s: &TrajectorySeries| s.rows.get(index).map_or(f64::NAN, |r| r.t);
        return Err(Error::GridMismatch {
            index,
            left: time(approx),
            right: time(oracle),
        });
    }
    let mut rows = Vec::with_capacity(approx.len());
    for (index, (a, o)) in approx.rows.iter().zip(&oracle.rows).enumerate() {
        if (a.t - o.t).abs() > GRID_TOL {
            return Err(Error::GridMismatch {
                index,
                left: a.t,
                right: o.t,
            });
        }
        rows.push(ErrorRow {
            t: o.t,
            err_radial_rel: (a.r - o.r).abs() / o.r,
            err_pos: (a.position - o.position).norm(),
        });
    }
    let n = rows.len().max(1) as f64;
    Ok(BodyComparison {
        body: oracle.subject,
        max_rel_radial_error: rows.iter().map(|r| r.err_radial_rel).fold(0.0, f64::max),
        mean_rel_radial_error: rows.iter().map(|r| r.err_radial_rel).sum::<f64>() / n,
        max_position_error: rows.iter().map(|r| r.err_pos).fold(0.0, f64::max),
        mean_position_error: rows.iter().map(|r| r.err_pos).sum::<f64>() / n,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    AngularRate,
}

/// A contiguous run of samples violating the regime assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlag {
    pub body: Body,
    pub source: Source,
    pub kind: Violation,
    pub t_start: f64,
    pub t_end: f64,
    /// Largest `|θ̇|` within the run.
    pub peak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub flags: Vec<RegimeFlag>,
    pub max_angular_rate: f64,
    pub max_radius: f64,
}

/// Finite-difference `θ̇` per sample: central in the interior, one-sided at the ends.
pub fn angular_rates(series: &TrajectorySeries) -> Vec<f64> {
    let rows = &series.rows;
    let n = rows.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let slope = |i: usize, j: usize| (rows[j].theta - rows[i].theta) / (rows[j].t - rows[i].t);
    (0..n)
        .map(|i| match i {
            0 => slope(0, 1),
            i if i == n - 1 => slope(n - 2, n - 1),
            i => slope(i - 1, i + 1),
        })
        .collect()
}

/// Flag samples with `|θ̇| ≥ 1 rad/s`, merging consecutive samples into one flag.
pub fn regime_check(series: &TrajectorySeries) -> RegimeReport {
    let rates = angular_rates(series);
    let mut flags: Vec<RegimeFlag> = Vec::new();
    let mut open = false;
    for (row, rate) in series.rows.iter().zip(&rates) {
        let rate = rate.abs();
        if rate >= ANGULAR_RATE_LIMIT {
            match flags.last_mut() {
                Some(flag) if open => {
                    flag.t_end = row.t;
                    flag.peak = flag.peak.max(rate);
                }
                _ => flags.push(RegimeFlag {
                    body: series.subject,
                    source: series.source,
                    kind: Violation::AngularRate,
                    t_start: row.t,
                    t_end: row.t,
                    peak: rate,
                }),
            }
            open = true;
        } else {
            open = false;
        }
    }
    RegimeReport {
        flags,
        max_angular_rate: rates.iter().map(|r| r.abs()).fold(0.0, f64::max),
        max_radius: series.max_radius(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinearityRow {
    pub t: f64,
    pub defect: [f64; 3],
}

/// Collinearity defect of every body at every sample of the three series.
/// Massless bodies get 0.
pub fn collinearity_series(masses: [f64; 3], g: f64, series: &[TrajectorySeries; 3]) -> Result<Vec<CollinearityRow>> {
    let n = series.iter().map(|s| s.len()).min().unwrap_or(0);
    (0..n)
        .map(|i| {
            let t = series[0].rows[i].t;
            let config = SystemConfig {
                masses,
                g,
                bodies: [0, 1, 2].map(|b| BodyState::new(series[b].rows[i].position, Vec2::ZERO)),
                t0: t,
            };
            let mut defect = [0.0; 3];
            for body in Body::ALL {
                // a massless body leaves its partners' centre of mass on the
                // barycenter, where the direction is undefined; nothing to measure
                if masses[body.index()] > 0.0 {
                    defect[body.index()] = collinearity_defect(&config, body)?;
                }
            }
            Ok(CollinearityRow { t, defect })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyReport {
    pub body: Body,
    /// Time-law evaluation path of the approximation, if it was built.
    pub method: Option<Method>,
    pub comparison: Option<BodyComparison>,
    pub approx_regime: Option<RegimeReport>,
    pub oracle_regime: RegimeReport,
    /// Why the approximation is missing.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub per_body: [BodyReport; 3],
    pub collinearity: Vec<CollinearityRow>,
    pub regime_flags: Vec<RegimeFlag>,
    pub conservation: ConservationReport,
}

impl ComparisonReport {
    /// Combine an approximate assembly and an oracle run sampled on the same grid.
    pub fn build(config: &SystemConfig, assembly: &Assembly, oracle: &OracleRun) -> Result<ComparisonReport> {
        let mut regime_flags = Vec::new();
        let mut per_body = Vec::with_capacity(3);
        for body in Body::ALL {
            let oracle_series = &oracle.series[body.index()];
            let oracle_regime = regime_check(oracle_series);
            let report = match &assembly.bodies[body.index()] {
                Ok(approx) => {
                    let approx_regime = regime_check(approx);
                    regime_flags.extend(approx_regime.flags.iter().copied());
                    BodyReport {
                        body,
                        method: approx.method,
                        comparison: Some(compare(approx, oracle_series)?),
                        approx_regime: Some(approx_regime),
                        oracle_regime,
                        error: None,
                    }
                }
                Err(e) => BodyReport {
                    body,
                    method: None,
                    comparison: None,
                    approx_regime: None,
                    oracle_regime,
                    error: Some(e.to_string()),
                },
            };
            regime_flags.extend(report.oracle_regime.flags.iter().copied());
            per_body.push(report);
        }
        regime_flags.sort_by(|a, b| a.t_start.total_cmp(&b.t_start).then(a.body.cmp(&b.body)));
        let per_body: [BodyReport; 3] = per_body.try_into().expect("three bodies");
        Ok(ComparisonReport {
            per_body,
            collinearity: collinearity_series(config.masses, config.g, &oracle.series)?,
            regime_flags,
            conservation: oracle.conservation,
        })
    }
}
