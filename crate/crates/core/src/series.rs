//! Sampled trajectories of a single body.

use serde::{Deserialize, Serialize};

use crate::kinematics::{unwrap_near, Body, Vec2};
use crate::time_law::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Approximate,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    /// Unwrapped rotation angle of the position vector.
    pub theta: f64,
    pub r: f64,
    pub position: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySeries {
    pub subject: Body,
    pub rows: Vec<SeriesRow>,
    /// How the time law was evaluated; `None` for oracle series.
    pub method: Option<Method>,
    pub source: Source,
}

impl TrajectorySeries {
    pub fn new(subject: Body, source: Source, method: Option<Method>) -> Self {
        Self {
            subject,
            rows: Vec::new(),
            method,
            source,
        }
    }

    /// Append a sample given only its position; the angle is unwrapped against
    /// the previous row.
    pub fn push_position(&mut self, t: f64, position: Vec2) {
        let raw = position.angle();
        let theta = match self.rows.last() {
            Some(prev) => unwrap_near(raw, prev.theta),
            None => raw,
        };
        self.rows.push(SeriesRow {
            t,
            theta,
            r: position.norm(),
            position,
        });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.t)
    }

    pub fn max_radius(&self) -> f64 {
        self.rows.iter().map(|r| r.r).fold(0.0, f64::max)
    }

    /// Strictly increasing times, positive radii, and angle steps below π.
    pub fn is_well_formed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.r > 0.0 && r.t.is_finite() && r.theta.is_finite())
            && self
                .rows
                .windows(2)
                .all(|w| w[1].t > w[0].t && (w[1].theta - w[0].theta).abs() < std::f64::consts::PI)
    }
}
