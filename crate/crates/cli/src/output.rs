//! CSV and JSON writers. Floats use Rust's shortest round-trip formatting and
//! rows keep their sampling order, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use threebody::metrics::BodyComparison;
use threebody::{Body, ComparisonReport, ConservationReport, TrajectorySeries};

pub fn approx_csv(series: &TrajectorySeries) -> String {
    let method = series.method.map_or("", |m| m.as_str());
    let mut out = String::from("t,theta,r,x,y,method\n");
    for row in &series.rows {
        let p = row.position;
        writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{method}",
            row.t, row.theta, row.r, p.x, p.y
        )
        .unwrap();
    }
    out
}

pub fn oracle_csv(series: &TrajectorySeries) -> String {
    let mut out = String::from("t,theta,r,x,y\n");
    for row in &series.rows {
        let p = row.position;
        writeln!(out, "{:?},{:?},{:?},{:?},{:?}", row.t, row.theta, row.r, p.x, p.y).unwrap();
    }
    out
}

pub fn error_csv(comparison: &BodyComparison) -> String {
    let mut out = String::from("t,err_radial_rel,err_pos\n");
    for row in &comparison.rows {
        writeln!(out, "{:?},{:?},{:?}", row.t, row.err_radial_rel, row.err_pos).unwrap();
    }
    out
}

pub fn file_name(body: Body, kind: &str) -> String {
    format!("body{}_{kind}.csv", body.number())
}

pub fn write(dir: &Path, name: &str, contents: &str) -> io::Result<()> {
    std::fs::write(dir.join(name), contents)
}

/// Output of `integrate`.
#[derive(Debug, Serialize)]
pub struct IntegrationSummary {
    pub conservation: ConservationReport,
    /// Time of the last recorded sample.
    pub t_end: f64,
    pub samples: usize,
    pub aborted: Option<String>,
}

#[derive(Debug, thiserror::Error)]
#[error("non-finite value in report field `{0}`")]
pub struct NonFinite(pub String);

/// Pretty JSON with a trailing newline. Refuses NaN and infinities, which
/// JSON cannot represent.
pub fn to_json<T: Serialize>(value: &T, floats: &[(String, f64)]) -> Result<String, NonFinite> {
    if let Some((name, _)) = floats.iter().find(|(_, v)| !v.is_finite()) {
        return Err(NonFinite(name.clone()));
    }
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    Ok(s)
}

fn conservation_floats(c: &ConservationReport, out: &mut Vec<(String, f64)>) {
    out.extend([
        (
            "conservation.relative_energy_drift".to_string(),
            c.relative_energy_drift,
        ),
        ("conservation.momentum_drift".to_string(), c.momentum_drift),
        (
            "conservation.relative_momentum_drift".to_string(),
            c.relative_momentum_drift,
        ),
        (
            "conservation.angular_momentum_drift".to_string(),
            c.angular_momentum_drift,
        ),
    ]);
}

pub fn summary_floats(s: &IntegrationSummary) -> Vec<(String, f64)> {
    let mut out = vec![("t_end".to_string(), s.t_end)];
    conservation_floats(&s.conservation, &mut out);
    out
}

/// Every number that ends up in the serialized comparison report.
pub fn report_floats(report: &ComparisonReport) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for (i, b) in report.per_body.iter().enumerate() {
        let key = |field: &str| format!("per_body[{i}].{field}");
        if let Some(c) = &b.comparison {
            out.extend([
                (key("comparison.max_rel_radial_error"), c.max_rel_radial_error),
                (key("comparison.mean_rel_radial_error"), c.mean_rel_radial_error),
                (key("comparison.max_position_error"), c.max_position_error),
                (key("comparison.mean_position_error"), c.mean_position_error),
            ]);
        }
        for (name, regime) in [
            ("approx_regime", b.approx_regime.as_ref()),
            ("oracle_regime", Some(&b.oracle_regime)),
        ] {
            let Some(r) = regime else { continue };
            out.push((key(&format!("{name}.max_angular_rate")), r.max_angular_rate));
            out.push((key(&format!("{name}.max_radius")), r.max_radius));
            for f in &r.flags {
                out.extend([
                    (key("flag.t_start"), f.t_start),
                    (key("flag.t_end"), f.t_end),
                    (key("flag.peak"), f.peak),
                ]);
            }
        }
    }
    for (i, row) in report.collinearity.iter().enumerate() {
        out.push((format!("collinearity[{i}].t"), row.t));
        out.extend(row.defect.iter().map(|&d| (format!("collinearity[{i}].defect"), d)));
    }
    for (i, f) in report.regime_flags.iter().enumerate() {
        out.extend([
            (format!("regime_flags[{i}].t_start"), f.t_start),
            (format!("regime_flags[{i}].t_end"), f.t_end),
            (format!("regime_flags[{i}].peak"), f.peak),
        ]);
    }
    conservation_floats(&report.conservation, &mut out);
    out
}
