//! The three subcommands and parameter sweeps.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use threebody::assembly::BodyPipeline;
use threebody::integrator::integrate_on_grid;
use threebody::{
    assemble_all, to_barycentric, Assembly, Body, BodyError, ComparisonReport, Error, OracleRun, SeriesRow, Stage,
    SystemConfig, TrajectorySeries,
};

use crate::output::{self, IntegrationSummary};
use crate::scenario::{GridKind, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Approximate,
    Integrate,
    Compare,
}

/// Exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Success = 0,
    Io = 1,
    Input = 2,
    Computation = 3,
}

/// `--sweep` target: an absolute mass or a fraction of the total mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Mass(Body),
    Fraction(Body),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    /// Values as written on the command line (used as directory names) and parsed.
    pub values: Vec<(String, f64)>,
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Sweep, String> {
        let (name, list) = s.split_once('=').ok_or("expected <param>=<v1,v2,...>")?;
        let mut chars = name.trim().chars();
        let kind = chars.next();
        let body = chars.as_str().parse().ok().and_then(Body::from_number);
        let param = match (kind, body) {
            (Some('m'), Some(b)) => SweepParam::Mass(b),
            (Some('q'), Some(b)) => SweepParam::Fraction(b),
            _ => return Err(format!("unknown sweep parameter `{name}`, expected m1..m3 or q1..q3")),
        };
        let values = list
            .split(',')
            .map(|v| {
                let v = v.trim();
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(|x| (v.to_string(), x))
                    .ok_or_else(|| format!("invalid sweep value `{v}`"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() || values.iter().any(|(v, _)| v.is_empty()) {
            return Err("sweep needs at least one value".into());
        }
        Ok(Sweep { param, values })
    }
}

impl Sweep {
    /// Set the swept mass. A fraction `q` of body i gives `mᵢ = q/(1−q)·Σ others`,
    /// so that `mᵢ/M = q`.
    pub fn apply(&self, config: &SystemConfig, value: f64) -> Result<SystemConfig, Error> {
        let mut masses = config.masses;
        match self.param {
            SweepParam::Mass(b) => masses[b.index()] = value,
            SweepParam::Fraction(b) => {
                if !(0.0..1.0).contains(&value) {
                    return Err(Error::InvalidConfig(format!(
                        "mass fraction must lie in [0, 1), got {value}"
                    )));
                }
                let others: f64 = Body::ALL.iter().filter(|&&o| o != b).map(|&o| masses[o.index()]).sum();
                masses[b.index()] = value / (1.0 - value) * others;
            }
        }
        SystemConfig::new(masses, config.g, config.bodies, config.t0)
    }
}

/// Outcome of one run: worst status plus the messages explaining it.
#[derive(Debug, Default)]
pub struct Outcome {
    pub messages: Vec<String>,
    status: Option<Status>,
}

impl Outcome {
    fn fail(&mut self, status: Status, message: impl fmt::Display) {
        self.messages.push(message.to_string());
        self.status = self.status.max(Some(status));
    }

    pub fn status(&self) -> Status {
        self.status.unwrap_or(Status::Success)
    }

    pub fn exit_code(&self) -> i32 {
        self.status() as i32
    }
}

/// Load the scenario and run the command, once or per sweep value.
pub fn run(command: Command, scenario: &Path, out: &Path, dimensionless: bool, sweep: Option<&Sweep>) -> Outcome {
    let mut outcome = Outcome::default();
    let scenario = match Scenario::load(scenario, dimensionless) {
        Ok(s) => s,
        Err(e) => {
            outcome.fail(Status::Input, e);
            return outcome;
        }
    };
    let Some(sweep) = sweep else {
        return run_scenario(command, &scenario, out);
    };

    let mut jobs = Vec::new();
    for (label, value) in &sweep.values {
        match sweep.apply(&scenario.config, *value) {
            Ok(config) => {
                let dir = out.join(format!("{}={label}", param_name(sweep.param)));
                jobs.push((
                    label.clone(),
                    Scenario {
                        config,
                        ..scenario.clone()
                    },
                    dir,
                ));
            }
            Err(e) => outcome.fail(Status::Input, format!("sweep value {label}: {e}")),
        }
    }
    if outcome.status() != Status::Success {
        return outcome;
    }
    // output directories are disjoint, so the runs share nothing
    let results: Vec<(String, Outcome)> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(label, s, dir)| (label, scope.spawn(move || run_scenario(command, s, dir))))
            .collect();
        handles
            .into_iter()
            .map(|(label, h)| (label.clone(), h.join().expect("sweep run panicked")))
            .collect()
    });
    for (label, r) in results {
        for m in &r.messages {
            outcome.fail(r.status(), format!("[{}={label}] {m}", param_name(sweep.param)));
        }
    }
    outcome
}

fn param_name(p: SweepParam) -> String {
    match p {
        SweepParam::Mass(b) => format!("m{b}"),
        SweepParam::Fraction(b) => format!("q{b}"),
    }
}

/// Run one scenario, writing into `out`. Everything is computed in the barycentric frame.
pub fn run_scenario(command: Command, scenario: &Scenario, out: &Path) -> Outcome {
    let mut outcome = Outcome::default();
    if let Err(e) = std::fs::create_dir_all(out) {
        outcome.fail(Status::Io, format!("{}: {e}", out.display()));
        return outcome;
    }
    let scenario = Scenario {
        config: to_barycentric(&scenario.config),
        ..scenario.clone()
    };
    let mut writer = Writer {
        dir: out.to_path_buf(),
        outcome: &mut outcome,
    };
    match command {
        Command::Approximate => approximate(&scenario, &mut writer),
        Command::Integrate => integrate(&scenario, &mut writer),
        Command::Compare => compare(&scenario, &mut writer),
    }
    outcome
}

struct Writer<'a> {
    dir: PathBuf,
    outcome: &'a mut Outcome,
}

impl Writer<'_> {
    fn file(&mut self, name: &str, contents: &str) {
        if let Err(e) = output::write(&self.dir, name, contents) {
            self.outcome
                .fail(Status::Io, format!("{}: {e}", self.dir.join(name).display()));
        }
    }

    fn body_error(&mut self, e: &BodyError) {
        self.outcome.fail(Status::Computation, e);
    }

    fn approx_series(&mut self, assembly: &Assembly) {
        for (body, result) in Body::ALL.iter().zip(&assembly.bodies) {
            match result {
                Ok(series) => self.file(&output::file_name(*body, "approx"), &output::approx_csv(series)),
                Err(e) => self.body_error(e),
            }
        }
    }

    fn oracle_series(&mut self, run: &OracleRun) {
        for (body, series) in Body::ALL.iter().zip(&run.series) {
            self.file(&output::file_name(*body, "oracle"), &output::oracle_csv(series));
        }
    }
}

/// Approximate trajectories on the scenario grid. A θ grid holds offsets swept
/// from each body's initial angle in its direction of rotation.
fn approximate_assembly(scenario: &Scenario, times: Option<&[f64]>) -> Assembly {
    let config = &scenario.config;
    match times {
        Some(times) => assemble_all(config, times, &scenario.options),
        None => {
            let offsets = scenario.grid.values();
            let bodies = Body::ALL.map(|body| {
                let pipeline = BodyPipeline::build(config, body, &scenario.options)?;
                let mut series = TrajectorySeries::new(body, threebody::Source::Approximate, Some(pipeline.law.method));
                for d in &offsets {
                    let theta = pipeline.law.theta0 + pipeline.law.sweep_sign * d;
                    let row: SeriesRow = pipeline.row_at_angle(theta).map_err(|source| BodyError {
                        body,
                        stage: Stage::Sample,
                        source,
                    })?;
                    series.rows.push(row);
                }
                Ok(series)
            });
            Assembly { bodies }
        }
    }
}

fn approximate(scenario: &Scenario, w: &mut Writer) {
    let times = (scenario.grid.kind == GridKind::Time).then(|| scenario.grid.values());
    let assembly = approximate_assembly(scenario, times.as_deref());
    w.approx_series(&assembly);
}

/// Run the oracle, mapping configuration problems to input errors.
fn run_oracle(scenario: &Scenario, times: &[f64], w: &mut Writer) -> Option<OracleRun> {
    match integrate_on_grid(&scenario.config, &scenario.integrator, times) {
        Ok(run) => Some(run),
        Err(e @ Error::InvalidConfig(_)) => {
            w.outcome.fail(Status::Input, e);
            None
        }
        Err(e) => {
            w.outcome.fail(Status::Computation, e);
            None
        }
    }
}

fn oracle_times(scenario: &Scenario, w: &mut Writer) -> Option<Vec<f64>> {
    let times = scenario.oracle_times();
    if times.is_none() {
        w.outcome.fail(
            Status::Input,
            "a theta grid needs [integrator] horizon and sample_interval for the reference integration",
        );
    }
    times
}

fn report_abort(run: &OracleRun, w: &mut Writer) {
    if let Some(e) = &run.aborted {
        let t = run.series[0].rows.last().map_or(f64::NAN, |r| r.t);
        w.outcome.fail(
            Status::Computation,
            format!("reference integration aborted: {e} (series end at t = {t})"),
        );
    }
}

fn integrate(scenario: &Scenario, w: &mut Writer) {
    let Some(times) = oracle_times(scenario, w) else { return };
    let Some(run) = run_oracle(scenario, &times, w) else {
        return;
    };
    w.oracle_series(&run);
    let summary = IntegrationSummary {
        conservation: run.conservation,
        t_end: run.series[0].rows.last().map_or(scenario.config.t0, |r| r.t),
        samples: run.series[0].len(),
        aborted: run.aborted.as_ref().map(|e| e.to_string()),
    };
    match output::to_json(&summary, &output::summary_floats(&summary)) {
        Ok(json) => w.file("conservation.json", &json),
        Err(e) => w.outcome.fail(Status::Computation, e),
    }
    report_abort(&run, w);
}

fn compare(scenario: &Scenario, w: &mut Writer) {
    let Some(times) = oracle_times(scenario, w) else { return };
    let assembly = approximate_assembly(scenario, Some(&times));
    w.approx_series(&assembly);
    let Some(run) = run_oracle(scenario, &times, w) else {
        return;
    };
    w.oracle_series(&run);
    if run.aborted.is_some() {
        report_abort(&run, w);
        return;
    }
    let report = match ComparisonReport::build(&scenario.config, &assembly, &run) {
        Ok(r) => r,
        Err(e) => return w.outcome.fail(Status::Computation, e),
    };
    for b in &report.per_body {
        if let Some(c) = &b.comparison {
            w.file(&output::file_name(b.body, "error"), &output::error_csv(c));
        }
    }
    match output::to_json(&report, &output::report_floats(&report)) {
        Ok(json) => w.file("report.json", &json),
        Err(e) => w.outcome.fail(Status::Computation, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "m3=1e-6, 1e-4,0.01".parse().unwrap();
        assert_eq!(s.param, SweepParam::Mass(Body::Three));
        assert_eq!(s.values[1], ("1e-4".to_string(), 1e-4));
        assert!("m4=1".parse::<Sweep>().is_err());
        assert!("x1=1".parse::<Sweep>().is_err());
        assert!("q2=".parse::<Sweep>().is_err());
        assert!("q2=abc".parse::<Sweep>().is_err());
        assert!("m1".parse::<Sweep>().is_err());
    }

    #[test]
    fn fraction_of_total_mass() {
        let c = SystemConfig::new(
            [1.0, 1.0, 0.5],
            1.0,
            [
                threebody::BodyState::new(threebody::Vec2::new(1.0, 0.0), threebody::Vec2::ZERO),
                threebody::BodyState::new(threebody::Vec2::new(-1.0, 0.0), threebody::Vec2::ZERO),
                threebody::BodyState::new(threebody::Vec2::new(0.0, 5.0), threebody::Vec2::ZERO),
            ],
            0.0,
        )
        .unwrap();
        let s: Sweep = "q3=0.01".parse().unwrap();
        let swept = s.apply(&c, 0.01).unwrap();
        assert!((swept.masses[2] / swept.total_mass() - 0.01).abs() < 1e-15);
        assert!(s.apply(&c, 1.0).is_err());
    }
}
