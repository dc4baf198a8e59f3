//! Configuration, trajectory output and the reduced-versus-unreduced
//! comparison for the sphere body.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{FrameBundle, FramePoint};
use crate::check::{sample_rng, Execution};
use crate::dynamics::{check_lagrangian_invariance, lagrangian_dynamics_point, reduced_dynamics_point, BodyState, SphereBody};
use crate::error::{Error, Result};
use crate::reduce::{project_ttsp, tasp_distance};

/// Adjustments of `n0` or `v0` above this are reported.
pub const ADJUST_WARN: f64 = 1e-6;
/// Pass threshold of [`compare_reduction`].
pub const COMPARE_TOL: f64 = 1e-8;

pub const SPHERE_BODY: &str = "sphere-body";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}, expected csv or json"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Flat JSON run description. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub model: String,
    pub i_perp: f64,
    pub i_ax: f64,
    pub n0: [f64; 3],
    pub v0: [f64; 3],
    pub r0: f64,
    pub dt: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub seed: u64,
    /// Coefficient of a frame-dependent term `ε ⟨f₁, e₁⟩ r²` that breaks invariance.
    #[serde(default)]
    pub perturbation: f64,
}

impl SimConfig {
    /// The precession run used by the conservation and comparison checks.
    pub fn precession() -> Self {
        SimConfig {
            model: SPHERE_BODY.into(),
            i_perp: 1.0,
            i_ax: 0.5,
            n0: [0.0, 0.0, 1.0],
            v0: [1.0, 0.0, 0.0],
            r0: 2.0,
            dt: 1e-3,
            steps: 10_000,
            output: None,
            format: OutputFormat::Csv,
            seed: 0,
            perturbation: 0.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut c: SimConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.prepare()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the scalars and projects `(n0, v0)` onto the constraint set.
    pub fn prepare(&mut self) -> Result<()> {
        if self.model != SPHERE_BODY {
            return Err(Error::Config(format!("unknown model {:?}, expected {SPHERE_BODY:?}", self.model)));
        }
        SphereBody::new(self.i_perp, self.i_ax).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if !self.perturbation.is_finite() {
            return Err(Error::Config("perturbation must be finite".into()));
        }
        let (s, adjust) = BodyState::projected(Vector3::from(self.n0), Vector3::from(self.v0), self.r0)
            .map_err(|e| Error::Config(format!("initial state: {e}")))?;
        if adjust > ADJUST_WARN {
            log::warn!("initial state adjusted by {adjust:.3e} to satisfy |n| = 1 and <n, v> = 0");
        }
        self.n0 = s.n.into();
        self.v0 = s.v.into();
        Ok(())
    }

    pub fn body(&self) -> Result<SphereBody> {
        SphereBody::new(self.i_perp, self.i_ax)
    }

    pub fn initial_state(&self) -> Result<BodyState> {
        BodyState::new(Vector3::from(self.n0), Vector3::from(self.v0), self.r0)
    }
}

/// One output row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub n_x: f64,
    pub n_y: f64,
    pub n_z: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub v_z: f64,
    pub r: f64,
    pub energy: f64,
    pub constraint_norm: f64,
    pub constraint_orth: f64,
}

pub const CSV_HEADER: [&str; 11] = [
    "t",
    "n_x",
    "n_y",
    "n_z",
    "v_x",
    "v_y",
    "v_z",
    "r",
    "energy",
    "constraint_norm",
    "constraint_orth",
];

impl TrajectoryRecord {
    pub fn new(body: &SphereBody, t: f64, s: &BodyState) -> Self {
        TrajectoryRecord {
            t,
            n_x: s.n.x,
            n_y: s.n.y,
            n_z: s.n.z,
            v_x: s.v.x,
            v_y: s.v.y,
            v_z: s.v.z,
            r: s.r,
            energy: body.energy(s),
            constraint_norm: s.constraint_norm(),
            constraint_orth: s.constraint_orth(),
        }
    }

    pub fn state(&self) -> BodyState {
        BodyState {
            n: Vector3::new(self.n_x, self.n_y, self.n_z),
            v: Vector3::new(self.v_x, self.v_y, self.v_z),
            r: self.r,
        }
    }
}

/// Integrates the configured run, one record per step including `t = 0`.
pub fn simulate(config: &SimConfig) -> Result<Vec<TrajectoryRecord>> {
    if config.perturbation != 0.0 {
        return Err(Error::Config("perturbation only applies to compare-reduction".into()));
    }
    let body = config.body()?;
    let mut out = Vec::with_capacity(config.steps + 1);
    body.integrate_with(&config.initial_state()?, config.dt, config.steps, |k, s| {
        out.push(TrajectoryRecord::new(&body, k as f64 * config.dt, s));
        Ok(())
    })?;
    Ok(out)
}

pub fn write_trajectory(records: &[TrajectoryRecord], format: OutputFormat, out: impl Write) -> Result<()> {
    let io = |e: &dyn fmt::Display| Error::Config(format!("write failed: {e}"));
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r).map_err(|e| io(&e))?;
            }
            w.flush().map_err(|e| io(&e))?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records).map_err(|e| io(&e))?;
            writeln!(out).map_err(|e| io(&e))?;
        }
    }
    Ok(())
}

pub fn read_csv(input: impl std::io::Read) -> Result<Vec<TrajectoryRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::Config(e.to_string()))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub states: usize,
    pub max_deviation: f64,
    pub threshold: f64,
    pub invariance_residual: f64,
    pub passed: bool,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} reduced vs unreduced: max deviation {:.3e} over {} states (≤ {:.0e}); invariance residual {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.max_deviation,
            self.states,
            self.threshold,
            self.invariance_residual
        )
    }
}

/// Compares the projected unreduced dynamics point with the reduced one at
/// every state of the configured trajectory. Both sides use the
/// finite-difference differential; the frame over each `n` is drawn from
/// the seed, so the comparison also exercises gauge independence.
pub fn compare_reduction(config: &SimConfig, exec: Execution) -> Result<ComparisonReport> {
    let body = config.body()?;
    let bundle = FrameBundle::new();
    let l = if config.perturbation != 0.0 {
        body.perturbed_lagrangian(config.perturbation)
    } else {
        body.lagrangian()
    };
    let invariance_residual = check_lagrangian_invariance(&bundle, &l, 64, &mut sample_rng(config.seed, usize::MAX, 0))?;
    let l = l.numeric();

    let states = body.integrate(&config.initial_state()?, config.dt, config.steps)?;
    let deviation = |k: usize| -> Result<f64> {
        let s = &states[k];
        let theta = sample_rng(config.seed, 0, k).random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let p = FramePoint::reference(&s.n).rotate(theta);
        let v = body.trivial_tangent(&bundle, &p, s)?;
        let full = project_ttsp(&bundle, &lagrangian_dynamics_point(&bundle, &l, &v)?)?;
        let red = reduced_dynamics_point(&bundle, &l, &v)?;
        tasp_distance(&bundle, &full, &red)
    };
    let all: Vec<Result<f64>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..states.len()).into_par_iter().map(deviation).collect()
        }
        _ => (0..states.len()).map(deviation).collect(),
    };
    let mut max_deviation = 0.0_f64;
    for d in all {
        let d = d?;
        max_deviation = if d.is_nan() { f64::INFINITY } else { max_deviation.max(d) };
    }
    Ok(ComparisonReport {
        states: states.len(),
        max_deviation,
        threshold: COMPARE_TOL,
        invariance_residual,
        passed: max_deviation <= COMPARE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Result<SimConfig> {
        SimConfig::from_json(json)
    }

    const BASE: &str = r#"{"model":"sphere-body","i_perp":1.0,"i_ax":0.5,"n0":[0,0,1],"v0":[1,0,0],"r0":2.0,"dt":0.001,"steps":10}"#;

    #[test]
    fn parses_with_defaults() {
        let c = config(BASE).unwrap();
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!((c.seed, c.perturbation, c.output.clone()), (0, 0.0, None));
        let mut p = SimConfig::precession();
        p.steps = 10;
        assert_eq!(c, p);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(config(&BASE.replace("\"r0\"", "\"r_0\"")), Err(Error::Config(_))));
        assert!(config(&BASE.replace("}", r#","extra":1}"#)).is_err());
        assert!(config(&BASE.replace("sphere-body", "top")).is_err());
        assert!(config(&BASE.replace("\"dt\":0.001", "\"dt\":0")).is_err());
        assert!(config(&BASE.replace("\"steps\":10", "\"steps\":0")).is_err());
        assert!(config(&BASE.replace("\"i_ax\":0.5", "\"i_ax\":-1")).is_err());
        assert!(config(&BASE.replace("[0,0,1]", "[0,0,0]")).is_err());
        assert!(config("{").is_err());
        assert!(SimConfig::load(Path::new("/nonexistent/config.json")).is_err());
    }

    #[test]
    fn initial_state_is_projected() {
        let c = config(&BASE.replace("[0,0,1]", "[0,0,2]").replace("[1,0,0]", "[1,0,0.5]")).unwrap();
        assert_eq!(c.n0, [0.0, 0.0, 1.0]);
        assert_eq!(c.v0, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn csv_round_trips() {
        let c = config(BASE).unwrap();
        let rows = simulate(&c).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].t, 0.0);
        let mut buf = Vec::new();
        write_trajectory(&rows, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn json_mirrors_the_csv_fields() {
        let rows = simulate(&config(BASE).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&rows, OutputFormat::Json, &mut buf).unwrap();
        let back: Vec<TrajectoryRecord> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, rows);
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let keys: Vec<_> = v[0].as_object().unwrap().keys().cloned().collect();
        let mut want: Vec<_> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
        want.sort();
        assert_eq!(keys, want);
    }

    #[test]
    fn zero_velocity_rows_are_constant() {
        let rows = simulate(&config(&BASE.replace("[1,0,0]", "[0,0,0]")).unwrap()).unwrap();
        assert!(rows.windows(2).all(|w| w[0].state() == w[1].state() && w[0].energy == w[1].energy));
    }

    #[test]
    fn comparison_passes_on_a_short_run() {
        let mut c = SimConfig::precession();
        c.steps = 50;
        c.dt = 0.02;
        let rep = compare_reduction(&c, Execution::default()).unwrap();
        assert!(rep.passed, "{rep}");
        assert_eq!(rep.states, 51);
        c.v0 = [0.0; 3];
        assert!(compare_reduction(&c, Execution::Sequential).unwrap().passed);
    }

    #[test]
    fn comparison_rejects_the_perturbed_lagrangian() {
        let mut c = SimConfig::precession();
        c.steps = 5;
        c.perturbation = 0.1;
        assert!(matches!(compare_reduction(&c, Execution::Sequential), Err(Error::NotInvariant(_))));
        assert!(simulate(&c).is_err());
    }
}
