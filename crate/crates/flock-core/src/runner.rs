//! Batch experiment driver: integrates a scenario and writes plain CSV
//! artifacts plus a key=value summary. Output is deterministic down to the
//! byte for a fixed scenario and seed; floats are printed with shortest
//! round-trip formatting so nothing is lost between runs and analysis.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::metrics::{
    metrics_table, nearest_neighbor_distances, proximity_radii, run, summarize, RunRecording,
    RunSummary, StepMetrics,
};
use crate::scenario::{AnyWorld, Scenario, ScenarioError};
use crate::sim::World;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("non-finite value in {file} at t = {t} s ({what})")]
    NonFinite { file: String, t: f64, what: String },
}

/// Paths of everything a run produced.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub trajectory: PathBuf,
    pub metrics: PathBuf,
    pub aliens: Option<PathBuf>,
    pub summary: PathBuf,
}

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn run_experiment(
    scenario: &Scenario,
    out_dir: &Path,
    steps_override: Option<usize>,
) -> Result<(RunSummary, RunArtifacts), RunnerError> {
    let steps = steps_override.unwrap_or_else(|| scenario.steps());
    match scenario.build()? {
        AnyWorld::D1(w) => run_world(w, steps, out_dir),
        AnyWorld::D2(w) => run_world(w, steps, out_dir),
        AnyWorld::D3(w) => run_world(w, steps, out_dir),
    }
}

/// Companion to [`run_experiment`]: same integration, but emits per-quantity
/// tables shaped for direct plotting instead of the row-per-agent log.
pub fn run_figures(
    scenario: &Scenario,
    out_dir: &Path,
    steps_override: Option<usize>,
) -> Result<Vec<PathBuf>, RunnerError> {
    let steps = steps_override.unwrap_or_else(|| scenario.steps());
    match scenario.build()? {
        AnyWorld::D1(w) => figures_world(w, steps, out_dir),
        AnyWorld::D2(w) => figures_world(w, steps, out_dir),
        AnyWorld::D3(w) => figures_world(w, steps, out_dir),
    }
}

fn run_world<const D: usize>(
    mut world: World<D>,
    steps: usize,
    out_dir: &Path,
) -> Result<(RunSummary, RunArtifacts), RunnerError> {
    fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let radii = proximity_radii(&world);
    let rec = run(&mut world, steps);
    let table = metrics_table(&rec, &radii);

    let trajectory = out_dir.join("trajectory.csv");
    write_file(&trajectory, trajectory_csv(&rec)?)?;
    let metrics = out_dir.join("metrics.csv");
    write_file(&metrics, metrics_csv(&table, &rec.agent_ids)?)?;
    let aliens = if rec.alien_ids.is_empty() {
        None
    } else {
        let path = out_dir.join("aliens.csv");
        write_file(&path, aliens_csv(&rec)?)?;
        Some(path)
    };
    let summary = summarize(&table);
    let summary_path = out_dir.join("summary.txt");
    write_file(&summary_path, summary_txt(&summary))?;

    Ok((summary, RunArtifacts { trajectory, metrics, aliens, summary: summary_path }))
}

fn figures_world<const D: usize>(
    mut world: World<D>,
    steps: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunnerError> {
    fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let radii = proximity_radii(&world);
    let rec = run(&mut world, steps);
    let table = metrics_table(&rec, &radii);

    let mut written = Vec::new();
    for (name, body) in [
        ("distance_band.csv", distance_band_csv(&table)?),
        ("speed_traces.csv", per_agent_csv(&table, &rec.agent_ids, "speed_mps", |m| &m.speeds)?),
        (
            "control_norms.csv",
            per_agent_csv(&table, &rec.agent_ids, "u_norm_mps2", |m| &m.control_norms)?,
        ),
        ("nearest_neighbor.csv", nearest_neighbor_csv(&rec)?),
    ] {
        let path = out_dir.join(name);
        write_file(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

fn write_file(path: &Path, body: String) -> Result<(), RunnerError> {
    let io_err = |source| RunnerError::Io { path: path.display().to_string(), source };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(body.as_bytes()).map_err(io_err)
}

/// Shortest round-trip float, guarded: simulation output must stay finite all
/// the way to disk.
fn cell(file: &str, t: f64, what: &str, v: f64) -> Result<String, RunnerError> {
    if !v.is_finite() {
        return Err(RunnerError::NonFinite {
            file: file.into(),
            t,
            what: what.into(),
        });
    }
    Ok(format!("{v}"))
}

fn trajectory_csv<const D: usize>(rec: &RunRecording<D>) -> Result<String, RunnerError> {
    const FILE: &str = "trajectory.csv";
    let mut out = String::from("# schema: trajectory v1\n");
    out.push_str("t_s,agent_id");
    for (label, unit) in [("pos", "m"), ("vel", "mps"), ("u", "mps2")] {
        for axis in &AXES[..D] {
            let _ = write!(out, ",{label}_{axis}_{unit}");
        }
    }
    out.push('\n');
    for frame in &rec.frames {
        for (slot, &id) in rec.agent_ids.iter().enumerate() {
            let _ = write!(out, "{},{id}", cell(FILE, frame.t, "t_s", frame.t)?);
            for (label, column) in
                [("pos", &frame.pos), ("vel", &frame.vel), ("u", &frame.control)]
            {
                for k in 0..D {
                    let what = format!("{label}[{k}] of agent {id}");
                    let _ = write!(out, ",{}", cell(FILE, frame.t, &what, column[slot][k])?);
                }
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn metrics_csv(table: &[StepMetrics], agent_ids: &[usize]) -> Result<String, RunnerError> {
    const FILE: &str = "metrics.csv";
    let mut out = String::from("# schema: metrics v1\n");
    out.push_str("t_s,dist_min_m,dist_max_m,dist_mean_m,mean_speed_mps,components");
    for id in agent_ids {
        let _ = write!(out, ",speed_mps_{id}");
    }
    for id in agent_ids {
        let _ = write!(out, ",u_norm_mps2_{id}");
    }
    out.push('\n');
    for m in table {
        let c = |what: &str, v: f64| cell(FILE, m.t, what, v);
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            c("t_s", m.t)?,
            c("dist_min_m", m.dist.min)?,
            c("dist_max_m", m.dist.max)?,
            c("dist_mean_m", m.dist.mean)?,
            c("mean_speed_mps", m.mean_speed)?,
            m.components,
        );
        for (id, &s) in agent_ids.iter().zip(&m.speeds) {
            let _ = write!(out, ",{}", c(&format!("speed of agent {id}"), s)?);
        }
        for (id, &u) in agent_ids.iter().zip(&m.control_norms) {
            let _ = write!(out, ",{}", c(&format!("control norm of agent {id}"), u)?);
        }
        out.push('\n');
    }
    Ok(out)
}

fn aliens_csv<const D: usize>(rec: &RunRecording<D>) -> Result<String, RunnerError> {
    const FILE: &str = "aliens.csv";
    let mut out = String::from("# schema: aliens v1\n");
    out.push_str("t_s,alien_id,pos_x_m,pos_y_m,vel_x_mps,vel_y_mps\n");
    for frame in &rec.frames {
        for (slot, &id) in rec.alien_ids.iter().enumerate() {
            let p = frame.alien_pos[slot];
            let v = frame.alien_vel[slot];
            let c = |what: &str, x: f64| cell(FILE, frame.t, what, x);
            let _ = writeln!(
                out,
                "{},{id},{},{},{},{}",
                c("t_s", frame.t)?,
                c("pos[0]", p[0])?,
                c("pos[1]", p[1])?,
                c("vel[0]", v[0])?,
                c("vel[1]", v[1])?,
            );
        }
    }
    Ok(out)
}

fn summary_txt(s: &RunSummary) -> String {
    format!(
        "min_distance_m = {}\nmean_final_speed_mps = {}\nmax_control_mps2 = {}\nfragmentation_episodes = {}\n",
        s.min_distance, s.mean_final_speed, s.max_control_norm, s.fragmentation_episodes
    )
}

fn distance_band_csv(table: &[StepMetrics]) -> Result<String, RunnerError> {
    const FILE: &str = "distance_band.csv";
    let mut out = String::from("# schema: distance_band v1\n");
    out.push_str("t_s,dist_min_m,dist_mean_m,dist_max_m,components\n");
    for m in table {
        let c = |what: &str, v: f64| cell(FILE, m.t, what, v);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c("t_s", m.t)?,
            c("dist_min_m", m.dist.min)?,
            c("dist_mean_m", m.dist.mean)?,
            c("dist_max_m", m.dist.max)?,
            m.components,
        );
    }
    Ok(out)
}

fn per_agent_csv(
    table: &[StepMetrics],
    agent_ids: &[usize],
    column: &str,
    pick: impl Fn(&StepMetrics) -> &Vec<f64>,
) -> Result<String, RunnerError> {
    let file = format!("{column} figure table");
    let mut out = format!("# schema: {column} v1\n");
    out.push_str("t_s");
    for id in agent_ids {
        let _ = write!(out, ",{column}_{id}");
    }
    out.push('\n');
    for m in table {
        let _ = write!(out, "{}", cell(&file, m.t, "t_s", m.t)?);
        for (id, &v) in agent_ids.iter().zip(pick(m)) {
            let _ = write!(out, ",{}", cell(&file, m.t, &format!("agent {id}"), v)?);
        }
        out.push('\n');
    }
    Ok(out)
}

fn nearest_neighbor_csv<const D: usize>(rec: &RunRecording<D>) -> Result<String, RunnerError> {
    const FILE: &str = "nearest_neighbor.csv";
    let mut out = String::from("# schema: nearest_neighbor v1\n");
    out.push_str("t_s");
    for id in &rec.agent_ids {
        let _ = write!(out, ",nn_dist_m_{id}");
    }
    out.push('\n');
    for frame in &rec.frames {
        let nn = nearest_neighbor_distances(&frame.pos);
        let _ = write!(out, "{}", cell(FILE, frame.t, "t_s", frame.t)?);
        for (id, &d) in rec.agent_ids.iter().zip(&nn) {
            let _ = write!(out, ",{}", cell(FILE, frame.t, &format!("agent {id}"), d)?);
        }
        out.push('\n');
    }
    Ok(out)
}
