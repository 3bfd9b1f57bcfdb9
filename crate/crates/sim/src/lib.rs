//! File formats and the run driver for the `pnp-sim` command-line tool.
//!
//! A run resolves a [`config::Scenario`], time-steps it with
//! [`pnp_core::solver::Simulation`] and writes into the output directory:
//!
//! * `reports.csv`, one row of diagnostics per step,
//! * `mesh.vtk` and `snapshot_<step>.vtk` at the requested times,
//! * `mass.svg`, `energy.svg` and `extrema.svg`.

pub mod config;
pub mod svg;
pub mod table;
pub mod vtk;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::Context;
use pnp_core::diagnostics::{InvariantPolicy, StepReport};
use pnp_core::solver::{num_steps, Simulation};
use pnp_core::Mesh;

pub use config::{parse_config, Scenario};

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub reports: Vec<StepReport>,
    /// Set when time stepping stopped early.
    pub error: Option<pnp_core::Error>,
    pub policy: InvariantPolicy,
    pub snapshot_files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }

    pub fn invariants_hold(&self) -> bool {
        self.reports.iter().all(|r| r.flags.all())
    }

    /// Whether the run counts as a success under `strict` checking.
    pub fn success(&self, strict: bool) -> bool {
        self.completed() && (!strict || self.invariants_hold())
    }
}

/// Step indices at which the snapshot times are reached.
pub fn snapshot_steps(times: &[f64], k: f64, total: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = times.iter().map(|&t| ((t / k).round() as usize).min(total)).collect();
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Builds the mesh and runs the scenario, writing all outputs. Solver
/// failures during time stepping end the run but are reported in the
/// outcome rather than as an error; setup and IO failures are errors.
pub fn run_scenario(scenario: &Scenario) -> anyhow::Result<RunOutcome> {
    let spec = &scenario.spec;
    let mesh: Mesh = spec.mesh.build().context("building the mesh")?;
    let (p0, n0) = spec.initial_fields(&mesh).context("interpolating the initial data")?;
    let mut sim = Simulation::new(&mesh, &spec.bc, &spec.config, p0, n0).context("setting up the simulation")?;
    log::info!(
        "{}: algorithm {}, {} nodes, {} elements, {} steps of k = {}",
        spec.name,
        spec.config.algorithm.number(),
        mesh.num_nodes(),
        mesh.num_elements(),
        sim.total_steps(),
        spec.config.k
    );

    let dir = &scenario.out_dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    vtk::write_mesh(&mesh, &dir.join("mesh.vtk"))?;
    let csv_path = dir.join("reports.csv");
    let file = File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    let mut table = table::ReportWriter::new(BufWriter::new(file))?;

    let wanted = snapshot_steps(&scenario.snapshots, spec.config.k, num_steps(spec.config.t_final, spec.config.k));
    let mut snapshot_files = Vec::new();
    let snapshot = |sim: &Simulation, files: &mut Vec<PathBuf>| -> anyhow::Result<()> {
        if wanted.binary_search(&sim.steps_taken()).is_ok() {
            let path = dir.join(format!("snapshot_{:06}.vtk", sim.steps_taken()));
            vtk::write_vtk_snapshot(sim.state(), &mesh, &path)?;
            files.push(path);
        }
        Ok(())
    };

    table.push(&sim.reports()[0])?;
    snapshot(&sim, &mut snapshot_files)?;
    let mut error = None;
    while !sim.is_finished() {
        match sim.step() {
            Ok(report) => {
                log::debug!("t = {:.6}: {} Picard iterations", report.t, report.picard_iters);
                table.push(report)?;
                snapshot(&sim, &mut snapshot_files)?;
            }
            Err(e) => {
                log::error!("{e}");
                error = Some(e);
                break;
            }
        }
    }
    table.finish()?;

    let reports = sim.reports().to_vec();
    for (stem, body) in svg::report_charts(&reports) {
        let path = dir.join(format!("{stem}.svg"));
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(RunOutcome { reports, error, policy: sim.policy().clone(), snapshot_files })
}
