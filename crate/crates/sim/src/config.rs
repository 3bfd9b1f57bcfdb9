//! Scenario files: a builtin experiment plus optional overrides, as JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pnp_core::linsolve::LinearSolverKind;
use pnp_core::scenarios::{Builtin, InitialData, Interpolation, MeshSpec, ScenarioSpec};
use pnp_core::solver::{num_steps, StarLinearization};
use pnp_core::{Algorithm, BoundaryTag};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: key '{key}', line {line}, column {column}: {message}")]
    Parse { path: PathBuf, key: String, line: usize, column: usize, message: String },

    #[error("invalid value for '{key}': {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: impl Into<String>, message: impl ToString) -> Self {
        ConfigError::Invalid { key: key.into(), message: message.to_string() }
    }
}

/// Contents of a scenario file. Every field is optional; absent fields keep
/// the values of the named builtin.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Option<String>,
    pub algorithm: Option<u8>,
    pub mesh: Option<MeshFile>,
    pub initial: Option<String>,
    pub interpolation: Option<String>,
    pub boundary: Option<BoundaryFile>,
    #[serde(default)]
    pub solver: SolverFile,
    #[serde(default)]
    pub output: OutputFile,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum MeshFile {
    Square { n: usize },
    Channel { cell: f64 },
    Equilateral { nx: usize, ny: usize, spacing: f64 },
}

/// Dirichlet values keyed by boundary tag name. An absent unknown keeps
/// homogeneous Neumann conditions.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryFile {
    #[serde(default)]
    pub phi: BTreeMap<String, f64>,
    #[serde(default)]
    pub p: BTreeMap<String, f64>,
    #[serde(default)]
    pub n: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    pub k: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub q: Option<f64>,
    pub picard_residual_tol: Option<f64>,
    pub picard_increment_tol: Option<f64>,
    pub picard_max_iters: Option<usize>,
    pub linear_tol: Option<f64>,
    pub linear_solver: Option<String>,
    pub star_linearization: Option<String>,
    pub shrink: Option<f64>,
    pub max_halvings: Option<usize>,
    pub epsilon: Option<f64>,
    pub neutrality_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub dir: Option<PathBuf>,
    pub snapshots: Option<Vec<f64>>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub algorithm: Option<u8>,
    pub k: Option<f64>,
    pub t_final: Option<f64>,
    pub q: Option<f64>,
    pub out: Option<PathBuf>,
    pub snapshots: Option<Vec<f64>>,
}

/// A fully resolved run description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub out_dir: PathBuf,
    /// Times at which VTK snapshots are written, ascending.
    pub snapshots: Vec<f64>,
}

pub fn parse_str(text: &str, path: &Path) -> Result<ScenarioFile, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            path: path.to_path_buf(),
            key,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

pub fn read_file(path: &Path) -> Result<ScenarioFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_str(&text, path)
}

/// Reads and resolves a scenario file.
pub fn parse_config(path: &Path) -> Result<Scenario, ConfigError> {
    resolve(read_file(path)?, &Overrides::default())
}

fn tag_list(key: &str, map: &BTreeMap<String, f64>) -> Result<Vec<(BoundaryTag, f64)>, ConfigError> {
    map.iter()
        .map(|(name, &v)| {
            let tag = BoundaryTag::from_name(name)
                .filter(|t| *t != BoundaryTag::Interior)
                .ok_or_else(|| ConfigError::invalid(format!("{key}.{name}"), "not a boundary tag"))?;
            Ok((tag, v))
        })
        .collect()
}

fn linear_solver_from_name(name: &str) -> Option<LinearSolverKind> {
    match name {
        "banded_lu" => Some(LinearSolverKind::BandedLu),
        "krylov" => Some(LinearSolverKind::Krylov),
        _ => None,
    }
}

/// Applies the file and then the command-line overrides to the named builtin.
pub fn resolve(file: ScenarioFile, cli: &Overrides) -> Result<Scenario, ConfigError> {
    let name = cli.scenario.clone().or(file.scenario).unwrap_or_else(|| Builtin::Smooth.name().to_string());
    let builtin = Builtin::from_name(&name).map_err(|e| ConfigError::invalid("scenario", e))?;
    let number = cli.algorithm.or(file.algorithm).unwrap_or(1);
    let algorithm = Algorithm::from_number(number).map_err(|e| ConfigError::invalid("algorithm", e))?;
    let mut spec = ScenarioSpec::builtin(builtin, algorithm);

    if let Some(mesh) = file.mesh {
        spec.mesh = match mesh {
            MeshFile::Square { n } => MeshSpec::Square { n },
            MeshFile::Channel { cell } => MeshSpec::Channel { cell },
            MeshFile::Equilateral { nx, ny, spacing } => MeshSpec::Equilateral { nx, ny, spacing },
        };
    }
    if let Some(initial) = file.initial {
        spec.initial = InitialData::from_name(&initial).map_err(|e| ConfigError::invalid("initial", e))?;
    }
    if let Some(interp) = file.interpolation {
        spec.interpolation = Interpolation::from_name(&interp).map_err(|e| ConfigError::invalid("interpolation", e))?;
    }
    if let Some(b) = file.boundary {
        spec.bc.phi_dirichlet = tag_list("boundary.phi", &b.phi)?;
        spec.bc.p_dirichlet = tag_list("boundary.p", &b.p)?;
        spec.bc.n_dirichlet = tag_list("boundary.n", &b.n)?;
    }

    let s = file.solver;
    let c = &mut spec.config;
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = s.$field { c.$field = v; })*};
    }
    set!(
        k,
        t_final,
        q,
        picard_residual_tol,
        picard_increment_tol,
        picard_max_iters,
        linear_tol,
        shrink,
        max_halvings,
        neutrality_tol
    );
    if s.epsilon.is_some() {
        c.epsilon = s.epsilon;
    }
    if let Some(name) = s.linear_solver {
        c.linear_solver = linear_solver_from_name(&name)
            .ok_or_else(|| ConfigError::invalid("solver.linear_solver", format!("unknown solver '{name}'")))?;
    }
    if let Some(name) = s.star_linearization {
        c.star_linearization =
            StarLinearization::from_name(&name).map_err(|e| ConfigError::invalid("solver.star_linearization", e))?;
    }
    if let Some(k) = cli.k {
        c.k = k;
    }
    if let Some(t) = cli.t_final {
        c.t_final = t;
    }
    if let Some(q) = cli.q {
        c.q = q;
    }
    c.validate().map_err(|e| ConfigError::invalid("solver", e))?;
    validate_mesh(&spec.mesh)?;

    let out_dir = cli.out.clone().or(file.output.dir).unwrap_or_else(|| PathBuf::from("out").join(spec.name));
    let mut snapshots = match cli.snapshots.clone().or(file.output.snapshots) {
        Some(list) => list,
        None => vec![0.0, num_steps(c.t_final, c.k) as f64 * c.k],
    };
    for &t in &snapshots {
        if !(0.0..=c.t_final).contains(&t) {
            return Err(ConfigError::invalid("output.snapshots", format!("time {t} lies outside [0, {}]", c.t_final)));
        }
    }
    snapshots.sort_by(f64::total_cmp);
    snapshots.dedup();
    Ok(Scenario { spec, out_dir, snapshots })
}

fn validate_mesh(mesh: &MeshSpec) -> Result<(), ConfigError> {
    let ok = match *mesh {
        MeshSpec::Square { n } => n >= 1,
        MeshSpec::Channel { cell } => cell > 0.0 && cell.is_finite(),
        MeshSpec::Equilateral { nx, ny, spacing } => nx >= 1 && ny >= 1 && spacing > 0.0 && spacing.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(ConfigError::invalid("mesh", format!("degenerate mesh {mesh:?}")))
    }
}
