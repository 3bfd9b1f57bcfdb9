//! Time marching of the two stabilized schemes.
//!
//! Each backward-Euler step is solved by Picard iteration: the density
//! equations are linear in the new iterate once the detector, stabilizer and
//! potential are frozen at the previous one, and the potential then follows
//! from a Poisson solve. Each Picard update is damped by a backtracking line
//! search on the max-norm residual.

mod linesearch;
mod picard;
mod poisson;
mod run;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fespace::Field;
use crate::linsolve::LinearSolverKind;
use crate::mesh::{BoundaryTag, Mesh};

pub use linesearch::{backtracking_search, LineSearchOutcome};
pub use picard::{Discretization, PicardOutcome};
pub use poisson::PoissonSolver;
pub use run::{num_steps, RunSummary, Simulation};

/// Regularization used when the initial densities touch zero.
pub const EPSILON_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Consistent mass, Galerkin drift, stabilizer `B1`.
    Alg1,
    /// Lumped mass, star drift, stabilizer `B2`.
    Alg2,
}

impl Algorithm {
    pub fn number(self) -> u8 {
        match self {
            Algorithm::Alg1 => 1,
            Algorithm::Alg2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Algorithm::Alg1),
            2 => Ok(Algorithm::Alg2),
            _ => Err(Error::invalid(format!("algorithm must be 1 or 2, got {n}"))),
        }
    }
}

/// How the star transport term of the second scheme enters each Picard
/// iteration. All choices share the same fixed point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StarLinearization {
    /// Fully frozen at the previous iterate, as an explicit load.
    Lagged,
    /// Slopes frozen, transported density taken at the new iterate.
    Implicit,
    /// `Lagged`, retrying a step with `Implicit` when Picard fails.
    #[default]
    Adaptive,
}

impl StarLinearization {
    pub fn name(self) -> &'static str {
        match self {
            StarLinearization::Lagged => "lagged",
            StarLinearization::Implicit => "implicit",
            StarLinearization::Adaptive => "adaptive",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "lagged" => Ok(StarLinearization::Lagged),
            "implicit" => Ok(StarLinearization::Implicit),
            "adaptive" => Ok(StarLinearization::Adaptive),
            _ => Err(Error::invalid(format!("unknown star linearization '{name}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Time step.
    pub k: f64,
    /// Final time.
    pub t_final: f64,
    /// Detector exponent.
    pub q: f64,
    pub picard_residual_tol: f64,
    pub picard_increment_tol: f64,
    pub picard_max_iters: usize,
    pub linear_tol: f64,
    pub linear_solver: LinearSolverKind,
    pub star_linearization: StarLinearization,
    pub shrink: f64,
    pub max_halvings: usize,
    /// Entropy regularization; chosen from the initial data when `None`.
    pub epsilon: Option<f64>,
    /// Allowed `|(p - n, 1)_h| / |Omega|` when the potential is pure Neumann.
    pub neutrality_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Alg1,
            k: 1e-3,
            t_final: 0.5,
            q: 2.0,
            picard_residual_tol: 1e-6,
            picard_increment_tol: 1e-16,
            picard_max_iters: 100,
            linear_tol: 1e-12,
            linear_solver: LinearSolverKind::BandedLu,
            star_linearization: StarLinearization::Adaptive,
            shrink: 0.5,
            max_halvings: 30,
            epsilon: None,
            neutrality_tol: 1e-2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k", self.k),
            ("q", self.q),
            ("picard_residual_tol", self.picard_residual_tol),
            ("picard_increment_tol", self.picard_increment_tol),
            ("linear_tol", self.linear_tol),
            ("neutrality_tol", self.neutrality_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!("T must be nonnegative, got {}", self.t_final)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid(format!("shrink must lie in (0, 1), got {}", self.shrink)));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::invalid("picard_max_iters must be at least 1"));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::invalid(format!("epsilon must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

/// Dirichlet data by boundary tag. Everything else is homogeneous Neumann.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundarySpec {
    pub phi_dirichlet: Vec<(BoundaryTag, f64)>,
    pub p_dirichlet: Vec<(BoundaryTag, f64)>,
    pub n_dirichlet: Vec<(BoundaryTag, f64)>,
}

impl BoundarySpec {
    pub fn neumann() -> Self {
        BoundarySpec::default()
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        for (field, list) in [("phi", &self.phi_dirichlet), ("p", &self.p_dirichlet), ("n", &self.n_dirichlet)] {
            for &(tag, v) in list {
                if tag == BoundaryTag::Interior {
                    return Err(Error::invalid(format!("{field}: Dirichlet data on interior nodes")));
                }
                if !mesh.has_tag(tag) {
                    return Err(Error::invalid(format!("{field}: tag '{}' does not occur on the mesh", tag.name())));
                }
                if !v.is_finite() {
                    return Err(Error::invalid(format!("{field}: non-finite value on '{}'", tag.name())));
                }
            }
        }
        Ok(())
    }

    /// No Dirichlet data for any unknown.
    pub fn is_pure_neumann(&self) -> bool {
        self.phi_dirichlet.is_empty() && self.p_dirichlet.is_empty() && self.n_dirichlet.is_empty()
    }

    pub fn has_density_dirichlet(&self) -> bool {
        !self.p_dirichlet.is_empty() || !self.n_dirichlet.is_empty()
    }
}

/// `(node, value)` pairs for the nodes carrying one of the listed tags.
pub fn dirichlet_nodes(mesh: &Mesh, list: &[(BoundaryTag, f64)]) -> Vec<(usize, f64)> {
    (0..mesh.num_nodes())
        .filter_map(|i| list.iter().find(|(tag, _)| *tag == mesh.tag(i)).map(|&(_, v)| (i, v)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub p: Field,
    pub n: Field,
    pub phi: Field,
    pub t: f64,
}

/// `1/2 min(min p0, min n0)` when the maximum principle keeps the densities
/// above their initial minimum, i.e. without any Dirichlet data; otherwise,
/// or when that value is not positive, [`EPSILON_FLOOR`].
pub fn default_epsilon(p0: &[f64], n0: &[f64], bc: &BoundarySpec) -> f64 {
    if !bc.is_pure_neumann() {
        return EPSILON_FLOOR;
    }
    let min = p0.iter().chain(n0).fold(f64::INFINITY, |m, &v| m.min(v));
    let e = 0.5 * min;
    if e > EPSILON_FLOOR && e.is_finite() {
        e
    } else {
        EPSILON_FLOOR
    }
}
