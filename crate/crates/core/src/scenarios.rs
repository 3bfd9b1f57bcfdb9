//! Initial data, meshes and boundary conditions of the standard experiments.

use alloc::format;
use alloc::vec;

use crate::error::{Error, Result};
use crate::fespace::{averaged_interpolate, nodal_interpolate, Field};
use crate::math::{sqrt, tanh};
use crate::mesh::{BoundaryTag, Mesh, Point};
use crate::solver::{Algorithm, BoundarySpec, SolverConfig};

/// Smooth cation data: two bumps of heights 1 and 3 centred at `(-1/4, 0)`
/// and `(1/4, 0)` on a zero background.
pub fn smooth_p0([x, y]: Point) -> f64 {
    0.5 * tanh((1.0 - 10.0 * sqrt((x + 0.25) * (x + 0.25) + y * y)) / 0.1)
        + 1.5 * tanh((1.0 - 10.0 * sqrt((x - 0.25) * (x - 0.25) + y * y)) / 0.1)
        + 2.0
}

/// Smooth anion data: one bump of height 4 at the origin.
pub fn smooth_n0([x, y]: Point) -> f64 {
    2.0 * (tanh((1.0 - 10.0 * sqrt(x * x + y * y)) / 0.1) + 1.0)
}

/// Initial density as a function of position.
pub type DensityFn = fn(Point) -> f64;

pub fn wave_p0([_, y]: Point) -> f64 {
    tanh(10.0 * y - 6.2) + 1.0
}

pub fn wave_n0([_, y]: Point) -> f64 {
    -tanh(10.0 * y - 0.8) + 1.0
}

/// Cations in a layer of width 0.8 under the top wall.
pub fn layer_p0([_, y]: Point) -> f64 {
    tanh(10.0 * (y - 6.2)) + 1.0
}

/// Anions in a layer of width 0.8 over the bottom wall.
pub fn layer_n0([_, y]: Point) -> f64 {
    -tanh(10.0 * (y - 0.8)) + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Smooth,
    ChannelUniform,
    ChannelWave,
    ChannelSelective,
}

impl Builtin {
    pub const ALL: [Builtin; 4] =
        [Builtin::Smooth, Builtin::ChannelUniform, Builtin::ChannelWave, Builtin::ChannelSelective];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Smooth => "smooth",
            Builtin::ChannelUniform => "channel_uniform",
            Builtin::ChannelWave => "channel_wave",
            Builtin::ChannelSelective => "channel_selective",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown scenario '{name}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshSpec {
    /// `(-1/2, 1/2)^2` with `n` cells per side.
    Square { n: usize },
    /// Ion channel with square cells of side `cell`.
    Channel { cell: f64 },
    /// Equilateral triangles of side `spacing` centred at the origin.
    Equilateral { nx: usize, ny: usize, spacing: f64 },
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh> {
        match *self {
            MeshSpec::Square { n } => Mesh::unit_square(n, [0.0, 0.0]),
            MeshSpec::Channel { cell } => Mesh::channel(cell),
            MeshSpec::Equilateral { nx, ny, spacing } => Mesh::equilateral(nx, ny, spacing, [0.0, 0.0]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialData {
    Smooth,
    Uniform,
    Wave,
    Layer,
}

impl InitialData {
    pub fn name(self) -> &'static str {
        match self {
            InitialData::Smooth => "smooth",
            InitialData::Uniform => "uniform",
            InitialData::Wave => "wave",
            InitialData::Layer => "layer",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        [InitialData::Smooth, InitialData::Uniform, InitialData::Wave, InitialData::Layer]
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown initial data '{name}'")))
    }

    pub fn functions(self) -> (DensityFn, DensityFn) {
        fn one(_: Point) -> f64 {
            1.0
        }
        match self {
            InitialData::Smooth => (smooth_p0, smooth_n0),
            InitialData::Uniform => (one, one),
            InitialData::Wave => (wave_p0, wave_n0),
            InitialData::Layer => (layer_p0, layer_n0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Nodal,
    /// Element averages, which keep the initial extrema inside the range of
    /// the continuous data.
    Averaged,
}

impl Interpolation {
    pub fn name(self) -> &'static str {
        match self {
            Interpolation::Nodal => "nodal",
            Interpolation::Averaged => "averaged",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "nodal" => Ok(Interpolation::Nodal),
            "averaged" => Ok(Interpolation::Averaged),
            _ => Err(Error::invalid(format!("unknown interpolation '{name}'"))),
        }
    }
}

/// A complete problem description, independent of any output settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: &'static str,
    pub mesh: MeshSpec,
    pub initial: InitialData,
    pub interpolation: Interpolation,
    pub bc: BoundarySpec,
    pub config: SolverConfig,
}

/// Default cell size of the channel experiments.
pub const CHANNEL_CELL: f64 = 0.125;

impl ScenarioSpec {
    pub fn builtin(which: Builtin, algorithm: Algorithm) -> Self {
        let potential = |v: f64| vec![(BoundaryTag::Bottom, -v), (BoundaryTag::Top, v)];
        let channel_config = |t_final| SolverConfig { algorithm, k: 1e-2, t_final, ..SolverConfig::default() };
        let channel = MeshSpec::Channel { cell: CHANNEL_CELL };
        match which {
            Builtin::Smooth => ScenarioSpec {
                name: which.name(),
                mesh: MeshSpec::Square { n: 40 },
                initial: InitialData::Smooth,
                interpolation: Interpolation::Averaged,
                bc: BoundarySpec::neumann(),
                config: SolverConfig { algorithm, k: 1e-3, t_final: 0.5, ..SolverConfig::default() },
            },
            Builtin::ChannelUniform => ScenarioSpec {
                name: which.name(),
                mesh: channel,
                initial: InitialData::Uniform,
                interpolation: Interpolation::Nodal,
                bc: BoundarySpec { phi_dirichlet: potential(50.0), ..BoundarySpec::default() },
                config: channel_config(1.0),
            },
            Builtin::ChannelWave => ScenarioSpec {
                name: which.name(),
                mesh: channel,
                initial: InitialData::Wave,
                interpolation: Interpolation::Nodal,
                bc: BoundarySpec { phi_dirichlet: potential(50.0), ..BoundarySpec::default() },
                config: channel_config(1.0),
            },
            Builtin::ChannelSelective => ScenarioSpec {
                name: which.name(),
                mesh: channel,
                initial: InitialData::Layer,
                interpolation: Interpolation::Nodal,
                bc: BoundarySpec {
                    phi_dirichlet: potential(1.0),
                    p_dirichlet: vec![(BoundaryTag::Membrane, 1.0)],
                    n_dirichlet: vec![],
                },
                config: channel_config(10.0),
            },
        }
    }

    /// Interpolated initial densities on `mesh`.
    pub fn initial_fields(&self, mesh: &Mesh) -> Result<(Field, Field)> {
        let (p0, n0) = self.initial.functions();
        match self.interpolation {
            Interpolation::Nodal => Ok((nodal_interpolate(p0, mesh)?, nodal_interpolate(n0, mesh)?)),
            Interpolation::Averaged => Ok((averaged_interpolate(p0, mesh), averaged_interpolate(n0, mesh))),
        }
    }
}
