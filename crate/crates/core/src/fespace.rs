//! Continuous piecewise-linear finite elements on a [`Mesh`].

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature;
use crate::sparse::{CsrMatrix, DiagonalMatrix, Pattern};

/// Nodal values of a member of the P1 space, one per mesh node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Field(vec![value; n])
    }

    pub fn zeros(n: usize) -> Self {
        Field::constant(n, 0.0)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.0.iter().position(|v| !v.is_finite())
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}

/// Area and constant barycentric gradients of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(p: [Point; 3]) -> Self {
        let area = crate::mesh::signed_area(&p[0], &p[1], &p[2]);
        let s = 1.0 / (2.0 * area);
        let grads = [
            [(p[1][1] - p[2][1]) * s, (p[2][0] - p[1][0]) * s],
            [(p[2][1] - p[0][1]) * s, (p[0][0] - p[2][0]) * s],
            [(p[0][1] - p[1][1]) * s, (p[1][0] - p[0][0]) * s],
        ];
        ElementGeometry { area, grads }
    }

    /// Gradient of the P1 function with vertex values `v`.
    #[inline]
    pub fn gradient(&self, v: [f64; 3]) -> [f64; 2] {
        let g = &self.grads;
        [v[0] * g[0][0] + v[1] * g[1][0] + v[2] * g[2][0], v[0] * g[0][1] + v[1] * g[1][1] + v[2] * g[2][1]]
    }
}

/// Assembly context: mesh, element geometry and the shared sparsity pattern.
#[derive(Clone, Debug)]
pub struct FeSpace<'m> {
    mesh: &'m Mesh,
    geometry: Vec<ElementGeometry>,
    pattern: Arc<Pattern>,
}

impl<'m> FeSpace<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let geometry = mesh
            .elements()
            .iter()
            .map(|t| ElementGeometry::new([mesh.node(t[0]), mesh.node(t[1]), mesh.node(t[2])]))
            .collect();
        FeSpace { mesh, geometry, pattern: Arc::new(Pattern::from_mesh(mesh)) }
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn geometry(&self) -> &[ElementGeometry] {
        &self.geometry
    }

    pub fn zeros(&self) -> CsrMatrix {
        CsrMatrix::zeros(self.pattern.clone())
    }

    fn assemble(&self, local: impl Fn(usize, &ElementGeometry) -> [[f64; 3]; 3]) -> CsrMatrix {
        let mut a = self.zeros();
        for (e, tri) in self.mesh.elements().iter().enumerate() {
            let loc = local(e, &self.geometry[e]);
            for (r, &i) in tri.iter().enumerate() {
                for (c, &j) in tri.iter().enumerate() {
                    a.add(i, j, loc[r][c]);
                }
            }
        }
        a
    }

    /// Consistent mass matrix `M_ij = (phi_j, phi_i)`.
    pub fn mass(&self) -> CsrMatrix {
        self.assemble(|_, g| {
            let d = g.area / 6.0;
            let o = g.area / 12.0;
            [[d, o, o], [o, d, o], [o, o, d]]
        })
    }

    /// Lumped mass `D_ii = (phi_i, 1)`.
    pub fn lumped_mass(&self) -> DiagonalMatrix {
        let mut d = vec![0.0; self.mesh.num_nodes()];
        for (tri, g) in self.mesh.elements().iter().zip(&self.geometry) {
            for &i in tri {
                d[i] += g.area / 3.0;
            }
        }
        DiagonalMatrix(d)
    }

    /// Stiffness matrix `K_ij = (grad phi_j, grad phi_i)`.
    pub fn stiffness(&self) -> CsrMatrix {
        self.assemble(|_, g| {
            let mut k = [[0.0; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    k[r][c] = g.area * (g.grads[r][0] * g.grads[c][0] + g.grads[r][1] * g.grads[c][1]);
                }
            }
            k
        })
    }

    /// Drift matrix `G_ij = (phi_j grad phi_h, grad phi_i)`; exact because
    /// `grad phi_h` is elementwise constant and `phi_j` integrates to `|E|/3`.
    pub fn drift(&self, phi: &[f64]) -> CsrMatrix {
        let tris = self.mesh.elements();
        self.assemble(|e, g| {
            let t = tris[e];
            let gp = g.gradient([phi[t[0]], phi[t[1]], phi[t[2]]]);
            let mut loc = [[0.0; 3]; 3];
            for r in 0..3 {
                let v = g.area / 3.0 * (gp[0] * g.grads[r][0] + gp[1] * g.grads[r][1]);
                loc[r] = [v, v, v];
            }
            loc
        })
    }

    /// `(grad x, grad y)` for two P1 fields.
    pub fn grad_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mesh
            .elements()
            .iter()
            .zip(&self.geometry)
            .map(|(t, g)| {
                let gx = g.gradient([x[t[0]], x[t[1]], x[t[2]]]);
                let gy = g.gradient([y[t[0]], y[t[1]], y[t[2]]]);
                g.area * (gx[0] * gy[0] + gx[1] * gy[1])
            })
            .sum()
    }
}

pub fn assemble_mass(mesh: &Mesh) -> CsrMatrix {
    FeSpace::new(mesh).mass()
}

pub fn assemble_lumped_mass(mesh: &Mesh) -> DiagonalMatrix {
    FeSpace::new(mesh).lumped_mass()
}

pub fn assemble_stiffness(mesh: &Mesh) -> CsrMatrix {
    FeSpace::new(mesh).stiffness()
}

pub fn assemble_drift(mesh: &Mesh, phi: &[f64]) -> CsrMatrix {
    FeSpace::new(mesh).drift(phi)
}

/// Nodal interpolant `i_h f`.
pub fn nodal_interpolate(f: impl Fn(Point) -> f64, mesh: &Mesh) -> Result<Field> {
    let values: Vec<f64> = mesh.nodes().iter().map(|&x| f(x)).collect();
    if let Some(node) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { node, value: values[node] });
    }
    Ok(Field(values))
}

/// Element chosen for the averaged interpolant at node `i`: the adjacent
/// element with the smallest index.
pub fn averaging_element(mesh: &Mesh, i: usize) -> usize {
    mesh.node_elements(i)[0]
}

/// Averaged interpolant: the value at node `i` is the mean of `f` over the
/// element [`averaging_element`], computed with the positive-weight
/// seven-point rule so it stays within the range of `f`.
pub fn averaged_interpolate(f: impl Fn(Point) -> f64, mesh: &Mesh) -> Field {
    let values = (0..mesh.num_nodes())
        .map(|i| {
            let t = mesh.elements()[averaging_element(mesh, i)];
            quadrature::integrate(mesh.node(t[0]), mesh.node(t[1]), mesh.node(t[2]), 1.0, &f)
        })
        .collect();
    Field(values)
}
