//! Symmetric-node stencils used by the gradient jump and mean of the shock
//! detector.
//!
//! For a node `a_i` and a neighbour `a_j`, the symmetric node `a_ij^sym` is
//! where the ray from `a_j` through `a_i` leaves the macroelement of `a_i`.
//! Its value is a convex combination of the two endpoint values of the
//! macroelement edge that the ray crosses.

use alloc::vec::Vec;

use super::{distance, Mesh, Point};
use crate::error::{Error, Result};

/// How a symmetric node was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymKind {
    /// The ray crosses an interior edge of the macroelement boundary.
    Interior,
    /// The ray crosses a macroelement edge lying on the domain boundary.
    DomainBoundary,
    /// `a_i` is on the domain boundary and the ray leaves the domain at once;
    /// the pair's own difference is used in place of the mirrored one.
    OneSided,
}

/// Symmetric-node data for the ordered pair `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEntry {
    pub j: usize,
    /// `|a_j - a_i|`.
    pub r_len: f64,
    /// `|a_ij^sym - a_i|`.
    pub sym_len: f64,
    pub point: Point,
    /// Endpoints of the crossed edge. For vertex hits and the one-sided
    /// fallback the first node carries the full weight.
    pub nodes: [usize; 2],
    pub weights: [f64; 2],
    pub kind: SymKind,
}

impl SymEntry {
    /// Value of a nodal field at the symmetric node.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.weights[0] * x[self.nodes[0]] + self.weights[1] * x[self.nodes[1]]
    }
}

/// Symmetric-node stencils of every node, one entry per neighbour `j != i`
/// in ascending `j` order.
#[derive(Clone, Debug)]
pub struct SymStencil {
    entries: Vec<Vec<SymEntry>>,
}

impl SymStencil {
    pub fn node(&self, i: usize) -> &[SymEntry] {
        &self.entries[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&SymEntry> {
        let row = &self.entries[i];
        row.binary_search_by_key(&j, |e| e.j).ok().map(|k| &row[k])
    }

    pub fn num_nodes(&self) -> usize {
        self.entries.len()
    }
}

const PARAM_TOL: f64 = 1e-10;

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Intersection of the ray `origin + t * dir` (`t > 0`) with segment `[b, c]`,
/// as `(t, s)` with the point at `b + s (c - b)`.
fn ray_segment(origin: Point, dir: Point, b: Point, c: Point) -> Option<(f64, f64)> {
    let e = [c[0] - b[0], c[1] - b[1]];
    let denom = cross(dir, e);
    let scale = libm::hypot(dir[0], dir[1]) * libm::hypot(e[0], e[1]);
    if denom.abs() <= 1e-14 * scale {
        return None;
    }
    let w = [b[0] - origin[0], b[1] - origin[1]];
    let t = cross(w, e) / denom;
    let s = cross(w, dir) / denom;
    if t > PARAM_TOL && (-PARAM_TOL..=1.0 + PARAM_TOL).contains(&s) {
        Some((t, s.clamp(0.0, 1.0)))
    } else {
        None
    }
}

pub fn build_sym_stencils(mesh: &Mesh) -> Result<SymStencil> {
    let mut entries = Vec::with_capacity(mesh.num_nodes());
    for i in 0..mesh.num_nodes() {
        let ai = mesh.node(i);
        let mut row = Vec::with_capacity(mesh.neighbors(i).len().saturating_sub(1));
        for &j in mesh.neighbors(i) {
            if j == i {
                continue;
            }
            let aj = mesh.node(j);
            let r_len = distance(&ai, &aj);
            let dir = [ai[0] - aj[0], ai[1] - aj[1]];

            let mut best: Option<(f64, f64, [usize; 2])> = None;
            for &e in mesh.node_elements(i) {
                let tri = mesh.elements()[e];
                let k = tri.iter().position(|&v| v == i).expect("element lists its node");
                let (b, c) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if let Some((t, s)) = ray_segment(ai, dir, mesh.node(b), mesh.node(c)) {
                    if best.is_none_or(|(tb, _, _)| t < tb) {
                        best = Some((t, s, [b, c]));
                    }
                }
            }

            let entry = match best {
                Some((t, s, [b, c])) => {
                    let kind = if mesh.is_boundary_edge(b, c) { SymKind::DomainBoundary } else { SymKind::Interior };
                    let point = [ai[0] + t * dir[0], ai[1] + t * dir[1]];
                    let (nodes, weights) = if s <= PARAM_TOL {
                        ([b, b], [1.0, 0.0])
                    } else if s >= 1.0 - PARAM_TOL {
                        ([c, c], [1.0, 0.0])
                    } else {
                        ([b, c], [1.0 - s, s])
                    };
                    SymEntry { j, r_len, sym_len: t * r_len, point, nodes, weights, kind }
                }
                None if mesh.is_boundary(i) => SymEntry {
                    j,
                    r_len,
                    sym_len: r_len,
                    point: aj,
                    nodes: [j, j],
                    weights: [1.0, 0.0],
                    kind: SymKind::OneSided,
                },
                None => return Err(Error::Stencil { i, j }),
            };
            row.push(entry);
        }
        entries.push(row);
    }
    Ok(SymStencil { entries })
}
