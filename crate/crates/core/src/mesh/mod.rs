//! Two-dimensional triangular meshes.
//!
//! A [`Mesh`] stores nodes, counterclockwise elements, the macroelement
//! adjacency of every node (the index set of the support of its hat
//! function, including the node itself) and a boundary classification.
//! Structured builders cover the unit square, the ion-channel outline and an
//! equilateral (strictly acute) triangulation.

mod acute;
mod build;
mod stencil;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

pub use acute::{check_acuteness, AcutenessReport};
pub use stencil::{build_sym_stencils, SymEntry, SymKind, SymStencil};

pub type Point = [f64; 2];

/// Classification of a mesh node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryTag {
    Interior,
    /// `y = 0` wall of the channel.
    Bottom,
    /// `y = 7` wall of the channel.
    Top,
    /// Vertical channel walls `x = ±1`, `1.5 <= y <= 5.5`.
    Membrane,
    OtherBoundary,
}

impl BoundaryTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Interior => "interior",
            BoundaryTag::Bottom => "bottom",
            BoundaryTag::Top => "top",
            BoundaryTag::Membrane => "membrane",
            BoundaryTag::OtherBoundary => "other_boundary",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "interior" => BoundaryTag::Interior,
            "bottom" => BoundaryTag::Bottom,
            "top" => BoundaryTag::Top,
            "membrane" => BoundaryTag::Membrane,
            "other_boundary" => BoundaryTag::OtherBoundary,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    nodes: Vec<Point>,
    elements: Vec<[usize; 3]>,
    node_neighbors: Vec<Vec<usize>>,
    node_elements: Vec<Vec<usize>>,
    boundary_tags: Vec<BoundaryTag>,
    boundary_edges: Vec<[usize; 2]>,
    h: f64,
}

impl Mesh {
    /// Builds a mesh from raw parts. Every boundary node is tagged
    /// [`BoundaryTag::OtherBoundary`]; use [`Mesh::retag`] to refine that.
    pub fn new(nodes: Vec<Point>, elements: Vec<[usize; 3]>) -> Result<Self> {
        if nodes.len() < 3 || elements.is_empty() {
            return Err(Error::invalid("a mesh needs at least one triangle"));
        }
        let n = nodes.len();
        let mut node_elements = vec![Vec::new(); n];
        let mut edge_count: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let mut h: f64 = 0.0;
        for (e, tri) in elements.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::invalid(alloc::format!("element {e} references a missing node")));
            }
            let area = signed_area(&nodes[tri[0]], &nodes[tri[1]], &nodes[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::invalid(alloc::format!("element {e} has non-positive signed area {area}")));
            }
            for a in 0..3 {
                node_elements[tri[a]].push(e);
                let (u, v) = (tri[a], tri[(a + 1) % 3]);
                *edge_count.entry([u.min(v), u.max(v)]).or_default() += 1;
                h = h.max(distance(&nodes[u], &nodes[v]));
            }
        }
        let mut node_neighbors = vec![Vec::new(); n];
        for (i, elems) in node_elements.iter().enumerate() {
            if elems.is_empty() {
                return Err(Error::invalid(alloc::format!("node {i} belongs to no element")));
            }
            let nb = &mut node_neighbors[i];
            for &e in elems {
                nb.extend_from_slice(&elements[e]);
            }
            nb.sort_unstable();
            nb.dedup();
        }
        let mut boundary_tags = vec![BoundaryTag::Interior; n];
        let mut boundary_edges = Vec::new();
        for (edge, count) in edge_count {
            match count {
                1 => {
                    boundary_edges.push(edge);
                    boundary_tags[edge[0]] = BoundaryTag::OtherBoundary;
                    boundary_tags[edge[1]] = BoundaryTag::OtherBoundary;
                }
                2 => {}
                _ => return Err(Error::invalid(alloc::format!("edge {edge:?} is shared by {count} elements"))),
            }
        }
        Ok(Mesh { nodes, elements, node_neighbors, node_elements, boundary_tags, boundary_edges, h })
    }

    /// Reassigns the tag of every boundary node. Interior nodes are untouched.
    pub fn retag(&mut self, mut tagger: impl FnMut(usize, Point) -> BoundaryTag) {
        for i in 0..self.nodes.len() {
            if self.boundary_tags[i] != BoundaryTag::Interior {
                let tag = tagger(i, self.nodes[i]);
                debug_assert!(tag != BoundaryTag::Interior);
                self.boundary_tags[i] = tag;
            }
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    /// Sorted indices of the macroelement of node `i`, including `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.node_neighbors[i]
    }

    /// Indices of the elements containing node `i`, ascending.
    pub fn node_elements(&self, i: usize) -> &[usize] {
        &self.node_elements[i]
    }

    pub fn tag(&self, i: usize) -> BoundaryTag {
        self.boundary_tags[i]
    }

    pub fn tags(&self) -> &[BoundaryTag] {
        &self.boundary_tags
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary_tags[i] != BoundaryTag::Interior
    }

    /// Edges that belong to exactly one element, as sorted node pairs.
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn is_boundary_edge(&self, a: usize, b: usize) -> bool {
        self.boundary_edges.binary_search(&[a.min(b), a.max(b)]).is_ok()
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let t = self.elements[e];
        signed_area(&self.nodes[t[0]], &self.nodes[t[1]], &self.nodes[t[2]])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_tags.contains(&tag)
    }

    /// Largest `|i - j|` over adjacent node pairs.
    pub fn bandwidth(&self) -> usize {
        self.node_neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| nb.iter().map(|&j| i.abs_diff(j)).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Barycentric coordinates of `x` with respect to element `e`.
    pub fn barycentric(&self, e: usize, x: Point) -> [f64; 3] {
        let t = self.elements[e];
        let (a, b, c) = (self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]);
        let area = signed_area(&a, &b, &c);
        let l0 = signed_area(&x, &b, &c) / area;
        let l1 = signed_area(&a, &x, &c) / area;
        [l0, l1, 1.0 - l0 - l1]
    }
}

pub(crate) fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn distance(a: &Point, b: &Point) -> f64 {
    math::hypot(b[0] - a[0], b[1] - a[1])
}
