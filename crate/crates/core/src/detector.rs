//! Shock detector.
//!
//! `alpha_i` compares the sum of directional gradient jumps at node `i` with
//! the sum of their magnitudes. It is one at discrete extrema, where every
//! jump has the same sign, and close to zero where the field is locally
//! linear.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::math;
use crate::mesh::{Mesh, SymEntry, SymStencil};

const DENOMINATOR_TOL: f64 = 1e-14;

/// Detector values in `[0, 1]`, one per node.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaVector {
    pub alpha: Vec<f64>,
    pub q: f64,
}

impl Deref for AlphaVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.alpha
    }
}

impl AlphaVector {
    pub fn zeros(n: usize, q: f64) -> Self {
        AlphaVector { alpha: alloc::vec![0.0; n], q }
    }
}

/// Directional gradient jump at node `i` along the pair described by `entry`.
#[inline]
pub fn jump(i: usize, entry: &SymEntry, x: &[f64]) -> f64 {
    (x[entry.j] - x[i]) / entry.r_len + (entry.eval(x) - x[i]) / entry.sym_len
}

/// Mean directional derivative magnitude at node `i` along `entry`.
#[inline]
pub fn mean(i: usize, entry: &SymEntry, x: &[f64]) -> f64 {
    0.5 * ((x[entry.j] - x[i]).abs() / entry.r_len + (entry.eval(x) - x[i]).abs() / entry.sym_len)
}

/// Detector value of a single node.
pub fn alpha_at(i: usize, x: &[f64], q: f64, stencil: &SymStencil) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for e in stencil.node(i) {
        let d1 = (x[e.j] - x[i]) / e.r_len;
        let d2 = (e.eval(x) - x[i]) / e.sym_len;
        num += d1 + d2;
        den += d1.abs() + d2.abs();
    }
    if den <= DENOMINATOR_TOL {
        return 0.0;
    }
    let ratio = (num.abs() / den).clamp(0.0, 1.0);
    if ratio == 1.0 {
        1.0
    } else {
        math::powf(ratio, q)
    }
}

pub fn compute_alpha(x: &[f64], q: f64, mesh: &Mesh, stencil: &SymStencil) -> AlphaVector {
    debug_assert_eq!(x.len(), mesh.num_nodes());
    let alpha = (0..mesh.num_nodes()).map(|i| alpha_at(i, x, q, stencil)).collect();
    AlphaVector { alpha, q }
}
