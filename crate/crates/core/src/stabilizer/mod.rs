//! Nonlinear graph-Laplacian stabilization, the entropy density and the
//! edge-based transport form used by the second scheme.

mod entropy;

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::detector::AlphaVector;
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, Pattern};

pub use entropy::EntropyFns;

/// Which species a stabilizer is built for: `+` for cations, `-` for anions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Charge {
    Positive,
    Negative,
}

impl Charge {
    pub fn sign(self) -> f64 {
        match self {
            Charge::Positive => 1.0,
            Charge::Negative => -1.0,
        }
    }
}

/// Symmetric graph Laplacian with nonnegative edge weights.
#[derive(Clone, Debug)]
pub struct StabMatrix {
    matrix: CsrMatrix,
    beta: Vec<(usize, usize, f64)>,
}

impl StabMatrix {
    /// Builds the Laplacian from weights on the edges `i < j` of `pattern`.
    pub fn from_weights(pattern: &Arc<Pattern>, mut weight: impl FnMut(usize, usize) -> f64) -> Self {
        let mut matrix = CsrMatrix::zeros(pattern.clone());
        let mut beta = Vec::new();
        for (i, j) in pattern.edges() {
            let b = weight(i, j);
            debug_assert!(b >= 0.0);
            if b > 0.0 {
                matrix.add(i, j, -b);
                matrix.add(j, i, -b);
                matrix.add(i, i, b);
                matrix.add(j, j, b);
                beta.push((i, j, b));
            }
        }
        StabMatrix { matrix, beta }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CsrMatrix {
        self.matrix
    }

    /// Active edges `(i, j, beta_ij)` with `i < j` and `beta_ij > 0`.
    pub fn beta(&self) -> &[(usize, usize, f64)] {
        &self.beta
    }

    pub fn beta_at(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.beta.iter().find(|&&(p, q, _)| p == a && q == b).map_or(0.0, |e| e.2)
    }

    /// `sum_{i<j} beta_ij (x_j - x_i)^2`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.beta.iter().map(|&(i, j, b)| b * (x[j] - x[i]) * (x[j] - x[i])).sum()
    }
}

/// Off-diagonal coefficients `(f+_ij, f-_ij)` of the first scheme.
pub fn f1(
    i: usize,
    j: usize,
    k: f64,
    mass: &CsrMatrix,
    stiffness: &CsrMatrix,
    drift: &CsrMatrix,
) -> Result<(f64, f64)> {
    check_step(k)?;
    let base = mass.get(i, j) / k + stiffness.get(i, j);
    let g = drift.get(i, j);
    Ok((base + g, base - g))
}

/// Stabilizer of the first scheme. `drift` is assembled from the current
/// potential and `alpha` from the transported density.
pub fn build_b1(
    charge: Charge,
    alpha: &AlphaVector,
    k: f64,
    mass: &CsrMatrix,
    stiffness: &CsrMatrix,
    drift: &CsrMatrix,
) -> Result<StabMatrix> {
    check_step(k)?;
    let s = charge.sign();
    let f = |i: usize, j: usize| mass.get(i, j) / k + stiffness.get(i, j) + s * drift.get(i, j);
    Ok(StabMatrix::from_weights(stiffness.pattern(), |i, j| beta(alpha[i] * f(i, j), alpha[j] * f(j, i))))
}

/// Secant slope `tau_ji(x)` of the regularized entropy derivative.
pub fn tau(i: usize, j: usize, x: &[f64], fns: &EntropyFns) -> f64 {
    fns.tau(x[i], x[j])
}

/// Edge form `(x grad phi, grad xbar)_*`, equal to `(grad x, grad phi)` when
/// `xbar` interpolates `g_eps'(x)`.
pub fn star_transport(x: &[f64], phi: &[f64], xbar: &[f64], fns: &EntropyFns, stiffness: &CsrMatrix) -> f64 {
    let mut sum = 0.0;
    for (i, j) in stiffness.pattern().edges() {
        let kij = stiffness.get(i, j);
        if kij == 0.0 {
            continue;
        }
        sum -= fns.tau(x[i], x[j]) * (phi[j] - phi[i]) * (xbar[j] - xbar[i]) * kij;
    }
    sum
}

/// Vector `b` with `b . xbar = star_transport(x, phi, xbar)` for every `xbar`.
pub fn star_load(x: &[f64], phi: &[f64], fns: &EntropyFns, stiffness: &CsrMatrix) -> Vec<f64> {
    let mut b = alloc::vec![0.0; x.len()];
    for (i, j) in stiffness.pattern().edges() {
        let kij = stiffness.get(i, j);
        if kij == 0.0 {
            continue;
        }
        let flux = fns.tau(x[i], x[j]) * (phi[j] - phi[i]) * kij;
        b[i] += flux;
        b[j] -= flux;
    }
    b
}

/// Splits [`star_load`] into a matrix `T` and a remainder `e` with
/// `T x + e = star_load(x, phi)`. On edges where both values exceed epsilon
/// the slope is written as `tau / (x_i + x_j) * (x_i + x_j)`, so `T` carries
/// the transported density; other edges go to `e`. The columns of `T` sum
/// to zero.
pub fn star_split(x: &[f64], phi: &[f64], fns: &EntropyFns, stiffness: &CsrMatrix) -> (CsrMatrix, Vec<f64>) {
    let mut t = CsrMatrix::zeros(stiffness.pattern().clone());
    let mut e = alloc::vec![0.0; x.len()];
    for (i, j) in stiffness.pattern().edges() {
        let kij = stiffness.get(i, j);
        if kij == 0.0 {
            continue;
        }
        let flux = fns.tau(x[i], x[j]) * (phi[j] - phi[i]) * kij;
        if x[i] > fns.epsilon() && x[j] > fns.epsilon() {
            let w = flux / (x[i] + x[j]);
            t.add(i, i, w);
            t.add(i, j, w);
            t.add(j, i, -w);
            t.add(j, j, -w);
        } else {
            e[i] += flux;
            e[j] -= flux;
        }
    }
    (t, e)
}

/// Off-diagonal coefficients `(f+_ij, f-_ij)` of the second scheme.
pub fn f2(i: usize, j: usize, x: &[f64], phi: &[f64], fns: &EntropyFns, stiffness: &CsrMatrix) -> (f64, f64) {
    if x[j] == x[i] {
        return (0.0, 0.0);
    }
    let kij = stiffness.get(i, j);
    let t = (phi[j] - phi[i]) * fns.secant_bracket(x[i], x[j]);
    ((1.0 + t) * kij, (1.0 - t) * kij)
}

/// Stabilizer of the second scheme.
pub fn build_b2(
    charge: Charge,
    x: &[f64],
    phi: &[f64],
    alpha: &AlphaVector,
    fns: &EntropyFns,
    stiffness: &CsrMatrix,
) -> StabMatrix {
    let s = charge.sign();
    let f = |i: usize, j: usize| {
        if x[j] == x[i] {
            return 0.0;
        }
        (1.0 + s * (phi[j] - phi[i]) * fns.secant_bracket(x[i], x[j])) * stiffness.get(i, j)
    };
    StabMatrix::from_weights(stiffness.pattern(), |i, j| beta(alpha[i] * f(i, j), alpha[j] * f(j, i)))
}

fn beta(a: f64, b: f64) -> f64 {
    a.max(b).max(0.0)
}

fn check_step(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!("time step must be positive, got {k}")))
    }
}
