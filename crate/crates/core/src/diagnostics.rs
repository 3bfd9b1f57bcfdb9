//! Per-step physical quantities and invariant checks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DiagonalMatrix};
use crate::stabilizer::EntropyFns;

/// Entries more negative than this make the entropy undefined instead of
/// being clamped to zero.
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-12;

/// `(x, 1)_h`.
pub fn mass(x: &[f64], lumped: &DiagonalMatrix) -> f64 {
    lumped.diag().iter().zip(x).map(|(d, v)| d * v).sum()
}

/// `1/2 |grad phi|^2`.
pub fn electrostatic_energy(phi: &[f64], stiffness: &CsrMatrix) -> f64 {
    0.5 * stiffness.bilinear(phi, phi)
}

/// `(g0(p), 1)_h + (g0(n), 1)_h + 1/2 |grad phi|^2`.
pub fn entropy(p: &[f64], n: &[f64], phi: &[f64], lumped: &DiagonalMatrix, stiffness: &CsrMatrix) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &d) in lumped.diag().iter().enumerate() {
        sum += d * (g0_clamped(p[i])? + g0_clamped(n[i])?);
    }
    Ok(sum + electrostatic_energy(phi, stiffness))
}

fn g0_clamped(s: f64) -> Result<f64> {
    if s < -NEGATIVE_DENSITY_TOL || s.is_nan() {
        return Err(Error::Domain { what: "entropy density", value: s });
    }
    EntropyFns::g0(s.max(0.0))
}

/// Discrete dissipation of one species, written edge by edge as
/// `-(sqrt(s) d_rho + d_phi / sqrt(s))^2 K_ij` with `s` the secant slope of
/// `g_eps'`, and `-max(rho_i, eps) d_phi^2 K_ij` on edges where `rho` is flat.
/// For anions pass `-phi`.
pub fn dissipation(rho: &[f64], phi: &[f64], fns: &EntropyFns, stiffness: &CsrMatrix) -> f64 {
    let mut sum = 0.0;
    for (i, j) in stiffness.pattern().edges() {
        let kij = stiffness.get(i, j);
        if kij == 0.0 {
            continue;
        }
        let dphi = phi[j] - phi[i];
        let drho = rho[j] - rho[i];
        let tau = fns.tau(rho[i], rho[j]);
        let term = if drho == 0.0 {
            tau * dphi * dphi
        } else {
            // (s d_rho + d_phi)^2 / s with s = 1 / tau.
            let v = drho / tau + dphi;
            tau * v * v
        };
        sum -= term * kij;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: usize,
    pub max: f64,
    pub argmax: usize,
}

/// Exact scan; ties go to the lowest index. Panics on an empty slice.
pub fn extrema(x: &[f64]) -> Extrema {
    assert!(!x.is_empty(), "extrema of an empty field");
    let mut e = Extrema { min: x[0], argmin: 0, max: x[0], argmax: 0 };
    for (i, &v) in x.iter().enumerate().skip(1) {
        if v < e.min {
            e.min = v;
            e.argmin = i;
        }
        if v > e.max {
            e.max = v;
            e.argmax = i;
        }
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub dmp_ok: bool,
    pub mass_ok: bool,
    pub entropy_ok: bool,
    pub smallness_ok: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags { dmp_ok: true, mass_ok: true, entropy_ok: true, smallness_ok: true }
    }
}

impl Flags {
    pub fn all(&self) -> bool {
        self.dmp_ok && self.mass_ok && self.entropy_ok && self.smallness_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub t: f64,
    pub mass_p: f64,
    pub mass_n: f64,
    pub energy_es: f64,
    pub entropy: f64,
    pub dissipation: f64,
    pub max_p: f64,
    pub min_p: f64,
    pub max_n: f64,
    pub min_n: f64,
    pub picard_iters: usize,
    pub flags: Flags,
}

/// Which invariants hold for a run, and with what reference values.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPolicy {
    /// Initial extrema `(min, max)` over both species, when the maximum
    /// principle applies.
    pub dmp_bounds: Option<(f64, f64)>,
    pub dmp_tol: f64,
    /// Initial masses `(p, n)`, when no density is prescribed on the boundary.
    pub mass_reference: Option<(f64, f64)>,
    pub mass_tol: f64,
    pub entropy_monotone: bool,
    pub entropy_tol: f64,
    /// Whether the time-step restriction of the first scheme is in force.
    pub smallness: bool,
}

impl InvariantPolicy {
    pub fn none() -> Self {
        InvariantPolicy {
            dmp_bounds: None,
            dmp_tol: 1e-10,
            mass_reference: None,
            mass_tol: 1e-10,
            entropy_monotone: false,
            entropy_tol: 1e-8,
            smallness: false,
        }
    }
}

/// `1 - k (max0 - min0)`, positive when the time-step restriction holds.
pub fn smallness_margin(k: f64, min0: f64, max0: f64) -> f64 {
    1.0 - k * (max0 - min0)
}

/// Evaluates the flags of `current` given the preceding and initial reports.
pub fn evaluate_flags(
    current: &StepReport,
    previous: Option<&StepReport>,
    initial: &StepReport,
    policy: &InvariantPolicy,
    k: f64,
) -> Flags {
    let mut flags = Flags::default();
    if let Some((lo, hi)) = policy.dmp_bounds {
        let tol = policy.dmp_tol;
        flags.dmp_ok = current.min_p >= lo - tol
            && current.min_n >= lo - tol
            && current.max_p <= hi + tol
            && current.max_n <= hi + tol;
    }
    if let Some((mp, mn)) = policy.mass_reference {
        flags.mass_ok = relative_drift(current.mass_p, mp) <= policy.mass_tol
            && relative_drift(current.mass_n, mn) <= policy.mass_tol;
    }
    if policy.entropy_monotone {
        let tol = policy.entropy_tol;
        let step_ok = previous.is_none_or(|prev| current.entropy <= prev.entropy + tol);
        flags.entropy_ok = step_ok && current.entropy <= initial.entropy + tol;
    }
    if policy.smallness {
        let lo = initial.min_p.min(initial.min_n);
        let hi = initial.max_p.max(initial.max_n);
        flags.smallness_ok = smallness_margin(k, lo, hi) > 0.0;
    }
    flags
}

/// Recomputes the flags of a sequence of reports, e.g. rows read back from
/// disk. The first row is the initial state.
pub fn recompute_flags(rows: &[StepReport], policy: &InvariantPolicy, k: f64) -> Vec<Flags> {
    let Some(initial) = rows.first() else {
        return Vec::new();
    };
    rows.iter()
        .enumerate()
        .map(|(m, row)| evaluate_flags(row, m.checked_sub(1).map(|p| &rows[p]), initial, policy, k))
        .collect()
}

fn relative_drift(value: f64, reference: f64) -> f64 {
    let scale = reference.abs().max(f64::MIN_POSITIVE);
    (value - reference).abs() / scale
}
