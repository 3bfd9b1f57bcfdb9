use alloc::vec;
use alloc::vec::Vec;

use super::linesearch::backtracking_search;
use super::poisson::PoissonSolver;
use super::{dirichlet_nodes, Algorithm, BoundarySpec, SolverConfig, StarLinearization, State};
use crate::detector::compute_alpha;
use crate::error::{Error, Result};
use crate::fespace::{FeSpace, Field};
use crate::linsolve::{bicgstab, lu_solve, LinearSolverKind};
use crate::mesh::{build_sym_stencils, Mesh, SymStencil};
use crate::sparse::{max_abs, CsrMatrix, DiagonalMatrix};
use crate::stabilizer::{build_b1, build_b2, star_load, star_split, Charge, EntropyFns};

/// Result of one converged time step.
#[derive(Clone, Debug, PartialEq)]
pub struct PicardOutcome {
    pub state: State,
    pub iterations: usize,
    /// Max-norm residual before the first and after every iteration.
    pub residuals: Vec<f64>,
}

/// Matrices and boundary data shared by all steps of a run.
#[derive(Clone, Debug)]
pub struct Discretization<'m> {
    mesh: &'m Mesh,
    config: SolverConfig,
    fe: FeSpace<'m>,
    mass: CsrMatrix,
    lumped: DiagonalMatrix,
    stiffness: CsrMatrix,
    stencil: SymStencil,
    fns: EntropyFns,
    poisson: PoissonSolver,
    p_fixed: Vec<(usize, f64)>,
    n_fixed: Vec<(usize, f64)>,
}

/// Coefficients frozen at one iterate.
struct Frozen<'a> {
    x: &'a [f64],
    phi: &'a [f64],
    drift: Option<&'a CsrMatrix>,
    /// Star transport as a matrix on the new iterate instead of a load.
    implicit: bool,
}

impl<'m> Discretization<'m> {
    pub fn new(mesh: &'m Mesh, bc: &BoundarySpec, config: &SolverConfig, epsilon: f64) -> Result<Self> {
        config.validate()?;
        bc.validate(mesh)?;
        let fe = FeSpace::new(mesh);
        let mass = fe.mass();
        let lumped = fe.lumped_mass();
        let stiffness = fe.stiffness();
        let stencil = build_sym_stencils(mesh)?;
        let poisson = PoissonSolver::new(
            &stiffness,
            &lumped,
            dirichlet_nodes(mesh, &bc.phi_dirichlet),
            config.linear_solver,
            config.linear_tol,
            config.neutrality_tol,
        )?;
        Ok(Discretization {
            mesh,
            config: config.clone(),
            fe,
            mass,
            lumped,
            stiffness,
            stencil,
            fns: EntropyFns::new(epsilon)?,
            poisson,
            p_fixed: dirichlet_nodes(mesh, &bc.p_dirichlet),
            n_fixed: dirichlet_nodes(mesh, &bc.n_dirichlet),
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn lumped_mass(&self) -> &DiagonalMatrix {
        &self.lumped
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn stencil(&self) -> &SymStencil {
        &self.stencil
    }

    pub fn entropy_fns(&self) -> &EntropyFns {
        &self.fns
    }

    pub fn poisson(&self) -> &PoissonSolver {
        &self.poisson
    }

    /// Imposes the density Dirichlet values on `p` and `n`.
    pub fn apply_density_bc(&self, p: &mut [f64], n: &mut [f64]) {
        for &(i, v) in &self.p_fixed {
            p[i] = v;
        }
        for &(i, v) in &self.n_fixed {
            n[i] = v;
        }
    }

    fn fixed(&self, charge: Charge) -> &[(usize, f64)] {
        match charge {
            Charge::Positive => &self.p_fixed,
            Charge::Negative => &self.n_fixed,
        }
    }

    fn drift(&self, phi: &[f64]) -> Option<CsrMatrix> {
        match self.config.algorithm {
            Algorithm::Alg1 => Some(self.fe.drift(phi)),
            Algorithm::Alg2 => None,
        }
    }

    /// System matrix of one species with coefficients frozen at `c`, and the
    /// part of the star transport that stays on the right side.
    fn system(&self, charge: Charge, x_old: &[f64], c: &Frozen) -> Result<(CsrMatrix, Vec<f64>)> {
        let mut a = self.operator(charge, c)?;
        if self.config.algorithm == Algorithm::Alg2 && c.implicit {
            let k = self.config.k;
            let s = charge.sign();
            let (t, e) = star_split(c.x, c.phi, &self.fns, &self.stiffness);
            a.axpy(s, &t);
            let rhs = self.lumped.diag().iter().zip(x_old).zip(e).map(|((d, x), e)| d * x / k - s * e).collect();
            Ok((a, rhs))
        } else {
            Ok((a, self.rhs(charge, x_old, c)))
        }
    }

    /// System matrix of one species with coefficients frozen at `c` and the
    /// star transport as a load.
    fn operator(&self, charge: Charge, c: &Frozen) -> Result<CsrMatrix> {
        let k = self.config.k;
        let alpha = compute_alpha(c.x, self.config.q, self.mesh, &self.stencil);
        match self.config.algorithm {
            Algorithm::Alg1 => {
                let drift = c.drift.expect("drift matrix for the first scheme");
                let mut a = self.mass.clone();
                a.scale(1.0 / k);
                a.axpy(1.0, &self.stiffness);
                a.axpy(charge.sign(), drift);
                let b = build_b1(charge, &alpha, k, &self.mass, &self.stiffness, drift)?;
                a.axpy(1.0, b.matrix());
                Ok(a)
            }
            Algorithm::Alg2 => {
                let mut a = self.stiffness.clone();
                for (i, d) in self.lumped.diag().iter().enumerate() {
                    a.add(i, i, d / k);
                }
                let b = build_b2(charge, c.x, c.phi, &alpha, &self.fns, &self.stiffness);
                a.axpy(1.0, b.matrix());
                Ok(a)
            }
        }
    }

    /// Right side of one species with coefficients frozen at `c` and the star
    /// transport as a load.
    fn rhs(&self, charge: Charge, x_old: &[f64], c: &Frozen) -> Vec<f64> {
        let k = self.config.k;
        match self.config.algorithm {
            Algorithm::Alg1 => {
                let mut r = self.mass.mul_vec(x_old);
                r.iter_mut().for_each(|v| *v /= k);
                r
            }
            Algorithm::Alg2 => {
                let load = star_load(c.x, c.phi, &self.fns, &self.stiffness);
                let s = charge.sign();
                self.lumped.diag().iter().zip(x_old).zip(load).map(|((d, x), b)| d * x / k - s * b).collect()
            }
        }
    }

    /// Nonlinear residual of one species equation; Dirichlet rows are zero.
    fn species_residual(&self, charge: Charge, x_old: &[f64], c: &Frozen) -> Result<Vec<f64>> {
        let a = self.operator(charge, c)?;
        let mut r = a.mul_vec(c.x);
        for (ri, bi) in r.iter_mut().zip(self.rhs(charge, x_old, c)) {
            *ri -= bi;
        }
        for &(i, _) in self.fixed(charge) {
            r[i] = 0.0;
        }
        Ok(r)
    }

    /// Max-norm of the stacked density residuals at `(p, n, phi)`.
    pub fn residual(&self, old: &State, p: &[f64], n: &[f64], phi: &[f64]) -> Result<f64> {
        let drift = self.drift(phi);
        let frozen = |x| Frozen { x, phi, drift: drift.as_ref(), implicit: false };
        let rp = self.species_residual(Charge::Positive, &old.p, &frozen(p))?;
        let rn = self.species_residual(Charge::Negative, &old.n, &frozen(n))?;
        Ok(max_abs(&rp).max(max_abs(&rn)))
    }

    fn solve_species(&self, charge: Charge, x_old: &[f64], c: &Frozen) -> Result<Vec<f64>> {
        let (mut a, mut b) = self.system(charge, x_old, c)?;
        for &(i, v) in self.fixed(charge) {
            a.set_identity_row(i);
            b[i] = v;
        }
        match self.config.linear_solver {
            LinearSolverKind::BandedLu => lu_solve(&a, &b, self.config.linear_tol),
            LinearSolverKind::Krylov => {
                let mut x = c.x.to_vec();
                bicgstab(&a, &b, &mut x, self.config.linear_tol, 20 * b.len() + 100)?;
                Ok(x)
            }
        }
    }

    /// Lumped L2 norm of the stacked difference of two density pairs.
    fn increment(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.lumped.n();
        let d = self.lumped.diag();
        let sum: f64 = (0..2 * n).map(|i| d[i % n] * (a[i] - b[i]) * (a[i] - b[i])).sum();
        libm::sqrt(sum)
    }

    /// Advances `old` by one time step.
    pub fn picard_step(&self, old: &State) -> Result<PicardOutcome> {
        match (self.config.algorithm, self.config.star_linearization) {
            (Algorithm::Alg1, _) | (_, StarLinearization::Lagged) => self.picard_iterate(old, false),
            (_, StarLinearization::Implicit) => self.picard_iterate(old, true),
            (_, StarLinearization::Adaptive) => self.picard_iterate(old, false).or_else(|e| {
                log::warn!("t = {}: lagged star transport failed ({e}); retrying with implicit transport", old.t);
                self.picard_iterate(old, true)
            }),
        }
    }

    fn picard_iterate(&self, old: &State, implicit: bool) -> Result<PicardOutcome> {
        let nn = self.mesh.num_nodes();
        let cfg = &self.config;
        let split = |v: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
            (v[..nn].to_vec(), v[nn..2 * nn].to_vec(), v[2 * nn..].to_vec())
        };
        let mut iterate: Vec<f64> = old.p.iter().chain(old.n.iter()).chain(old.phi.iter()).copied().collect();
        let mut res = self.residual(old, &old.p, &old.n, &old.phi)?;
        let mut residuals = vec![res];
        for iteration in 1..=cfg.picard_max_iters {
            let (p, n, phi) = split(&iterate);
            let drift = self.drift(&phi);
            let frozen = |x| Frozen { x, phi: &phi, drift: drift.as_ref(), implicit };
            let p_new = self.solve_species(Charge::Positive, &old.p, &frozen(&p))?;
            let n_new = self.solve_species(Charge::Negative, &old.n, &frozen(&n))?;
            let phi_new = self.poisson.solve(&p_new, &n_new)?;
            let candidate: Vec<f64> = p_new.iter().chain(&n_new).chain(phi_new.iter()).copied().collect();
            let mut failure = None;
            let mut evaluate = |v: &[f64]| {
                let (p, n, phi) = (&v[..nn], &v[nn..2 * nn], &v[2 * nn..]);
                match self.residual(old, p, n, phi) {
                    Ok(r) if r.is_finite() => r,
                    Ok(_) => f64::INFINITY,
                    Err(e) => {
                        failure = Some(e);
                        f64::INFINITY
                    }
                }
            };
            let outcome = backtracking_search(&iterate, res, &candidate, &mut evaluate, cfg.shrink, cfg.max_halvings);
            let (next, next_res, theta) = if outcome.decreased {
                (outcome.iterate, outcome.residual, outcome.theta)
            } else {
                // Picard need not decrease the max-norm residual monotonically;
                // without a damped decrease take the plain update.
                let r = evaluate(&candidate);
                (candidate, r, 1.0)
            };
            if !next_res.is_finite() {
                return Err(failure.unwrap_or(Error::LineSearch { iteration, residual: next_res }));
            }
            let increment = self.increment(&iterate[..2 * nn], &next[..2 * nn]);
            res = next_res;
            iterate = next;
            residuals.push(res);
            log::trace!("picard {iteration}: residual {res:.3e}, increment {increment:.3e}, theta {theta}");
            if res <= cfg.picard_residual_tol || increment <= cfg.picard_increment_tol {
                let (p, n, phi) = split(&iterate);
                let state = State { p: Field::new(p), n: Field::new(n), phi: Field::new(phi), t: old.t + cfg.k };
                return Ok(PicardOutcome { state, iterations: iteration, residuals });
            }
        }
        Err(Error::PicardDiverged { iterations: cfg.picard_max_iters, residual: res })
    }
}
