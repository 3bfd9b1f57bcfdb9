use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fespace::Field;
use crate::linsolve::{cg, lu_solve_factored, BandedLu, LinearSolverKind};
use crate::sparse::{CsrMatrix, DiagonalMatrix};

/// Solves `K phi = D (p - n)` with the potential's boundary data.
///
/// Dirichlet nodes are eliminated symmetrically. Without Dirichlet data the
/// right side is projected onto mean zero, node 0 is pinned, and the result
/// is shifted to zero lumped mean. The reduced matrix is factored once.
#[derive(Clone, Debug)]
pub struct PoissonSolver {
    matrix: CsrMatrix,
    lu: Option<BandedLu>,
    lumped: Vec<f64>,
    area: f64,
    dirichlet: Vec<(usize, f64)>,
    lift: Vec<f64>,
    neutrality_tol: f64,
    linear_tol: f64,
}

impl PoissonSolver {
    pub fn new(
        stiffness: &CsrMatrix,
        lumped: &DiagonalMatrix,
        dirichlet: Vec<(usize, f64)>,
        solver: LinearSolverKind,
        linear_tol: f64,
        neutrality_tol: f64,
    ) -> Result<Self> {
        let n = stiffness.n();
        let mut g = vec![0.0; n];
        for &(i, v) in &dirichlet {
            g[i] = v;
        }
        let mut lift = stiffness.mul_vec(&g);
        let mut matrix = stiffness.clone();
        let fixed: Vec<usize> = if dirichlet.is_empty() { vec![0] } else { dirichlet.iter().map(|d| d.0).collect() };
        let mut is_fixed = vec![false; n];
        for &i in &fixed {
            is_fixed[i] = true;
        }
        for i in 0..n {
            if is_fixed[i] {
                matrix.set_identity_row(i);
                lift[i] = 0.0;
            } else {
                for &j in &fixed {
                    if matrix.pattern().index(i, j).is_some() {
                        matrix.set(i, j, 0.0);
                    }
                }
            }
        }
        let lu = match solver {
            LinearSolverKind::BandedLu => Some(BandedLu::factor(&matrix)?),
            LinearSolverKind::Krylov => None,
        };
        Ok(PoissonSolver {
            matrix,
            lu,
            lumped: lumped.diag().to_vec(),
            area: lumped.trace(),
            dirichlet,
            lift,
            neutrality_tol,
            linear_tol,
        })
    }

    pub fn is_pure_neumann(&self) -> bool {
        self.dirichlet.is_empty()
    }

    /// Potential generated by the charge `p - n`.
    pub fn solve(&self, p: &[f64], n: &[f64]) -> Result<Field> {
        let mut rhs: Vec<f64> = (0..p.len()).map(|i| self.lumped[i] * (p[i] - n[i])).collect();
        if self.is_pure_neumann() {
            let total: f64 = rhs.iter().sum();
            if total.abs() > self.neutrality_tol * self.area {
                return Err(Error::Electroneutrality { imbalance: total / self.area, tolerance: self.neutrality_tol });
            }
            let mean = total / self.area;
            for (r, d) in rhs.iter_mut().zip(&self.lumped) {
                *r -= d * mean;
            }
            rhs[0] = 0.0;
        } else {
            for (r, l) in rhs.iter_mut().zip(&self.lift) {
                *r -= l;
            }
            for &(i, v) in &self.dirichlet {
                rhs[i] = v;
            }
        }
        let mut phi = match &self.lu {
            Some(lu) => lu_solve_factored(lu, &self.matrix, &rhs, self.linear_tol)?,
            None => {
                let mut x = vec![0.0; rhs.len()];
                cg(&self.matrix, &rhs, &mut x, self.linear_tol, 20 * rhs.len() + 100)?;
                x
            }
        };
        if self.is_pure_neumann() {
            let mean = phi.iter().zip(&self.lumped).map(|(v, d)| v * d).sum::<f64>() / self.area;
            phi.iter_mut().for_each(|v| *v -= mean);
        }
        Ok(Field::new(phi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::FeSpace;
    use crate::mesh::{BoundaryTag, Mesh};
    use crate::solver::dirichlet_nodes;

    #[test]
    fn neutral_charge_gives_zero_potential() {
        let mesh = Mesh::unit_square(6, [-0.5, -0.5]).unwrap();
        let fe = FeSpace::new(&mesh);
        let s = PoissonSolver::new(&fe.stiffness(), &fe.lumped_mass(), vec![], LinearSolverKind::BandedLu, 1e-12, 1e-2)
            .unwrap();
        let p = vec![1.3; mesh.num_nodes()];
        let phi = s.solve(&p, &p).unwrap();
        assert!(phi.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn neumann_solution_satisfies_projected_equation() {
        let mesh = Mesh::unit_square(6, [0.0, 0.0]).unwrap();
        let fe = FeSpace::new(&mesh);
        let (k, d) = (fe.stiffness(), fe.lumped_mass());
        let s = PoissonSolver::new(&k, &d, vec![], LinearSolverKind::BandedLu, 1e-12, 1e-2).unwrap();
        let p: Vec<f64> = mesh.nodes().iter().map(|x| 1.0 + x[0]).collect();
        let n = vec![1.0; mesh.num_nodes()];
        let phi = s.solve(&p, &n).unwrap();
        let kphi = k.mul_vec(&phi);
        for i in 0..mesh.num_nodes() {
            assert!((kphi[i] - d.0[i] * (p[i] - n[i])).abs() < 1e-12);
        }
        assert!(d.inner(&phi, &vec![1.0; mesh.num_nodes()]).abs() < 1e-14);
        let krylov = PoissonSolver::new(&k, &d, vec![], LinearSolverKind::Krylov, 1e-12, 1e-2).unwrap();
        let phi2 = krylov.solve(&p, &n).unwrap();
        assert!(phi.iter().zip(phi2.iter()).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn charged_neumann_problem_is_rejected() {
        let mesh = Mesh::unit_square(4, [0.0, 0.0]).unwrap();
        let fe = FeSpace::new(&mesh);
        let s = PoissonSolver::new(&fe.stiffness(), &fe.lumped_mass(), vec![], LinearSolverKind::BandedLu, 1e-12, 1e-2)
            .unwrap();
        let err = s.solve(&vec![2.0; mesh.num_nodes()], &vec![1.0; mesh.num_nodes()]).unwrap_err();
        assert!(matches!(err, Error::Electroneutrality { .. }));
    }

    #[test]
    fn dirichlet_values_are_imposed() {
        let mesh = Mesh::channel(0.5).unwrap();
        let fe = FeSpace::new(&mesh);
        let (k, d) = (fe.stiffness(), fe.lumped_mass());
        let nodes = dirichlet_nodes(&mesh, &[(BoundaryTag::Bottom, -50.0), (BoundaryTag::Top, 50.0)]);
        let s = PoissonSolver::new(&k, &d, nodes.clone(), LinearSolverKind::BandedLu, 1e-12, 1e-2).unwrap();
        let one = vec![1.0; mesh.num_nodes()];
        let phi = s.solve(&one, &one).unwrap();
        for &(i, v) in &nodes {
            assert_eq!(phi[i], v);
        }
        let kphi = k.mul_vec(&phi);
        let fixed: Vec<usize> = nodes.iter().map(|n| n.0).collect();
        for i in (0..mesh.num_nodes()).filter(|i| !fixed.contains(i)) {
            assert!(kphi[i].abs() < 1e-10, "row {i}: {}", kphi[i]);
        }
    }
}
