use super::Mesh;
use crate::sparse::CsrMatrix;

/// Result of the strict-acuteness test on the stiffness matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcutenessReport {
    pub is_acute: bool,
    /// `-max_{i != j adjacent} K_ij`; positive exactly when the mesh is acute.
    pub c_ang: f64,
    pub worst_pair: (usize, usize),
}

const ACUTE_TOL: f64 = 1e-14;

/// Checks `(grad phi_i, grad phi_j) <= -C_ang < 0` over all adjacent pairs.
pub fn check_acuteness(mesh: &Mesh, stiffness: &CsrMatrix) -> AcutenessReport {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = (0, 0);
    for i in 0..mesh.num_nodes() {
        for &j in mesh.neighbors(i) {
            if j == i {
                continue;
            }
            let k = stiffness.get(i, j);
            if k > worst {
                worst = k;
                worst_pair = (i, j);
            }
        }
    }
    AcutenessReport { is_acute: worst <= -ACUTE_TOL, c_ang: -worst, worst_pair }
}
