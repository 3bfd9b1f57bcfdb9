//! Brute-force quadrature assembly shared by the test targets.

use pnp_core::mesh::Mesh;
use pnp_core::sparse::CsrMatrix;

/// Degree-5 seven-point rule on the reference triangle, as barycentric
/// coordinates and weights summing to one.
fn rule() -> Vec<([f64; 3], f64)> {
    let r = 15f64.sqrt();
    let (a1, b1, w1) = ((6.0 - r) / 21.0, (9.0 + 2.0 * r) / 21.0, (155.0 - r) / 1200.0);
    let (a2, b2, w2) = ((6.0 + r) / 21.0, (9.0 - 2.0 * r) / 21.0, (155.0 + r) / 1200.0);
    vec![
        ([1.0 / 3.0; 3], 9.0 / 40.0),
        ([a1, a1, b1], w1),
        ([a1, b1, a1], w1),
        ([b1, a1, a1], w1),
        ([a2, a2, b2], w2),
        ([a2, b2, a2], w2),
        ([b2, a2, a2], w2),
    ]
}

pub struct Oracle {
    pub m: Vec<Vec<f64>>,
    pub k: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
}

/// Integrates `phi_j phi_i`, `grad phi_j . grad phi_i` and
/// `phi_j grad u . grad phi_i` element by element.
pub fn brute_force(mesh: &Mesh, u: &[f64]) -> Oracle {
    let n = mesh.num_nodes();
    let mut o = Oracle { m: vec![vec![0.0; n]; n], k: vec![vec![0.0; n]; n], g: vec![vec![0.0; n]; n] };
    for tri in mesh.elements() {
        let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.node(v)).collect();
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let area = 0.5 * det.abs();
        // Gradient of the hat function of local vertex a: rotated opposite edge / 2A.
        let grad = |a: usize| {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            [(p[b][1] - p[c][1]) / det, (p[c][0] - p[b][0]) / det]
        };
        let grads: Vec<[f64; 2]> = (0..3).map(grad).collect();
        let grad_u = [0, 1].map(|d| (0..3).map(|a| u[tri[a]] * grads[a][d]).sum::<f64>());
        for (lam, w) in rule() {
            for a in 0..3 {
                for b in 0..3 {
                    let (i, j) = (tri[a], tri[b]);
                    let dot_ab = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                    let drift = lam[b] * (grad_u[0] * grads[a][0] + grad_u[1] * grads[a][1]);
                    o.m[i][j] += w * area * lam[a] * lam[b];
                    o.k[i][j] += w * area * dot_ab;
                    o.g[i][j] += w * area * drift;
                }
            }
        }
    }
    o
}

pub fn max_diff(a: &CsrMatrix, b: &[Vec<f64>]) -> f64 {
    let n = a.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.get(i, j) - b[i][j]).abs());
        }
    }
    worst
}
