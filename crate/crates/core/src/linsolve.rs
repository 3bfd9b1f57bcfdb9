//! Linear solvers for the per-iteration systems.
//!
//! The default is a banded LU factorization with partial pivoting: node
//! numbering of the structured meshes keeps the bandwidth near one grid row,
//! so the factorization is cheap and accurate to roundoff. Jacobi
//! preconditioned CG and BiCGStab are available as alternatives.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

/// Which solver handles the linear systems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinearSolverKind {
    #[default]
    BandedLu,
    /// CG for symmetric systems, BiCGStab otherwise.
    Krylov,
}

/// LU factors of a band matrix with `kl` sub- and `ku` super-diagonals.
/// Row pivoting widens the upper band of `U` to `kl + ku`.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    // Row i holds columns i - kl ..= i + kl + ku at offsets 0 ..= width - 1.
    data: Vec<f64>,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n();
        let bw = a.pattern().bandwidth();
        let (kl, ku) = (bw, bw);
        let width = 2 * kl + ku + 1;
        let mut data = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in a.row(i) {
                data[i * width + (j + kl - i)] = v;
            }
        }
        let mut lu = BandedLu { n, kl, width, data, lower: vec![0.0; n * kl.max(1)], pivots: vec![0; n] };
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn eliminate(&mut self) -> Result<()> {
        let (n, kl) = (self.n, self.kl);
        let reach = self.width - 1 - kl; // kl + ku
        for c in 0..n {
            let last_row = (c + kl).min(n - 1);
            let mut piv = c;
            let mut best = self.data[self.at(c, c)].abs();
            for r in c + 1..=last_row {
                let v = self.data[self.at(r, c)].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::LinearSolve { residual: f64::INFINITY });
            }
            self.pivots[c] = piv;
            let last_col = (c + reach).min(n - 1);
            if piv != c {
                for j in c..=last_col {
                    let (x, y) = (self.at(c, j), self.at(piv, j));
                    self.data.swap(x, y);
                }
            }
            let pivot = self.data[self.at(c, c)];
            for r in c + 1..=last_row {
                let l = self.data[self.at(r, c)] / pivot;
                self.lower[c * kl + (r - c - 1)] = l;
                if l == 0.0 {
                    continue;
                }
                let idx = self.at(r, c);
                self.data[idx] = 0.0;
                for j in c + 1..=last_col {
                    let u = self.data[self.at(c, j)];
                    let idx = self.at(r, j);
                    self.data[idx] -= l * u;
                }
            }
        }
        Ok(())
    }

    /// Solves in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        let reach = self.width - 1 - kl;
        for c in 0..n {
            let p = self.pivots[c];
            if p != c {
                b.swap(c, p);
            }
            let bc = b[c];
            if bc != 0.0 {
                for r in c + 1..=(c + kl).min(n - 1) {
                    b[r] -= self.lower[c * kl + (r - c - 1)] * bc;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.data[self.at(i, j)] * b[j];
            }
            b[i] = s / self.data[self.at(i, i)];
        }
    }
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64], r: &mut [f64]) -> f64 {
    a.mul_vec_into(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let bn = norm2(b);
    if bn == 0.0 {
        norm2(r)
    } else {
        norm2(r) / bn
    }
}

/// Factors `a` and solves `a x = b`, with up to two steps of iterative
/// refinement, until the relative residual is at most `tol`.
pub fn lu_solve(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let lu = BandedLu::factor(a)?;
    lu_solve_factored(&lu, a, b, tol)
}

pub fn lu_solve_factored(lu: &BandedLu, a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    let mut r = vec![0.0; b.len()];
    let mut res = relative_residual(a, &x, b, &mut r);
    for _ in 0..2 {
        if res <= tol {
            break;
        }
        lu.solve_in_place(&mut r);
        x.iter_mut().zip(&r).for_each(|(xi, di)| *xi += di);
        res = relative_residual(a, &x, b, &mut r);
    }
    if res <= tol && x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::LinearSolve { residual: res })
    }
}

fn jacobi(a: &CsrMatrix) -> Vec<f64> {
    a.diagonal().into_iter().map(|d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect()
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// (semi)definite systems. Returns the iteration count.
pub fn cg(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<usize> {
    let n = b.len();
    let minv = jacobi(a);
    let bn = norm2(b).max(f64::MIN_POSITIVE);
    let mut r = vec![0.0; n];
    a.mul_vec_into(x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        if norm2(&r) / bn <= tol {
            return Ok(it);
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap == 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm2(&r) / bn;
    if res <= tol {
        Ok(max_iter)
    } else {
        Err(Error::LinearSolve { residual: res })
    }
}

/// Jacobi right-preconditioned BiCGStab for general systems.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<usize> {
    let n = b.len();
    let minv = jacobi(a);
    let bn = norm2(b).max(f64::MIN_POSITIVE);
    let mut r = vec![0.0; n];
    a.mul_vec_into(x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 0..max_iter {
        if norm2(&r) / bn <= tol {
            return Ok(it);
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = minv[i] * p[i];
        }
        a.mul_vec_into(&y, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 {
            break;
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm2(&s) / bn <= tol {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(it + 1);
        }
        for i in 0..n {
            z[i] = minv[i] * s[i];
        }
        a.mul_vec_into(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt == 0.0 { 0.0 } else { dot(&t, &s) / tt };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    let mut r2 = vec![0.0; n];
    let res = relative_residual(a, x, b, &mut r2);
    if res <= tol {
        Ok(max_iter)
    } else {
        Err(Error::LinearSolve { residual: res })
    }
}
