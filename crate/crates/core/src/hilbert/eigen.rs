//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;

/// Stop once the off-diagonal Frobenius norm falls below this (scaled by
/// `max(1, ‖A‖_F)`).
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
    pub converged: bool,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim()).map(|i| self.vectors.get(i, k)).collect()
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes the Hermitian part of `matrix` (only the upper triangle's
/// Hermitian completion is meaningful; callers should check Hermiticity first).
pub fn hermitian_eigen(matrix: &ComplexMatrix) -> HermitianEigen {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    let mut converged = off_diagonal_norm(&a) < threshold;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&a) < threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, k, v.get(row, src));
        }
    }
    HermitianEigen { values, vectors, sweeps, converged }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / r;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) block.
    let phase_conj = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;

    let n = a.dim();
    for k in 0..n {
        let (x, y) = (a.get(k, p), a.get(k, q));
        a.set(k, p, x * u_pp + y * u_qp);
        a.set(k, q, x * u_pq + y * u_qq);
    }
    for k in 0..n {
        let (x, y) = (a.get(p, k), a.get(q, k));
        a.set(p, k, u_pp.conj() * x + u_qp.conj() * y);
        a.set(q, k, u_pq.conj() * x + u_qq.conj() * y);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
    for k in 0..n {
        let (x, y) = (v.get(k, p), v.get(k, q));
        v.set(k, p, x * u_pp + y * u_qp);
        v.set(k, q, x * u_pq + y * u_qq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, DMatrix};

    fn sample_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        // small LCG keeps this test free of the crate's own samplers
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(next(), 0.0));
            for j in (i + 1)..n {
                let z = Complex64::new(next(), next());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    fn reconstruct(e: &HermitianEigen) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&e.values);
        &(&e.vectors * &d) * &e.vectors.adjoint()
    }

    #[test]
    fn reconstructs_random_hermitian_matrices() {
        for (n, seed) in [(2, 1), (4, 2), (8, 3), (16, 4), (32, 5)] {
            let m = sample_hermitian(n, seed);
            let e = hermitian_eigen(&m);
            assert!(e.converged, "n={n} did not converge");
            assert!(reconstruct(&e).max_abs_diff(&m).unwrap() < 1e-11);
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)).unwrap() < 1e-11);
        }
    }

    #[test]
    fn agrees_with_nalgebra_on_eigenvalues() {
        for seed in 10..20 {
            let m = sample_hermitian(8, seed);
            let na = DMatrix::from_fn(8, 8, |i, j| {
                let z = m.get(i, j);
                Complex::new(z.re, z.im)
            });
            let mut reference: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let ours = hermitian_eigen(&m).values;
            for (a, b) in ours.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let e = hermitian_eigen(&ComplexMatrix::diagonal(&[0.5, -0.25, 0.75]));
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![-0.25, 0.5, 0.75]);
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let y = super::super::spin::pauli(super::super::spin::Axis::Y);
        let e = hermitian_eigen(&y);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }
}
