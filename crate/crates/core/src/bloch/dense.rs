use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::BlochMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_DENSE_LIMIT: usize = 2000;

/// Eigenvalues in ascending order; eigenvector `i` is column `i`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i).iter().copied().collect()
    }
}

pub fn solve_dense(m: &BlochMatrix, limit: usize) -> Result<EigenPairs> {
    solve_hermitian(&m.entries, limit)
}

/// Full spectral decomposition of a Hermitian matrix.
pub fn solve_hermitian(h: &DMatrix<Complex64>, limit: usize) -> Result<EigenPairs> {
    let n = h.nrows();
    if n > limit {
        return Err(Error::DenseLimit { dim: n, limit });
    }
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenPairs { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_matrix() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let e = solve_hermitian(&h, 10).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 2)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, c) = (1.5, -0.5);
        let b = Complex64::new(0.3, -0.7);
        let h = DMatrix::from_row_slice(2, 2, &[Complex64::new(a, 0.0), b, b.conj(), Complex64::new(c, 0.0)]);
        let e = solve_hermitian(&h, 10).unwrap();
        let root = ((a - c).powi(2) + 4.0 * b.norm_sqr()).sqrt();
        assert!((e.values[0] - (a + c - root) / 2.0).abs() < 1e-14);
        assert!((e.values[1] - (a + c + root) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            h[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let e = solve_hermitian(&h, 100).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            e.values.iter().map(|v| Complex64::new(*v, 0.0)),
        ));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!((rebuilt - &h).iter().all(|z| z.norm() < 1e-9));
        let norm = h.norm();
        for i in 0..n {
            let v = e.vectors.column(i);
            let r = &h * v - v * Complex64::new(e.values[i], 0.0);
            assert!(r.norm() <= 1e-10 * norm);
        }
        assert!(matches!(solve_hermitian(&h, 10), Err(Error::DenseLimit { .. })));
    }
}
