use nalgebra::{Cholesky, Dyn, LU};

use super::{DenseMatrix, LinalgError, Result, SparseMatrix, Vector, PIVOT_TOLERANCE, SYMMETRY_TOLERANCE};

/// Anything that can be turned into a dense matrix for a direct solve.
pub trait Densify {
    fn to_dense(&self) -> DenseMatrix;
}

impl Densify for DenseMatrix {
    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

impl Densify for SparseMatrix {
    fn to_dense(&self) -> DenseMatrix {
        SparseMatrix::to_dense(self)
    }
}

pub fn ensure_finite(m: &DenseMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite(what))
    }
}

pub fn ensure_finite_vector(v: &Vector, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite(what))
    }
}

/// Relative Frobenius asymmetry `‖A − Aᵀ‖_F / ‖A‖_F` (zero for the zero matrix).
pub fn relative_asymmetry(a: &DenseMatrix) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (a - a.transpose()).norm() / norm
}

pub fn symmetrize(a: &DenseMatrix) -> DenseMatrix {
    (a + a.transpose()) * 0.5
}

/// `sqrt(vᵀ G v)`; tiny negative round-off is clamped to zero.
pub fn gram_norm(gram: &DenseMatrix, v: &Vector) -> f64 {
    v.dot(&(gram * v)).max(0.0).sqrt()
}

/// Cholesky factor of a Gram matrix after checking it is symmetric.
pub fn cholesky(gram: &DenseMatrix) -> Result<Cholesky<f64, Dyn>> {
    if !gram.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "Gram matrix is {}x{}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    ensure_finite(gram, "Gram matrix")?;
    let asym = relative_asymmetry(gram);
    if asym > SYMMETRY_TOLERANCE {
        return Err(LinalgError::NotSymmetric(asym));
    }
    Cholesky::new(symmetrize(gram)).ok_or(LinalgError::GramNotSpd)
}

/// LU factorization with partial pivoting, plus the original matrix for one
/// step of iterative refinement.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    matrix: DenseMatrix,
    lu: LU<f64, Dyn, Dyn>,
}

impl LuFactorization {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        ensure_finite(&matrix, "matrix")?;
        let scale = matrix.amax();
        let threshold = PIVOT_TOLERANCE * scale;
        let lu = matrix.clone().lu();
        if matrix.nrows() > 0 {
            let u = lu.u();
            let pivot = u.diagonal().amin();
            if scale == 0.0 || pivot < threshold {
                return Err(LinalgError::SingularMatrix { pivot, threshold });
            }
        }
        Ok(Self { matrix, lu })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        if b.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.dim()
            )));
        }
        ensure_finite_vector(b, "right-hand side")?;
        if self.dim() == 0 {
            return Ok(Vector::zeros(0));
        }
        let mut x = self.lu.solve(b).ok_or(LinalgError::SingularMatrix {
            pivot: 0.0,
            threshold: 0.0,
        })?;
        let residual = b - &self.matrix * &x;
        if let Some(correction) = self.lu.solve(&residual) {
            x += correction;
        }
        ensure_finite_vector(&x, "solution")?;
        Ok(x)
    }
}

/// Solves `A x = b` by LU with partial pivoting and one refinement step.
pub fn lu_solve<M: Densify + ?Sized>(a: &M, b: &Vector) -> Result<Vector> {
    LuFactorization::new(a.to_dense())?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_solve() {
        let x = lu_solve(&DenseMatrix::identity(3, 3), &Vector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = DenseMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = lu_solve(&a, &Vector::from_vec(vec![2.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn random_system_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            rng.random_range(-1.0..1.0) + if i == j { 5.0 } else { 0.0 }
        });
        let b = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let x = lu_solve(&a, &b).unwrap();
        let residual = (&a * &x - &b).norm() / b.norm().max(1.0);
        assert!(residual <= 1e-10, "residual {residual:e}");
    }

    #[test]
    fn singular_and_non_finite_inputs() {
        let a = DenseMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            lu_solve(&a, &Vector::from_vec(vec![1.0, 1.0])),
            Err(LinalgError::SingularMatrix { .. })
        ));
        let a = DenseMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(matches!(
            lu_solve(&a, &Vector::from_vec(vec![1.0, 1.0])),
            Err(LinalgError::NonFinite(_))
        ));
        let b = Vector::from_vec(vec![1.0, f64::INFINITY]);
        assert!(matches!(
            lu_solve(&DenseMatrix::identity(2, 2), &b),
            Err(LinalgError::NonFinite(_))
        ));
    }

    #[test]
    fn sparse_input_is_accepted() {
        let s = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        let x = lu_solve(&s, &Vector::from_vec(vec![2.0, 8.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite_and_asymmetric() {
        let indefinite = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert_eq!(cholesky(&indefinite).unwrap_err(), LinalgError::GramNotSpd);
        let asym = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(cholesky(&asym), Err(LinalgError::NotSymmetric(_))));
    }
}
