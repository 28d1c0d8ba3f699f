use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use super::dense::{cholesky, ensure_finite, relative_asymmetry, symmetrize};
use super::{DenseMatrix, LinalgError, Result, Vector, SYMMETRY_TOLERANCE};

/// Eigenpairs of the symmetric-definite pencil `(A, M)`, eigenvalues
/// ascending, eigenvectors `M`-orthonormal and stored column-wise.
#[derive(Clone, Debug)]
pub struct GeneralizedEigen {
    pub values: Vector,
    pub vectors: DenseMatrix,
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    ensure_finite(a, "matrix")?;
    let asym = relative_asymmetry(a);
    if asym > SYMMETRY_TOLERANCE {
        return Err(LinalgError::NotSymmetric(asym));
    }
    Ok(())
}

/// Reduces `(A, M)` to the standard symmetric matrix `L⁻¹ A L⁻ᵀ`.
fn reduce(a: &DenseMatrix, gram: &DenseMatrix) -> Result<(DenseMatrix, Cholesky<f64, Dyn>)> {
    check_symmetric(a)?;
    if gram.nrows() != a.nrows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "pencil sizes differ: {} vs {}",
            a.nrows(),
            gram.nrows()
        )));
    }
    let chol = cholesky(gram)?;
    let l = chol.l();
    let a = symmetrize(a);
    let y = l.solve_lower_triangular(&a).ok_or(LinalgError::GramNotSpd)?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(LinalgError::GramNotSpd)?;
    Ok((symmetrize(&c), chol))
}

fn sorted_order(values: &Vector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(a: &DenseMatrix) -> Result<Vector> {
    check_symmetric(a)?;
    if a.nrows() == 0 {
        return Ok(Vector::zeros(0));
    }
    let values = symmetrize(a).symmetric_eigenvalues();
    let order = sorted_order(&values);
    Ok(Vector::from_iterator(order.len(), order.iter().map(|&i| values[i])))
}

/// Full eigendecomposition of the symmetric-definite pencil `(A, M)`.
pub fn sym_generalized_eig(a: &DenseMatrix, gram: &DenseMatrix) -> Result<GeneralizedEigen> {
    let (c, chol) = reduce(a, gram)?;
    let n = c.nrows();
    if n == 0 {
        return Ok(GeneralizedEigen {
            values: Vector::zeros(0),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(c);
    let order = sorted_order(&eig.eigenvalues);
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut y = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        y.set_column(dst, &eig.eigenvectors.column(src));
    }
    let vectors = chol
        .l()
        .tr_solve_lower_triangular(&y)
        .ok_or(LinalgError::GramNotSpd)?;
    Ok(GeneralizedEigen { values, vectors })
}

/// Eigenvalues only of the pencil `(A, M)`, ascending.
pub fn sym_generalized_eigenvalues(a: &DenseMatrix, gram: &DenseMatrix) -> Result<Vector> {
    let (c, _) = reduce(a, gram)?;
    if c.nrows() == 0 {
        return Ok(Vector::zeros(0));
    }
    let values = c.symmetric_eigenvalues();
    let order = sorted_order(&values);
    Ok(Vector::from_iterator(order.len(), order.iter().map(|&i| values[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> DenseMatrix {
        DenseMatrix::from_diagonal(&Vector::from_row_slice(values))
    }

    #[test]
    fn diagonal_pencils() {
        let e = sym_generalized_eig(&diag(&[1.0, 4.0]), &DenseMatrix::identity(2, 2)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 4.0).abs() < 1e-14);
        let e = sym_generalized_eig(&DenseMatrix::identity(2, 2), &diag(&[1.0, 4.0])).unwrap();
        assert!((e.values[0] - 0.25).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_pencil_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10;
        let x = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = symmetrize(&x);
        let y = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let gram = &y * y.transpose() + DenseMatrix::identity(n, n);
        let e = sym_generalized_eig(&a, &gram).unwrap();
        let a_norm = a.norm();
        for i in 0..n {
            let v = e.vectors.column(i);
            let r = &a * v - &gram * v * e.values[i];
            assert!(r.norm() <= 1e-8 * a_norm);
        }
        let ortho = e.vectors.transpose() * &gram * &e.vectors - DenseMatrix::identity(n, n);
        assert!(ortho.amax() < 1e-10);
        for i in 1..n {
            assert!(e.values[i - 1] <= e.values[i]);
        }
        let values_only = sym_generalized_eigenvalues(&a, &gram).unwrap();
        assert!((values_only - &e.values).amax() < 1e-10);
    }

    #[test]
    fn errors() {
        let asym = DenseMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            sym_generalized_eig(&asym, &DenseMatrix::identity(2, 2)),
            Err(LinalgError::NotSymmetric(_))
        ));
        assert_eq!(
            sym_generalized_eig(&DenseMatrix::identity(2, 2), &diag(&[1.0, -1.0])).unwrap_err(),
            LinalgError::GramNotSpd
        );
    }
}
