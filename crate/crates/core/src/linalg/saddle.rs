use super::dense::LuFactorization;
use super::{DenseMatrix, LinalgError, Result, Vector};

/// Reusable factorization of the block matrix `[[S, Bᵀ], [B, 0]]`.
#[derive(Clone, Debug)]
pub struct SaddleFactorization {
    n: usize,
    m: usize,
    lu: LuFactorization,
}

/// Assembles and factorizes `[[S, Bᵀ], [B, 0]]`.
///
/// A `SingularMatrix` error means `S` is not invertible on the kernel of
/// `B` or `B` lacks full row rank.
pub fn saddle_factorize(s: &DenseMatrix, b: &DenseMatrix) -> Result<SaddleFactorization> {
    let n = s.nrows();
    let m = b.nrows();
    if !s.is_square() || b.ncols() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "S is {}x{} and B is {}x{}",
            s.nrows(),
            s.ncols(),
            m,
            b.ncols()
        )));
    }
    let mut k = DenseMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(s);
    k.view_mut((0, n), (n, m)).copy_from(&b.transpose());
    k.view_mut((n, 0), (m, n)).copy_from(b);
    Ok(SaddleFactorization {
        n,
        m,
        lu: LuFactorization::new(k)?,
    })
}

impl SaddleFactorization {
    pub fn primal_dim(&self) -> usize {
        self.n
    }

    pub fn multiplier_dim(&self) -> usize {
        self.m
    }

    /// The assembled block matrix.
    pub fn matrix(&self) -> &DenseMatrix {
        self.lu.matrix()
    }

    /// Solves for `(u, λ)` given the primal and constraint right-hand sides.
    pub fn solve(&self, rhs_u: &Vector, rhs_lambda: &Vector) -> Result<(Vector, Vector)> {
        if rhs_u.len() != self.n || rhs_lambda.len() != self.m {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand sides have lengths {} and {}, expected {} and {}",
                rhs_u.len(),
                rhs_lambda.len(),
                self.n,
                self.m
            )));
        }
        let mut rhs = Vector::zeros(self.n + self.m);
        rhs.rows_mut(0, self.n).copy_from(rhs_u);
        rhs.rows_mut(self.n, self.m).copy_from(rhs_lambda);
        let x = self.lu.solve(&rhs)?;
        Ok((x.rows(0, self.n).into_owned(), x.rows(self.n, self.m).into_owned()))
    }
}
