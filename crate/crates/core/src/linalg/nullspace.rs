use super::dense::{cholesky, ensure_finite};
use super::{DenseMatrix, LinalgError, Result, Vector, RANK_TOLERANCE};

/// Thin singular value decomposition `A = U diag(s) Vᵀ`, singular values
/// in descending order.
struct Svd {
    u: DenseMatrix,
    s: Vector,
    v: DenseMatrix,
}

impl Svd {
    fn residual(&self, a: &DenseMatrix) -> f64 {
        (&self.u * DenseMatrix::from_diagonal(&self.s) * self.v.transpose() - a).amax()
    }

    fn sorted(self) -> Self {
        let mut order: Vec<usize> = (0..self.s.len()).collect();
        order.sort_by(|&i, &j| self.s[j].total_cmp(&self.s[i]));
        Self {
            u: self.u.select_columns(&order),
            s: Vector::from_iterator(order.len(), order.iter().map(|&i| self.s[i])),
            v: self.v.select_columns(&order),
        }
    }
}

fn library_svd(a: &DenseMatrix) -> Option<Svd> {
    let svd = a.clone().try_svd(true, true, f64::EPSILON, 0)?;
    Some(Svd {
        u: svd.u?,
        s: svd.singular_values,
        v: svd.v_t?.transpose(),
    })
}

/// One-sided Jacobi SVD of a matrix with at least as many rows as columns.
fn jacobi_svd(a: &DenseMatrix) -> Svd {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n, n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for i in 0..m.nrows() {
                        let (x, y) = (m[(i, p)], m[(i, q)]);
                        m[(i, p)] = c * x - s * y;
                        m[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s = Vector::from_iterator(n, w.column_iter().map(|c| c.norm()));
    let mut u = w;
    for (j, &sj) in s.iter().enumerate() {
        if sj > 0.0 {
            u.column_mut(j).unscale_mut(sj);
        }
    }
    Svd { u, s, v }
}

/// SVD whose reconstruction is verified. The library routine can return
/// an inaccurate factorization for some rank-deficient tall matrices;
/// the transposed problem and then Jacobi rotations are tried instead.
fn checked_svd(a: &DenseMatrix) -> Svd {
    let tolerance = 1e-11 * a.amax().max(f64::MIN_POSITIVE) * (a.nrows().max(a.ncols()) as f64).sqrt();
    let direct = library_svd(a).filter(|svd| svd.residual(a) <= tolerance);
    let transposed = || {
        library_svd(&a.transpose())
            .map(|t| Svd { u: t.v, s: t.s, v: t.u })
            .filter(|svd| svd.residual(a) <= tolerance)
    };
    let svd = direct.or_else(transposed).unwrap_or_else(|| {
        if a.nrows() >= a.ncols() {
            jacobi_svd(a)
        } else {
            let t = jacobi_svd(&a.transpose());
            Svd { u: t.v, s: t.s, v: t.u }
        }
    });
    svd.sorted()
}

/// Singular values in descending order.
pub fn singular_values(b: &DenseMatrix) -> Vector {
    if b.nrows() == 0 || b.ncols() == 0 {
        return Vector::zeros(0);
    }
    checked_svd(b).s
}

/// Number of singular values above `RANK_TOLERANCE` times the largest.
pub fn numerical_rank(b: &DenseMatrix) -> usize {
    let s = singular_values(b);
    match s.iter().next() {
        Some(&largest) if largest > 0.0 => s.iter().filter(|&&v| v > RANK_TOLERANCE * largest).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the orthogonal complement of `range(q)`, where `q`
/// has orthonormal columns. Householder reflections reduce `q` to upper
/// triangular form; the trailing columns of the accumulated reflector
/// product span the complement.
fn orthogonal_complement(q: &DenseMatrix) -> DenseMatrix {
    let n = q.nrows();
    let r = q.ncols();
    let mut work = q.clone();
    let mut reflectors: Vec<(Vector, f64)> = Vec::with_capacity(r);
    for j in 0..r {
        let x = work.view((j, j), (n - j, 1)).column(0).clone_owned();
        let alpha = -x[0].signum() * x.norm();
        let mut v = x;
        v[0] -= alpha;
        let vnorm2 = v.norm_squared();
        let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
        if beta != 0.0 {
            let mut block = work.view_mut((j, j), (n - j, r - j));
            let proj = block.tr_mul(&v);
            block.ger(-beta, &v, &proj, 1.0);
        }
        reflectors.push((v, beta));
    }
    let mut basis = DenseMatrix::zeros(n, n - r);
    for c in 0..n - r {
        basis[(r + c, c)] = 1.0;
    }
    for (j, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta == 0.0 {
            continue;
        }
        let mut block = basis.view_mut((j, 0), (n - j, n - r));
        let proj = block.tr_mul(v);
        block.ger(-beta, v, &proj, 1.0);
    }
    basis
}

/// `Mx`-orthonormal basis `Z` of `null(B)`: `B Z = 0`, `Zᵀ Mx Z = I`.
///
/// With `Mx = L Lᵀ`, the kernel of `B` is `L⁻ᵀ` applied to the Euclidean
/// kernel of `B L⁻ᵀ`, whose row space is read off an SVD of `L⁻¹ Bᵀ`.
/// The kernel dimension is `cols − rank(B)`, with the rank taken from the
/// singular values of `B` itself.
pub fn nullspace_basis(b: &DenseMatrix, mx: &DenseMatrix) -> Result<DenseMatrix> {
    let n = b.ncols();
    if mx.nrows() != n || mx.ncols() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "B has {} columns but Mx is {}x{}",
            n,
            mx.nrows(),
            mx.ncols()
        )));
    }
    ensure_finite(b, "constraint matrix")?;
    let chol = cholesky(mx)?;
    let l = chol.l();
    let rank = numerical_rank(b);
    let complement = if rank == 0 {
        DenseMatrix::identity(n, n)
    } else {
        let ct = l
            .solve_lower_triangular(&b.transpose())
            .ok_or(LinalgError::GramNotSpd)?;
        let svd = checked_svd(&ct);
        orthogonal_complement(&svd.u.columns(0, rank).into_owned())
    };
    l.tr_solve_lower_triangular(&complement)
        .ok_or(LinalgError::GramNotSpd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_constraint_kernel() {
        let b = DenseMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let z = nullspace_basis(&b, &DenseMatrix::identity(2, 2)).unwrap();
        assert_eq!(z.ncols(), 1);
        let s = 1.0 / 2f64.sqrt();
        let sign = z[(0, 0)].signum();
        assert!((z[(0, 0)] - sign * s).abs() < 1e-14);
        assert!((z[(1, 0)] + sign * s).abs() < 1e-14);
    }

    #[test]
    fn invertible_constraint_has_trivial_kernel() {
        let b = DenseMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let z = nullspace_basis(&b, &DenseMatrix::identity(2, 2)).unwrap();
        assert_eq!(z.ncols(), 0);
    }

    #[test]
    fn random_full_rank_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = DenseMatrix::from_fn(3, 8, |_, _| rng.random_range(-1.0..1.0));
        let y = DenseMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
        let mx = &y * y.transpose() + DenseMatrix::identity(8, 8);
        let z = nullspace_basis(&b, &mx).unwrap();
        assert_eq!(z.ncols(), 5);
        assert!((&b * &z).amax() < 1e-10);
        assert!((z.transpose() * &mx * &z - DenseMatrix::identity(5, 5)).amax() < 1e-10);
    }

    #[test]
    fn empty_constraint_spans_everything() {
        let mx = DenseMatrix::identity(3, 3) * 4.0;
        let z = nullspace_basis(&DenseMatrix::zeros(0, 3), &mx).unwrap();
        assert_eq!(z.ncols(), 3);
        assert!((z.transpose() * &mx * &z - DenseMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn jacobi_matches_a_known_decomposition() {
        let a = DenseMatrix::from_row_slice(3, 2, &[3.0, 0.0, 0.0, 4.0, 0.0, 0.0]);
        let svd = jacobi_svd(&a).sorted();
        assert!((svd.s[0] - 4.0).abs() < 1e-14 && (svd.s[1] - 3.0).abs() < 1e-14);
        assert!(svd.residual(&a) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DenseMatrix::from_fn(7, 2, |_, _| rng.random_range(-1.0..1.0))
            * DenseMatrix::from_fn(2, 4, |_, _| rng.random_range(-1.0..1.0));
        let svd = jacobi_svd(&a).sorted();
        assert!(svd.residual(&a) < 1e-13);
        assert!(svd.s[2] < 1e-14 * svd.s[0]);
    }

    #[test]
    fn rank_deficient_tall_factor_keeps_the_kernel_exact() {
        // a rank-2 product for which the library SVD of L⁻¹Bᵀ is inaccurate
        let mut rng = ChaCha8Rng::seed_from_u64(8780730654642463616);
        let b = DenseMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0))
            * DenseMatrix::from_fn(2, 15, |_, _| rng.random_range(-1.0..1.0));
        let y = DenseMatrix::from_fn(15, 15, |_, _| rng.random_range(-1.0..1.0));
        let mx = &y * y.transpose() + DenseMatrix::identity(15, 15);
        let mx = (&mx + mx.transpose()) * 0.5;
        let z = nullspace_basis(&b, &mx).unwrap();
        assert_eq!(z.ncols(), 13);
        assert!((&b * &z).amax() < 1e-12);
    }

    #[test]
    fn rank_deficient_rows_are_detected() {
        let b = DenseMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        assert_eq!(numerical_rank(&b), 1);
        let z = nullspace_basis(&b, &DenseMatrix::identity(3, 3)).unwrap();
        assert_eq!(z.ncols(), 2);
    }
}
