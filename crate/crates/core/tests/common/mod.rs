//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use degen_mixed::dae::{DiscreteMixedSystem, Load, SystemParts, TimeProfile};
use degen_mixed::linalg::{DenseMatrix, Vector};

pub fn vector(values: &[f64]) -> Vector {
    Vector::from_row_slice(values)
}

pub fn matrix(rows: usize, cols: usize, values: &[f64]) -> DenseMatrix {
    DenseMatrix::from_row_slice(rows, cols, values)
}

/// `R = diag(1, 0)`, `A = I`, `B = [0, 1]`, `g(t) = t`, `f = 0`, `u0 = (1, 0)`.
pub fn degenerate_two_by_two(t_final: f64) -> DiscreteMixedSystem {
    DiscreteMixedSystem::new(SystemParts {
        name: "two-by-two".into(),
        r: matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        a: DenseMatrix::identity(2, 2),
        b: matrix(1, 2, &[0.0, 1.0]),
        mx: DenseMatrix::identity(2, 2),
        my: DenseMatrix::identity(2, 2),
        mm: DenseMatrix::identity(1, 1),
        f: Load::zero(2),
        g: Load::single(vector(&[1.0]), TimeProfile::Linear),
        u0: vector(&[1.0, 0.0]),
        t_final,
        g_regular: true,
    })
    .unwrap()
}

/// Backward Euler computed by eliminating the constraint: `u = Bᵀ(BBᵀ)⁻¹g + N c`
/// with `N` an SVD null-space basis of `B` (not `Mx`-orthonormal), the
/// kernel-projected history equation solved for `c`, and `λ` recovered by
/// least squares from `Bᵀλ = w − R u`.
pub fn elimination_oracle(sys: &DiscreteMixedSystem, dt: f64) -> (Vec<Vector>, Vec<Vector>) {
    let (n, m) = (sys.n(), sys.m());
    let steps = (sys.t_final() / dt).round() as usize;
    let b = sys.b();
    let svd = b.transpose().svd(true, false);
    let full_u = {
        // complete the left singular vectors of Bᵀ to an orthonormal basis
        let mut q = DenseMatrix::identity(n, n);
        let u = svd.u.unwrap();
        let mut basis: Vec<Vector> = Vec::new();
        for j in 0..u.ncols() {
            if svd.singular_values[j] > 1e-12 {
                basis.push(u.column(j).into_owned());
            }
        }
        for j in 0..n {
            let mut v = q.column(j).into_owned();
            for e in &basis {
                v -= e * e.dot(&v);
            }
            for e in &basis {
                v -= e * e.dot(&v);
            }
            if v.norm() > 1e-8 {
                basis.push(v.normalize());
            }
            if basis.len() == n {
                break;
            }
        }
        for (j, e) in basis.iter().enumerate() {
            q.set_column(j, e);
        }
        q
    };
    let nb = full_u.columns(m, n - m).into_owned();
    let bbt = b * b.transpose();
    let particular = |t: f64| -> Vector {
        if m == 0 {
            Vector::zeros(n)
        } else {
            b.transpose() * bbt.clone().lu().solve(&sys.g().eval(t)).unwrap()
        }
    };
    let step = sys.r() + sys.a() * dt;
    let reduced = (nb.transpose() * &step * &nb).lu();
    let mut w = sys.r() * sys.u0();
    let mut us = vec![Vector::zeros(n)];
    let mut ls = vec![Vector::zeros(m)];
    for k in 1..=steps {
        let t = sys.t_final() * k as f64 / steps as f64;
        let up = particular(t);
        let f = sys.f().eval(t);
        let rhs = nb.transpose() * (&w + &f * dt - &step * &up);
        let c = reduced.solve(&rhs).unwrap();
        let u = up + &nb * c;
        w += (f - sys.a() * &u) * dt;
        let lambda = if m == 0 {
            Vector::zeros(0)
        } else {
            bbt.clone().lu().solve(&(b * (&w - sys.r() * &u))).unwrap()
        };
        us.push(u);
        ls.push(lambda);
    }
    (us, ls)
}
