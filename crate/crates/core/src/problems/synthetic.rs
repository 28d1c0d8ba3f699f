//! Random systems with a degenerate `R`, for property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dae::{Load, LoadTerm, SystemParts, TimeProfile};
use crate::linalg::{lu_solve, nullspace_basis, symmetrize, DenseMatrix, LinalgError, Vector};

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

/// `Q diag(s) Qᵀ` with `Q` a random orthogonal matrix and `s` uniform in `[lo, hi]`.
fn spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DenseMatrix {
    if n == 0 {
        return DenseMatrix::zeros(0, 0);
    }
    let q = uniform(rng, n, n, -1.0, 1.0).qr().q();
    let d = Vector::from_fn(n, |_, _| rng.random_range(lo..hi));
    symmetrize(&(&q * DenseMatrix::from_diagonal(&d) * q.transpose()))
}

/// Samples one system with `n` primal and `m` multiplier unknowns whose
/// `R = CCᵀ` annihilates `deficiency` random kernel directions. `A` is
/// SPD with spectrum in `[0.1, 10]`, the Gram matrices have spectra in
/// `[1, 2]`, the loads are smooth separable functions of time and
/// `u0` satisfies `B u0 = g(0)`.
pub fn synthetic_parts(
    n: usize,
    m: usize,
    deficiency: usize,
    seed: u64,
    t_final: f64,
) -> Result<SystemParts, LinalgError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mx = spd(&mut rng, n, 1.0, 2.0);
    let my = spd(&mut rng, n, 1.0, 2.0);
    let mm = spd(&mut rng, m, 1.0, 2.0);
    let a = spd(&mut rng, n, 0.1, 10.0);
    let b = uniform(&mut rng, m, n, -1.0, 1.0);
    let z = nullspace_basis(&b, &mx)?;
    let k = z.ncols();
    let d = deficiency.min(k);
    let mut c = uniform(&mut rng, n, n, -1.0, 1.0);
    if d > 0 {
        let dirs = &z * uniform(&mut rng, k, d, -1.0, 1.0);
        let q = dirs.qr().q();
        c -= &q * (q.transpose() * &c);
    }
    let r = symmetrize(&(&c * c.transpose()));

    let f = Load::separable(
        n,
        vec![
            LoadTerm {
                profile: TimeProfile::Sin { omega: 2.0 },
                vector: uniform(&mut rng, n, 1, -1.0, 1.0).column(0).into_owned(),
            },
            LoadTerm {
                profile: TimeProfile::Constant,
                vector: uniform(&mut rng, n, 1, -1.0, 1.0).column(0).into_owned(),
            },
        ],
    );
    let g = Load::separable(
        m,
        vec![
            LoadTerm {
                profile: TimeProfile::Cos { omega: 1.5 },
                vector: uniform(&mut rng, m, 1, -1.0, 1.0).column(0).into_owned(),
            },
            LoadTerm {
                profile: TimeProfile::Linear,
                vector: uniform(&mut rng, m, 1, -1.0, 1.0).column(0).into_owned(),
            },
        ],
    );
    let particular = if m == 0 {
        Vector::zeros(n)
    } else {
        let bbt = &b * b.transpose();
        b.transpose() * lu_solve(&bbt, &g.eval(0.0))?
    };
    let u0 = particular + &z * uniform(&mut rng, k, 1, -1.0, 1.0).column(0);
    Ok(SystemParts {
        name: "synthetic-random".into(),
        r,
        a,
        b,
        mx,
        my,
        mm,
        f,
        g,
        u0,
        t_final,
        g_regular: true,
    })
}
