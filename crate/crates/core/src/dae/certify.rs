use nalgebra::{Cholesky, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DaeError, DiscreteMixedSystem, Result};
use crate::linalg::{
    cholesky, gram_norm, nullspace_basis, numerical_rank,
    sym_generalized_eigenvalues, symmetrize, DenseMatrix, Vector,
};

/// Thresholds used by [`certify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest accepted relative asymmetry of `ZᵀRZ` and `ZᵀAZ`.
    pub asymmetry: f64,
    /// Monotonicity margin must exceed `−monotonicity · max(1, λ_max)`.
    pub monotonicity: f64,
    /// Largest accepted relative `My`-distance of `u0 − z(0)` to the kernel.
    pub u0_kernel_distance: f64,
    /// Candidate shifts for the Gårding search.
    pub gamma_grid: Vec<f64>,
    /// `alpha` counts as positive when above this fraction of the largest
    /// eigenvalue of the same pencil.
    pub alpha_relative: f64,
    /// Relative mismatch accepted between `gdot` and central differences of `g`.
    pub gdot_relative: f64,
    pub gdot_samples: usize,
    pub gdot_seed: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            asymmetry: 1e-10,
            monotonicity: 1e-10,
            u0_kernel_distance: 1e-8,
            gamma_grid: vec![0.0, 1.0, 10.0, 100.0],
            alpha_relative: 1e-8,
            gdot_relative: 1e-6,
            gdot_samples: 10,
            gdot_seed: 0,
        }
    }
}

/// Per-hypothesis verdicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub h1_inf_sup: bool,
    pub h2_r_symmetric_monotone: bool,
    pub h3_a_symmetric: bool,
    pub h4_garding: bool,
    pub h5_initial_datum: bool,
    pub h6_g_regularity: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GardingPoint {
    pub gamma: f64,
    pub alpha: f64,
    pub lambda_max: f64,
    pub positive: bool,
}

/// Result of the Gårding search: the selected pair and every grid point
/// evaluated on the way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GardingConstants {
    pub gamma: f64,
    pub alpha: f64,
    pub table: Vec<GardingPoint>,
}

/// Numerical evidence for the structural hypotheses of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub kernel_dim: usize,
    /// `None` when there is no constraint.
    pub beta: Option<f64>,
    pub symmetry_residual_r: f64,
    pub symmetry_residual_a: f64,
    /// `None` when the kernel is trivial.
    pub monotonicity_margin: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub garding_table: Vec<GardingPoint>,
    pub u0_kernel_distance: f64,
    pub g_regularity_declared: bool,
    pub gdot_max_relative_error: f64,
    pub verdict: Verdict,
    pub tolerances: Tolerances,
}

/// `z = Mx⁻¹Bᵀ (B Mx⁻¹ Bᵀ)⁻¹ g`, stored as the dense `n×m` operator.
#[derive(Clone, Debug)]
struct LiftOperator {
    matrix: DenseMatrix,
}

impl LiftOperator {
    fn new(b: &DenseMatrix, mx_chol: &Cholesky<f64, Dyn>) -> Result<Self> {
        let (m, n) = b.shape();
        if m == 0 {
            return Ok(Self {
                matrix: DenseMatrix::zeros(n, 0),
            });
        }
        let rank = numerical_rank(b);
        if rank < m {
            return Err(DaeError::RankDeficientB { rank, rows: m });
        }
        let mx_inv_bt = mx_chol.solve(&b.transpose());
        let schur = symmetrize(&(b * &mx_inv_bt));
        let schur_chol = Cholesky::new(schur).ok_or(DaeError::RankDeficientB { rank, rows: m })?;
        let matrix = schur_chol.solve(&mx_inv_bt.transpose()).transpose();
        Ok(Self { matrix })
    }
}

/// `sqrt` of the smallest eigenvalue of the pencil `(B Mx⁻¹ Bᵀ, Mm)`.
pub fn inf_sup_constant(sys: &DiscreteMixedSystem) -> Result<f64> {
    let m = sys.m();
    if m == 0 {
        return Err(DaeError::InvalidSystem("no constraint rows".into()));
    }
    let rank = numerical_rank(sys.b());
    if rank < m {
        return Err(DaeError::RankDeficientB { rank, rows: m });
    }
    let mx_chol = cholesky(sys.mx())?;
    let schur = symmetrize(&(sys.b() * mx_chol.solve(&sys.b().transpose())));
    let values = sym_generalized_eigenvalues(&schur, sys.mm())?;
    Ok(values[0].max(0.0).sqrt())
}

/// The unique solution of `B z = g(t)` that is `Mx`-orthogonal to `null(B)`.
pub fn lift_vperp(sys: &DiscreteMixedSystem, t: f64) -> Result<Vector> {
    let lift = LiftOperator::new(sys.b(), &cholesky(sys.mx())?)?;
    Ok(&lift.matrix * sys.g().eval(t))
}

fn garding_on_kernel(
    sys: &DiscreteMixedSystem,
    z: &DenseMatrix,
    grid: &[f64],
    alpha_relative: f64,
) -> Result<(Option<GardingConstants>, Vec<GardingPoint>)> {
    if grid.is_empty() || z.ncols() == 0 {
        return Err(DaeError::EmptyKernelGrid);
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let ak = symmetrize(&(z.transpose() * symmetrize(sys.a()) * z));
    let rk = symmetrize(&(z.transpose() * symmetrize(sys.r()) * z));
    let gram = symmetrize(&(z.transpose() * sys.mx() * z));
    let mut table = Vec::new();
    for gamma in sorted {
        let values = sym_generalized_eigenvalues(&(&ak + &rk * gamma), &gram)?;
        let alpha = values[0];
        let lambda_max = values[values.len() - 1];
        let positive = alpha > 0.0 && alpha > alpha_relative * lambda_max.abs();
        table.push(GardingPoint {
            gamma,
            alpha,
            lambda_max,
            positive,
        });
        if positive {
            return Ok((Some(GardingConstants { gamma, alpha, table: table.clone() }), table));
        }
    }
    Ok((None, table))
}

/// Searches the grid in increasing order and returns the smallest shift
/// `gamma` for which `Zᵀ(A + γR)Z` is positive definite relative to
/// `ZᵀMxZ`, together with `alpha`, the smallest eigenvalue of that pencil.
pub fn garding_constants(sys: &DiscreteMixedSystem, gamma_grid: &[f64]) -> Result<GardingConstants> {
    let z = nullspace_basis(sys.b(), sys.mx())?;
    let (found, table) = garding_on_kernel(sys, &z, gamma_grid, Tolerances::default().alpha_relative)?;
    found.ok_or_else(|| DaeError::NoPositiveAlpha {
        best_alpha: table.iter().map(|p| p.alpha).fold(f64::NEG_INFINITY, f64::max),
    })
}

fn gdot_check(sys: &DiscreteMixedSystem, tol: &Tolerances) -> f64 {
    let t_final = sys.t_final();
    let h = 1e-5 * t_final.min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(tol.gdot_seed);
    let mut worst: f64 = 0.0;
    for _ in 0..tol.gdot_samples {
        let t = rng.random_range(h..(t_final - h));
        let fd = (sys.g().eval(t + h) - sys.g().eval(t - h)) / (2.0 * h);
        let gdot = sys.g().derivative(t);
        let scale = gdot.norm().max(sys.g().eval(t).norm());
        let err = (fd - &gdot).norm();
        let rel = if scale > 0.0 { err / scale } else if err == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(rel);
    }
    worst
}

struct Analysis {
    certificate: Certificate,
    kernel: DenseMatrix,
    lift: Option<LiftOperator>,
}

/// Asymmetry of `ZᵀMZ` relative to its own size, with the size floored
/// at `1e-4 ‖Z‖²‖M‖` so that a block which vanishes up to round-off is not
/// judged by the ratio of two round-off quantities.
fn kernel_asymmetry(block: &DenseMatrix, full: &DenseMatrix, z: &DenseMatrix) -> f64 {
    let floor = 1e-4 * z.norm_squared() * full.norm();
    let scale = block.norm().max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (block - block.transpose()).norm() / scale
    }
}

fn analyze(sys: &DiscreteMixedSystem, tol: &Tolerances) -> Result<Analysis> {
    let (n, m) = (sys.n(), sys.m());
    let mut failures = Vec::new();
    let mx_chol = cholesky(sys.mx())?;

    let (beta, lift) = if m == 0 {
        (None, LiftOperator::new(sys.b(), &mx_chol).ok())
    } else {
        match inf_sup_constant(sys) {
            Ok(beta) => (Some(beta), Some(LiftOperator::new(sys.b(), &mx_chol)?)),
            Err(DaeError::RankDeficientB { rank, rows }) => {
                failures.push(format!("H1: B has rank {rank} < {rows}"));
                (Some(0.0), None)
            }
            Err(e) => return Err(e),
        }
    };
    let h1 = lift.is_some() && beta.is_none_or(|b| b > 0.0);
    if lift.is_some() && !h1 {
        failures.push("H1: inf-sup constant is zero".into());
    }

    let z = nullspace_basis(sys.b(), sys.mx())?;
    let kernel_dim = z.ncols();
    let rk = z.transpose() * sys.r() * &z;
    let ak = z.transpose() * sys.a() * &z;
    let symmetry_residual_r = kernel_asymmetry(&rk, sys.r(), &z);
    let symmetry_residual_a = kernel_asymmetry(&ak, sys.a(), &z);

    let monotonicity_margin = if kernel_dim == 0 {
        None
    } else {
        let gram = symmetrize(&(z.transpose() * sys.my() * &z));
        let values = sym_generalized_eigenvalues(&symmetrize(&rk), &gram)?;
        Some((values[0], values[values.len() - 1]))
    };
    let monotone = monotonicity_margin
        .is_none_or(|(low, high)| low >= -tol.monotonicity * high.abs().max(1.0));
    let h2 = symmetry_residual_r <= tol.asymmetry && monotone;
    if symmetry_residual_r > tol.asymmetry {
        failures.push(format!("H2: R is not symmetric on the kernel ({symmetry_residual_r:e})"));
    }
    if !monotone {
        failures.push(format!(
            "H2: R is not monotone on the kernel (margin {:e})",
            monotonicity_margin.map_or(0.0, |m| m.0)
        ));
    }
    let h3 = symmetry_residual_a <= tol.asymmetry;
    if !h3 {
        failures.push(format!("H3: A is not symmetric on the kernel ({symmetry_residual_a:e})"));
    }

    let (gamma, alpha, garding_table, h4) = if kernel_dim == 0 {
        (Some(0.0), None, Vec::new(), true)
    } else {
        match garding_on_kernel(sys, &z, &tol.gamma_grid, tol.alpha_relative) {
            Ok((Some(found), table)) => (Some(found.gamma), Some(found.alpha), table, true),
            Ok((None, table)) => {
                let best = table
                    .iter()
                    .max_by(|a, b| a.alpha.total_cmp(&b.alpha))
                    .expect("grid is nonempty");
                failures.push(format!("H4: no positive alpha on the grid (best {:e})", best.alpha));
                (Some(best.gamma), Some(best.alpha), table, false)
            }
            Err(DaeError::EmptyKernelGrid) => {
                failures.push("H4: empty gamma grid".into());
                (None, None, Vec::new(), false)
            }
            Err(e) => return Err(e),
        }
    };

    let z0 = match &lift {
        Some(l) => &l.matrix * sys.g().eval(0.0),
        None => Vector::zeros(n),
    };
    let y = sys.u0() - &z0;
    let residual = if kernel_dim == 0 {
        y
    } else {
        let my_z = sys.my() * &z;
        let proj_gram = symmetrize(&(z.transpose() * &my_z));
        let coeffs = cholesky(&proj_gram)?.solve(&(my_z.transpose() * &y));
        &y - &z * coeffs
    };
    let u0_kernel_distance = gram_norm(sys.my(), &residual) / gram_norm(sys.my(), sys.u0()).max(1.0);
    let h5 = u0_kernel_distance <= tol.u0_kernel_distance;
    if !h5 {
        failures.push(format!("H5: initial datum is {u0_kernel_distance:e} away from the kernel"));
    }

    let gdot_max_relative_error = gdot_check(sys, tol);
    let h6 = sys.g_regular() && gdot_max_relative_error <= tol.gdot_relative;
    if !sys.g_regular() {
        failures.push("H6: g regularity not declared".into());
    } else if !h6 {
        failures.push(format!(
            "H6: supplied gdot disagrees with finite differences of g ({gdot_max_relative_error:e})"
        ));
    }

    let pass = h1 && h2 && h3 && h4 && h5 && h6;
    let certificate = Certificate {
        problem: sys.name().to_string(),
        n,
        m,
        kernel_dim,
        beta,
        symmetry_residual_r,
        symmetry_residual_a,
        monotonicity_margin: monotonicity_margin.map(|m| m.0),
        gamma,
        alpha,
        garding_table,
        u0_kernel_distance,
        g_regularity_declared: h6,
        gdot_max_relative_error,
        verdict: Verdict {
            h1_inf_sup: h1,
            h2_r_symmetric_monotone: h2,
            h3_a_symmetric: h3,
            h4_garding: h4,
            h5_initial_datum: h5,
            h6_g_regularity: h6,
            pass,
            failures,
        },
        tolerances: tol.clone(),
    };
    Ok(Analysis {
        certificate,
        kernel: z,
        lift,
    })
}

/// Checks every hypothesis and reports the measured constants. A failed
/// hypothesis is reported in the verdict, not as an error.
pub fn certify(sys: &DiscreteMixedSystem, tol: &Tolerances) -> Result<Certificate> {
    Ok(analyze(sys, tol)?.certificate)
}

/// A system whose certificate passed, bundled with the kernel basis and the
/// lift operator the integrators need.
#[derive(Clone, Debug)]
pub struct CertifiedSystem {
    system: DiscreteMixedSystem,
    certificate: Certificate,
    kernel: DenseMatrix,
    lift: DenseMatrix,
}

impl CertifiedSystem {
    pub fn new(system: DiscreteMixedSystem, tol: &Tolerances) -> Result<Self> {
        let analysis = analyze(&system, tol)?;
        if !analysis.certificate.verdict.pass {
            return Err(DaeError::CertificationFailed(Box::new(analysis.certificate)));
        }
        let lift = analysis.lift.expect("H1 passed").matrix;
        Ok(Self {
            system,
            certificate: analysis.certificate,
            kernel: analysis.kernel,
            lift,
        })
    }

    pub fn system(&self) -> &DiscreteMixedSystem {
        &self.system
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `Mx`-orthonormal basis of `null(B)`.
    pub fn kernel_basis(&self) -> &DenseMatrix {
        &self.kernel
    }

    /// Certified Gårding shift (zero when the kernel is trivial).
    pub fn gamma(&self) -> f64 {
        self.certificate.gamma.unwrap_or(0.0)
    }

    /// The lift `z(t)` of `g(t)` into the `Mx`-orthogonal complement of the kernel.
    pub fn lift(&self, t: f64) -> Vector {
        &self.lift * self.system.g().eval(t)
    }

    /// `(B Mx⁻¹ Bᵀ)⁻¹ B Mx⁻¹ v`, the multiplier whose `Bᵀ`-image is the
    /// `Mx⁻¹`-closest to `v`.
    pub fn multiplier_from_residual(&self, v: &Vector) -> Vector {
        self.lift.tr_mul(v)
    }

    pub fn into_system(self) -> DiscreteMixedSystem {
        self.system
    }
}
