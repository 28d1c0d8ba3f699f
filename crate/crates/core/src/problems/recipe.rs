use serde::{Deserialize, Serialize};

use crate::dae::TimeProfile;
use crate::fem::ConductorBox;

/// Which model problem a recipe builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeKind {
    /// Taylor–Hood Stokes with a solenoidal manufactured velocity.
    StokesMms,
    /// Taylor–Hood Stokes with a non-solenoidal velocity, so `g ≠ 0`.
    StokesNonsolenoidal,
    /// Lowest-order edge elements for a conductor inside an insulator.
    Eddy2dConductor,
    /// Random dense system with a degenerate `R`.
    SyntheticRandom,
}

impl RecipeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecipeKind::StokesMms => "stokes-mms",
            RecipeKind::StokesNonsolenoidal => "stokes-nonsolenoidal",
            RecipeKind::Eddy2dConductor => "eddy2d-conductor",
            RecipeKind::SyntheticRandom => "synthetic-random",
        }
    }

    pub fn is_stokes(self) -> bool {
        matches!(self, RecipeKind::StokesMms | RecipeKind::StokesNonsolenoidal)
    }
}

impl std::fmt::Display for RecipeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything needed to rebuild a discrete system from scratch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemRecipe {
    pub problem: RecipeKind,
    /// Cells per side of the structured mesh.
    pub k: usize,
    #[serde(rename = "T", alias = "t_final")]
    pub t_final: f64,
    pub nu: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub conductor_box: ConductorBox,
    /// Time dependence of the applied field in the eddy-current problem.
    pub source_profile: TimeProfile,
    /// Multiplies every datum (`f`, `g`, `u0`).
    pub amplitude: f64,
    /// Replaces `f`, `g` and `u0` by zero.
    pub zero_data: bool,
    /// Starts from `u0 = 0` instead of the projected exact solution.
    pub zero_initial: bool,
    /// Overwrites the first row of `B` with zeros (a deliberately broken system).
    pub fault_zero_b_row: bool,
    pub seed: u64,
    /// Synthetic sizes: primal, multiplier, and kernel directions of `R` forced to zero.
    pub n: usize,
    pub m: usize,
    pub r_deficiency: usize,
}

impl Default for ProblemRecipe {
    fn default() -> Self {
        Self {
            problem: RecipeKind::StokesMms,
            k: 8,
            t_final: 1.0,
            nu: 1.0,
            sigma0: 1.0,
            sigma1: 2.0,
            mu0: 1.0,
            mu1: 2.0,
            eps0: 1.0,
            eps1: 2.0,
            conductor_box: ConductorBox::square(0.25, 0.75),
            source_profile: TimeProfile::Constant,
            amplitude: 1.0,
            zero_data: false,
            zero_initial: false,
            fault_zero_b_row: false,
            seed: 7,
            n: 10,
            m: 3,
            r_deficiency: 2,
        }
    }
}

impl ProblemRecipe {
    pub fn new(problem: RecipeKind) -> Self {
        Self {
            problem,
            ..Self::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    /// Parameter sanity checks that do not need any assembly.
    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive and finite, got {v}"))
            }
        };
        positive("T", self.t_final)?;
        if !self.amplitude.is_finite() {
            return Err("amplitude must be finite".into());
        }
        match self.problem {
            RecipeKind::StokesMms | RecipeKind::StokesNonsolenoidal => {
                positive("nu", self.nu)?;
                if self.k < 2 {
                    return Err(format!("k must be at least 2, got {}", self.k));
                }
            }
            RecipeKind::Eddy2dConductor => {
                for (name, lo, hi) in [
                    ("sigma", self.sigma0, self.sigma1),
                    ("mu", self.mu0, self.mu1),
                    ("eps", self.eps0, self.eps1),
                ] {
                    positive(&format!("{name}0"), lo)?;
                    positive(&format!("{name}1"), hi)?;
                    if hi < lo {
                        return Err(format!("{name}1 must not be smaller than {name}0"));
                    }
                }
            }
            RecipeKind::SyntheticRandom => {
                if self.n == 0 || self.m >= self.n {
                    return Err(format!("synthetic sizes need 0 <= m < n, got n={} m={}", self.n, self.m));
                }
                if self.r_deficiency > self.n - self.m {
                    return Err(format!(
                        "r_deficiency {} exceeds the kernel dimension {}",
                        self.r_deficiency,
                        self.n - self.m
                    ));
                }
            }
        }
        Ok(())
    }
}
