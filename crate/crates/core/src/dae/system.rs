use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DaeError, Result};
use crate::linalg::{cholesky, ensure_finite, ensure_finite_vector, DenseMatrix, Vector};

/// Scalar time factor of a separable load term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TimeProfile {
    Constant,
    /// `t`
    Linear,
    /// `exp(rate·t)`
    Exp { rate: f64 },
    /// `sin(omega·t)`
    Sin { omega: f64 },
    /// `cos(omega·t)`
    Cos { omega: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Linear => t,
            TimeProfile::Exp { rate } => (rate * t).exp(),
            TimeProfile::Sin { omega } => (omega * t).sin(),
            TimeProfile::Cos { omega } => (omega * t).cos(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 0.0,
            TimeProfile::Linear => 1.0,
            TimeProfile::Exp { rate } => rate * (rate * t).exp(),
            TimeProfile::Sin { omega } => omega * (omega * t).cos(),
            TimeProfile::Cos { omega } => -omega * (omega * t).sin(),
        }
    }
}

/// One term `profile(t) · vector` of a separable load.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadTerm {
    pub profile: TimeProfile,
    pub vector: Vector,
}

type TimeFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;

/// Time-dependent right-hand side together with its time derivative.
#[derive(Clone)]
pub enum Load {
    /// `Σ profileᵢ(t) · vectorᵢ`; the derivative is exact.
    Separable { dim: usize, terms: Vec<LoadTerm> },
    /// Arbitrary callbacks; the derivative is whatever the caller supplies.
    Function {
        dim: usize,
        value: TimeFn,
        derivative: TimeFn,
    },
}

impl fmt::Debug for Load {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Load::Separable { dim, terms } => f
                .debug_struct("Separable")
                .field("dim", dim)
                .field("terms", terms)
                .finish(),
            Load::Function { dim, .. } => f.debug_struct("Function").field("dim", dim).finish_non_exhaustive(),
        }
    }
}

impl Load {
    pub fn zero(dim: usize) -> Self {
        Load::Separable { dim, terms: Vec::new() }
    }

    pub fn separable(dim: usize, terms: Vec<LoadTerm>) -> Self {
        Load::Separable { dim, terms }
    }

    /// A single term `profile(t) · vector`.
    pub fn single(vector: Vector, profile: TimeProfile) -> Self {
        Load::Separable {
            dim: vector.len(),
            terms: vec![LoadTerm { profile, vector }],
        }
    }

    pub fn function<V, D>(dim: usize, value: V, derivative: D) -> Self
    where
        V: Fn(f64) -> Vector + Send + Sync + 'static,
        D: Fn(f64) -> Vector + Send + Sync + 'static,
    {
        Load::Function {
            dim,
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Load::Separable { dim, .. } | Load::Function { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, t: f64) -> Vector {
        match self {
            Load::Separable { dim, terms } => terms
                .iter()
                .fold(Vector::zeros(*dim), |acc, term| acc + &term.vector * term.profile.value(t)),
            Load::Function { value, .. } => value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> Vector {
        match self {
            Load::Separable { dim, terms } => terms
                .iter()
                .fold(Vector::zeros(*dim), |acc, term| acc + &term.vector * term.profile.derivative(t)),
            Load::Function { derivative, .. } => derivative(t),
        }
    }

    /// The same load multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Load::Separable { dim, terms } => Load::Separable {
                dim: *dim,
                terms: terms
                    .iter()
                    .map(|t| LoadTerm {
                        profile: t.profile,
                        vector: &t.vector * factor,
                    })
                    .collect(),
            },
            Load::Function { dim, value, derivative } => {
                let (v, d) = (value.clone(), derivative.clone());
                Load::function(*dim, move |t| v(t) * factor, move |t| d(t) * factor)
            }
        }
    }

    /// True when the load is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        match self {
            Load::Separable { terms, .. } => terms.iter().all(|t| t.vector.iter().all(|&v| v == 0.0)),
            Load::Function { .. } => false,
        }
    }
}

/// Raw ingredients of a [`DiscreteMixedSystem`].
#[derive(Clone, Debug)]
pub struct SystemParts {
    pub name: String,
    pub r: DenseMatrix,
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub mx: DenseMatrix,
    pub my: DenseMatrix,
    pub mm: DenseMatrix,
    pub f: Load,
    pub g: Load,
    pub u0: Vector,
    pub t_final: f64,
    /// Caller's assertion that `g` is H¹ in time with derivative `g.derivative`.
    pub g_regular: bool,
}

/// Galerkin image of the degenerate mixed problem
/// `d/dt[R u + Bᵀλ] + A u = f`, `B u = g`, `R u(0) = R u0` on `[0, T]`.
#[derive(Clone, Debug)]
pub struct DiscreteMixedSystem {
    parts: SystemParts,
}

fn check_square(m: &DenseMatrix, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(DaeError::InvalidSystem(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl DiscreteMixedSystem {
    pub fn new(parts: SystemParts) -> Result<Self> {
        let n = parts.r.nrows();
        let m = parts.b.nrows();
        check_square(&parts.r, n, "R")?;
        check_square(&parts.a, n, "A")?;
        check_square(&parts.mx, n, "Mx")?;
        check_square(&parts.my, n, "My")?;
        check_square(&parts.mm, m, "Mm")?;
        if parts.b.ncols() != n {
            return Err(DaeError::InvalidSystem(format!(
                "B has {} columns, expected {n}",
                parts.b.ncols()
            )));
        }
        if parts.f.dim() != n || parts.g.dim() != m || parts.u0.len() != n {
            return Err(DaeError::InvalidSystem(format!(
                "data sizes f={}, g={}, u0={} do not match n={n}, m={m}",
                parts.f.dim(),
                parts.g.dim(),
                parts.u0.len()
            )));
        }
        if !(parts.t_final.is_finite() && parts.t_final > 0.0) {
            return Err(DaeError::InvalidSystem(format!("final time {} is not positive", parts.t_final)));
        }
        for (mat, what) in [(&parts.r, "R"), (&parts.a, "A"), (&parts.b, "B")] {
            ensure_finite(mat, what)?;
        }
        ensure_finite_vector(&parts.u0, "initial datum")?;
        cholesky(&parts.mx)?;
        cholesky(&parts.my)?;
        cholesky(&parts.mm)?;
        Ok(Self { parts })
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }
    pub fn n(&self) -> usize {
        self.parts.r.nrows()
    }
    pub fn m(&self) -> usize {
        self.parts.b.nrows()
    }
    pub fn r(&self) -> &DenseMatrix {
        &self.parts.r
    }
    pub fn a(&self) -> &DenseMatrix {
        &self.parts.a
    }
    pub fn b(&self) -> &DenseMatrix {
        &self.parts.b
    }
    pub fn mx(&self) -> &DenseMatrix {
        &self.parts.mx
    }
    pub fn my(&self) -> &DenseMatrix {
        &self.parts.my
    }
    pub fn mm(&self) -> &DenseMatrix {
        &self.parts.mm
    }
    pub fn f(&self) -> &Load {
        &self.parts.f
    }
    pub fn g(&self) -> &Load {
        &self.parts.g
    }
    pub fn u0(&self) -> &Vector {
        &self.parts.u0
    }
    pub fn t_final(&self) -> f64 {
        self.parts.t_final
    }
    pub fn g_regular(&self) -> bool {
        self.parts.g_regular
    }

    pub fn parts(&self) -> &SystemParts {
        &self.parts
    }

    pub fn into_parts(self) -> SystemParts {
        self.parts
    }
}
