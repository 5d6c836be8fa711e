//! Dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, ComplexField, DMatrix, Dyn, LU};

use crate::error::{Error, Result};

/// Systems whose 1-norm condition estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative ridge used when the dictionary Gram matrix is too ill-conditioned.
pub const RIDGE_LAMBDA: f64 = 1e-10;

/// Default singular-value cutoff factor: `max(rows, cols) * eps`.
pub fn default_rank_tolerance(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Numerical rank with singular values below `rtol * sigma_max` treated as zero.
pub fn numerical_rank_with(m: &DMatrix<f64>, rtol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    numerical_rank_with(m, default_rank_tolerance(m.nrows(), m.ncols()))
}

fn norm1<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting, cached alongside a condition estimate.
#[derive(Debug, Clone)]
pub struct LuSolver {
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

impl LuSolver {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        assert!(m.is_square());
        let lu = m.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
        })?;
        let condition = norm1(m) * norm1(&inv);
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self { lu, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Solves for every column of `rhs` at once.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.lu.solve(rhs).ok_or(Error::IllConditioned {
            condition: self.condition,
        })
    }
}

/// Outcome of a symmetric (Hermitian) positive-definite solve.
#[derive(Debug, Clone)]
pub struct SpdSolve<T: ComplexField> {
    pub solution: DMatrix<T>,
    pub condition: f64,
    /// Absolute ridge added to the diagonal, if the fallback kicked in.
    pub ridge: Option<f64>,
}

fn cholesky_with_condition<T: ComplexField<RealField = f64>>(
    g: &DMatrix<T>,
) -> Option<(Cholesky<T, Dyn>, f64)> {
    let chol = g.clone().cholesky()?;
    let inv = chol.inverse();
    let condition = norm1(g) * norm1(&inv);
    condition.is_finite().then_some((chol, condition))
}

/// Solves `g * y = rhs` for Hermitian positive (semi)definite `g`.
///
/// If the Cholesky factorization fails or the condition estimate exceeds
/// [`MAX_CONDITION`], `RIDGE_LAMBDA * trace(g) / n` is added to the diagonal
/// and the solve is retried once.
pub fn solve_spd_with_ridge<T: ComplexField<RealField = f64>>(
    g: &DMatrix<T>,
    rhs: &DMatrix<T>,
) -> Result<SpdSolve<T>> {
    assert!(g.is_square());
    let n = g.nrows();
    let first = cholesky_with_condition(g);
    if let Some((chol, condition)) = &first {
        if *condition <= MAX_CONDITION {
            return Ok(SpdSolve {
                solution: chol.solve(rhs),
                condition: *condition,
                ridge: None,
            });
        }
    }

    let trace: f64 = (0..n).map(|i| g[(i, i)].clone().real()).sum();
    let ridge = RIDGE_LAMBDA * trace / n as f64;
    let mut shifted = g.clone();
    for i in 0..n {
        shifted[(i, i)] += T::from_real(ridge);
    }
    match cholesky_with_condition(&shifted) {
        Some((chol, condition)) if ridge > 0.0 => Ok(SpdSolve {
            solution: chol.solve(rhs),
            condition,
            ridge: Some(ridge),
        }),
        _ => Err(Error::IllConditioned {
            condition: first.map_or(f64::INFINITY, |(_, c)| c),
        }),
    }
}
