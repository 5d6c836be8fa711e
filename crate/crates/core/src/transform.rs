//! Nested periodic matrices and the forward/inverse transform built on them.
//!
//! A length-`N` signal is written as `x = T_N beta`, where `T_N` concatenates
//! one basis block `R_p` per divisor `p` of `N` (ascending). For the conjugate
//! pair basis, block `R_p` holds, for each `k` in `A_p`, the `N/p`-fold tiling of
//! `c_{p,k}` followed by its one-sample circular downshift. Blocks for distinct
//! periods are mutually orthogonal; columns inside a block are not.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ccps::{ccps, subspace_width};
use crate::error::{Error, Result};
use crate::linalg::LuSolver;
use crate::numtheory::{check_len, coprime_half_set, divisor_set, totient};
use crate::profile::PeriodStrengthProfile;

/// Which family of period bases a matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Conjugate pair sums and their one-sample downshifts.
    Ccpt,
    /// Ramanujan sums and their first `phi(p)` downshifts.
    Rpt,
}

/// Identifies one column: its period, pair-sum index (absent for Ramanujan
/// columns), and circular downshift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColumnLabel {
    pub period: usize,
    pub k: Option<usize>,
    pub shift: usize,
}

impl ColumnLabel {
    pub fn ccpt(period: usize, k: usize, shift: usize) -> Self {
        Self {
            period,
            k: Some(k),
            shift,
        }
    }

    pub fn rpt(period: usize, shift: usize) -> Self {
        Self {
            period,
            k: None,
            shift,
        }
    }
}

impl std::fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.k {
            Some(k) => write!(f, "{}:{}:{}", self.period, k, self.shift),
            None => write!(f, "{}:-:{}", self.period, self.shift),
        }
    }
}

/// Columns spanning the period-`p` subspace, sampled over `len` points.
#[derive(Debug, Clone)]
pub struct BasisBlock {
    pub len: usize,
    pub period: usize,
    pub matrix: DMatrix<f64>,
    pub labels: Vec<ColumnLabel>,
}

/// Pair-sum columns for period `p` over `len` samples. The tiling simply
/// truncates when `p` does not divide `len`, which is what dictionaries need.
pub(crate) fn ccpt_columns(len: usize, period: usize) -> BasisBlock {
    let mut labels = Vec::with_capacity(totient(period));
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(totient(period));
    for k in coprime_half_set(period).iter() {
        let seq = ccps(period, k).expect("k drawn from A_p");
        for shift in 0..subspace_width(period) {
            cols.push(seq.tiled(len, shift));
            labels.push(ColumnLabel::ccpt(period, k, shift));
        }
    }
    let matrix = DMatrix::from_fn(len, cols.len(), |i, j| cols[j][i]);
    BasisBlock {
        len,
        period,
        matrix,
        labels,
    }
}

/// Block `R_p` of `T_N`; `p` must divide `len`.
pub fn basis_block(len: usize, period: usize) -> Result<BasisBlock> {
    check_len(len)?;
    if period == 0 || !len.is_multiple_of(period) {
        return Err(Error::NotADivisor { period, len });
    }
    Ok(ccpt_columns(len, period))
}

/// Where a period's block sits inside the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub period: usize,
    pub start: usize,
    pub width: usize,
}

impl BlockSpan {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.width
    }
}

/// Square synthesis matrix with a per-divisor block layout and a cached LU
/// factorization. Immutable once built; share it freely across threads.
#[derive(Debug, Clone)]
pub struct NestedPeriodicMatrix {
    n: usize,
    kind: BasisKind,
    matrix: DMatrix<f64>,
    spans: Vec<BlockSpan>,
    labels: Vec<ColumnLabel>,
    solver: std::result::Result<LuSolver, Error>,
}

impl NestedPeriodicMatrix {
    /// Assembles blocks in the given order. Each block must have `n` rows.
    pub fn from_blocks(n: usize, kind: BasisKind, blocks: Vec<BasisBlock>) -> Self {
        let width: usize = blocks.iter().map(|b| b.matrix.ncols()).sum();
        let mut matrix = DMatrix::zeros(n, width);
        let mut spans = Vec::with_capacity(blocks.len());
        let mut labels = Vec::with_capacity(width);
        let mut start = 0;
        for b in blocks {
            assert_eq!(b.matrix.nrows(), n);
            let w = b.matrix.ncols();
            matrix.columns_mut(start, w).copy_from(&b.matrix);
            spans.push(BlockSpan {
                period: b.period,
                start,
                width: w,
            });
            labels.extend(b.labels);
            start += w;
        }
        let solver = if matrix.is_square() {
            LuSolver::new(&matrix)
        } else {
            Err(Error::LengthMismatch {
                expected: n,
                actual: width,
            })
        };
        Self {
            n,
            kind,
            matrix,
            spans,
            labels,
            solver,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn spans(&self) -> &[BlockSpan] {
        &self.spans
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    pub fn span(&self, period: usize) -> Option<BlockSpan> {
        self.spans.iter().copied().find(|s| s.period == period)
    }

    /// Copy of block `R_p`.
    pub fn block(&self, period: usize) -> Option<BasisBlock> {
        let s = self.span(period)?;
        Some(BasisBlock {
            len: self.n,
            period,
            matrix: self.matrix.columns(s.start, s.width).into_owned(),
            labels: self.labels[s.range()].to_vec(),
        })
    }

    pub fn column_of(&self, label: ColumnLabel) -> Option<usize> {
        let s = self.span(label.period)?;
        self.labels[s.range()]
            .iter()
            .position(|l| *l == label)
            .map(|i| s.start + i)
    }

    /// 1-norm condition estimate, or the factorization failure.
    pub fn condition(&self) -> Result<f64> {
        self.solver.as_ref().map(|s| s.condition()).map_err(Clone::clone)
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual,
            });
        }
        Ok(())
    }

    fn coefficients(&self, values: Vec<Complex64>) -> CoefficientVector {
        CoefficientVector {
            values,
            spans: self.spans.clone(),
        }
    }

    /// `beta = T^{-1} x`. The real and imaginary parts are solved as two
    /// right-hand sides of the same real system.
    pub fn forward(&self, x: &[Complex64]) -> Result<CoefficientVector> {
        self.check_len(x.len())?;
        let solver = self.solver.as_ref().map_err(Clone::clone)?;
        let rhs = DMatrix::from_fn(self.n, 2, |i, j| if j == 0 { x[i].re } else { x[i].im });
        let sol = solver.solve(&rhs)?;
        let values = (0..self.n)
            .map(|i| Complex64::new(sol[(i, 0)], sol[(i, 1)]))
            .collect();
        Ok(self.coefficients(values))
    }

    pub fn forward_real(&self, x: &[f64]) -> Result<CoefficientVector> {
        self.check_len(x.len())?;
        let solver = self.solver.as_ref().map_err(Clone::clone)?;
        let rhs = DMatrix::from_column_slice(self.n, 1, x);
        let sol = solver.solve(&rhs)?;
        let values = sol.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(self.coefficients(values))
    }

    /// `x = T beta`.
    pub fn inverse(&self, beta: &CoefficientVector) -> Result<Vec<Complex64>> {
        self.check_len(beta.values.len())?;
        Ok((0..self.n)
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .zip(&beta.values)
                    .map(|(&t, &b)| b * t)
                    .sum()
            })
            .collect())
    }

    /// Normalized frequency of every column, scaled by `frame` samples per
    /// unit time (default: `N`, i.e. cycles per `N` samples). `None` for bases
    /// that carry no frequency information.
    pub fn frequency_labels(&self, frame: Option<f64>) -> Option<Vec<f64>> {
        if self.kind != BasisKind::Ccpt {
            return None;
        }
        let frame = frame.unwrap_or(self.n as f64);
        Some(
            self.labels
                .iter()
                .map(|l| column_frequency(l, frame).unwrap_or(0.0))
                .collect(),
        )
    }
}

/// `(k mod p) / p * frame` for a labelled pair-sum column.
pub fn column_frequency(label: &ColumnLabel, frame: f64) -> Option<f64> {
    label
        .k
        .map(|k| (k % label.period) as f64 / label.period as f64 * frame)
}

/// Builds `T_N` from pair-sum blocks for every divisor of `N`, ascending.
pub fn build_t(n: usize) -> Result<NestedPeriodicMatrix> {
    check_len(n)?;
    let blocks = divisor_set(n).iter().map(|p| ccpt_columns(n, p)).collect();
    Ok(NestedPeriodicMatrix::from_blocks(n, BasisKind::Ccpt, blocks))
}

/// Transform coefficients together with the block layout they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub values: Vec<Complex64>,
    pub spans: Vec<BlockSpan>,
}

impl CoefficientVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block(&self, period: usize) -> Option<&[Complex64]> {
        self.spans
            .iter()
            .find(|s| s.period == period)
            .map(|s| &self.values[s.range()])
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Sum of `|beta_i|^2` over each block.
    pub fn divisor_strengths(&self) -> PeriodStrengthProfile {
        let (periods, strengths) = self
            .spans
            .iter()
            .map(|s| {
                (
                    s.period,
                    self.values[s.range()].iter().map(|v| v.norm_sqr()).sum::<f64>(),
                )
            })
            .unzip();
        PeriodStrengthProfile::new(periods, strengths)
    }
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccps::ccps;
    use crate::profile::{estimate_period, ThresholdPolicy};

    fn c(p: usize, k: usize, n: i64) -> f64 {
        ccps(p, k).unwrap().at(n)
    }

    #[test]
    fn block_examples() {
        let b = basis_block(5, 1).unwrap();
        assert_eq!(b.matrix, DMatrix::from_element(5, 1, 1.0));
        let b = basis_block(72, 9).unwrap();
        assert_eq!(b.matrix.shape(), (72, 6));
        let b = basis_block(6, 2).unwrap();
        assert_eq!(
            b.matrix.as_slice(),
            &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]
        );
        assert_eq!(
            basis_block(6, 4).unwrap_err(),
            Error::NotADivisor { period: 4, len: 6 }
        );
    }

    #[test]
    fn block_ordering() {
        let b = basis_block(10, 5).unwrap();
        assert_eq!(
            b.labels,
            vec![
                ColumnLabel::ccpt(5, 1, 0),
                ColumnLabel::ccpt(5, 1, 1),
                ColumnLabel::ccpt(5, 2, 0),
                ColumnLabel::ccpt(5, 2, 1),
            ]
        );
    }

    #[test]
    fn t5_matches_displayed_layout() {
        let t = build_t(5).unwrap();
        let m = t.matrix();
        for i in 0..5i64 {
            let r = i as usize;
            assert_eq!(m[(r, 0)], c(1, 1, 0));
            assert_eq!(m[(r, 1)], c(5, 1, i));
            assert_eq!(m[(r, 2)], c(5, 1, i - 1));
            assert_eq!(m[(r, 3)], c(5, 2, i));
            assert_eq!(m[(r, 4)], c(5, 2, i - 1));
        }
        assert_eq!(m[(0, 2)], c(5, 1, 4));
    }

    #[test]
    fn t1_is_one() {
        let t = build_t(1).unwrap();
        assert_eq!(t.matrix(), &DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn layout_72() {
        let t = build_t(72).unwrap();
        let ends: Vec<usize> = t.spans().iter().map(|s| s.start + s.width).collect();
        assert_eq!(ends, vec![1, 2, 4, 6, 8, 12, 18, 22, 28, 36, 48, 72]);
        assert_eq!(t.span(9).unwrap().range(), 12..18);
        assert_eq!(t.span(36).unwrap().range(), 36..48);
        assert_eq!(t.column_of(ColumnLabel::ccpt(36, 5, 1)), Some(39));
    }

    #[test]
    fn basis_column_reproduction() {
        let t = build_t(5).unwrap();
        let x = ccps(5, 1).unwrap().tiled(5, 0);
        let beta = t.forward_real(&x).unwrap();
        let hot = t.column_of(ColumnLabel::ccpt(5, 1, 0)).unwrap();
        for (i, v) in beta.values.iter().enumerate() {
            let want = if i == hot { 1.0 } else { 0.0 };
            assert!((v.re - want).abs() < 1e-12 && v.im == 0.0);
        }

        let t6 = build_t(6).unwrap();
        let beta = t6.forward_real(&[1.0; 6]).unwrap();
        assert!((beta.values[0].re - 1.0).abs() < 1e-12);
        assert!(beta.values[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn inverse_examples() {
        let t = build_t(5).unwrap();
        let zero = CoefficientVector {
            values: vec![Complex64::new(0.0, 0.0); 5],
            spans: t.spans().to_vec(),
        };
        assert!(t.inverse(&zero).unwrap().iter().all(|v| v.norm() == 0.0));
        let mut e = zero.clone();
        e.values[0] = Complex64::new(1.0, 0.0);
        assert!(t
            .inverse(&e)
            .unwrap()
            .iter()
            .all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn length_mismatch() {
        let t = build_t(5).unwrap();
        assert_eq!(
            t.forward_real(&[1.0; 4]).unwrap_err(),
            Error::LengthMismatch {
                expected: 5,
                actual: 4
            }
        );
        assert!(build_t(0).is_err());
    }

    #[test]
    fn divisor_strength_of_tiled_pair_sum() {
        let t = build_t(72).unwrap();
        let x = ccps(9, 2).unwrap().tiled(72, 0);
        let prof = t.forward_real(&x).unwrap().divisor_strengths();
        let total = prof.total;
        assert!((prof.get(9).unwrap() - total).abs() < 1e-12 * total.max(1.0));
        assert_eq!(estimate_period(&prof, ThresholdPolicy::default()).unwrap(), 9);
    }

    #[test]
    fn frequency_labels_in_hz() {
        let t = build_t(72).unwrap();
        let f = t.frequency_labels(Some(360.0)).unwrap();
        let col = |p, k| t.column_of(ColumnLabel::ccpt(p, k, 0)).unwrap();
        assert!((f[col(36, 1)] - 10.0).abs() < 1e-12);
        assert!((f[col(36, 5)] - 50.0).abs() < 1e-12);
        assert!((f[col(9, 2)] - 80.0).abs() < 1e-12);
        assert_eq!(f[col(1, 1)], 0.0);
        let d = t.frequency_labels(None).unwrap();
        assert!((d[col(36, 1)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_orthogonal_within_block() {
        let t = build_t(12).unwrap();
        let b = t.block(12).unwrap().matrix;
        let g = b.transpose() * &b;
        assert!(g[(0, 1)].abs() > 1e-3);
    }
}
