//! Estimating periods that need not divide the signal length.
//!
//! Two approaches live here. [`range_scan`] runs the full-length transform on
//! every prefix length in `[N1, N]` and records which divisor periods light up
//! at each length. The dictionary approach stacks period blocks `R_1 .. R_pmax`
//! (truncated to `N` samples) into a fat matrix `A` and picks the coefficient
//! vector of least penalized norm that fits the signal exactly:
//!
//! ```text
//! min ||D b||_2  s.t.  x = A b      =>      b = D^-2 A^T (A D^-2 A^T)^-1 x
//! ```
//!
//! with `D` diagonal, `D_ii = f(p_i)` and `f(p) = p^2` by default.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baselines::rpt_columns;
use crate::error::{Error, Result};
use crate::linalg::solve_spd_with_ridge;
use crate::numtheory::{check_len, divisor_set, gcd, totient};
use crate::profile::{PeriodStrengthProfile, ThresholdPolicy};
use crate::transform::{build_t, ccpt_columns, column_frequency, BlockSpan, ColumnLabel};

/// Relative fit residual above which a dictionary solve is treated as failed.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Divisor profile of one prefix length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub length: usize,
    pub profile: PeriodStrengthProfile,
    pub detected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub n1: usize,
    pub n: usize,
    pub records: Vec<ScanRecord>,
    /// How many lengths in the range project onto each period's subspace.
    pub subspace_visits: BTreeMap<usize, usize>,
}

impl ScanResult {
    pub fn record(&self, length: usize) -> Option<&ScanRecord> {
        self.records.iter().find(|r| r.length == length)
    }

    /// Number of subspace projections that repeat one already computed at a
    /// shorter length.
    pub fn duplicated_subspace_count(&self) -> usize {
        self.subspace_visits.values().map(|&v| v.saturating_sub(1)).sum()
    }
}

fn scan_one(x: &[Complex64], len: usize, policy: ThresholdPolicy) -> Result<ScanRecord> {
    let t = build_t(len)?;
    let profile = t.forward(&x[..len])?.divisor_strengths();
    let detected = profile.significant(policy);
    Ok(ScanRecord {
        length: len,
        profile,
        detected,
    })
}

pub fn range_scan(x: &[Complex64], n1: usize, policy: ThresholdPolicy) -> Result<ScanResult> {
    range_scan_parallel(x, n1, policy, 1)
}

/// [`range_scan`] with the lengths spread over `jobs` worker threads. Records
/// come back ordered by length regardless of completion order.
pub fn range_scan_parallel(
    x: &[Complex64],
    n1: usize,
    policy: ThresholdPolicy,
    jobs: usize,
) -> Result<ScanResult> {
    let n = x.len();
    if n1 < 3 || n1 > n {
        return Err(Error::InvalidRange(format!(
            "need 3 <= N1 <= N, got N1 = {n1}, N = {n}"
        )));
    }
    check_len(n)?;
    let lengths: Vec<usize> = (n1..=n).collect();
    let slots: Vec<Mutex<Option<Result<ScanRecord>>>> =
        lengths.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, lengths.len());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= lengths.len() {
                    break;
                }
                let rec = scan_one(x, lengths[i], policy);
                *slots[i].lock().unwrap() = Some(rec);
            });
        }
    });
    let records = slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every length visited"))
        .collect::<Result<Vec<_>>>()?;

    let mut subspace_visits = BTreeMap::new();
    for &len in &lengths {
        for d in divisor_set(len).iter() {
            *subspace_visits.entry(d).or_insert(0) += 1;
        }
    }
    Ok(ScanResult {
        n1,
        n,
        records,
        subspace_visits,
    })
}

/// Which period bases make up a dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictionaryBasis {
    /// Pair sums and one downshift per `k` in `A_p`.
    Ccpt,
    /// Complex exponentials `e^{j 2 pi k n / p}` with `gcd(k, p) = 1`.
    Farey,
    /// Ramanujan sums and `phi(p)` downshifts.
    Rpt,
}

impl std::str::FromStr for DictionaryBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccpt" => Ok(Self::Ccpt),
            "farey" => Ok(Self::Farey),
            "rpt" => Ok(Self::Rpt),
            _ => Err(Error::UnknownMethod(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
enum Atoms {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// `f(p) = p^exponent`.
pub fn power_penalty(exponent: f64) -> impl Fn(usize) -> f64 {
    move |p| (p as f64).powf(exponent)
}

/// Fat dictionary `A = [R_1 .. R_pmax]` over `n` samples with a diagonal
/// penalty per column.
#[derive(Debug, Clone)]
pub struct DictionaryModel {
    n: usize,
    p_max: usize,
    basis: DictionaryBasis,
    atoms: Atoms,
    spans: Vec<BlockSpan>,
    labels: Vec<ColumnLabel>,
    penalty: Vec<f64>,
}

/// `min(floor(0.8 N), N - 1)`, at least 1.
pub fn default_p_max(n: usize) -> usize {
    (n * 4 / 5).min(n.saturating_sub(1)).max(1)
}

/// Total column count `sum_{p <= p_max} phi(p)`.
pub fn dictionary_width(p_max: usize) -> usize {
    (1..=p_max).map(totient).sum()
}

/// Conjugate-pair dictionary with the `p^2` penalty.
pub fn build_dictionary(n: usize, p_max: usize) -> Result<DictionaryModel> {
    build_dictionary_with(n, p_max, DictionaryBasis::Ccpt, power_penalty(2.0))
}

pub fn build_dictionary_with(
    n: usize,
    p_max: usize,
    basis: DictionaryBasis,
    penalty: impl Fn(usize) -> f64,
) -> Result<DictionaryModel> {
    check_len(n)?;
    if p_max == 0 {
        return Err(Error::InvalidRange("p_max must be at least 1".into()));
    }
    let width = dictionary_width(p_max);
    let mut spans = Vec::with_capacity(p_max);
    let mut labels = Vec::with_capacity(width);
    let mut start = 0;
    let mut push_span = |period: usize, w: usize| {
        spans.push(BlockSpan {
            period,
            start,
            width: w,
        });
        start += w;
    };

    let atoms = match basis {
        DictionaryBasis::Ccpt | DictionaryBasis::Rpt => {
            let mut a = DMatrix::zeros(n, width);
            let mut col = 0;
            for p in 1..=p_max {
                let block = match basis {
                    DictionaryBasis::Ccpt => ccpt_columns(n, p),
                    _ => rpt_columns(n, p)?,
                };
                let w = block.matrix.ncols();
                a.columns_mut(col, w).copy_from(&block.matrix);
                labels.extend(block.labels);
                push_span(p, w);
                col += w;
            }
            Atoms::Real(a)
        }
        DictionaryBasis::Farey => {
            let mut a = DMatrix::zeros(n, width);
            let mut col = 0;
            for p in 1..=p_max {
                let ks: Vec<usize> = (0..p).filter(|&k| gcd(k, p) == 1).collect();
                for &k in &ks {
                    for i in 0..n {
                        let m = (k * i) % p;
                        a[(i, col)] = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / p as f64);
                    }
                    labels.push(ColumnLabel::ccpt(p, k, 0));
                    col += 1;
                }
                push_span(p, ks.len());
            }
            Atoms::Complex(a)
        }
    };

    let mut weights = Vec::with_capacity(width);
    for s in &spans {
        let f = penalty(s.period);
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::Numerical(format!(
                "penalty for period {} must be positive, got {f}",
                s.period
            )));
        }
        weights.extend(std::iter::repeat_n(f, s.width));
    }

    Ok(DictionaryModel {
        n,
        p_max,
        basis,
        atoms,
        spans,
        labels,
        penalty: weights,
    })
}

/// Result of the penalized minimum-norm fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionarySolution {
    pub coefficients: Vec<Complex64>,
    pub profile: PeriodStrengthProfile,
    /// `||A b - x|| / ||x||`, zero for a zero input.
    pub residual: f64,
    /// Condition estimate of the Gram matrix `A D^-2 A^T` actually factorized.
    pub condition: f64,
    pub ridge: Option<f64>,
}

impl DictionaryModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn basis(&self) -> DictionaryBasis {
        self.basis
    }

    pub fn width(&self) -> usize {
        self.labels.len()
    }

    pub fn spans(&self) -> &[BlockSpan] {
        &self.spans
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    /// Diagonal of `D`.
    pub fn penalty(&self) -> &[f64] {
        &self.penalty
    }

    /// Period of every column.
    pub fn column_periods(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.period).collect()
    }

    /// An exact fit is only generally possible with at least `n` columns.
    pub fn is_feasible(&self) -> bool {
        self.width() >= self.n
    }

    /// The dictionary as a complex matrix, whatever its storage.
    pub fn matrix_complex(&self) -> DMatrix<Complex64> {
        match &self.atoms {
            Atoms::Real(a) => a.map(|v| Complex64::new(v, 0.0)),
            Atoms::Complex(a) => a.clone(),
        }
    }

    /// The real dictionary, if this basis is real.
    pub fn matrix_real(&self) -> Option<&DMatrix<f64>> {
        match &self.atoms {
            Atoms::Real(a) => Some(a),
            Atoms::Complex(_) => None,
        }
    }

    pub fn frequency_labels(&self, frame: Option<f64>) -> Option<Vec<f64>> {
        if self.basis == DictionaryBasis::Rpt {
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

    /// Per-period `sum |b_i|^2` over `1..=p_max`.
    pub fn strength_profile(&self, coefficients: &[Complex64]) -> PeriodStrengthProfile {
        assert_eq!(coefficients.len(), self.width());
        let (periods, strengths) = self
            .spans
            .iter()
            .map(|s| {
                (
                    s.period,
                    coefficients[s.range()].iter().map(|v| v.norm_sqr()).sum::<f64>(),
                )
            })
            .unzip();
        PeriodStrengthProfile::new(periods, strengths)
    }

    /// Staged solve: `G y = x` with `G = A D^-2 A^T`, then `b = D^-2 A^T y`.
    pub fn solve(&self, x: &[Complex64]) -> Result<DictionarySolution> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let inv_sq: Vec<f64> = self.penalty.iter().map(|f| 1.0 / (f * f)).collect();

        let (coefficients, fit, condition, ridge) = match &self.atoms {
            Atoms::Real(a) => {
                let mut scaled = a.clone();
                for (j, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= inv_sq[j];
                }
                let g = &scaled * a.transpose();
                let is_real = x.iter().all(|v| v.im == 0.0);
                let cols = if is_real { 1 } else { 2 };
                let rhs = DMatrix::from_fn(self.n, cols, |i, j| if j == 0 { x[i].re } else { x[i].im });
                let sol = solve_spd_with_ridge(&g, &rhs)?;
                let b = scaled.transpose() * &sol.solution;
                let fit = a * &b;
                let to_c = |m: &DMatrix<f64>, i: usize| {
                    Complex64::new(m[(i, 0)], if cols == 2 { m[(i, 1)] } else { 0.0 })
                };
                let coeffs = (0..b.nrows()).map(|i| to_c(&b, i)).collect::<Vec<_>>();
                let fit = (0..self.n).map(|i| to_c(&fit, i)).collect::<Vec<_>>();
                (coeffs, fit, sol.condition, sol.ridge)
            }
            Atoms::Complex(a) => {
                let mut scaled = a.clone();
                for (j, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= Complex64::new(inv_sq[j], 0.0);
                }
                let g = &scaled * a.adjoint();
                let rhs = DMatrix::from_column_slice(self.n, 1, x);
                let sol = solve_spd_with_ridge(&g, &rhs)?;
                let b = scaled.adjoint() * &sol.solution;
                let fit = a * &b;
                (
                    b.iter().copied().collect(),
                    fit.iter().copied().collect(),
                    sol.condition,
                    sol.ridge,
                )
            }
        };

        let xnorm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let rnorm: f64 = fit
            .iter()
            .zip(x)
            .map(|(f, v)| (f - v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let residual = if xnorm > 0.0 { rnorm / xnorm } else { rnorm };
        if residual.is_nan() || residual > FIT_TOLERANCE {
            return Err(Error::Numerical(format!(
                "dictionary fit residual {residual:e} exceeds {FIT_TOLERANCE:e} \
                 (Gram condition estimate {condition:e})"
            )));
        }
        let profile = self.strength_profile(&coefficients);
        Ok(DictionarySolution {
            coefficients,
            profile,
            residual,
            condition,
            ridge,
        })
    }
}

pub fn dictionary_solve(model: &DictionaryModel, x: &[Complex64]) -> Result<DictionarySolution> {
    model.solve(x)
}

pub fn dictionary_strength_profile(
    solution: &DictionarySolution,
    model: &DictionaryModel,
) -> PeriodStrengthProfile {
    model.strength_profile(&solution.coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::estimate_period;
    use crate::signalgen::gen_tiled_ccps;
    use crate::transform::to_complex;

    #[test]
    fn dictionary_shapes() {
        let m = build_dictionary(100, 80).unwrap();
        assert_eq!(m.width(), 1966);
        assert_eq!(dictionary_width(80), 1966);

        let m = build_dictionary(5, 5).unwrap();
        let widths: Vec<usize> = m.spans().iter().map(|s| s.width).collect();
        assert_eq!(widths, vec![1, 1, 2, 2, 4]);
        let a = m.matrix_real().unwrap();
        assert!(a.column(0).iter().all(|&v| v == 1.0));

        let m = build_dictionary(20, 10).unwrap();
        let s7 = m.spans()[6];
        assert_eq!(s7.period, 7);
        assert!(m.penalty()[s7.range()].iter().all(|&d| d == 49.0));
        assert_eq!(m.column_periods()[s7.start], 7);
    }

    #[test]
    fn default_p_max_values() {
        assert_eq!(default_p_max(100), 80);
        assert_eq!(default_p_max(3), 2);
        assert_eq!(default_p_max(1), 1);
    }

    #[test]
    fn zero_signal() {
        let m = build_dictionary(20, 10).unwrap();
        let sol = m.solve(&vec![Complex64::new(0.0, 0.0); 20]).unwrap();
        assert!(sol.coefficients.iter().all(|v| v.norm() == 0.0));
        assert!(sol.profile.strengths.iter().all(|&s| s == 0.0));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn tiled_pair_sum_recovered() {
        let m = build_dictionary(20, 10).unwrap();
        let x = to_complex(&gen_tiled_ccps(5, 1, 20).unwrap());
        let sol = m.solve(&x).unwrap();
        assert!(sol.residual < 1e-8);
        let frac = sol.profile.get(5).unwrap() / sol.profile.total;
        assert!(frac > 0.9, "fraction at 5: {frac}");

        let m = build_dictionary(21, 12).unwrap();
        let x = to_complex(&gen_tiled_ccps(7, 1, 21).unwrap());
        let sol = dictionary_solve(&m, &x).unwrap();
        let prof = dictionary_strength_profile(&sol, &m);
        assert_eq!(prof, sol.profile);
        let (peak, _) = prof
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert_eq!(peak, 7);

        let x = to_complex(&gen_tiled_ccps(7, 1, 70).unwrap());
        let sol = build_dictionary(70, 20).unwrap().solve(&x).unwrap();
        assert_eq!(
            estimate_period(&sol.profile, ThresholdPolicy::default()).unwrap(),
            7
        );
    }

    #[test]
    fn infeasible_dictionary_fails() {
        let m = build_dictionary(30, 3).unwrap();
        assert!(!m.is_feasible());
        let x: Vec<Complex64> = (0..30).map(|i| Complex64::new((i * i % 7) as f64, 0.0)).collect();
        assert!(m.solve(&x).is_err());
    }

    #[test]
    fn bad_penalty_rejected() {
        assert!(build_dictionary_with(10, 5, DictionaryBasis::Ccpt, |_| 0.0).is_err());
        assert!(build_dictionary(10, 0).is_err());
    }

    #[test]
    fn scan_bounds() {
        let x = to_complex(&[1.0; 10]);
        assert!(range_scan(&x, 11, ThresholdPolicy::default()).is_err());
        assert!(range_scan(&x, 2, ThresholdPolicy::default()).is_err());
        let r = range_scan(&x, 10, ThresholdPolicy::default()).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].detected, vec![1]);
    }

    #[test]
    fn scan_parallel_matches_serial() {
        let x = to_complex(&gen_tiled_ccps(5, 1, 40).unwrap());
        let a = range_scan(&x, 20, ThresholdPolicy::default()).unwrap();
        let b = range_scan_parallel(&x, 20, ThresholdPolicy::default(), 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 21);
        for r in &a.records {
            assert!(r.profile.periods.iter().all(|p| r.length % p == 0));
        }
        // period 1 is visited at every length
        assert_eq!(a.subspace_visits[&1], 21);
        assert!(a.duplicated_subspace_count() > 0);
    }
}
