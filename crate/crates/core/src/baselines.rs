//! Comparison baselines: the Ramanujan periodic transform, a direct DFT, and
//! analytic multiplication counts for each method.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{check_len, divisor_set, gcd, period_partition, totient};
use crate::profile::PeriodStrengthProfile;
use crate::transform::{BasisBlock, BasisKind, ColumnLabel, NestedPeriodicMatrix};

/// `c_q(n) = sum over k coprime to q of cos(2 pi k n / q)`, one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamanujanSum {
    pub period: usize,
    pub samples: Vec<i64>,
}

impl RamanujanSum {
    pub fn at(&self, n: i64) -> i64 {
        self.samples[n.rem_euclid(self.period as i64) as usize]
    }
}

/// Direct exponential summation, rounded to the nearest integer.
pub fn ramanujan_sum(q: usize) -> Result<RamanujanSum> {
    if q == 0 {
        return Err(Error::UnsupportedLength(0));
    }
    let mut samples = Vec::with_capacity(q);
    for n in 0..q {
        let s: Complex64 = (1..=q)
            .filter(|&k| gcd(k, q) == 1)
            .map(|k| {
                let m = (k * n) % q;
                Complex64::from_polar(1.0, 2.0 * PI * m as f64 / q as f64)
            })
            .sum();
        let r = s.re.round();
        if s.im.abs() >= 1e-9 || (s.re - r).abs() >= 1e-6 {
            return Err(Error::Numerical(format!(
                "Ramanujan sum c_{q}({n}) = {s} is not an integer"
            )));
        }
        samples.push(r as i64);
    }
    Ok(RamanujanSum { period: q, samples })
}

pub(crate) fn rpt_columns(len: usize, period: usize) -> Result<BasisBlock> {
    let rs = ramanujan_sum(period)?;
    let width = totient(period);
    let matrix = nalgebra::DMatrix::from_fn(len, width, |n, l| rs.at(n as i64 - l as i64) as f64);
    Ok(BasisBlock {
        len,
        period,
        matrix,
        labels: (0..width).map(|l| ColumnLabel::rpt(period, l)).collect(),
    })
}

/// RPT synthesis matrix: per divisor `p`, the tiled Ramanujan sum `c_p`
/// downshifted by `0..phi(p)`.
pub fn build_rpt(n: usize) -> Result<NestedPeriodicMatrix> {
    check_len(n)?;
    let blocks = divisor_set(n)
        .iter()
        .map(|p| rpt_columns(n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(NestedPeriodicMatrix::from_blocks(n, BasisKind::Rpt, blocks))
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect()
}

/// `X[k] = sum_n x[n] e^{-j 2 pi k n / N}`, evaluated directly in O(N^2).
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let w = twiddles(n, -1.0);
    (0..n)
        .map(|k| x.iter().enumerate().map(|(i, v)| v * w[(k * i) % n]).sum())
        .collect()
}

pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let w = twiddles(n, 1.0);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|i| {
            spectrum
                .iter()
                .enumerate()
                .map(|(k, v)| v * w[(k * i) % n])
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Strength for divisor `d` is the energy of the bins whose exponential has
/// exact period `d`.
pub fn dft_divisor_strengths(spectrum: &[Complex64]) -> PeriodStrengthProfile {
    let (periods, strengths) = period_partition(spectrum.len())
        .into_iter()
        .map(|(d, bins)| (d, bins.iter().map(|&k| spectrum[k].norm_sqr()).sum::<f64>()))
        .unzip();
    PeriodStrengthProfile::new(periods, strengths)
}

/// Methods with a known multiplication count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "dft")]
    Dft,
    #[serde(rename = "rpt")]
    Rpt,
    #[serde(rename = "ccpt")]
    Ccpt,
    #[serde(rename = "scan-ccpt")]
    ScanCcpt,
    #[serde(rename = "scan-dft")]
    ScanDft,
    #[serde(rename = "scan-rpt")]
    ScanRpt,
    #[serde(rename = "dict-ccpt")]
    DictCcpt,
    #[serde(rename = "dict-farey")]
    DictFarey,
    #[serde(rename = "dict-rpt")]
    DictRpt,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Dft,
        Method::Rpt,
        Method::Ccpt,
        Method::ScanCcpt,
        Method::ScanDft,
        Method::ScanRpt,
        Method::DictCcpt,
        Method::DictFarey,
        Method::DictRpt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dft => "dft",
            Method::Rpt => "rpt",
            Method::Ccpt => "ccpt",
            Method::ScanCcpt => "scan-ccpt",
            Method::ScanDft => "scan-dft",
            Method::ScanRpt => "scan-rpt",
            Method::DictCcpt => "dict-ccpt",
            Method::DictFarey => "dict-farey",
            Method::DictRpt => "dict-rpt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicationUnit {
    Real,
    Complex,
}

/// A count is either exact or a multiple of `L`, the (unspecified) number of
/// real multiplications the conjugate-pair dictionary solve needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicationCount {
    Exact(u64),
    MultipleOfL(u64),
}

impl fmt::Display for MultiplicationCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplicationCount::Exact(v) => write!(f, "{v}"),
            MultiplicationCount::MultipleOfL(1) => f.write_str("L"),
            MultiplicationCount::MultipleOfL(m) => write!(f, "{m}L"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub method: Method,
    pub count: MultiplicationCount,
    pub unit: MultiplicationUnit,
    pub formula: String,
}

/// `2 ((N^3 - N1^3)/3 + (N^2 + N1^2)/2 + (N - N1)/6)`, evaluated exactly.
pub fn scan_multiplications(n: u64, n1: u64) -> Result<u64> {
    if n1 > n {
        return Err(Error::InvalidRange(format!("N1 = {n1} exceeds N = {n}")));
    }
    let cube = |v: u64| v.checked_pow(3).ok_or(Error::Overflow("scan count"));
    let num = 2 * (cube(n)? - cube(n1)?) + 3 * (n * n + n1 * n1) + (n - n1);
    debug_assert_eq!(num % 3, 0);
    Ok(num / 3)
}

pub fn complexity_estimate(method: Method, n: usize, n1: Option<usize>) -> Result<ComplexityReport> {
    use MultiplicationCount::*;
    use MultiplicationUnit::*;
    let nn = n as u64;
    let square = nn.checked_mul(nn).ok_or(Error::Overflow("N^2"))?;
    let scan = || {
        let n1 = n1.ok_or_else(|| Error::InvalidRange("scan estimate needs N1".into()))?;
        scan_multiplications(nn, n1 as u64)
    };
    let (count, unit, formula) = match method {
        Method::Dft => (Exact(4 * square), Real, "4N^2"),
        Method::Rpt => (Exact(2 * square), Real, "2N^2"),
        Method::Ccpt => (Exact(2 * square), Real, "2N^2"),
        Method::ScanCcpt => (Exact(scan()?), Real, "scan"),
        Method::ScanRpt => (Exact(scan()?), Real, "scan"),
        Method::ScanDft => (Exact(scan()?), Complex, "scan"),
        Method::DictCcpt => (MultipleOfL(1), Real, "L"),
        Method::DictFarey => (MultipleOfL(2), Real, "2L"),
        Method::DictRpt => (MultipleOfL(1), Real, "L"),
    };
    Ok(ComplexityReport {
        method,
        count,
        unit,
        formula: formula.to_string(),
    })
}
