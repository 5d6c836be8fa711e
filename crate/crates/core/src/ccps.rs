//! Complex conjugate pair sums and the two-column subspace bases built from them.
//!
//! For a period `N` and an index `k` in the coprime half set `A_N`, the pair sum
//! is the real sequence `2 M cos(2 pi k n / N)` with `M = 1/2` for `N` in
//! `{1, 2}` and `M = 1` otherwise. Its circulant matrix has rank 2 (rank 1 for
//! the degenerate periods), and the sequence together with one circular
//! downshift spans the conjugate-pair subspace `v_{N,k}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numtheory::{coprime_half_set, gcd};

/// One pair-sum sequence over a single period.
#[derive(Debug, Clone, PartialEq)]
pub struct CcpsSequence {
    pub period: usize,
    pub k: usize,
    pub scale: f64,
    pub samples: Vec<f64>,
}

/// `M` in the pair-sum definition.
pub fn scale_for(period: usize) -> f64 {
    if period <= 2 {
        0.5
    } else {
        1.0
    }
}

pub(crate) fn validate_index(period: usize, k: usize) -> Result<()> {
    if period == 0 {
        return Err(Error::UnsupportedLength(0));
    }
    let ok = if period <= 2 {
        k == 1
    } else {
        k >= 1 && k <= period / 2 && gcd(k, period) == 1
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSubspaceIndex { period, k })
    }
}

/// `cos(2 pi m / period)` with `m` folded onto `[0, period/2]` first, which keeps
/// even symmetry and periodicity bit-exact.
pub(crate) fn cos_turn(m: usize, period: usize) -> f64 {
    let m = m % period;
    let m = m.min(period - m);
    (2.0 * PI * m as f64 / period as f64).cos()
}

impl CcpsSequence {
    /// Sample at any integer index, wrapping modulo the period.
    pub fn at(&self, n: i64) -> f64 {
        self.samples[n.rem_euclid(self.period as i64) as usize]
    }

    /// `out[n] = c(n - shift)` for `n` in `0..len`.
    pub fn tiled(&self, len: usize, shift: usize) -> Vec<f64> {
        (0..len).map(|n| self.at(n as i64 - shift as i64)).collect()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Builds `c_{N,k}`. Fails unless `k` is in `A_N`.
pub fn ccps(period: usize, k: usize) -> Result<CcpsSequence> {
    validate_index(period, k)?;
    let scale = scale_for(period);
    let samples = (0..period)
        .map(|n| 2.0 * scale * cos_turn(k * n, period))
        .collect();
    Ok(CcpsSequence {
        period,
        k,
        scale,
        samples,
    })
}

/// `N x N` circulant whose column `j` is the generator downshifted by `j`.
#[derive(Debug, Clone)]
pub struct CirculantMatrix {
    pub generator: CcpsSequence,
    pub matrix: DMatrix<f64>,
}

impl CirculantMatrix {
    pub fn rank(&self) -> usize {
        linalg::numerical_rank(&self.matrix)
    }
}

pub fn circulant(period: usize, k: usize) -> Result<CirculantMatrix> {
    let generator = ccps(period, k)?;
    let matrix = DMatrix::from_fn(period, period, |i, j| {
        generator.at(i as i64 - j as i64)
    });
    Ok(CirculantMatrix { generator, matrix })
}

/// The `N x 2` matrix `B = [e^{+j 2 pi k n/N}, e^{-j 2 pi k n/N}]` with
/// `B B^H` equal to the circulant of `c_{N,k}`.
pub fn factorize(period: usize, k: usize) -> Result<DMatrix<Complex64>> {
    validate_index(period, k)?;
    if period < 3 {
        return Err(Error::FactorizationUnsupported(period));
    }
    Ok(DMatrix::from_fn(period, 2, |n, col| {
        let theta = 2.0 * PI * ((k * n) % period) as f64 / period as f64;
        let sign = if col == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(1.0, sign * theta)
    }))
}

/// Basis of `v_{N,k}`: the pair sum and (for `N >= 3`) its one-sample downshift.
#[derive(Debug, Clone)]
pub struct CcsBasis {
    pub period: usize,
    pub k: usize,
    pub columns: DMatrix<f64>,
}

impl CcsBasis {
    pub fn width(&self) -> usize {
        self.columns.ncols()
    }
}

/// Number of shifts used per pair sum: 2, or 1 for periods 1 and 2.
pub fn subspace_width(period: usize) -> usize {
    if period <= 2 {
        1
    } else {
        2
    }
}

pub fn ccs_basis(period: usize, k: usize) -> Result<CcsBasis> {
    let seq = ccps(period, k)?;
    let w = subspace_width(period);
    let columns = DMatrix::from_fn(period, w, |n, l| seq.at(n as i64 - l as i64));
    Ok(CcsBasis { period, k, columns })
}

/// Direct-summation inner product of two shifted pair sums over
/// `lcm(N1, N2)` samples.
pub fn ccps_inner_product(
    (n1, k1, l1): (usize, usize, i64),
    (n2, k2, l2): (usize, usize, i64),
) -> Result<f64> {
    let a = ccps(n1, k1)?;
    let b = ccps(n2, k2)?;
    let len = crate::numtheory::lcm(&[n1, n2])?;
    Ok((0..len as i64)
        .map(|n| a.at(n - l1) * b.at(n - l2))
        .sum())
}

/// All `(N, k)` pairs with `N` in `periods`; handy for sweeping tests.
pub fn index_pairs(periods: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
    periods
        .into_iter()
        .flat_map(|p| coprime_half_set(p).residues.into_iter().map(move |k| (p, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sequences() {
        assert_eq!(ccps(1, 1).unwrap().samples, vec![1.0]);
        assert_eq!(ccps(2, 1).unwrap().samples, vec![1.0, -1.0]);
        let c4 = ccps(4, 1).unwrap().samples;
        let expect = [2.0, 0.0, -2.0, 0.0];
        for (a, b) in c4.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(ccps(5, 1).unwrap().samples[0], 2.0);
    }

    #[test]
    fn rejects_bad_index() {
        assert_eq!(
            ccps(6, 2),
            Err(Error::InvalidSubspaceIndex { period: 6, k: 2 })
        );
        assert!(ccps(5, 3).is_err());
        assert!(ccps(5, 0).is_err());
        assert!(ccps(2, 2).is_err());
        assert!(ccps(0, 1).is_err());
    }

    #[test]
    fn even_symmetry_and_periodicity_exact() {
        for (p, k) in index_pairs(1..=60) {
            let c = ccps(p, k).unwrap();
            for n in 0..p {
                assert_eq!(c.samples[n], c.samples[(p - n) % p]);
            }
            let tiled = c.tiled(3 * p, 0);
            for (n, v) in tiled.iter().enumerate() {
                assert_eq!(*v, 2.0 * c.scale * cos_turn(k * n, p));
            }
        }
    }

    #[test]
    fn energy_matches_closed_form() {
        for (p, k) in index_pairs(1..=40) {
            let c = ccps(p, k).unwrap();
            // for p <= 2 the "pair" is one exponential counted twice
            let expect = if p <= 2 {
                p as f64
            } else {
                2.0 * p as f64 * c.scale * c.scale
            };
            assert!((c.energy() - expect).abs() < 1e-10, "({p},{k})");
        }
    }

    #[test]
    fn circulant_layout() {
        let d = circulant(5, 1).unwrap();
        let c = &d.generator;
        for i in 0..5 {
            assert_eq!(d.matrix[(i, 0)], c.samples[i]);
            assert_eq!(d.matrix[(i, 1)], c.samples[(i + 4) % 5]);
        }
        let d2 = circulant(2, 1).unwrap();
        assert_eq!(
            d2.matrix,
            DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
        );
        assert_eq!(d2.rank(), 1);
        assert_eq!(circulant(7, 2).unwrap().rank(), 2);
        assert_eq!(circulant(1, 1).unwrap().rank(), 1);
    }

    #[test]
    fn factorization_reconstructs_circulant() {
        let b = factorize(5, 1).unwrap();
        let d = circulant(5, 1).unwrap().matrix;
        let bbh = &b * b.adjoint();
        for i in 0..5 {
            for j in 0..5 {
                assert!((bbh[(i, j)].re - d[(i, j)]).abs() < 1e-12);
                assert!(bbh[(i, j)].im.abs() < 1e-12);
            }
        }

        let b = factorize(5, 2).unwrap();
        let ip = b.column(0).dotc(&b.column(1));
        assert!(ip.norm() < 1e-12);

        let b = factorize(36, 5).unwrap();
        let gram = b.adjoint() * &b;
        assert!((gram[(0, 0)].re - 36.0).abs() < 1e-10);
        assert!((gram[(1, 1)].re - 36.0).abs() < 1e-10);
        assert!(gram[(0, 1)].norm() < 1e-10);

        assert_eq!(factorize(2, 1), Err(Error::FactorizationUnsupported(2)));
    }

    #[test]
    fn ccs_basis_shapes() {
        let b = ccs_basis(5, 1).unwrap();
        let c = ccps(5, 1).unwrap();
        assert_eq!(b.width(), 2);
        for n in 0..5 {
            assert_eq!(b.columns[(n, 0)], c.samples[n]);
            assert_eq!(b.columns[(n, 1)], c.samples[(n + 4) % 5]);
        }
        let b1 = ccs_basis(1, 1).unwrap();
        assert_eq!(b1.columns, DMatrix::from_element(1, 1, 1.0));

        let b9 = ccs_basis(9, 2).unwrap();
        let g = b9.columns.transpose() * &b9.columns;
        let off = 18.0 * (4.0 * PI / 9.0).cos();
        assert!((g[(0, 0)] - 18.0).abs() < 1e-12);
        assert!((g[(1, 1)] - 18.0).abs() < 1e-12);
        assert!((g[(0, 1)] - off).abs() < 1e-12);
        assert!((g[(1, 0)] - off).abs() < 1e-12);
    }

    #[test]
    fn basis_spans_circulant_column_space() {
        for (p, k) in index_pairs(1..=24) {
            let d = circulant(p, k).unwrap().matrix;
            let b = ccs_basis(p, k).unwrap().columns;
            let mut joined = DMatrix::zeros(p, p + b.ncols());
            joined.columns_mut(0, p).copy_from(&d);
            joined.columns_mut(p, b.ncols()).copy_from(&b);
            assert_eq!(linalg::numerical_rank(&joined), b.ncols(), "({p},{k})");
            assert_eq!(linalg::numerical_rank(&b), b.ncols());
        }
    }

    #[test]
    fn inner_product_examples() {
        assert!(ccps_inner_product((5, 1, 0), (5, 2, 0)).unwrap().abs() < 1e-12);
        assert!((ccps_inner_product((5, 1, 0), (5, 1, 0)).unwrap() - 10.0).abs() < 1e-12);
        let v = ccps_inner_product((5, 1, 1), (5, 1, 0)).unwrap();
        assert!((v - 10.0 * (2.0 * PI / 5.0).cos()).abs() < 1e-12);
        assert!((v - 3.090_169_943_749_474).abs() < 1e-12);
    }
}
