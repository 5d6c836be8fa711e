//! Integer arithmetic behind every basis construction.
//!
//! Lengths and periods are `usize`; everything here is exact. The supported
//! length range is capped at [`MAX_LEN`] so that totient sums and lcms of
//! divisor sets stay well inside 64 bits.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest signal length accepted by the basis builders.
pub const MAX_LEN: usize = 1 << 16;

pub(crate) fn check_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::UnsupportedLength(n));
    }
    Ok(())
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm(values: &[usize]) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::InvalidPeriodSet("empty"));
    }
    values.iter().try_fold(1usize, |acc, &v| {
        if v == 0 {
            return Err(Error::InvalidPeriodSet("periods must be positive"));
        }
        (acc / gcd(acc, v))
            .checked_mul(v)
            .ok_or(Error::Overflow("lcm"))
    })
}

/// Prime factors of `n` with multiplicity, by trial division.
pub fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient. `totient(0)` is 0.
pub fn totient(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Positive divisors of `n` in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSet {
    pub n: usize,
    pub divisors: Vec<usize>,
}

impl DivisorSet {
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.divisors.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn contains(&self, d: usize) -> bool {
        self.divisors.binary_search(&d).is_ok()
    }
}

pub fn divisor_set(n: usize) -> DivisorSet {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    DivisorSet { n, divisors: small }
}

/// `{k : 1 <= k <= n/2, gcd(k, n) = 1}` for `n >= 3`, and `{1}` for `n` in `{1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeHalfSet {
    pub n: usize,
    pub residues: Vec<usize>,
}

impl CoprimeHalfSet {
    pub fn contains(&self, k: usize) -> bool {
        self.residues.binary_search(&k).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.residues.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

pub fn coprime_half_set(n: usize) -> CoprimeHalfSet {
    let residues = if n <= 2 {
        vec![1]
    } else {
        (1..=n / 2).filter(|&a| gcd(a, n) == 1).collect()
    };
    CoprimeHalfSet { n, residues }
}

/// Groups DFT bin indices `0..n` by the exact period of their exponential:
/// bin `k` lands in the cell for `d = n / gcd(k, n)`.
pub fn period_partition(n: usize) -> BTreeMap<usize, Vec<usize>> {
    let mut cells: BTreeMap<usize, Vec<usize>> =
        divisor_set(n).iter().map(|d| (d, Vec::new())).collect();
    for k in 0..n {
        // gcd(0, n) = n, so bin 0 has period 1
        let d = n / gcd(k, n);
        cells.entry(d).or_default().push(k);
    }
    cells
}
