//! Deterministic test signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ccps::ccps;
use crate::error::{Error, Result};
use crate::numtheory::gcd;

/// Recorded in signal metadata so seeded draws can be replayed.
pub const RNG_ALGORITHM: &str = "chacha20(seed_from_u64)+standard-normal";

pub const Y1_LEN: usize = 72;
pub const Y2_LEN: usize = 100;

/// `(frequency in Hz, phase)` of each exponential in `y1`, sampled at 360 Hz.
pub const Y1_COMPONENTS: [(usize, f64); 3] = [(10, PI / 5.0), (40, PI / 4.0), (50, PI / 3.0)];
pub const Y1_RATE: usize = 360;

/// Sum of three complex exponentials at 10, 40 and 50 Hz (360 Hz sampling),
/// period 36 over 72 samples. Phases enter inside the exponent.
pub fn gen_y1() -> Vec<Complex64> {
    let comps: Vec<Component> = Y1_COMPONENTS
        .iter()
        .map(|&(f, phase)| Component {
            frequency_index: f,
            base_period: Y1_RATE,
            phase,
            amplitude: 1.0,
        })
        .collect();
    custom_sum(&comps, Y1_LEN)
}

/// Period of `e^{j 2 pi f n / rate}`.
pub fn exponential_period(frequency_index: usize, base_period: usize) -> usize {
    base_period / gcd(frequency_index % base_period, base_period)
}

/// One period of 5 and one period of 7 standard-normal draws, each tiled to
/// 100 samples (the last repetition of the 7-periodic part truncates), summed.
pub fn gen_y2(seed: u64) -> Vec<Complex64> {
    let (x21, x22) = gen_y2_parts(seed);
    x21.iter()
        .zip(&x22)
        .map(|(a, b)| Complex64::new(a + b, 0.0))
        .collect()
}

/// The two hidden-period components of [`gen_y2`].
pub fn gen_y2_parts(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p5: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
    let p7: Vec<f64> = (0..7).map(|_| rng.sample(StandardNormal)).collect();
    (tile(&p5, Y2_LEN), tile(&p7, Y2_LEN))
}

pub fn tile(period: &[f64], len: usize) -> Vec<f64> {
    period.iter().copied().cycle().take(len).collect()
}

/// `c_{p,k}` repeated to `len` samples, truncating the final repetition.
pub fn gen_tiled_ccps(p: usize, k: usize, len: usize) -> Result<Vec<f64>> {
    Ok(ccps(p, k)?.tiled(len, 0))
}

/// `amplitude * e^{j (2 pi frequency_index n / base_period + phase)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub frequency_index: usize,
    pub base_period: usize,
    pub phase: f64,
    pub amplitude: f64,
}

fn custom_sum(components: &[Component], len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|n| {
            components
                .iter()
                .map(|c| {
                    let m = (c.frequency_index * n) % c.base_period;
                    let theta = 2.0 * PI * m as f64 / c.base_period as f64 + c.phase;
                    Complex64::from_polar(c.amplitude, theta)
                })
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalSpec {
    PresetY1,
    PresetY2 { seed: u64 },
    TiledCcps { period: usize, k: usize, len: usize },
    CustomSum { len: usize, components: Vec<Component> },
}

impl SignalSpec {
    pub fn len(&self) -> usize {
        match self {
            SignalSpec::PresetY1 => Y1_LEN,
            SignalSpec::PresetY2 { .. } => Y2_LEN,
            SignalSpec::TiledCcps { len, .. } | SignalSpec::CustomSum { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the generated samples are purely real.
    pub fn is_real(&self) -> bool {
        matches!(self, SignalSpec::PresetY2 { .. } | SignalSpec::TiledCcps { .. })
    }

    pub fn generate(&self) -> Result<Vec<Complex64>> {
        match self {
            SignalSpec::PresetY1 => Ok(gen_y1()),
            SignalSpec::PresetY2 { seed } => Ok(gen_y2(*seed)),
            SignalSpec::TiledCcps { period, k, len } => {
                if *len == 0 {
                    return Err(Error::UnsupportedLength(0));
                }
                Ok(crate::transform::to_complex(&gen_tiled_ccps(*period, *k, *len)?))
            }
            SignalSpec::CustomSum { len, components } => {
                if *len == 0 {
                    return Err(Error::UnsupportedLength(0));
                }
                if components.iter().any(|c| c.base_period == 0) {
                    return Err(Error::InvalidPeriodSet("component period must be positive"));
                }
                Ok(custom_sum(components, *len))
            }
        }
    }
}
