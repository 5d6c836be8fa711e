use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::lcm;

/// Energy per candidate period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodStrengthProfile {
    pub periods: Vec<usize>,
    pub strengths: Vec<f64>,
    /// Sum of all strengths; the denominator for [`Self::normalized`].
    pub total: f64,
}

impl PeriodStrengthProfile {
    pub fn new(periods: Vec<usize>, strengths: Vec<f64>) -> Self {
        assert_eq!(periods.len(), strengths.len());
        let total = strengths.iter().sum();
        Self {
            periods,
            strengths,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn get(&self, period: usize) -> Option<f64> {
        self.periods
            .iter()
            .position(|&p| p == period)
            .map(|i| self.strengths[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.periods.iter().copied().zip(self.strengths.iter().copied())
    }

    pub fn max_strength(&self) -> f64 {
        self.strengths.iter().copied().fold(0.0, f64::max)
    }

    /// Strengths as fractions of the total; all zeros when the total is zero.
    pub fn normalized(&self) -> Vec<f64> {
        if self.total > 0.0 {
            self.strengths.iter().map(|s| s / self.total).collect()
        } else {
            vec![0.0; self.strengths.len()]
        }
    }

    pub fn significant(&self, policy: ThresholdPolicy) -> Vec<usize> {
        let cut = policy.fraction * self.max_strength();
        self.iter()
            .filter(|&(_, s)| s > 0.0 && s >= cut)
            .map(|(p, _)| p)
            .collect()
    }
}

/// A period counts as significant when its strength is at least `fraction`
/// of the largest strength in the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub fraction: f64,
}

impl ThresholdPolicy {
    pub const DEFAULT_FRACTION: f64 = 0.05;

    pub fn relative(fraction: f64) -> Self {
        Self { fraction }
    }
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self::relative(Self::DEFAULT_FRACTION)
    }
}

/// Period estimate: the lcm of every significant period in the profile.
pub fn estimate_period(profile: &PeriodStrengthProfile, policy: ThresholdPolicy) -> Result<usize> {
    let sig = profile.significant(policy);
    if sig.is_empty() {
        return Err(Error::NoPeriodicContent);
    }
    lcm(&sig)
}
