//! Two-component real wave function on the integer line.
//!
//! Amplitudes are stored densely: array index `i` holds site `n = lowest + i`.
//! States produced by evolution from the origin have `lowest = -t`, so the
//! index convention reduces to `n = i - t`. Sites whose parity differs from
//! `t` are stored as exact zeros.

use crate::error::{Result, WalkError};

/// Tolerance used when validating externally supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    time: usize,
    lowest: i64,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl WalkState {
    /// Walker at the origin with no preferred chirality: `ψ±(0,0) = 1/√2`.
    pub fn initial() -> Self {
        Self::localized(0, 0)
    }

    /// Walker pinned at `site` at time `time` with chirality `(|+⟩ + |−⟩)/√2`.
    ///
    /// This is the state left behind by a position measurement followed by a
    /// chirality reset.
    pub fn localized(site: i64, time: usize) -> Self {
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            time,
            lowest: site,
            plus: vec![amp],
            minus: vec![amp],
        }
    }

    /// Builds a state from dense amplitude arrays starting at site `lowest`.
    ///
    /// Rejects mismatched lengths, non-finite values, amplitude on sites whose
    /// parity differs from `time`, and norms further than [`NORM_TOLERANCE`]
    /// from one.
    pub fn from_amplitudes(
        time: usize,
        lowest: i64,
        plus: Vec<f64>,
        minus: Vec<f64>,
    ) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(WalkError::InvalidAmplitudes(format!(
                "component lengths differ ({} vs {})",
                plus.len(),
                minus.len()
            )));
        }
        if plus.is_empty() {
            return Err(WalkError::InvalidAmplitudes("no sites".into()));
        }
        for (i, (&a, &b)) in plus.iter().zip(&minus).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(WalkError::InvalidAmplitudes(format!(
                    "non-finite amplitude at index {i}"
                )));
            }
            let site = lowest + i as i64;
            if !same_parity(site, time) && (a != 0.0 || b != 0.0) {
                return Err(WalkError::InvalidAmplitudes(format!(
                    "site {site} has the wrong parity for t = {time}"
                )));
            }
        }
        let state = Self::from_raw(time, lowest, plus, minus);
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::InvalidAmplitudes(format!(
                "squared norm is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(time: usize, lowest: i64, plus: Vec<f64>, minus: Vec<f64>) -> Self {
        debug_assert_eq!(plus.len(), minus.len());
        Self {
            time,
            lowest,
            plus,
            minus,
        }
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Site stored at index 0.
    pub fn lowest_site(&self) -> i64 {
        self.lowest
    }

    /// Site stored at the last index.
    pub fn highest_site(&self) -> i64 {
        self.lowest + self.plus.len() as i64 - 1
    }

    pub fn plus_amplitudes(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus_amplitudes(&self) -> &[f64] {
        &self.minus
    }

    fn index_of(&self, site: i64) -> Option<usize> {
        let offset = site - self.lowest;
        (offset >= 0 && (offset as usize) < self.plus.len()).then_some(offset as usize)
    }

    /// `ψ₊(n, t)`, zero outside the stored range.
    pub fn plus_at(&self, site: i64) -> f64 {
        self.index_of(site).map_or(0.0, |i| self.plus[i])
    }

    /// `ψ₋(n, t)`, zero outside the stored range.
    pub fn minus_at(&self, site: i64) -> f64 {
        self.index_of(site).map_or(0.0, |i| self.minus[i])
    }

    /// Iterates `(site, ψ₊, ψ₋)` over the stored range, parity zeros included.
    pub fn sites(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        self.plus
            .iter()
            .zip(&self.minus)
            .enumerate()
            .map(move |(i, (&a, &b))| (self.lowest + i as i64, a, b))
    }

    /// Iterates only the sites whose parity matches `t`.
    pub fn occupied_sites(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let t = self.time;
        self.sites().filter(move |&(n, _, _)| same_parity(n, t))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(a, b)| a * a + b * b)
            .sum()
    }

    /// `⟨self|other⟩`; both states must live at the same time step.
    pub fn inner_product(&self, other: &WalkState) -> Result<f64> {
        if self.time != other.time {
            return Err(WalkError::TimeMismatch(self.time, other.time));
        }
        let lo = self.lowest.max(other.lowest);
        let hi = self.highest_site().min(other.highest_site());
        Ok((lo..=hi)
            .map(|n| {
                self.plus_at(n) * other.plus_at(n) + self.minus_at(n) * other.minus_at(n)
            })
            .sum())
    }

    /// Position distribution `ρ(n,t) = ψ₊² + ψ₋²`.
    pub fn pmf(&self) -> Pmf {
        let mass = self
            .plus
            .iter()
            .zip(&self.minus)
            .map(|(a, b)| a * a + b * b)
            .collect();
        Pmf {
            time: self.time,
            lowest: self.lowest,
            mass,
        }
    }

    /// Largest absolute amplitude difference over the union of both ranges.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        let lo = self.lowest.min(other.lowest);
        let hi = self.highest_site().max(other.highest_site());
        (lo..=hi)
            .map(|n| {
                (self.plus_at(n) - other.plus_at(n))
                    .abs()
                    .max((self.minus_at(n) - other.minus_at(n)).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Probability mass over sites at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    time: usize,
    lowest: i64,
    mass: Vec<f64>,
}

impl Pmf {
    /// Builds a PMF from dense masses starting at site `lowest`.
    pub fn from_masses(time: usize, lowest: i64, mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(WalkError::EmptyPmf);
        }
        if let Some(bad) = mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(WalkError::InvalidAmplitudes(format!(
                "probability mass {bad} is negative or non-finite"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::InvalidAmplitudes(format!(
                "probability masses sum to {total}"
            )));
        }
        Ok(Self {
            time,
            lowest,
            mass,
        })
    }

    /// Normalized histogram of integer counts.
    pub fn from_counts(time: usize, lowest: i64, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(WalkError::EmptyPmf);
        }
        let mass = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Self {
            time,
            lowest,
            mass,
        })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn lowest_site(&self) -> i64 {
        self.lowest
    }

    pub fn highest_site(&self) -> i64 {
        self.lowest + self.mass.len() as i64 - 1
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass_at(&self, site: i64) -> f64 {
        let offset = site - self.lowest;
        if offset < 0 || offset as usize >= self.mass.len() {
            0.0
        } else {
            self.mass[offset as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, &m)| (self.lowest + i as i64, m))
    }

    /// Sites whose parity matches `t`, with their masses.
    pub fn occupied(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.time;
        self.iter().filter(move |&(n, _)| same_parity(n, t))
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Raw moment `Σ nᵏ ρ(n)`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(WalkError::InvalidMomentOrder);
        }
        Ok(self.iter().map(|(n, m)| (n as f64).powi(k as i32) * m).sum())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, m)| n as f64 * m).sum()
    }

    /// Central second moment.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.iter()
            .map(|(n, m)| {
                let d = n as f64 - mean;
                d * d * m
            })
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// `true` when `site ≡ time (mod 2)`.
pub fn same_parity(site: i64, time: usize) -> bool {
    (site - time as i64).rem_euclid(2) == 0
}
