//! Inhomogeneous, time-dependent coin and the one-step evolution `T̂ₜ = Ŝ Ûₜ`.
//!
//! The coin at site `n` and time `t` acts on the chirality pair as
//!
//! ```text
//! [ cos θ   sin θ ]
//! [ sin θ  -cos θ ]
//! ```
//!
//! with angles chosen so that the position distribution after `t` steps from
//! the balanced origin state is exactly `Binomial(t, p)` on `{-t, -t+2, …, t}`.
//! Angles are evaluated from their closed form on every call.

use crate::error::{Result, WalkError};
use crate::lattice::{same_parity, WalkState};

/// Bias of the walk: probability `p` of a step to the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec {
    p: f64,
    sqrt_half_p: f64,
    sqrt_half_q: f64,
}

impl CoinSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(WalkError::InvalidBias(p));
        }
        Ok(Self {
            p,
            sqrt_half_p: (p / 2.0).sqrt(),
            sqrt_half_q: ((1.0 - p) / 2.0).sqrt(),
        })
    }

    /// The unbiased walk, `p = 1/2`.
    pub fn unbiased() -> Self {
        Self::new(0.5).expect("0.5 is a valid bias")
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Coin angles at `(n, t)`.
    ///
    /// Defined on the light cone `|n| ≤ t`, `n ≡ t (mod 2)`. The origin at
    /// `t = 0` uses the value that maps the balanced initial state onto
    /// `√p|+⟩|1⟩ + √(1−p)|−⟩|−1⟩`.
    pub fn angle(&self, site: i64, time: usize) -> Result<CoinAngles> {
        if site.unsigned_abs() > time as u64 || !same_parity(site, time) {
            return Err(WalkError::OffSupport { site, time });
        }
        Ok(self.angle_on_support(site, time))
    }

    #[inline]
    pub(crate) fn angle_on_support(&self, site: i64, time: usize) -> CoinAngles {
        if time == 0 {
            return CoinAngles {
                cos_theta: self.sqrt_half_p - self.sqrt_half_q,
                sin_theta: self.sqrt_half_q + self.sqrt_half_p,
            };
        }
        let ratio = site as f64 / time as f64;
        let right = (1.0 + ratio).sqrt();
        let left = (1.0 - ratio).sqrt();
        CoinAngles {
            cos_theta: self.sqrt_half_p * right - self.sqrt_half_q * left,
            sin_theta: self.sqrt_half_q * right + self.sqrt_half_p * left,
        }
    }
}

/// `(cos θ, sin θ)` of the coin at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinAngles {
    pub cos_theta: f64,
    pub sin_theta: f64,
}

impl CoinAngles {
    pub fn cos_2theta(&self) -> f64 {
        self.cos_theta * self.cos_theta - self.sin_theta * self.sin_theta
    }

    pub fn sin_2theta(&self) -> f64 {
        2.0 * self.sin_theta * self.cos_theta
    }
}

/// Free-function form of [`CoinSpec::angle`].
pub fn coin_angle(site: i64, time: usize, spec: &CoinSpec) -> Result<CoinAngles> {
    spec.angle(site, time)
}

/// Applies one coin-and-shift step to dense amplitude buffers.
///
/// Input covers sites `lowest..lowest+len`; output must have length `len + 2`
/// and covers `lowest-1..`. Output buffers are overwritten.
pub(crate) fn advance(
    spec: &CoinSpec,
    time: usize,
    lowest: i64,
    plus: &[f64],
    minus: &[f64],
    out_plus: &mut [f64],
    out_minus: &mut [f64],
) -> Result<()> {
    debug_assert_eq!(out_plus.len(), plus.len() + 2);
    out_plus.fill(0.0);
    out_minus.fill(0.0);
    // Only sites with the parity of `time` can carry amplitude.
    let first = if same_parity(lowest, time) { 0 } else { 1 };
    for i in (first..plus.len()).step_by(2) {
        let (a, b) = (plus[i], minus[i]);
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let site = lowest + i as i64;
        if site.unsigned_abs() > time as u64 {
            return Err(WalkError::OffSupport { site, time });
        }
        let CoinAngles {
            cos_theta: c,
            sin_theta: s,
        } = spec.angle_on_support(site, time);
        out_plus[i + 2] = c * a + s * b;
        out_minus[i] = s * a - c * b;
    }
    Ok(())
}

/// One step `|ψ⟩ₜ₊₁ = Ŝ Ûₜ |ψ⟩ₜ`.
///
/// Fails only if the state carries amplitude outside the light cone
/// `|n| ≤ t`, where the coin is undefined.
pub fn step(state: &WalkState, spec: &CoinSpec) -> Result<WalkState> {
    let len = state.plus_amplitudes().len() + 2;
    let mut plus = vec![0.0; len];
    let mut minus = vec![0.0; len];
    advance(
        spec,
        state.time(),
        state.lowest_site(),
        state.plus_amplitudes(),
        state.minus_amplitudes(),
        &mut plus,
        &mut minus,
    )?;
    Ok(WalkState::from_raw(
        state.time() + 1,
        state.lowest_site() - 1,
        plus,
        minus,
    ))
}

/// Applies `steps` evolution steps.
pub fn evolve(state: &WalkState, spec: &CoinSpec, steps: usize) -> Result<WalkState> {
    let mut current = state.clone();
    for _ in 0..steps {
        current = step(&current, spec)?;
    }
    Ok(current)
}

/// Evolves from the balanced origin state for `steps` steps.
pub fn evolve_from_origin(spec: &CoinSpec, steps: usize) -> WalkState {
    evolve(&WalkState::initial(), spec, steps).expect("evolution from the origin stays on the light cone")
}

/// Probability flux `J(n,t)` leaving site `n` during the next step.
///
/// Zero for sites off the light cone.
pub fn flux(state: &WalkState, spec: &CoinSpec, site: i64) -> f64 {
    let Ok(angles) = spec.angle(site, state.time()) else {
        return 0.0;
    };
    let a = state.plus_at(site);
    let b = state.minus_at(site);
    angles.cos_2theta() * (a * a - b * b) + 2.0 * angles.sin_2theta() * a * b
}

/// `Σₙ J(n,t)` over the stored range.
pub fn total_flux(state: &WalkState, spec: &CoinSpec) -> f64 {
    state
        .occupied_sites()
        .map(|(n, _, _)| flux(state, spec, n))
        .sum()
}

/// `⟨X⟩ₜ₊₁ − ⟨X⟩ₜ − Σₙ J(n,t)`; vanishes when probability is conserved.
pub fn ehrenfest_residual(state: &WalkState, spec: &CoinSpec) -> Result<f64> {
    let next = step(state, spec)?;
    Ok(next.pmf().mean() - state.pmf().mean() - total_flux(state, spec))
}
