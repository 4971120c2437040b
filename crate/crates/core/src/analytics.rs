//! Closed forms for the walk and the coin–position entanglement entropy.
//!
//! Factorial ratios are evaluated in log space and exponentiated last, so
//! everything here stays finite for `t` in the tens of thousands.

use statrs::function::factorial::ln_factorial;

use crate::error::{Result, WalkError};
use crate::lattice::{same_parity, WalkState};

/// `e · ln(x)` with the convention `0 · ln 0 = 0`.
fn xlogy(e: f64, x: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

fn on_light_cone(site: i64, time: usize) -> bool {
    site.unsigned_abs() <= time as u64 && same_parity(site, time)
}

/// Binomial probability of being at `site` after `time` steps with
/// right-step probability `p`; zero off the light cone.
///
/// `p` must lie in `[0, 1]`.
pub fn binomial_pmf(site: i64, time: usize, p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if !on_light_cone(site, time) {
        return 0.0;
    }
    let up = ((time as i64 + site) / 2) as u64;
    let down = time as u64 - up;
    let log_choose = ln_factorial(time as u64) - ln_factorial(up) - ln_factorial(down);
    (log_choose + xlogy(up as f64, p) + xlogy(down as f64, 1.0 - p)).exp()
}

/// Closed-form `(ψ₊(n,t), ψ₋(n,t))` of the walk started from the balanced
/// origin state, for `t ≥ 1` and on-support `n`.
///
/// Both components are nonnegative. On the edges `ψ₊(−t,t) = ψ₋(t,t) = 0`,
/// `ψ₊(t,t) = p^{t/2}` and `ψ₋(−t,t) = (1−p)^{t/2}`.
pub fn closed_form_amplitudes(site: i64, time: usize, p: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::InvalidBias(p));
    }
    if time == 0 || !on_light_cone(site, time) {
        return Err(WalkError::OffSupport { site, time });
    }
    let t = time as i64;
    let ln_head = ln_factorial(time as u64 - 1);
    let powers = xlogy((t + site) as f64 / 4.0, p) + xlogy((t - site) as f64 / 4.0, 1.0 - p);

    let plus = if site == -t {
        0.0
    } else {
        let ln_ratio = ln_head
            - ln_factorial(((t + site - 2) / 2) as u64)
            - ln_factorial(((t - site) / 2) as u64);
        (0.5 * ln_ratio + powers).exp()
    };
    let minus = if site == t {
        0.0
    } else {
        let ln_ratio = ln_head
            - ln_factorial(((t + site) / 2) as u64)
            - ln_factorial(((t - site - 2) / 2) as u64);
        (0.5 * ln_ratio + powers).exp()
    };
    Ok((plus, minus))
}

/// Drift and variance per step of the continuum limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussParams {
    pub mu: f64,
    pub sigma2: f64,
}

impl GaussParams {
    pub fn from_bias(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(WalkError::InvalidBias(p));
        }
        let sigma2 = 4.0 * p * (1.0 - p);
        if sigma2 == 0.0 {
            return Err(WalkError::DegenerateGaussian(p));
        }
        Ok(Self {
            mu: 2.0 * p - 1.0,
            sigma2,
        })
    }
}

/// Gaussian approximation to the binomial PMF at on-parity sites.
///
/// Carries an extra factor 2 because only every other site is occupied.
pub fn gaussian_approx(site: i64, time: usize, p: f64) -> Result<f64> {
    if time == 0 {
        return Err(WalkError::ZeroTime);
    }
    let GaussParams { mu, sigma2 } = GaussParams::from_bias(p)?;
    let spread = sigma2 * time as f64;
    let offset = site as f64 - mu * time as f64;
    Ok(2.0 / (2.0 * std::f64::consts::PI * spread).sqrt() * (-offset * offset / (2.0 * spread)).exp())
}

/// Coin-space reduced density matrix `[[P₊, Q], [Q, P₋]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub p_plus: f64,
    pub p_minus: f64,
    pub q_offdiag: f64,
}

const DENSITY_TOLERANCE: f64 = 1e-12;

impl ReducedDensity {
    pub fn new(p_plus: f64, p_minus: f64, q_offdiag: f64) -> Result<Self> {
        if ![p_plus, p_minus, q_offdiag].iter().all(|v| v.is_finite()) {
            return Err(WalkError::InvalidDensity("non-finite entry".into()));
        }
        if p_plus < -DENSITY_TOLERANCE || p_minus < -DENSITY_TOLERANCE {
            return Err(WalkError::InvalidDensity(format!(
                "negative populations ({p_plus}, {p_minus})"
            )));
        }
        if (p_plus + p_minus - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(WalkError::InvalidDensity(format!(
                "trace is {}",
                p_plus + p_minus
            )));
        }
        let bound = (p_plus.max(0.0) * p_minus.max(0.0)).sqrt();
        if q_offdiag.abs() > bound + DENSITY_TOLERANCE {
            return Err(WalkError::InvalidDensity(format!(
                "|Q| = {} exceeds sqrt(P+ P-) = {bound}",
                q_offdiag.abs()
            )));
        }
        Ok(Self {
            p_plus,
            p_minus,
            q_offdiag,
        })
    }

    /// Partial trace of `|ψ⟩⟨ψ|` over positions.
    pub fn from_state(state: &WalkState) -> Self {
        let (mut p_plus, mut p_minus, mut q) = (0.0, 0.0, 0.0);
        for (_, a, b) in state.sites() {
            p_plus += a * a;
            p_minus += b * b;
            q += a * b;
        }
        Self {
            p_plus,
            p_minus,
            q_offdiag: q,
        }
    }

    /// Eigenvalues `(λ₊, λ₋)`, largest first.
    pub fn eigenvalues(&self) -> Result<(f64, f64)> {
        // 1/4 − P₊P₋ + Q² written as a sum of squares, which is exact to
        // rounding when P₊ + P₋ = 1 and never negative.
        let half_gap = 0.5 * (self.p_plus - self.p_minus);
        let root = (half_gap * half_gap + self.q_offdiag * self.q_offdiag).sqrt();
        let largest = 0.5 + root;
        let det = self.p_plus * self.p_minus - self.q_offdiag * self.q_offdiag;
        if det < -DENSITY_TOLERANCE {
            return Err(WalkError::InvalidDensity(format!(
                "negative eigenvalue (determinant {det})"
            )));
        }
        // Near purity the difference 1/2 − root cancels; det/λ₊ does not.
        let smallest = if root < 0.25 {
            0.5 - root
        } else {
            det.max(0.0) / largest
        };
        Ok((largest, smallest))
    }
}

fn entropy_term(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else {
        -lambda * lambda.log2()
    }
}

/// Von Neumann entropy (bits) of the coin-space reduced density matrix.
pub fn entanglement_entropy(rd: &ReducedDensity) -> Result<f64> {
    let (hi, lo) = rd.eigenvalues()?;
    Ok(entropy_term(hi) + entropy_term(lo))
}

/// Leading large-`t` behaviour of the entropy, `log₂(4t) / 4t`.
pub fn entropy_asymptote(time: usize) -> f64 {
    let x = 4.0 * time as f64;
    x.log2() / x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_cases() {
        assert!((binomial_pmf(0, 2, 0.5) - 0.5).abs() < 1e-15);
        assert!((binomial_pmf(1, 3, 0.75) - 0.421875).abs() < 1e-15);
        assert!((binomial_pmf(7, 7, 0.3) - 0.3_f64.powi(7)).abs() < 1e-17);
        assert_eq!(binomial_pmf(1, 2, 0.5), 0.0);
        assert_eq!(binomial_pmf(5, 3, 0.5), 0.0);
        assert_eq!(binomial_pmf(0, 0, 0.2), 1.0);
        assert_eq!(binomial_pmf(3, 3, 1.0), 1.0);
        assert_eq!(binomial_pmf(1, 3, 1.0), 0.0);
    }

    #[test]
    fn binomial_is_finite_for_long_walks() {
        let total: f64 = (-10_000..=10_000)
            .step_by(2)
            .map(|n| binomial_pmf(n, 10_000, 0.6))
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_first_step() {
        let (a, b) = closed_form_amplitudes(1, 1, 0.75).unwrap();
        assert!((a - 0.75_f64.sqrt()).abs() < 1e-15);
        assert_eq!(b, 0.0);
        let (a, b) = closed_form_amplitudes(-1, 1, 0.75).unwrap();
        assert_eq!(a, 0.0);
        assert!((b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_off_support() {
        assert!(closed_form_amplitudes(0, 0, 0.5).is_err());
        assert!(closed_form_amplitudes(1, 2, 0.5).is_err());
        assert!(closed_form_amplitudes(4, 2, 0.5).is_err());
        assert!(closed_form_amplitudes(0, 2, 1.2).is_err());
    }

    #[test]
    fn gaussian_peak_and_symmetry() {
        let g = GaussParams::from_bias(0.75).unwrap();
        assert_eq!(g.mu, 0.5);
        assert_eq!(g.sigma2, 0.75);
        let peak = gaussian_approx(50, 100, 0.75).unwrap();
        assert!((peak - 2.0 / (2.0 * std::f64::consts::PI * 75.0).sqrt()).abs() < 1e-15);
        for n in 0..20 {
            assert_eq!(
                gaussian_approx(n, 40, 0.5).unwrap(),
                gaussian_approx(-n, 40, 0.5).unwrap()
            );
        }
        assert_eq!(gaussian_approx(0, 10, 0.0), Err(WalkError::DegenerateGaussian(0.0)));
        assert_eq!(gaussian_approx(0, 10, 1.0), Err(WalkError::DegenerateGaussian(1.0)));
        assert_eq!(gaussian_approx(0, 0, 0.5), Err(WalkError::ZeroTime));
    }

    #[test]
    fn entropy_of_diagonal_densities() {
        let rd = ReducedDensity::new(0.5, 0.5, 0.0).unwrap();
        assert_eq!(entanglement_entropy(&rd).unwrap(), 1.0);
        let rd = ReducedDensity::new(0.75, 0.25, 0.0).unwrap();
        let expected = -(0.75_f64 * 0.75_f64.log2() + 0.25 * 0.25_f64.log2());
        assert!((entanglement_entropy(&rd).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn pure_coin_state_has_zero_entropy() {
        let q = (0.3_f64 * 0.7).sqrt();
        let rd = ReducedDensity::new(0.3, 0.7, q).unwrap();
        assert!(entanglement_entropy(&rd).unwrap().abs() < 1e-12);
        let rd = ReducedDensity::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(entanglement_entropy(&rd).unwrap(), 0.0);
    }

    #[test]
    fn invalid_densities_are_rejected() {
        assert!(ReducedDensity::new(0.6, 0.6, 0.0).is_err());
        assert!(ReducedDensity::new(0.5, 0.5, 0.6).is_err());
        assert!(ReducedDensity::new(1.1, -0.1, 0.0).is_err());
        let forged = ReducedDensity {
            p_plus: 0.5,
            p_minus: 0.5,
            q_offdiag: 0.7,
        };
        assert!(matches!(
            entanglement_entropy(&forged),
            Err(WalkError::InvalidDensity(_))
        ));
    }

    #[test]
    fn asymptote_values() {
        assert_eq!(entropy_asymptote(1), 0.5);
        assert!((entropy_asymptote(1000) - 4000_f64.log2() / 4000.0).abs() < 1e-18);
        assert!((entropy_asymptote(1000) - 0.0029914).abs() < 1e-7);
    }
}
