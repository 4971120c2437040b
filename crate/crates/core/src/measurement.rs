//! Projective measurements of chirality and position, and the unitary
//! protocol that undoes a chirality measurement whose outcome is known.
//!
//! Shifts are index remappings. `Ŝ` moves `ψ₊` one site right and `ψ₋` one
//! site left; `L̂` and `R̂` move both components together.
//!
//! Recovery reverses a collapse exactly only for states of the binomial walk
//! built by [`crate::coin`]. On other states the operators are still unitary
//! but do not undo anything.

use rand::Rng;

use crate::error::{Result, WalkError};
use crate::lattice::{same_parity, WalkState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub fn opposite(self) -> Self {
        match self {
            Chirality::Plus => Chirality::Minus,
            Chirality::Minus => Chirality::Plus,
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        match self {
            Chirality::Plus => 1,
            Chirality::Minus => -1,
        }
    }
}

/// Result of a chirality measurement together with its Born probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralityOutcome {
    pub sign: Chirality,
    pub probability: f64,
}

/// Deterministic collapse onto one chirality branch.
///
/// Returns `None` when the branch has zero probability.
pub fn chirality_branch(state: &WalkState, sign: Chirality) -> Option<(ChiralityOutcome, WalkState)> {
    let kept = match sign {
        Chirality::Plus => state.plus_amplitudes(),
        Chirality::Minus => state.minus_amplitudes(),
    };
    let probability: f64 = kept.iter().map(|a| a * a).sum();
    if probability <= 0.0 {
        return None;
    }
    let scale = probability.sqrt().recip();
    let kept: Vec<f64> = kept.iter().map(|a| a * scale).collect();
    let zeros = vec![0.0; kept.len()];
    let (plus, minus) = match sign {
        Chirality::Plus => (kept, zeros),
        Chirality::Minus => (zeros, kept),
    };
    Some((
        ChiralityOutcome { sign, probability },
        WalkState::from_raw(state.time(), state.lowest_site(), plus, minus),
    ))
}

/// Samples a chirality measurement with Born probabilities `P₊`, `P₋`.
pub fn measure_chirality<R: Rng + ?Sized>(
    state: &WalkState,
    rng: &mut R,
) -> (ChiralityOutcome, WalkState) {
    let p_plus: f64 = state.plus_amplitudes().iter().map(|a| a * a).sum();
    let total = state.norm_sqr();
    let u: f64 = rng.random();
    let sign = if u * total < p_plus {
        Chirality::Plus
    } else {
        Chirality::Minus
    };
    chirality_branch(state, sign)
        .or_else(|| chirality_branch(state, sign.opposite()))
        .expect("a normalized state has a nonzero chirality branch")
}

/// Homogeneous real coin `[[a, b], [c, d]]` in the `(+, −)` basis applied at
/// every site.
fn apply_coin(state: &WalkState, m: [[f64; 2]; 2]) -> (Vec<f64>, Vec<f64>) {
    state
        .plus_amplitudes()
        .iter()
        .zip(state.minus_amplitudes())
        .map(|(&a, &b)| (m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b))
        .unzip()
}

/// Moves `ψ₊` by `plus_shift` sites and `ψ₋` by `minus_shift` sites, keeping
/// the time index. Both shifts must be even so parity is preserved.
fn shift_components(
    time: usize,
    lowest: i64,
    plus: &[f64],
    minus: &[f64],
    plus_shift: i64,
    minus_shift: i64,
) -> WalkState {
    debug_assert!(same_parity(plus_shift, 0) && same_parity(minus_shift, 0));
    let len = plus.len() as i64;
    let new_lowest = lowest + plus_shift.min(minus_shift);
    let new_len = (len + (plus_shift - minus_shift).abs()) as usize;
    let mut out_plus = vec![0.0; new_len];
    let mut out_minus = vec![0.0; new_len];
    let plus_offset = (lowest + plus_shift - new_lowest) as usize;
    let minus_offset = (lowest + minus_shift - new_lowest) as usize;
    out_plus[plus_offset..plus_offset + plus.len()].copy_from_slice(plus);
    out_minus[minus_offset..minus_offset + minus.len()].copy_from_slice(minus);
    WalkState::from_raw(time, new_lowest, out_plus, out_minus)
}

/// `L̂ Ŝ`: `ψ₊` stays in place, `ψ₋` moves two sites to the left.
pub fn left_composite_shift(state: &WalkState) -> WalkState {
    shift_components(
        state.time(),
        state.lowest_site(),
        state.plus_amplitudes(),
        state.minus_amplitudes(),
        0,
        -2,
    )
}

/// `R̂ Ŝ`: `ψ₊` moves two sites to the right, `ψ₋` stays in place.
pub fn right_composite_shift(state: &WalkState) -> WalkState {
    shift_components(
        state.time(),
        state.lowest_site(),
        state.plus_amplitudes(),
        state.minus_amplitudes(),
        2,
        0,
    )
}

/// Unitary undoing a chirality collapse: `L̂ŜV̂⁺` for the `+` branch and
/// `R̂ŜV̂⁻` for the `−` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOp {
    kind: Chirality,
    p: f64,
}

impl RecoveryOp {
    pub fn new(kind: Chirality, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(WalkError::InvalidBias(p));
        }
        Ok(Self { kind, p })
    }

    pub fn kind(&self) -> Chirality {
        self.kind
    }

    /// Matrix of `V̂±` in the `(+, −)` basis.
    pub fn coin_matrix(&self) -> [[f64; 2]; 2] {
        let (r, l) = (self.p.sqrt(), (1.0 - self.p).sqrt());
        match self.kind {
            Chirality::Plus => [[r, l], [l, -r]],
            Chirality::Minus => [[-l, r], [r, l]],
        }
    }

    /// Applies only `V̂±`.
    pub fn apply_coin(&self, state: &WalkState) -> WalkState {
        let (plus, minus) = apply_coin(state, self.coin_matrix());
        WalkState::from_raw(state.time(), state.lowest_site(), plus, minus)
    }

    pub fn apply(&self, state: &WalkState) -> WalkState {
        let rotated = self.apply_coin(state);
        match self.kind {
            Chirality::Plus => left_composite_shift(&rotated),
            Chirality::Minus => right_composite_shift(&rotated),
        }
    }
}

/// Restores the state that preceded a chirality measurement with outcome
/// `outcome`, given the walk bias `p`.
pub fn recover(collapsed: &WalkState, outcome: Chirality, p: f64) -> Result<WalkState> {
    Ok(RecoveryOp::new(outcome, p)?.apply(collapsed))
}

/// The first-step example of applying the wrong recovery.
///
/// Returns `(|ψ⟩₁, |φ⟩₁, ⟨ψ|φ⟩)` where `|φ⟩₁ = L̂ŜV̂⁺|−⟩⊗|−1⟩`, i.e. the `+`
/// protocol applied after a `−` outcome.
pub fn wrong_recover_demo(p: f64) -> Result<(WalkState, WalkState, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(WalkError::InvalidBias(p));
    }
    let spec = crate::coin::CoinSpec::new(p)?;
    let psi = crate::coin::step(&WalkState::initial(), &spec)?;
    let (_, collapsed) =
        chirality_branch(&psi, Chirality::Minus).expect("minus branch has probability 1 - p");
    let phi = recover(&collapsed, Chirality::Plus, p)?;
    let overlap = psi.inner_product(&phi)?;
    Ok((psi, phi, overlap))
}

/// Draws a site from `ρ(n)` restricted to on-parity sites.
pub(crate) fn sample_site(time: usize, lowest: i64, plus: &[f64], minus: &[f64], u: f64) -> i64 {
    let first = if same_parity(lowest, time) { 0 } else { 1 };
    let total: f64 = (first..plus.len())
        .step_by(2)
        .map(|i| plus[i] * plus[i] + minus[i] * minus[i])
        .sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_occupied = first;
    for i in (first..plus.len()).step_by(2) {
        let mass = plus[i] * plus[i] + minus[i] * minus[i];
        if mass > 0.0 {
            acc += mass;
            last_occupied = i;
            if target < acc {
                return lowest + i as i64;
            }
        }
    }
    lowest + last_occupied as i64
}

/// Samples a position and leaves the walker pinned there with chirality
/// reset to `(|+⟩ + |−⟩)/√2`.
pub fn measure_position<R: Rng + ?Sized>(state: &WalkState, rng: &mut R) -> (i64, WalkState) {
    let u: f64 = rng.random();
    let site = sample_site(
        state.time(),
        state.lowest_site(),
        state.plus_amplitudes(),
        state.minus_amplitudes(),
        u,
    );
    (site, WalkState::localized(site, state.time()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{evolve_from_origin, step, CoinSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn composite_left_shift_moves_only_minus_component() {
        // ψ₊ at 0, ψ₋ at 2
        let probe =
            WalkState::from_amplitudes(2, 0, vec![0.6, 0.0, 0.0], vec![0.0, 0.0, 0.8]).unwrap();
        let moved = left_composite_shift(&probe);
        assert_eq!(moved.time(), 2);
        assert_eq!(moved.plus_at(0), 0.6);
        assert_eq!(moved.minus_at(0), 0.8);
        assert_eq!(moved.minus_at(2), 0.0);
        let moved = right_composite_shift(&probe);
        assert_eq!(moved.plus_at(2), 0.6);
        assert_eq!(moved.minus_at(2), 0.8);
        assert_eq!(moved.plus_at(0), 0.0);
    }

    #[test]
    fn plus_coin_is_an_involution() {
        let op = RecoveryOp::new(Chirality::Plus, 0.3).unwrap();
        let s = evolve_from_origin(&CoinSpec::new(0.6).unwrap(), 9);
        let twice = op.apply_coin(&op.apply_coin(&s));
        assert!(twice.max_abs_diff(&s) < 1e-15);
        let op = RecoveryOp::new(Chirality::Minus, 0.3).unwrap();
        let twice = op.apply_coin(&op.apply_coin(&s));
        assert!(twice.max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn first_step_minus_branch_collapses_to_single_site() {
        let s1 = step(&WalkState::initial(), &CoinSpec::new(0.75).unwrap()).unwrap();
        let (outcome, collapsed) = chirality_branch(&s1, Chirality::Minus).unwrap();
        assert!((outcome.probability - 0.25).abs() < 1e-15);
        assert!((collapsed.minus_at(-1) - 1.0).abs() < 1e-15);
        assert_eq!(collapsed.plus_at(1), 0.0);
        assert!((collapsed.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_branch_is_none() {
        let s1 = step(&WalkState::initial(), &CoinSpec::new(1.0).unwrap()).unwrap();
        assert!(chirality_branch(&s1, Chirality::Minus).is_none());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (o, _) = measure_chirality(&s1, &mut rng);
            assert_eq!(o.sign, Chirality::Plus);
        }
    }

    #[test]
    fn wrong_recovery_first_step() {
        let p: f64 = 0.75;
        let (psi, phi, overlap) = wrong_recover_demo(p).unwrap();
        assert!(overlap.abs() < 1e-15);
        assert!((phi.plus_at(-1) - 0.5).abs() < 1e-15);
        assert!((phi.minus_at(-3) + p.sqrt()).abs() < 1e-15);
        assert!((phi.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(psi.time(), 1);
        assert!(wrong_recover_demo(0.0).is_err());
        assert!(wrong_recover_demo(1.0).is_err());
    }

    #[test]
    fn position_measurement_of_initial_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (n, s) = measure_position(&WalkState::initial(), &mut rng);
            assert_eq!(n, 0);
            assert_eq!(s, WalkState::initial());
        }
    }

    #[test]
    fn position_measurement_yields_point_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = evolve_from_origin(&CoinSpec::new(0.4).unwrap(), 12);
        let (n, post) = measure_position(&s, &mut rng);
        assert_eq!(post.time(), 12);
        assert!((post.pmf().mass_at(n) - 1.0).abs() < 1e-15);
        assert!(same_parity(n, 12));
    }

    #[test]
    fn sampler_skips_parity_zeros() {
        // masses 0.25 at -1, 0.75 at 1
        let plus = [0.0, 0.0, 0.75_f64.sqrt()];
        let minus = [0.5, 0.0, 0.0];
        assert_eq!(sample_site(1, -1, &plus, &minus, 0.0), -1);
        assert_eq!(sample_site(1, -1, &plus, &minus, 0.2499), -1);
        assert_eq!(sample_site(1, -1, &plus, &minus, 0.2501), 1);
        assert_eq!(sample_site(1, -1, &plus, &minus, 0.9999999), 1);
    }
}
