//! Discrete-time quantum walk on the line with an inhomogeneous,
//! time-dependent coin whose position distribution is exactly binomial.
//!
//! - [`lattice`]: wave function and position distributions
//! - [`coin`]: coin-angle field, evolution, probability flux
//! - [`analytics`]: closed forms, Gaussian limit, entanglement entropy
//! - [`measurement`]: chirality/position measurements and recovery
//! - [`decoherence`]: Monte Carlo ensemble with random position measurements

pub mod analytics;
pub mod coin;
pub mod decoherence;
pub mod error;
pub mod lattice;
pub mod measurement;

pub use analytics::{
    binomial_pmf, closed_form_amplitudes, entanglement_entropy, entropy_asymptote,
    gaussian_approx, GaussParams, ReducedDensity,
};
pub use coin::{
    coin_angle, ehrenfest_residual, evolve, evolve_from_origin, flux, step, total_flux,
    CoinAngles, CoinSpec,
};
pub use decoherence::{
    detect_bimodality, run_ensemble, run_trajectory, trial_stream, DecoherenceConfig,
    EnsembleEngine, EnsembleResult, Readout,
};
pub use error::{Result, WalkError};
pub use lattice::{Pmf, WalkState};
pub use measurement::{
    chirality_branch, measure_chirality, measure_position, recover, wrong_recover_demo,
    Chirality, ChiralityOutcome, RecoveryOp,
};
