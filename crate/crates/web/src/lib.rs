//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array` so the page can plot it
//! without any glue beyond the generated module.

use cqwalk::analytics::{entanglement_entropy, entropy_asymptote, gaussian_approx, ReducedDensity};
use cqwalk::coin::{evolve_from_origin, step, CoinSpec};
use cqwalk::decoherence::{detect_bimodality, run_ensemble, DecoherenceConfig};
use cqwalk::lattice::WalkState;
use cqwalk::WalkError;
use wasm_bindgen::prelude::*;

/// Triples `(n, rho, gaussian)` over on-parity sites after `steps` steps.
pub fn profile(p: f64, steps: usize) -> Result<Vec<f64>, WalkError> {
    let spec = CoinSpec::new(p)?;
    let state = evolve_from_origin(&spec, steps);
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for (n, a, b) in state.occupied_sites() {
        let gauss = if steps == 0 || p == 0.0 || p == 1.0 {
            f64::NAN
        } else {
            gaussian_approx(n, steps, p)?
        };
        out.extend([n as f64, a * a + b * b, gauss]);
    }
    Ok(out)
}

/// Pairs `(s_c, asymptote)` for `t = 1..=t_max`.
pub fn entropy(p: f64, t_max: usize) -> Result<Vec<f64>, WalkError> {
    let spec = CoinSpec::new(p)?;
    let mut state = WalkState::initial();
    let mut out = Vec::with_capacity(2 * t_max);
    for t in 1..=t_max {
        state = step(&state, &spec)?;
        let s = entanglement_entropy(&ReducedDensity::from_state(&state))?;
        out.extend([s, entropy_asymptote(t)]);
    }
    Ok(out)
}

/// `[mean, variance, bimodal, n0, rho0, n1, rho1, ...]` for a Monte Carlo
/// ensemble with measurement probability `q`. `bimodal` is 0 or 1.
pub fn ensemble(p: f64, q: f64, steps: usize, trials: u32, seed: u32) -> Result<Vec<f64>, WalkError> {
    let config = DecoherenceConfig::new(p, q, steps, u64::from(trials), u64::from(seed))?;
    let result = run_ensemble(&config)?;
    let bimodal = detect_bimodality(&result.empirical_pmf)?;
    let mut out = vec![result.mean, result.variance, f64::from(u8::from(bimodal))];
    for (n, m) in result.empirical_pmf.occupied() {
        out.extend([n as f64, m]);
    }
    Ok(out)
}

fn js(err: WalkError) -> JsError {
    JsError::new(&err.to_string())
}

#[wasm_bindgen(js_name = evolveProfile)]
pub fn evolve_profile(p: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    profile(p, steps).map_err(js)
}

#[wasm_bindgen(js_name = entropyCurve)]
pub fn entropy_curve(p: f64, t_max: usize) -> Result<Vec<f64>, JsError> {
    entropy(p, t_max).map_err(js)
}

#[wasm_bindgen(js_name = decoherencePmf)]
pub fn decoherence_pmf(p: f64, q: f64, steps: usize, trials: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    ensemble(p, q, steps, trials, seed).map_err(js)
}
