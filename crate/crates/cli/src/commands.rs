use cqwalk::analytics::{entanglement_entropy, entropy_asymptote, ReducedDensity};
use cqwalk::coin::{step, CoinSpec};
use cqwalk::decoherence::{detect_bimodality, run_ensemble, DecoherenceConfig, Readout};
use cqwalk::lattice::WalkState;
use cqwalk::measurement::{measure_chirality, recover, Chirality};
use cqwalk::trial_stream;

use crate::output::{Cell, Table};
use crate::{DecohereArgs, EntropyArgs, EvolveArgs, Failure, RecoverArgs};

/// Allowed drift of the squared norm before a run is aborted.
const NORM_DRIFT: f64 = 1e-10;
/// Allowed deviation of the recovery fidelity from one.
const FIDELITY_DRIFT: f64 = 1e-9;

fn check_norm(state: &WalkState) -> Result<(), Failure> {
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > NORM_DRIFT {
        return Err(Failure::Numerical(format!(
            "squared norm drifted by {drift:e} at t = {}",
            state.time()
        )));
    }
    Ok(())
}

fn evolve_checked(spec: &CoinSpec, steps: usize) -> Result<WalkState, Failure> {
    let mut state = WalkState::initial();
    for _ in 0..steps {
        state = step(&state, spec)?;
    }
    check_norm(&state)?;
    Ok(state)
}

/// Rows `(n, psi_plus, psi_minus, rho)` over on-parity sites at the final time.
pub fn evolve(args: &EvolveArgs) -> Result<Table, Failure> {
    let spec = CoinSpec::new(args.p)?;
    let state = evolve_checked(&spec, args.steps)?;
    let mut table = Table::new(&["n", "psi_plus", "psi_minus", "rho"]);
    for (n, a, b) in state.occupied_sites() {
        table.push(vec![n.into(), a.into(), b.into(), (a * a + b * b).into()]);
    }
    Ok(table)
}

/// Rows `(t, s_c, asymptote)` for `t = 1..=t_max`.
pub fn entropy(args: &EntropyArgs) -> Result<Table, Failure> {
    if args.t_max == 0 {
        return Err(Failure::Usage("--t-max must be at least 1".into()));
    }
    let spec = CoinSpec::new(args.p)?;
    let mut table = Table::new(&["t", "s_c", "asymptote"]);
    let mut state = WalkState::initial();
    for t in 1..=args.t_max {
        state = step(&state, &spec)?;
        let rd = ReducedDensity::from_state(&state);
        let s = entanglement_entropy(&rd).map_err(|e| Failure::Numerical(e.to_string()))?;
        table.push(vec![t.into(), s.into(), entropy_asymptote(t).into()]);
    }
    check_norm(&state)?;
    Ok(table)
}

/// Per q: `pmf` rows `(q, n, rho)` followed by one `summary` row
/// `(q, mean, variance, bimodal)`.
pub fn decohere(args: &DecohereArgs) -> Result<Table, Failure> {
    let readout = if args.exact {
        Readout::Exact
    } else {
        Readout::Sampled
    };
    let configs = args
        .q
        .iter()
        .map(|&q| {
            DecoherenceConfig::new(args.p, q, args.steps, args.trials, args.seed)
                .map(|c| c.with_readout(readout))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["record", "q", "n", "rho", "mean", "variance", "bimodal"]);
    for config in configs {
        let result = run_ensemble(&config)?;
        let q = Cell::from(config.q);
        for (n, m) in result.empirical_pmf.occupied() {
            table.push(vec![
                "pmf".into(),
                q.clone(),
                n.into(),
                m.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
        }
        let bimodal = detect_bimodality(&result.empirical_pmf)?;
        table.push(vec![
            "summary".into(),
            q,
            Cell::Empty,
            Cell::Empty,
            result.mean.into(),
            result.variance.into(),
            bimodal.into(),
        ]);
    }
    Ok(table)
}

/// Measures the chirality at time `t` on stream 0 of `seed`, recovers with
/// the matching protocol and with the wrong one.
///
/// Rows: `state` rows `(n, psi_plus, psi_minus)` of the pre-measurement
/// state, then scalar rows `outcome`, `outcome_probability`, `fidelity`,
/// `max_amplitude_error` and `wrong_overlap` in the `value` column.
pub fn recover_demo(args: &RecoverArgs) -> Result<Table, Failure> {
    if args.t == 0 {
        return Err(Failure::Usage("--t must be at least 1".into()));
    }
    let spec = CoinSpec::new(args.p)?;
    let psi = evolve_checked(&spec, args.t)?;
    let (outcome, collapsed) = measure_chirality(&psi, &mut trial_stream(args.seed, 0));
    let recovered = recover(&collapsed, outcome.sign, args.p)?;
    let fidelity = psi.inner_product(&recovered)?;
    let max_error = psi.max_abs_diff(&recovered);
    let wrong = recover(&collapsed, outcome.sign.opposite(), args.p)?;
    let wrong_overlap = psi.inner_product(&wrong)?;
    if (fidelity - 1.0).abs() > FIDELITY_DRIFT {
        return Err(Failure::Numerical(format!(
            "recovery fidelity {fidelity} differs from 1"
        )));
    }

    let mut table = Table::new(&["record", "n", "psi_plus", "psi_minus", "value"]);
    for (n, a, b) in psi.occupied_sites() {
        table.push(vec!["state".into(), n.into(), a.into(), b.into(), Cell::Empty]);
    }
    let sign = match outcome.sign {
        Chirality::Plus => 1i64,
        Chirality::Minus => -1,
    };
    for (name, value) in [
        ("outcome", Cell::Int(sign)),
        ("outcome_probability", outcome.probability.into()),
        ("fidelity", fidelity.into()),
        ("max_amplitude_error", max_error.into()),
        ("wrong_overlap", wrong_overlap.into()),
    ] {
        table.push(vec![name.into(), Cell::Empty, Cell::Empty, Cell::Empty, value]);
    }
    Ok(table)
}
