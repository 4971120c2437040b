//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::time::Instant;

use cqwalk::analytics::{
    binomial_pmf, closed_form_amplitudes, entanglement_entropy, entropy_asymptote, gaussian_approx,
    ReducedDensity,
};
use cqwalk::coin::{ehrenfest_residual, flux, step, CoinSpec};
use cqwalk::decoherence::{detect_bimodality, occupied_counts, run_ensemble, DecoherenceConfig, Readout};
use cqwalk::lattice::WalkState;
use cqwalk::measurement::{chirality_branch, recover, wrong_recover_demo, Chirality};

const BIASES: [f64; 3] = [0.25, 0.5, 0.75];
const DESK_TRIALS: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Coherent states for t = 0..=t_max.
fn trajectory(p: f64, t_max: usize) -> Vec<WalkState> {
    let spec = CoinSpec::new(p).unwrap();
    let mut states = vec![WalkState::initial()];
    for t in 0..t_max {
        let next = step(&states[t], &spec).unwrap();
        states.push(next);
    }
    states
}

fn binomial_reproduction() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for p in BIASES {
        let spec = CoinSpec::new(p).unwrap();
        let mut state = WalkState::initial();
        for t in 1..=200 {
            state = step(&state, &spec).unwrap();
            for (n, m) in state.pmf().iter() {
                worst = worst.max((m - binomial_pmf(n, t, p)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-11 && secs < 1.0,
        format!("max |pmf - binomial| = {worst:.2e}, runtime {secs:.3} s"),
    )
}

fn moments() -> Outcome {
    let (mut mean_err, mut sd_err): (f64, f64) = (0.0, 0.0);
    for p in BIASES {
        for (t, state) in trajectory(p, 200).iter().enumerate() {
            let pmf = state.pmf();
            let mean = pmf.moment(1).unwrap();
            let sd = (pmf.moment(2).unwrap() - mean * mean).max(0.0).sqrt();
            mean_err = mean_err.max((mean - (2.0 * p - 1.0) * t as f64).abs());
            sd_err = sd_err.max((sd - 2.0 * (p * (1.0 - p) * t as f64).sqrt()).abs());
        }
    }
    check(
        mean_err < 1e-9 && sd_err < 1e-9,
        format!("max mean error {mean_err:.2e}, max ΔX error {sd_err:.2e}"),
    )
}

fn closed_form_equality() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut mirror: f64 = 0.0;
    for p in BIASES {
        for (t, state) in trajectory(p, 200).iter().enumerate().skip(1) {
            for n in (-(t as i64)..=t as i64).step_by(2) {
                let (a, b) = closed_form_amplitudes(n, t, p).unwrap();
                worst = worst
                    .max((state.plus_at(n) - a).abs())
                    .max((state.minus_at(n) - b).abs());
                if p == 0.5 {
                    mirror = mirror.max((state.plus_at(n) - state.minus_at(n - 2)).abs());
                }
            }
            // edge values
            let ti = t as i64;
            worst = worst
                .max((state.plus_at(ti) - p.powf(t as f64 / 2.0)).abs())
                .max((state.minus_at(-ti) - (1.0 - p).powf(t as f64 / 2.0)).abs())
                .max(state.plus_at(-ti).abs())
                .max(state.minus_at(ti).abs());
        }
    }
    check(
        worst < 1e-11 && mirror < 1e-11,
        format!("max amplitude error {worst:.2e}, max |ψ₊(n) − ψ₋(n−2)| at p=0.5 {mirror:.2e}"),
    )
}

fn zero_flux() -> Outcome {
    let spec = CoinSpec::unbiased();
    let mut worst_flux: f64 = 0.0;
    for state in trajectory(0.5, 200) {
        for (n, _, _) in state.occupied_sites() {
            worst_flux = worst_flux.max(flux(&state, &spec, n).abs());
        }
    }
    let mut worst_residual: f64 = 0.0;
    for p in [0.25, 0.3, 0.5, 0.75] {
        let spec = CoinSpec::new(p).unwrap();
        for state in trajectory(p, 200) {
            worst_residual = worst_residual.max(ehrenfest_residual(&state, &spec).unwrap().abs());
        }
    }
    check(
        worst_flux < 1e-12 && worst_residual < 1e-10,
        format!("max |J| at p=0.5 {worst_flux:.2e}, max Ehrenfest residual {worst_residual:.2e}"),
    )
}

fn path_enumeration() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in BIASES {
        let (a0, b0) = ((p / 2.0).sqrt(), ((1.0 - p) / 2.0).sqrt());
        let angles = |n: i64, k: usize| {
            if k == 0 {
                return (a0 - b0, b0 + a0);
            }
            let x = n as f64 / k as f64;
            (
                a0 * (1.0 + x).sqrt() - b0 * (1.0 - x).sqrt(),
                b0 * (1.0 + x).sqrt() + a0 * (1.0 - x).sqrt(),
            )
        };
        let states = trajectory(p, 12);
        for (t, state) in states.iter().enumerate() {
            let mut plus = vec![0.0; 2 * t + 1];
            let mut minus = vec![0.0; 2 * t + 1];
            for history in 0u64..(1 << (t + 1)) {
                let chir = |k: usize| history >> k & 1 == 1;
                let mut amp = std::f64::consts::FRAC_1_SQRT_2;
                let mut n = 0i64;
                for k in 0..t {
                    let (c, s) = angles(n, k);
                    amp *= match (chir(k + 1), chir(k)) {
                        (true, true) => c,
                        (false, false) => -c,
                        _ => s,
                    };
                    n += if chir(k + 1) { 1 } else { -1 };
                }
                let idx = (n + t as i64) as usize;
                if chir(t) {
                    plus[idx] += amp;
                } else {
                    minus[idx] += amp;
                }
            }
            for i in 0..plus.len() {
                let n = i as i64 - t as i64;
                worst = worst
                    .max((state.plus_at(n) - plus[i]).abs())
                    .max((state.minus_at(n) - minus[i]).abs());
            }
        }
    }
    check(worst < 1e-12, format!("max amplitude deviation for t ≤ 12: {worst:.2e}"))
}

fn recovery_protocol() -> Outcome {
    let mut worst_fidelity: f64 = 0.0;
    for p in [0.3, 0.5, 0.75] {
        for psi in trajectory(p, 100).iter().skip(1) {
            for sign in [Chirality::Plus, Chirality::Minus] {
                let (_, collapsed) = chirality_branch(psi, sign).unwrap();
                let back = recover(&collapsed, sign, p).unwrap();
                let fidelity = psi.inner_product(&back).unwrap();
                worst_fidelity = worst_fidelity.max((fidelity - 1.0).abs());
            }
        }
    }
    let mut worst_wrong: f64 = 0.0;
    for p in [0.1, 0.3, 0.5, 0.75, 0.9] {
        let (_, phi, overlap) = wrong_recover_demo(p).unwrap();
        worst_wrong = worst_wrong
            .max(overlap.abs())
            .max((phi.plus_at(-1) - (1.0 - p).sqrt()).abs())
            .max((phi.minus_at(-3) + p.sqrt()).abs())
            .max((phi.norm_sqr() - 1.0).abs());
    }
    check(
        worst_fidelity < 1e-11 && worst_wrong < 1e-12,
        format!(
            "max |fidelity − 1| {worst_fidelity:.2e}, wrong-protocol overlap/amplitude error {worst_wrong:.2e}"
        ),
    )
}

fn entropy() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let s1_half = entanglement_entropy(&ReducedDensity::from_state(&trajectory(0.5, 1)[1])).unwrap();
    pass &= s1_half == 1.0;
    notes.push(format!("S(1)|p=.5 = {s1_half}"));

    let s1_biased = entanglement_entropy(&ReducedDensity::from_state(&trajectory(0.75, 1)[1])).unwrap();
    pass &= (s1_biased - 0.811278).abs() < 1e-6;
    notes.push(format!("S(1)|p=.75 = {s1_biased:.7}"));

    let mut monotone = true;
    let mut worst_pop: f64 = 0.0;
    let mut ratio_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut at_1000 = Vec::new();
    for p in [0.5, 0.75] {
        let spec = CoinSpec::new(p).unwrap();
        let mut state = WalkState::initial();
        let mut previous = f64::INFINITY;
        for t in 1..=2000usize {
            state = step(&state, &spec).unwrap();
            let rd = ReducedDensity::from_state(&state);
            let s = entanglement_entropy(&rd).unwrap();
            if t <= 200 {
                monotone &= s <= previous;
                worst_pop = worst_pop
                    .max((rd.p_plus - p).abs())
                    .max((rd.p_minus - (1.0 - p)).abs());
            }
            if t >= 200 {
                let ratio = s / entropy_asymptote(t);
                ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
            }
            if t == 1000 {
                at_1000.push(s);
            }
            previous = s;
        }
    }
    let relative = (at_1000[0] - at_1000[1]).abs() / at_1000[0].max(at_1000[1]);
    pass &= monotone && worst_pop < 1e-11;
    pass &= ratio_range.0 >= 0.7 && ratio_range.1 <= 1.3 && relative < 0.05;
    notes.push(format!("monotone {monotone}"));
    notes.push(format!("max population error {worst_pop:.2e}"));
    notes.push(format!(
        "S·4t/log₂4t ∈ [{:.4}, {:.4}] on [200, 2000]",
        ratio_range.0, ratio_range.1
    ));
    notes.push(format!("p=.5 vs p=.75 at t=1000 differ by {:.3}%", relative * 100.0));
    check(pass, notes.join("; "))
}

fn gaussian_limit() -> Outcome {
    let sup = (-100i64..=100)
        .step_by(2)
        .map(|n| (binomial_pmf(n, 100, 0.75) - gaussian_approx(n, 100, 0.75).unwrap()).abs())
        .fold(0.0, f64::max);
    check(sup < 0.005, format!("sup |binomial − gaussian| = {sup:.5}"))
}

fn decoherence_phenomenology() -> Outcome {
    let start = Instant::now();
    let run = |q: f64| run_ensemble(&DecoherenceConfig::new(0.5, q, 100, DESK_TRIALS, 42).unwrap()).unwrap();
    let coherent = run(0.0);
    let weak = run(0.05);
    let strong = run(0.6);
    let bimodal = run(0.8);

    let sigma = |a: &cqwalk::EnsembleResult, b: &cqwalk::EnsembleResult| {
        (a.variance_std_error().powi(2) + b.variance_std_error().powi(2)).sqrt()
    };
    let reduced = coherent.variance - weak.variance > 3.0 * sigma(&coherent, &weak);
    let increased = strong.variance - coherent.variance > 3.0 * sigma(&strong, &coherent);

    let n_trials = DESK_TRIALS as f64;
    let mut worst_z: f64 = 0.0;
    for (n, c) in occupied_counts(coherent.counts.as_ref().unwrap(), 100) {
        let m = binomial_pmf(n, 100, 0.5);
        let sd = (m * (1.0 - m) / n_trials).sqrt();
        let dev = (c as f64 / n_trials - m).abs();
        if dev > 0.0 {
            worst_z = worst_z.max(dev / sd);
        }
    }
    let fires = detect_bimodality(&bimodal.empirical_pmf).unwrap();
    let quiet = !detect_bimodality(&coherent.empirical_pmf).unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        reduced && increased && worst_z < 5.0 && fires && quiet && secs < 120.0,
        format!(
            "Var(q=0) {:.2}, Var(.05) {:.2}, Var(.6) {:.2}; max per-site z at q=0 {worst_z:.2}; \
             bimodal at q=.8 {fires}, at q=0 {}; {secs:.1} s",
            coherent.variance,
            weak.variance,
            strong.variance,
            !quiet
        ),
    )
}

fn reproducibility() -> Outcome {
    let run_with = |threads: usize, readout: Readout| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let config = DecoherenceConfig::new(0.5, 0.3, 60, 20_000, 1234)
            .unwrap()
            .with_readout(readout);
        pool.install(|| run_ensemble(&config).unwrap())
    };
    let mut same = true;
    for readout in [Readout::Sampled, Readout::Exact] {
        let one = run_with(1, readout);
        let four = run_with(4, readout);
        let again = run_with(3, readout);
        let bits = |r: &cqwalk::EnsembleResult| {
            r.empirical_pmf
                .masses()
                .iter()
                .map(|m| m.to_bits())
                .chain([r.mean.to_bits(), r.variance.to_bits()])
                .collect::<Vec<_>>()
        };
        same &= bits(&one) == bits(&four) && bits(&one) == bits(&again) && one == four;
    }
    check(same, "sampled and exact readouts bit-identical across 1, 3 and 4 threads")
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("binomial reproduction", binomial_reproduction),
        ("moments", moments),
        ("closed-form amplitudes", closed_form_equality),
        ("zero flux / Ehrenfest", zero_flux),
        ("path enumeration oracle", path_enumeration),
        ("recovery protocol", recovery_protocol),
        ("entanglement entropy", entropy),
        ("gaussian limit", gaussian_limit),
        ("decoherence phenomenology", decoherence_phenomenology),
        ("reproducibility", reproducibility),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, outcome.detail);
        failures += usize::from(!outcome.pass);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
