//! Preparing the eigenvector of a unitary with a known eigenphase, using the
//! time-reversed search `T = I_s D_t` after symmetrization.
//!
//! Run with `cargo run --release --example eigenstate_finding`.

use std::f64::consts::PI;

use qsearch::controlled::algorithm1;
use qsearch::models::eigenfind_model;
use qsearch::runner::random_eigenfind_spectrum;
use qsearch::{find_peak, iterate_reversed, predict, time_reverse};

fn main() -> qsearch::Result<()> {
    let (levels, gap, theta_s, alpha) = (64, 0.3, 1.1, 2e-3);
    for seed in 1..=5 {
        let (thetas, weights) = random_eigenfind_spectrum(levels, gap, theta_s, alpha, seed)?;
        let model = eigenfind_model(&thetas, &weights, theta_s, PI)?;
        let sym = algorithm1(&model)?.model;
        let p = predict(&time_reverse(&sym, PI)?)?;
        let trace = iterate_reversed(&sym, PI, 2 * p.q_max + 2)?;
        let peak = find_peak(&trace)?;
        println!(
            "seed {seed}: B = {:.3}, margin = {:.0}, P_m = {:.4} at q_m = {} | fidelity at q_m = {:.4}, best {:.4} at q = {}",
            p.b(),
            p.validity_margin,
            p.p_max,
            p.q_max,
            trace.probs[p.q_max as usize],
            peak.p_peak,
            peak.q_peak
        );
    }
    Ok(())
}
