//! Generalized Grover search with mismatched phases: the success probability
//! collapses once the detuning leaves an O(alpha) window.
//!
//! Run with `cargo run --example grover_phase_matching`.

use std::f64::consts::PI;

use qsearch::models::grover_model;
use qsearch::{find_peak, iterate, predict, wrap_phase};

fn main() -> qsearch::Result<()> {
    let alpha = 0.01;
    println!("alpha = {alpha}, phi_t = pi");
    println!(
        "{:>9} {:>10} {:>8} {:>10} {:>8}",
        "detuning", "P_m", "q_m", "simulated", "q_peak"
    );
    for detuning in [0.0, 0.005, 0.01, 0.02, 0.04, 0.1, 0.3, 1.0] {
        let model = grover_model(alpha, PI, wrap_phase(PI - detuning))?;
        let p = predict(&model)?;
        let peak = find_peak(&iterate(&model, 2 * p.q_max + 2)?)?;
        println!(
            "{detuning:>9.3} {:>10.4} {:>8} {:>10.4} {:>8}",
            p.p_max, p.q_max, peak.p_peak, peak.q_peak
        );
    }

    // Matched phases away from pi trade iterations for nothing: csc(phi/2) more steps.
    let model = grover_model(1.0 / 32.0, PI / 2.0, PI / 2.0)?;
    let p = predict(&model)?;
    println!(
        "\nphi_t = phi_s = pi/2, alpha = 1/32: q_m = {}, P_m = {:.4}",
        p.q_max, p.p_max
    );
    Ok(())
}
