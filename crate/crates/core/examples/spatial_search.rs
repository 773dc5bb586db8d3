//! Coined quantum walk search on a periodic 2D lattice, compared with the
//! exact secular solution of its spectral model.
//!
//! Run with `cargo run --release --example spatial_search -- 32`.

use qsearch::lattice::run_walk;
use qsearch::models::{akr_model, AkrParams};
use qsearch::secular::secular_trace;
use qsearch::{find_peak, merge_degenerate, predict, solve_secular};

fn main() -> qsearch::Result<()> {
    let side: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(16);
    let model = akr_model(AkrParams::new(side))?;
    let p = predict(&model)?;
    let q_max = 2 * p.q_max + 2;

    let walk = run_walk(side, (side / 3, side / 2), q_max, None)?;
    let spectrum = solve_secular(&merge_degenerate(&model), 1e-12)?;
    let exact = secular_trace(&spectrum, q_max);
    let peak = find_peak(&walk)?;
    let site = walk
        .site_probs
        .as_ref()
        .expect("walk records site probabilities");

    println!(
        "side {side}: N = {}, {} distinct levels",
        side * side,
        spectrum.pairs.len()
    );
    println!(
        "B^2 = {:.4}, 1/B^2 = {:.4}, theta_min = {:.5}",
        p.b().powi(2),
        1.0 / p.b().powi(2),
        p.moments.theta_min
    );
    println!("predicted: P_m = {:.4} at q_m = {}", p.p_max, p.q_max);
    println!(
        "walk:      p   = {:.4} at q   = {} (site probability {:.4})",
        peak.p_peak, peak.q_peak, site[peak.q_peak]
    );
    println!(
        "walk vs secular: max |diff| = {:.2e}",
        walk.max_abs_diff(&exact)
    );
    Ok(())
}
