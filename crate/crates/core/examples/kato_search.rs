//! Search with a diffusion built from single-qubit gates only.
//!
//! Solves for the gate angle that balances the spectrum, then checks the
//! spectral model against the dense 2^n x 2^n operator.
//!
//! Run with `cargo run --release --example kato_search`.

use std::f64::consts::FRAC_PI_2;

use qsearch::dense::{build_kato_dense, evolve_search, hadamard_source, DenseState};
use qsearch::models::kato_model;
use qsearch::{find_peak, iterate, predict};

fn main() -> qsearch::Result<()> {
    let phi = FRAC_PI_2;
    for n in [6u32, 8, 10] {
        let (model, params) = kato_model(n, phi)?;
        let p = predict(&model)?;
        let q_max = 2 * p.q_max + 2;
        let levels = iterate(&model, q_max)?;
        let d = build_kato_dense(n, params.gamma)?;
        let target = DenseState::basis(1 << n, 0)?;
        let dense = evolve_search(&d, &target, phi, &hadamard_source(n), q_max)?;
        let peak = find_peak(&levels)?;
        println!(
            "n={n:>2}: gamma={:.5} (phi/n={:.5}) A={:+.1e} P_m={:.4} q_m={} | sim p={:.4} at q={} | dense diff {:.1e}",
            params.gamma,
            phi / n as f64,
            p.a(),
            p.p_max,
            p.q_max,
            peak.p_peak,
            peak.q_peak,
            dense.max_abs_diff(&levels),
        );
    }
    Ok(())
}
