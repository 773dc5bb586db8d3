//! Builds the controlled search step as an explicit matrix and checks it
//! against the transformed spectral model.
//!
//! Run with `cargo run --release --example dense_circuits`.

use std::f64::consts::PI;

use qsearch::controlled::{algorithm1, algorithm2};
use qsearch::dense::{
    build_controlled_dense, build_grover_diffusion, controlled_diffusion, controlled_states,
    evolve_dense, evolve_search, ControlKind, DenseState,
};
use qsearch::models::grover_model;
use qsearch::{find_peak, iterate};

fn main() -> qsearch::Result<()> {
    let (dim, phi_s) = (64usize, PI - 0.3);
    let base = grover_model((dim as f64).sqrt().recip(), PI, phi_s)?;
    let d = build_grover_diffusion(dim, phi_s)?;
    let (s, t) = (DenseState::uniform(dim), DenseState::basis(dim, 0)?);

    let op = build_controlled_dense(&d, ControlKind::Alg1, &t)?;
    println!(
        "alg1 step: dim {}, unitarity residual {:.1e}",
        op.dim,
        op.unitarity_residual()
    );
    let (s1, t1) = controlled_states(ControlKind::Alg1, &s, &t);
    let sym = algorithm1(&base)?.model;
    let dense = evolve_dense(&op, &s1, &t1, 60)?;
    println!(
        "alg1 dense vs model: {:.1e}",
        dense.max_abs_diff(&iterate(&sym, 60)?)
    );

    let kind = ControlKind::Alg2 { zeta: 0.4 };
    let d2 = controlled_diffusion(&controlled_diffusion(&d, ControlKind::Alg1)?, kind)?;
    let (s2, t2) = controlled_states(kind, &s1, &t1);
    let nested = evolve_search(&d2, &t2, PI, &s2, 100)?;
    let model2 = algorithm2(&sym, 0.4)?.model;
    println!(
        "alg1+alg2 dense (dim {}) vs model: {:.1e}",
        d2.dim,
        nested.max_abs_diff(&iterate(&model2, 100)?)
    );
    let peak = find_peak(&nested)?;
    println!("peak p = {:.4} at q = {}", peak.p_peak, peak.q_peak);
    Ok(())
}
