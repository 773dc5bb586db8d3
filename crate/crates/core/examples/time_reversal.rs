//! The roles of source and target swap under time reversal: iterating
//! `I_s^phi D_t` equals the forward analysis of the reversed model.
//!
//! Run with `cargo run --example time_reversal`.

use std::f64::consts::PI;

use qsearch::models::grover_model;
use qsearch::{iterate, iterate_reversed, predict, time_reverse};

fn main() -> qsearch::Result<()> {
    let model = grover_model(0.05, PI, 2.4)?;
    for varphi in [PI, 2.4, 1.0] {
        let reversed = time_reverse(&model, varphi)?;
        let direct = iterate_reversed(&model, varphi, 100)?;
        let via = iterate(&reversed, 100)?;
        let p = predict(&reversed)?;
        println!(
            "varphi = {varphi:.3}: reversed phi = {:+.3}, P_m = {:.4}, q_m = {}, max |diff| = {:.1e}",
            reversed.phi,
            p.p_max,
            p.q_max,
            direct.max_abs_diff(&via)
        );
    }
    Ok(())
}
