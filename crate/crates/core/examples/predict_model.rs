//! Closed-form prediction for a hand-written spectrum, and its JSON form.
//!
//! Run with `cargo run --example predict_model`.

use std::f64::consts::PI;

use qsearch::{predict, Level, SpectralModel};

fn main() -> qsearch::Result<()> {
    let alpha: f64 = 0.02;
    let rest = 1.0 - alpha * alpha;
    let model = SpectralModel::new(
        PI,
        vec![
            Level::with_weight(0.0, alpha * alpha).labelled("source"),
            Level::with_weight(0.9, 0.5 * rest).labelled("a"),
            Level::with_weight(-1.4, 0.3 * rest).labelled("b"),
            Level::with_weight(2.6, 0.2 * rest).labelled("c"),
        ],
    )
    .with_meta("three-level example");

    let p = predict(&model)?;
    println!(
        "alpha = {:.4}, theta_min = {:.4}",
        p.alpha(),
        p.moments.theta_min
    );
    println!(
        "Lambda1 = {:+.5}, Lambda2 = {:.5}",
        p.moments.lambda1, p.moments.lambda2
    );
    println!("A = {:+.5}, B = {:.5}, eta = {:.5}", p.a(), p.b(), p.eta);
    println!(
        "lambda+ = {:+.3e}, lambda- = {:+.3e}",
        p.lambda_plus, p.lambda_minus
    );
    println!(
        "P_m = {:.4} at q_m = {}, Q = {:.1}",
        p.p_max, p.q_max, p.query_complexity
    );
    println!(
        "validity margin = {:.1} (warning: {})",
        p.validity_margin, p.margin_warning
    );

    let json = model.to_json()?;
    println!("\nmodel JSON:\n{json}");
    assert_eq!(SpectralModel::from_json(&json)?, model);
    Ok(())
}
