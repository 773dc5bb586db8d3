//! Exact eigenphases of the search operator from the secular equation.
//!
//! Run with `cargo run --example secular_spectrum`.

use std::f64::consts::PI;

use qsearch::secular::residual_check;
use qsearch::{exact_evolution, predict, solve_secular, Level, SpectralModel};

fn main() -> qsearch::Result<()> {
    let alpha: f64 = 0.05;
    let rest = 1.0 - alpha * alpha;
    let model = SpectralModel::new(
        2.2,
        vec![
            Level::with_weight(0.0, alpha * alpha),
            Level::with_weight(0.7, 0.25 * rest),
            Level::with_weight(-0.9, 0.25 * rest),
            Level::with_weight(1.9, 0.25 * rest),
            Level::with_weight(PI, 0.25 * rest),
        ],
    );
    let spectrum = solve_secular(&model, 1e-13)?;
    println!(
        "{:>12} {:>12} {:>12} {:>10}",
        "lambda", "|<t|l>|^2", "|<s|l>|^2", "residual"
    );
    for pair in &spectrum.pairs {
        println!(
            "{:>12.8} {:>12.6} {:>12.6} {:>10.1e}",
            pair.lambda,
            pair.t_overlap.norm_sqr(),
            pair.s_overlap.norm_sqr(),
            residual_check(&model, pair)?
        );
    }
    println!(
        "completeness: t = {:.12}, s = {:.12}",
        spectrum.t_completeness(),
        spectrum.s_completeness()
    );

    let p = predict(&model)?;
    let (plus, minus) = spectrum.search_pair().expect("a root on each side of zero");
    println!(
        "search pair: exact ({plus:+.6}, {minus:+.6}), predicted ({:+.6}, {:+.6})",
        p.lambda_plus, p.lambda_minus
    );
    let amp = exact_evolution(&spectrum, p.q_max);
    println!(
        "|<t|S^q_m|s>|^2 = {:.4} (predicted {:.4}, validity margin {:.1}: the two-level picture is rough here)",
        amp.norm_sqr(),
        p.p_max,
        p.validity_margin
    );
    Ok(())
}
