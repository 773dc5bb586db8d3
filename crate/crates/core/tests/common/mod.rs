//! Random gapped spectra shared by the integration suites.

#![allow(dead_code)]

use std::f64::consts::PI;

use qsearch::{moments, wrap_phase, Level, SpectralModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub enum PhiChoice {
    /// Uniform in `[0.2, pi]` with a random sign.
    Random,
    /// Chosen so that `A = 0`.
    Matched,
    Pi,
}

/// `levels - 1` gapped levels with random phases and weights, plus one
/// kernel level of weight `alpha^2`.
pub fn random_model(
    seed: u64,
    levels: usize,
    alpha: f64,
    gap: f64,
    choice: PhiChoice,
) -> SpectralModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gapped = Vec::with_capacity(levels);
    for _ in 1..levels {
        let mag = rng.gen_range(gap..PI);
        let theta = if rng.gen::<bool>() { mag } else { -mag };
        let raw: f64 = rng.gen_range(0.05..1.0);
        gapped.push((theta, raw, rng.gen_range(-PI..PI)));
    }
    let total: f64 = gapped.iter().map(|g| g.1).sum();
    let rest = 1.0 - alpha * alpha;
    let mut out = vec![Level {
        tau_phase: rng.gen_range(-PI..PI),
        ..Level::with_weight(0.0, alpha * alpha)
    }];
    for (theta, raw, phase) in gapped {
        out.push(Level {
            tau_phase: phase,
            ..Level::with_weight(theta, raw / total * rest)
        });
    }
    let mut model = SpectralModel::new(PI, out);
    model.phi = match choice {
        PhiChoice::Pi => PI,
        PhiChoice::Random => {
            let mag = rng.gen_range(0.2..=PI);
            if rng.gen::<bool>() || mag == PI {
                mag
            } else {
                -mag
            }
        }
        PhiChoice::Matched => {
            let l1 = moments(&model).expect("gapped").lambda1;
            wrap_phase(2.0 * 1f64.atan2(-l1))
        }
    };
    model
}

/// Log-uniform overlap in `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
