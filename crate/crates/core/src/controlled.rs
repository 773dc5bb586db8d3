//! Ancilla-controlled transforms of the diffusion operator, expressed
//! directly on the spectral model.
//!
//! [`algorithm1`] runs `D_s` or `D_s^dagger` depending on an ancilla prepared
//! in `|+>`, which symmetrizes the spectrum and cancels the first moment.
//! [`algorithm2`] runs `D_s` on ancilla `|0>` and a phase flip on `|1>`, which
//! shrinks every moment by `sin^2(zeta)` at the cost of a smaller overlap.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::{find_peak, iterate};
use crate::spectral::{coefficients, moments, predict, validate, Level, SpectralModel};

/// First-moment magnitude accepted as zero by [`algorithm2`].
pub const MOMENT_TOL: f64 = 1e-9;
/// Below this `B` the small-`zeta` optimum is not meaningful.
pub const ZETA_DEGENERATE_B: f64 = 2.0;
const ZETA_GRID: usize = 4001;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlledResult {
    pub model: SpectralModel,
    pub zeta: Option<f64>,
    pub alpha_prime: f64,
    pub b_prime: f64,
}

fn b_of(model: &SpectralModel) -> Result<f64> {
    Ok(coefficients(&moments(model)?, PI)?.b)
}

/// Symmetrizes the spectrum: every level `(theta, w)` becomes the adjacent
/// pair `(theta, w/2)`, `(-theta, w/2)`, and the oracle phase becomes `pi`.
///
/// Because the pairs are adjacent, the first moment sums to exactly zero.
pub fn algorithm1(model: &SpectralModel) -> Result<ControlledResult> {
    let model = validate(model)?;
    let scale = 0.5f64.sqrt();
    let mut levels = Vec::with_capacity(2 * model.levels.len());
    for level in &model.levels {
        let half = Level {
            tau_mag: level.tau_mag * scale,
            ..level.clone()
        };
        let mirrored = if level.theta.abs() == PI {
            PI
        } else {
            -level.theta + 0.0
        };
        levels.push(Level {
            label: format!("{}|0", level.label),
            ..half.clone()
        });
        levels.push(Level {
            theta: mirrored,
            label: format!("{}|1", level.label),
            ..half
        });
    }
    let out = SpectralModel::new(PI, levels).with_meta(format!("alg1({})", model.meta));
    Ok(ControlledResult {
        alpha_prime: out.alpha(),
        b_prime: b_of(&out)?,
        model: out,
        zeta: None,
    })
}

/// Scales every overlap by `sin(zeta)` and adds an aggregate level at `pi`
/// holding the remaining weight `cos^2(zeta)`.
///
/// The input must already have a vanishing first moment and `phi = pi`.
pub fn algorithm2(model: &SpectralModel, zeta: f64) -> Result<ControlledResult> {
    if !(zeta > 0.0 && zeta <= FRAC_PI_2) {
        return Err(Error::PhaseRange {
            what: "zeta",
            value: zeta,
        });
    }
    let model = validate(model)?;
    if model.phi != PI {
        return Err(Error::PhaseRange {
            what: "phi (algorithm 2 needs pi)",
            value: model.phi,
        });
    }
    let m = moments(&model)?;
    if m.lambda1.abs() > MOMENT_TOL {
        return Err(Error::Moment(m.lambda1));
    }
    let (s, c) = if zeta == FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        zeta.sin_cos()
    };
    let mut levels: Vec<Level> = model
        .levels
        .iter()
        .map(|l| Level {
            tau_mag: l.tau_mag * s,
            ..l.clone()
        })
        .collect();
    levels.push(Level::new(PI, c).labelled("ancilla=1"));
    let out =
        SpectralModel::new(PI, levels).with_meta(format!("alg2({}, zeta={zeta})", model.meta));
    Ok(ControlledResult {
        alpha_prime: out.alpha(),
        b_prime: b_of(&out)?,
        model: out,
        zeta: Some(zeta),
    })
}

/// `Q''(zeta) = (pi / 4 alpha) (1 + B^2 zeta^2)^{3/2} / zeta`.
pub fn q_double_prime(alpha: f64, b: f64, zeta: f64) -> f64 {
    PI / (4.0 * alpha) * (1.0 + b * b * zeta * zeta).powf(1.5) / zeta
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaScan {
    pub alpha: f64,
    pub b: f64,
    pub zeta_star: f64,
    pub q_min: f64,
    /// `(zeta, Q''(zeta))` on the log-spaced grid.
    pub curve: Vec<(f64, f64)>,
    /// Set when `B` is too small for the small-`zeta` optimum to apply.
    pub degenerate: bool,
}

impl ZetaScan {
    /// `1 / (sqrt(2) B)`.
    pub fn zeta_analytic(&self) -> f64 {
        (2f64.sqrt() * self.b).recip()
    }

    /// `(3 sqrt(3) / 2) pi B / (4 alpha)`.
    pub fn q_min_analytic(&self) -> f64 {
        1.5 * 3f64.sqrt() * PI * self.b / (4.0 * self.alpha)
    }
}

/// Scans `Q''(zeta)` on a log grid over `[1/(10B), min(pi/2, 10/B)]`.
pub fn optimize_zeta(model: &SpectralModel) -> Result<ZetaScan> {
    let model = validate(model)?;
    let m = moments(&model)?;
    if m.lambda1.abs() > MOMENT_TOL {
        return Err(Error::Moment(m.lambda1));
    }
    let b = (1.0 + m.lambda2).sqrt();
    let lo = (10.0 * b).recip();
    let hi = FRAC_PI_2.min(10.0 / b);
    let ratio = (hi / lo).ln();
    let curve: Vec<(f64, f64)> = (0..ZETA_GRID)
        .map(|i| {
            let zeta = lo * (ratio * i as f64 / (ZETA_GRID - 1) as f64).exp();
            (zeta, q_double_prime(m.alpha, b, zeta))
        })
        .collect();
    let &(zeta_star, q_min) = curve
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid is non-empty");
    let scan = ZetaScan {
        alpha: m.alpha,
        b,
        zeta_star,
        q_min,
        curve,
        degenerate: b < ZETA_DEGENERATE_B,
    };
    if !scan.degenerate {
        debug_assert!((zeta_star / scan.zeta_analytic() - 1.0).abs() <= 0.1);
        debug_assert!((q_min / scan.q_min_analytic() - 1.0).abs() <= 0.05);
    }
    Ok(scan)
}

/// Closed-form cost against a full simulation at one `zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaCheck {
    pub zeta: f64,
    pub q_model: f64,
    pub q_peak: usize,
    pub p_peak: f64,
    /// `q_peak / p_peak`.
    pub q_simulated: f64,
}

/// Runs [`algorithm2`] and the level-basis iteration at each `zeta`.
pub fn cross_check_zeta(model: &SpectralModel, zetas: &[f64]) -> Result<Vec<ZetaCheck>> {
    let m = moments(&validate(model)?)?;
    let b = (1.0 + m.lambda2).sqrt();
    zetas
        .iter()
        .map(|&zeta| {
            let transformed = algorithm2(model, zeta)?.model;
            let q_max = 2 * predict(&transformed)?.q_max + 2;
            let peak = find_peak(&iterate(&transformed, q_max)?)?;
            Ok(ZetaCheck {
                zeta,
                q_model: q_double_prime(m.alpha, b, zeta),
                q_peak: peak.q_peak,
                p_peak: peak.p_peak,
                q_simulated: peak.q_peak as f64 / peak.p_peak,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::wrap_phase;
    use approx::assert_relative_eq;

    fn grover(alpha: f64, phi_s: f64, phi_t: f64) -> SpectralModel {
        SpectralModel::new(
            phi_t,
            vec![
                Level::with_weight(0.0, alpha * alpha),
                Level::with_weight(wrap_phase(-phi_s), 1.0 - alpha * alpha),
            ],
        )
    }

    fn with_lambda2(lambda2: f64, alpha: f64) -> SpectralModel {
        // Symmetric pair at +-theta carrying the rest of the weight.
        let w = 1.0 - alpha * alpha;
        let theta = 2.0 * (w / lambda2).sqrt().atan();
        SpectralModel::new(
            PI,
            vec![
                Level::with_weight(0.0, alpha * alpha),
                Level::with_weight(theta, w / 2.0),
                Level::with_weight(-theta, w / 2.0),
            ],
        )
    }

    #[test]
    fn alg1_cancels_first_moment() {
        let base = grover(0.1, FRAC_PI_2, FRAC_PI_2);
        let before = moments(&base).unwrap();
        assert_relative_eq!(before.lambda1, -0.99, epsilon = 1e-12);
        let r = algorithm1(&base).unwrap();
        let after = moments(&r.model).unwrap();
        assert_eq!(after.lambda1, 0.0);
        assert_relative_eq!(after.lambda2, 0.99, epsilon = 1e-12);
        assert_relative_eq!(r.alpha_prime, 0.1, epsilon = 1e-15);
        assert_eq!(after.theta_min, before.theta_min);
        assert_eq!(r.model.phi, PI);
        assert_eq!(r.model.levels.len(), 4);
    }

    #[test]
    fn alg1_on_symmetric_model_keeps_moments() {
        let base = with_lambda2(3.0, 0.05);
        let r = algorithm1(&base).unwrap();
        let (a, b) = (moments(&base).unwrap(), moments(&r.model).unwrap());
        assert_relative_eq!(a.lambda2, b.lambda2, max_relative = 1e-14);
        assert_eq!(b.lambda1, 0.0);
        for pair in r.model.levels.chunks(2) {
            assert_relative_eq!(pair[0].weight(), pair[1].weight());
        }
    }

    #[test]
    fn alg1_prediction_is_optimal() {
        let base = grover(0.02, PI - 0.3, PI);
        let r = algorithm1(&base).unwrap();
        let p = predict(&r.model).unwrap();
        let b = r.b_prime;
        assert_relative_eq!(p.p_max, 1.0 / (b * b), epsilon = 1e-12);
        assert_eq!(p.q_max, (PI * b / (4.0 * 0.02)).floor() as u64);
    }

    #[test]
    fn alg1_maps_minus_pi_to_pi() {
        let base = SpectralModel::new(
            PI,
            vec![Level::with_weight(0.0, 0.5), Level::with_weight(PI, 0.5)],
        );
        let r = algorithm1(&base).unwrap();
        assert!(r.model.levels.iter().all(|l| l.theta != -PI));
    }

    #[test]
    fn alg2_zeta_half_pi_is_identity_plus_silent_level() {
        let base = with_lambda2(3.0, 0.05);
        let r = algorithm2(&base, FRAC_PI_2).unwrap();
        assert_eq!(&r.model.levels[..3], &base.levels[..]);
        assert_eq!(r.model.levels[3].weight(), 0.0);
        assert_eq!(r.model.levels[3].theta, PI);
    }

    #[test]
    fn alg2_broadening() {
        let base = with_lambda2(9.0, 0.01);
        let b = b_of(&base).unwrap();
        assert_relative_eq!(b, 10f64.sqrt(), epsilon = 1e-12);
        let zeta = (2f64.sqrt() * b).recip();
        let r = algorithm2(&base, zeta).unwrap();
        let expect = zeta.cos().powi(2) + 10.0 * zeta.sin().powi(2);
        assert_relative_eq!(r.b_prime * r.b_prime, expect, epsilon = 1e-12);
        assert!((r.b_prime * r.b_prime - 1.44255).abs() < 1e-5);
        assert_relative_eq!(r.alpha_prime, 0.01 * zeta.sin(), epsilon = 1e-15);
        assert_relative_eq!(r.model.total_weight(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn alg2_scales_moments() {
        let base = with_lambda2(3.0, 0.05);
        let r = algorithm2(&base, PI / 6.0).unwrap();
        let m = moments(&r.model).unwrap();
        assert_relative_eq!(m.lambda2, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn alg2_requires_zero_first_moment_and_pi() {
        let base = grover(0.1, FRAC_PI_2, PI);
        assert!(matches!(algorithm2(&base, 0.3), Err(Error::Moment(_))));
        let mut sym = with_lambda2(3.0, 0.05);
        sym.phi = 1.0;
        assert!(matches!(
            algorithm2(&sym, 0.3),
            Err(Error::PhaseRange { .. })
        ));
        assert!(algorithm2(&with_lambda2(3.0, 0.05), 0.0).is_err());
        assert!(algorithm2(&with_lambda2(3.0, 0.05), 2.0).is_err());
    }

    #[test]
    fn zeta_optimum_b10() {
        let scan = optimize_zeta(&with_lambda2(99.0, 1e-3)).unwrap();
        assert_relative_eq!(scan.b, 10.0, epsilon = 1e-10);
        assert!(!scan.degenerate);
        assert!((scan.zeta_star - 0.0707).abs() < 1e-3, "{}", scan.zeta_star);
        assert!((scan.q_min / 2.0405e4 - 1.0).abs() < 1e-3, "{}", scan.q_min);
        let ratio = scan.q_min / (PI * scan.b / (4.0 * scan.alpha));
        assert!((ratio - 1.5 * 3f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn zeta_degenerate_for_small_b() {
        let base = SpectralModel::new(
            PI,
            vec![Level::with_weight(0.0, 0.01), Level::with_weight(PI, 0.99)],
        );
        let scan = optimize_zeta(&base).unwrap();
        assert!(scan.degenerate);
        assert_eq!(scan.b, 1.0);
        assert_eq!(scan.curve.len(), ZETA_GRID);
    }

    #[test]
    fn zeta_cross_check_tracks_model() {
        let base = with_lambda2(24.0, 2e-3);
        let scan = optimize_zeta(&base).unwrap();
        let checks = cross_check_zeta(&base, &[scan.zeta_star]).unwrap();
        let c = checks[0];
        assert!((c.q_simulated / c.q_model - 1.0).abs() < 0.1, "{c:?}");
        assert!(c.p_peak >= 0.5);
    }
}
