//! Spectral model of the diffusion-like operator `D_s` and the closed-form
//! performance predictions derived from its eigenphases and target overlaps.
//!
//! A [`SpectralModel`] lists the eigenphases `theta` of `D_s` together with the
//! overlaps `<l|t>` of the target state. Everything about the search operator
//! `S = D_s I_t^phi` that the two-eigenphase approximation needs follows from
//! two weighted moments of `cot(theta / 2)`:
//!
//! ```text
//! Lambda_p = sum_{theta != 0} |<l|t>|^2 cot^p(theta / 2)
//! A = cot(phi / 2) + Lambda_1,   B^2 = 1 + Lambda_2
//! ```
//!
//! The moments here are evaluated exactly from the model; only the downstream
//! eigenphase formulas carry the usual `O(alpha^2)` truncation.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{cot_half, sin_half, wrap_phase};
use crate::error::{Error, Result};
use crate::simulate::{Engine, Trace};

/// Sum-of-weights deviation accepted without touching the model.
pub const EXACT_NORM_TOL: f64 = 1e-10;
/// Sum-of-weights deviation that is still repaired by renormalization.
pub const RENORM_TOL: f64 = 1e-6;
/// Validity margins below this value raise the warning flag.
pub const MARGIN_WARNING: f64 = 10.0;

/// One (possibly degenerate) eigenspace of `D_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Eigenphase in radians.
    pub theta: f64,
    /// Magnitude of `<l|t>` for each of the `multiplicity` eigenvectors.
    pub tau_mag: f64,
    /// Phase of `<l|t>`.
    #[serde(default)]
    pub tau_phase: f64,
    #[serde(default = "one")]
    pub multiplicity: u64,
    #[serde(default)]
    pub label: String,
}

fn one() -> u64 {
    1
}

impl Level {
    pub fn new(theta: f64, tau_mag: f64) -> Self {
        Level {
            theta,
            tau_mag,
            tau_phase: 0.0,
            multiplicity: 1,
            label: String::new(),
        }
    }

    /// A level carrying target weight `weight` in a single eigenvector.
    pub fn with_weight(theta: f64, weight: f64) -> Self {
        Level::new(theta, weight.sqrt())
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_multiplicity(mut self, multiplicity: u64) -> Self {
        self.multiplicity = multiplicity;
        self
    }

    /// Total target weight `multiplicity * tau_mag^2` of the eigenspace.
    pub fn weight(&self) -> f64 {
        self.multiplicity as f64 * self.tau_mag * self.tau_mag
    }

    /// Projection amplitude of `|t>` onto the eigenspace, as one coordinate.
    pub fn amplitude(&self) -> Complex64 {
        let mag = (self.multiplicity as f64).sqrt() * self.tau_mag;
        Complex64::from_polar(mag, self.tau_phase)
    }

    fn is_kernel(&self) -> bool {
        self.theta == 0.0
    }
}

/// Eigenspectrum of `D_s` seen by the target, plus the oracle phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub phi: f64,
    pub levels: Vec<Level>,
    #[serde(default)]
    pub meta: String,
}

impl SpectralModel {
    pub fn new(phi: f64, levels: Vec<Level>) -> Self {
        SpectralModel {
            phi,
            levels,
            meta: String::new(),
        }
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }

    pub fn total_weight(&self) -> f64 {
        self.levels.iter().map(Level::weight).sum()
    }

    /// `alpha = |<t|s>|`, the root of the total weight sitting at `theta = 0`.
    pub fn alpha(&self) -> f64 {
        self.kernel_weight().sqrt()
    }

    pub(crate) fn kernel_weight(&self) -> f64 {
        self.levels
            .iter()
            .filter(|l| l.is_kernel())
            .map(Level::weight)
            .sum()
    }

    /// Copy with every eigenphase (and `phi`) wrapped onto `(-pi, pi]`.
    /// Out-of-range inputs are logged.
    pub fn wrapped(&self) -> SpectralModel {
        let mut out = self.clone();
        for (i, level) in out.levels.iter_mut().enumerate() {
            if level.theta.is_finite() && !(-PI..=PI).contains(&level.theta) {
                let w = wrap_phase(level.theta);
                log::warn!("level {i}: theta {} wrapped to {w}", level.theta);
                level.theta = w;
            }
        }
        if self.phi.is_finite() && !(self.phi > -PI && self.phi <= PI) {
            let w = wrap_phase(self.phi);
            log::warn!("phi {} wrapped to {w}", self.phi);
            out.phi = w;
        }
        out
    }

    pub fn from_json(text: &str) -> Result<SpectralModel> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Checks the model invariants.
///
/// Returns the model unchanged when the weights sum to one within
/// [`EXACT_NORM_TOL`]; rescales `tau_mag` when the deviation is below
/// [`RENORM_TOL`]; fails otherwise.
pub fn validate(model: &SpectralModel) -> Result<SpectralModel> {
    check_phi(model.phi)?;
    for (index, level) in model.levels.iter().enumerate() {
        if !level.theta.is_finite() || level.theta.abs() > PI {
            return Err(Error::PhaseRange {
                what: "theta",
                value: level.theta,
            });
        }
        if !level.tau_mag.is_finite() || level.tau_mag < 0.0 {
            return Err(Error::InvalidLevel {
                index,
                reason: format!("tau_mag = {}", level.tau_mag),
            });
        }
        if !level.tau_phase.is_finite() {
            return Err(Error::InvalidLevel {
                index,
                reason: "non-finite tau_phase".into(),
            });
        }
        if level.multiplicity == 0 {
            return Err(Error::InvalidLevel {
                index,
                reason: "multiplicity must be at least 1".into(),
            });
        }
    }

    let sum = model.total_weight();
    let deviation = (sum - 1.0).abs();
    let mut out = model.clone();
    if deviation.is_nan() || deviation > RENORM_TOL {
        return Err(Error::Normalization { sum });
    }
    if deviation > EXACT_NORM_TOL {
        let scale = sum.sqrt().recip();
        for level in &mut out.levels {
            level.tau_mag *= scale;
        }
    }

    if !out.levels.iter().any(|l| l.is_kernel() && l.tau_mag > 0.0) {
        return Err(Error::EmptyKernel);
    }
    Ok(out)
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi <= -PI || phi > PI || phi == 0.0 {
        return Err(Error::PhaseRange {
            what: "phi",
            value: phi,
        });
    }
    Ok(())
}

/// Merges levels that share an eigenphase into a single level carrying the
/// summed weight. `-pi` and `pi` denote the same eigenvalue and are merged
/// under `pi`. Levels that are already unique are left untouched.
pub fn merge_degenerate(model: &SpectralModel) -> SpectralModel {
    let canonical = |theta: f64| if theta == -PI { PI } else { theta };
    let mut order: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<u64, usize> = HashMap::new();
    for (i, level) in model.levels.iter().enumerate() {
        // +0.0 and -0.0 must land in the same bucket.
        let theta = canonical(level.theta) + 0.0;
        let key = theta.to_bits();
        match slot.get(&key) {
            Some(&k) => order[k].push(i),
            None => {
                slot.insert(key, order.len());
                order.push(vec![i]);
            }
        }
    }

    let levels = order
        .into_iter()
        .map(|group| {
            let first = &model.levels[group[0]];
            let theta = canonical(first.theta) + 0.0;
            if group.len() == 1 {
                return Level {
                    theta,
                    ..first.clone()
                };
            }
            let weight: f64 = group.iter().map(|&i| model.levels[i].weight()).sum();
            let label = if first.label.is_empty() {
                format!("merged x{}", group.len())
            } else {
                format!("{} (+{})", first.label, group.len() - 1)
            };
            Level::with_weight(theta, weight).labelled(label)
        })
        .collect();

    SpectralModel {
        phi: model.phi,
        levels,
        meta: model.meta.clone(),
    }
}

/// Overlap, spectral gap and the first two `cot(theta/2)` moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub alpha: f64,
    pub theta_min: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Moments {
    /// `Lambda_1^2 <= (1 - alpha^2) Lambda_2`, with rounding slack.
    pub fn satisfies_cauchy_schwarz(&self) -> bool {
        let lhs = self.lambda1 * self.lambda1;
        let rhs = (1.0 - self.alpha * self.alpha) * self.lambda2;
        lhs <= rhs * (1.0 + 1e-12) + 1e-300
    }

    /// `|Lambda_p| <= (2 / theta_min)^p` for `p = 1, 2`.
    pub fn satisfies_gap_bounds(&self) -> bool {
        let bound = 2.0 / self.theta_min;
        self.lambda1.abs() <= bound * (1.0 + 1e-12) && self.lambda2 <= bound * bound * (1.0 + 1e-12)
    }
}

/// Moments of `cot(theta/2)` under the target-weight distribution.
///
/// `theta_min` is taken over the gapped levels that carry target weight;
/// levels orthogonal to `|t>` never enter the dynamics.
pub fn moments(model: &SpectralModel) -> Result<Moments> {
    let mut alpha2 = 0.0;
    let mut theta_min = f64::INFINITY;
    let mut lambda1 = 0.0;
    let mut lambda2 = 0.0;
    for level in &model.levels {
        let w = level.weight();
        if level.is_kernel() {
            alpha2 += w;
            continue;
        }
        if w > 0.0 {
            theta_min = theta_min.min(level.theta.abs());
        }
        let c = cot_half(level.theta);
        lambda1 += w * c;
        lambda2 += w * c * c;
    }
    if !theta_min.is_finite() {
        return Err(Error::Gap);
    }
    Ok(Moments {
        alpha: alpha2.sqrt(),
        theta_min,
        lambda1,
        lambda2,
    })
}

/// Detuning `A` and broadening `B` of the reduced quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
}

pub fn coefficients(moments: &Moments, phi: f64) -> Result<Coefficients> {
    if phi == 0.0 || !phi.is_finite() {
        return Err(Error::PhaseRange {
            what: "phi",
            value: phi,
        });
    }
    debug_assert!(moments.satisfies_cauchy_schwarz(), "{moments:?}");
    Ok(Coefficients {
        a: cot_half(phi) + moments.lambda1,
        b: (1.0 + moments.lambda2).sqrt(),
    })
}

/// Closed-form performance of `S = D_s I_t^phi` in the two-eigenphase picture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub phi: f64,
    #[serde(flatten)]
    pub moments: Moments,
    #[serde(flatten)]
    pub coefficients: Coefficients,
    pub eta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub p_max: f64,
    pub q_max: u64,
    pub query_complexity: f64,
    pub validity_margin: f64,
    pub margin_warning: bool,
}

impl Prediction {
    pub fn alpha(&self) -> f64 {
        self.moments.alpha
    }

    pub fn a(&self) -> f64 {
        self.coefficients.a
    }

    pub fn b(&self) -> f64 {
        self.coefficients.b
    }

    /// `lambda_plus - lambda_minus`, the rotation rate of the search.
    pub fn delta_lambda(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }

    /// `|<t|S^q|s>|` from the two-eigenvector expansion.
    pub fn amplitude_at(&self, q: u64) -> f64 {
        let sin2eta = (2.0 * self.eta).sin();
        let b = self.b();
        let q_half = q as f64 + 0.5;
        sin2eta / (b * sin_half(self.phi).abs())
            * (2.0 * q_half * self.alpha() / (b * sin2eta)).sin()
    }

    /// Tolerance used when comparing this prediction to exact dynamics:
    /// `max(0.02, 5 (alpha + |lambda|/theta_min))`.
    pub fn peak_tolerance(&self) -> f64 {
        let lam = self.lambda_plus.abs().max(self.lambda_minus.abs());
        (5.0 * (self.alpha() + lam / self.moments.theta_min)).max(0.02)
    }
}

pub fn predict(model: &SpectralModel) -> Result<Prediction> {
    let model = validate(model)?;
    let m = moments(&model)?;
    let c = coefficients(&m, model.phi)?;
    Ok(prediction_from_parts(model.phi, m, c))
}

pub(crate) fn prediction_from_parts(phi: f64, m: Moments, c: Coefficients) -> Prediction {
    let (alpha, a, b) = (m.alpha, c.a, c.b);
    // cot(2 eta) = A / (2 alpha B), with 2 eta in (0, pi).
    let two_eta = (2.0 * alpha * b).atan2(a);
    let eta = 0.5 * two_eta;
    let scale = 2.0 * alpha / b;
    let lambda_plus = scale * eta.tan();
    let lambda_minus = -scale / eta.tan();

    let sin2eta = if a == 0.0 { 1.0 } else { two_eta.sin() };
    let sin_phi = sin_half(phi);
    // Outside the validity regime the formula can exceed one.
    let p_max = (sin2eta * sin2eta / (b * b * sin_phi * sin_phi)).min(1.0);
    let q_max = (PI * b * sin2eta / (4.0 * alpha)).floor() as u64;
    let query_complexity = PI / (4.0 * alpha) * b.powi(3) * sin_phi * sin_phi / sin2eta;
    let validity_margin = m.theta_min * b * b / (2.0 * alpha * b + 2.0 * a.abs());
    let margin_warning = validity_margin < MARGIN_WARNING;
    if margin_warning {
        log::debug!("validity margin {validity_margin:.3} below {MARGIN_WARNING}");
    }

    Prediction {
        phi,
        moments: m,
        coefficients: c,
        eta,
        lambda_plus,
        lambda_minus,
        p_max,
        q_max,
        query_complexity,
        validity_margin,
        margin_warning,
    }
}

/// Predicted success probabilities `|<t|S^q|s>|^2` for `q = 0..=q_max`.
pub fn overlap_curve_predicted(model: &SpectralModel, q_max: u64) -> Result<Trace> {
    let p = predict(model)?;
    let probs = (0..=q_max)
        .map(|q| {
            let amp = p.amplitude_at(q);
            amp * amp
        })
        .collect();
    Ok(Trace::new(Engine::Predicted, probs))
}

/// Maps a model of `D_t` (overlaps `<j|s>`) onto the equivalent model for
/// `S`-type analysis of `T = I_s^varphi D_t`: eigenphases flip sign and the
/// oracle phase becomes `-varphi`.
pub fn time_reverse(model: &SpectralModel, varphi: f64) -> Result<SpectralModel> {
    check_phi(varphi)?;
    let mut probe = model.clone();
    probe.phi = varphi;
    let model = validate(&probe)?;
    let levels = model
        .levels
        .iter()
        .map(|l| Level {
            theta: -l.theta,
            ..l.clone()
        })
        .collect();
    Ok(SpectralModel {
        phi: wrap_phase(-varphi),
        levels,
        meta: if model.meta.is_empty() {
            "time-reversed".into()
        } else {
            format!("time-reversed {}", model.meta)
        },
    })
}
