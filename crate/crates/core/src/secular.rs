//! Exact eigen-solution of `S = D_s I_t^phi` from the secular equation
//!
//! ```text
//! F(lambda) = sum_l w_l cot((lambda - theta_l) / 2) - cot(phi / 2) = 0
//! ```
//!
//! `F` falls strictly from `+inf` to `-inf` between circularly consecutive
//! poles `theta_l`, so every interval holds exactly one root. Roots are found
//! by bisection and the eigenvectors are rebuilt from the rank-one structure
//! of `I_t^phi`. This is the reference the closed-form predictions are checked
//! against; no dense eigensolver is involved.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{cot_half, sin_half, wrap_phase};
use crate::error::{Error, Result};
use crate::simulate::{Engine, Trace};
use crate::spectral::{validate, SpectralModel};

/// Default bracket width for root searches.
pub const DEFAULT_TOL: f64 = 1e-13;
const MAX_BISECTIONS: usize = 80;
const MIN_POLE_OFFSET: f64 = 1e-13;
/// Distances below this count as sitting on a pole.
const POLE_GUARD: f64 = 1e-15;
const PARALLEL_THRESHOLD: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    /// `<t|lambda>`, real and non-negative by convention.
    pub t_overlap: Complex64,
    /// `<s|lambda>`.
    pub s_overlap: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSpectrum {
    /// One pair per interval between consecutive coupled eigenphases, sorted by `lambda`.
    pub pairs: Vec<EigenPair>,
    /// Target weight held by eigenvectors that never couple to the search.
    pub silent_weight: f64,
    /// Eigenphases of the uncoupled (zero-weight) levels, left unchanged by `S`.
    pub silent_phases: Vec<f64>,
}

impl ExactSpectrum {
    pub fn s_completeness(&self) -> f64 {
        self.pairs.iter().map(|p| p.s_overlap.norm_sqr()).sum()
    }

    pub fn t_completeness(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.t_overlap.norm_sqr())
            .sum::<f64>()
            + self.silent_weight
    }

    /// The roots bracketing zero from above and below: the search pair.
    pub fn search_pair(&self) -> Option<(f64, f64)> {
        let plus = self
            .pairs
            .iter()
            .map(|p| p.lambda)
            .filter(|&l| l > 0.0)
            .min_by(f64::total_cmp)?;
        let minus = self
            .pairs
            .iter()
            .map(|p| p.lambda)
            .filter(|&l| l < 0.0)
            .max_by(f64::total_cmp)?;
        Some((plus, minus))
    }
}

/// Coupled levels: distinct phases with positive weight, sorted ascending.
struct Poles {
    theta: Vec<f64>,
    weight: Vec<f64>,
    cot_phi: f64,
}

impl Poles {
    fn from_model(model: &SpectralModel) -> Result<Poles> {
        let mut coupled: Vec<(f64, f64)> = model
            .levels
            .iter()
            .filter(|l| l.weight() > 0.0)
            .map(|l| (if l.theta == -PI { PI } else { l.theta + 0.0 }, l.weight()))
            .collect();
        coupled.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in coupled.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Bracket {
                    lo: pair[0].0,
                    hi: pair[1].0,
                });
            }
        }
        Ok(Poles {
            theta: coupled.iter().map(|c| c.0).collect(),
            weight: coupled.iter().map(|c| c.1).collect(),
            cot_phi: cot_half(model.phi),
        })
    }

    fn len(&self) -> usize {
        self.theta.len()
    }

    /// Lower pole and width of the `k`-th interval; the last one wraps past `pi`.
    fn interval(&self, k: usize) -> (f64, f64) {
        let lo = self.theta[k];
        let hi = if k + 1 < self.len() {
            self.theta[k + 1]
        } else {
            self.theta[0] + TAU
        };
        (lo, hi - lo)
    }

    /// `F` at `lambda = theta_k + u`, with the two bracketing poles
    /// evaluated from `u` directly to keep precision near them.
    fn secular(&self, k: usize, gap: f64, u: f64) -> f64 {
        let n = self.len();
        let upper = (k + 1) % n;
        let lo = self.theta[k];
        let mut sum = 0.0;
        for (j, (&theta, &w)) in self.theta.iter().zip(&self.weight).enumerate() {
            let d = if j == k {
                u
            } else if j == upper {
                u - gap
            } else {
                wrap_phase((lo - theta) + u)
            };
            sum += w * cot_half(d);
        }
        sum - self.cot_phi
    }

    fn root_in(&self, k: usize, tol: f64) -> Result<f64> {
        let (lo_pole, gap) = self.interval(k);
        let offset = MIN_POLE_OFFSET.max(tol / 10.0);
        if gap <= 2.0 * offset {
            return Err(Error::Bracket {
                lo: lo_pole,
                hi: wrap_phase(lo_pole + gap),
            });
        }
        let mut lo = offset;
        let mut hi = gap - offset;
        // A root closer to a pole than the offset: shrink towards the pole.
        while self.secular(k, gap, lo) <= 0.0 && lo > gap * f64::EPSILON {
            hi = lo;
            lo /= 16.0;
        }
        while self.secular(k, gap, hi) >= 0.0 && gap - hi > gap * f64::EPSILON {
            lo = hi;
            hi = gap - (gap - hi) / 16.0;
        }
        // Clustered poles need a width relative to the interval.
        let width = tol.min(tol * gap);
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= width {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.secular(k, gap, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(wrap_phase(lo_pole + 0.5 * (lo + hi)))
    }
}

/// Solves the secular equation on a merged model.
///
/// Returns one eigenpair per coupled level, sorted by eigenphase.
pub fn solve_secular(model: &SpectralModel, tol: f64) -> Result<ExactSpectrum> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::Tolerance(tol));
    }
    let model = validate(model)?;
    let poles = Poles::from_model(&model)?;
    let roots: Result<Vec<f64>> = if poles.len() >= PARALLEL_THRESHOLD {
        (0..poles.len())
            .into_par_iter()
            .map(|k| poles.root_in(k, tol))
            .collect()
    } else {
        (0..poles.len()).map(|k| poles.root_in(k, tol)).collect()
    };
    let mut pairs = roots?
        .into_iter()
        .map(|lambda| reconstruct_overlaps(&model, lambda))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

    let silent: Vec<_> = model.levels.iter().filter(|l| l.weight() == 0.0).collect();
    Ok(ExactSpectrum {
        pairs,
        silent_weight: silent.iter().map(|l| l.weight()).sum(),
        silent_phases: silent.iter().map(|l| l.theta).collect(),
    })
}

/// Level coordinates `<l|lambda>` of the eigenvector with eigenphase `lambda`,
/// normalized with `<t|lambda>` real and positive.
fn eigenvector(model: &SpectralModel, lambda: f64) -> Result<(f64, Vec<Complex64>)> {
    let half_phi = sin_half(model.phi);
    let mut ratios = Vec::with_capacity(model.levels.len());
    let mut csc2 = 0.0;
    for level in &model.levels {
        let w = level.weight();
        if w == 0.0 {
            ratios.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let d = wrap_phase(lambda - level.theta);
        let sd = (0.5 * d).sin();
        if d.abs() < POLE_GUARD || sd == 0.0 {
            return Err(Error::Singularity {
                lambda,
                theta: level.theta,
            });
        }
        csc2 += w / (sd * sd);
        // (1 - e^{i phi}) / (1 - e^{i d}) = sin(phi/2)/sin(d/2) e^{i (phi - d)/2}
        let ratio = Complex64::from_polar(half_phi / sd, 0.5 * (model.phi - d));
        ratios.push(level.amplitude() * ratio);
    }
    let t_overlap = 1.0 / (half_phi.abs() * csc2.sqrt());
    let coords = ratios.into_iter().map(|r| r * t_overlap).collect();
    Ok((t_overlap, coords))
}

/// Overlaps of the eigenvector at `lambda` with `|t>` and `|s>`.
pub fn reconstruct_overlaps(model: &SpectralModel, lambda: f64) -> Result<EigenPair> {
    let (t_overlap, coords) = eigenvector(model, lambda)?;
    let alpha = model.alpha();
    let s_overlap: Complex64 = model
        .levels
        .iter()
        .zip(&coords)
        .filter(|(l, _)| l.theta == 0.0)
        .map(|(l, c)| l.amplitude().conj() * c)
        .sum::<Complex64>()
        / alpha;
    Ok(EigenPair {
        lambda,
        t_overlap: Complex64::new(t_overlap, 0.0),
        s_overlap,
    })
}

/// `<t|S^q|s> = sum_k e^{i q lambda_k} <t|lambda_k><lambda_k|s>`.
pub fn exact_evolution(spectrum: &ExactSpectrum, q: u64) -> Complex64 {
    let q = q as f64;
    spectrum
        .pairs
        .iter()
        .map(|p| Complex64::from_polar(1.0, q * p.lambda) * p.t_overlap * p.s_overlap.conj())
        .sum()
}

/// Success probabilities from the exact spectrum for `q = 0..=q_max`.
pub fn secular_trace(spectrum: &ExactSpectrum, q_max: u64) -> Trace {
    let probs = (0..=q_max)
        .map(|q| exact_evolution(spectrum, q).norm_sqr())
        .collect();
    Trace::new(Engine::Secular, probs)
}

/// `||S v - e^{i lambda} v||` for the eigenvector rebuilt at `pair.lambda`,
/// with `S` applied directly in level coordinates.
pub fn residual_check(model: &SpectralModel, pair: &EigenPair) -> Result<f64> {
    let (_, v) = eigenvector(model, pair.lambda)?;
    let tau: Vec<Complex64> = model.levels.iter().map(|l| l.amplitude()).collect();
    let overlap: Complex64 = tau.iter().zip(&v).map(|(t, x)| t.conj() * x).sum();
    let kick = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, model.phi)) * overlap;
    let rotation = Complex64::from_polar(1.0, pair.lambda);
    let residual: f64 = model
        .levels
        .iter()
        .zip(v.iter().zip(&tau))
        .map(|(l, (x, t))| {
            let sx = Complex64::from_polar(1.0, l.theta) * (x - kick * t);
            (sx - rotation * x).norm_sqr()
        })
        .sum();
    Ok(residual.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Level;
    use approx::assert_relative_eq;

    fn two_level(alpha: f64, phi: f64) -> SpectralModel {
        SpectralModel::new(
            phi,
            vec![
                Level::with_weight(0.0, alpha * alpha),
                Level::with_weight(PI, 1.0 - alpha * alpha),
            ],
        )
    }

    #[test]
    fn quarter_weight_roots_are_pi_over_three() {
        let s = solve_secular(&two_level(0.5, PI), 1e-14).unwrap();
        assert_eq!(s.pairs.len(), 2);
        assert_relative_eq!(s.pairs[0].lambda, -PI / 3.0, epsilon = 1e-13);
        assert_relative_eq!(s.pairs[1].lambda, PI / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn small_alpha_roots() {
        let s = solve_secular(&two_level(0.1, PI), 1e-14).unwrap();
        let expect = 2.0 * 0.1f64.asin();
        assert_relative_eq!(s.pairs[1].lambda, expect, epsilon = 1e-13);
        assert_relative_eq!(s.pairs[0].lambda, -expect, epsilon = 1e-13);
        assert!((s.pairs[1].lambda - 0.200335).abs() < 1e-6);
    }

    #[test]
    fn roots_satisfy_bisection_contract() {
        let model = SpectralModel::new(
            1.1,
            vec![
                Level::with_weight(0.0, 0.05),
                Level::with_weight(0.9, 0.45),
                Level::with_weight(-2.0, 0.3),
                Level::with_weight(2.5, 0.2),
            ],
        );
        let tol = 1e-10;
        let s = solve_secular(&model, tol).unwrap();
        assert_eq!(s.pairs.len(), 4);
        for p in &s.pairs {
            let (f, df) = secular_and_slope(&model, p.lambda);
            assert!(f.abs() <= df.abs() * tol, "F={f} F'={df}");
        }
    }

    fn secular_and_slope(model: &SpectralModel, lambda: f64) -> (f64, f64) {
        let mut f = -cot_half(model.phi);
        let mut df = 0.0;
        for l in &model.levels {
            let d = lambda - l.theta;
            f += l.weight() / (0.5 * d).tan();
            df -= 0.5 * l.weight() / (0.5 * d).sin().powi(2);
        }
        (f, df)
    }

    #[test]
    fn grover_t_overlaps_are_balanced() {
        for alpha in [0.01, 0.1, 0.4] {
            let s = solve_secular(&two_level(alpha, PI), DEFAULT_TOL).unwrap();
            for p in &s.pairs {
                assert_relative_eq!(p.t_overlap.norm_sqr(), 0.5, epsilon = 1e-12);
                assert_eq!(p.t_overlap.im, 0.0);
                assert!(p.t_overlap.re > 0.0);
            }
            assert_relative_eq!(s.s_completeness(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(s.t_completeness(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_lambda_is_rejected() {
        let m = two_level(0.1, PI);
        assert!(matches!(
            reconstruct_overlaps(&m, 0.0),
            Err(Error::Singularity { .. })
        ));
        assert!(matches!(
            reconstruct_overlaps(&m, PI),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn tolerance_and_bracket_errors() {
        let m = two_level(0.1, PI);
        assert!(matches!(solve_secular(&m, 0.0), Err(Error::Tolerance(_))));
        assert!(matches!(solve_secular(&m, 1e-3), Err(Error::Tolerance(_))));
        let dup = SpectralModel::new(
            PI,
            vec![
                Level::with_weight(0.0, 0.5),
                Level::with_weight(1.0, 0.25),
                Level::with_weight(1.0, 0.25),
            ],
        );
        assert!(matches!(
            solve_secular(&dup, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn silent_levels_are_reported_but_not_solved() {
        let m = SpectralModel::new(
            PI,
            vec![
                Level::with_weight(0.0, 0.1),
                Level::with_weight(1.0, 0.9),
                Level::with_weight(2.0, 0.0),
            ],
        );
        let s = solve_secular(&m, 1e-12).unwrap();
        assert_eq!(s.pairs.len(), 2);
        assert_eq!(s.silent_phases, vec![2.0]);
        assert_eq!(s.silent_weight, 0.0);
    }

    #[test]
    fn evolution_starts_at_alpha() {
        let m = SpectralModel::new(
            0.7,
            vec![
                Level::with_weight(0.0, 0.09),
                Level::with_weight(0.5, 0.41),
                Level::with_weight(-1.5, 0.5),
            ],
        );
        let s = solve_secular(&m, 1e-13).unwrap();
        let a0 = exact_evolution(&s, 0);
        assert_relative_eq!(a0.re, 0.3, epsilon = 1e-12);
        assert!(a0.im.abs() < 1e-12);
    }

    #[test]
    fn grover_evolution_q7() {
        let s = solve_secular(&two_level(0.1, PI), 1e-14).unwrap();
        let amp = exact_evolution(&s, 7).norm();
        let expect = (15.0 * 0.1f64.asin()).sin();
        assert_relative_eq!(amp, expect, epsilon = 1e-12);
        assert!((amp - 0.997669).abs() < 1e-6);
    }

    #[test]
    fn evolved_source_keeps_unit_norm() {
        let m = SpectralModel::new(
            2.0,
            vec![
                Level::with_weight(0.0, 0.02),
                Level::with_weight(0.4, 0.5),
                Level::with_weight(-0.8, 0.48),
            ],
        );
        let s = solve_secular(&m, 1e-13).unwrap();
        for q in [0u64, 3, 17, 200] {
            let norm: f64 = s
                .pairs
                .iter()
                .map(|p| (Complex64::from_polar(1.0, q as f64 * p.lambda) * p.s_overlap).norm_sqr())
                .sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grover_residual_at_closed_form_root() {
        let alpha: f64 = 0.05;
        let m = two_level(alpha, PI);
        let lambda = 2.0 * alpha.asin();
        let pair = reconstruct_overlaps(&m, lambda).unwrap();
        assert!(residual_check(&m, &pair).unwrap() <= 1e-12);
    }

    #[test]
    fn residual_grows_when_root_is_perturbed() {
        let m = SpectralModel::new(
            PI,
            vec![
                Level::with_weight(0.0, 0.01),
                Level::with_weight(0.6, 0.5),
                Level::with_weight(-1.3, 0.49),
            ],
        );
        let s = solve_secular(&m, 1e-13).unwrap();
        for pair in &s.pairs {
            let base = residual_check(&m, pair).unwrap();
            let moved = reconstruct_overlaps(&m, pair.lambda + 1e-3).unwrap();
            let bumped = residual_check(&m, &moved).unwrap();
            assert!(base <= 1e-10);
            assert!(bumped >= 10.0 * base.max(1e-12), "{base} -> {bumped}");
        }
    }

    #[test]
    fn wrap_interval_root_is_found() {
        // Poles at 0 and 3: the interval (3, 2 pi) wraps through pi.
        let m = SpectralModel::new(
            PI,
            vec![Level::with_weight(0.0, 0.5), Level::with_weight(3.0, 0.5)],
        );
        let s = solve_secular(&m, 1e-13).unwrap();
        assert_eq!(s.pairs.len(), 2);
        let has_wrapped = s.pairs.iter().any(|p| p.lambda < 0.0 || p.lambda > 3.0);
        assert!(has_wrapped);
        for p in &s.pairs {
            assert!(residual_check(&m, p).unwrap() < 1e-10);
        }
    }

    #[test]
    fn single_kernel_level_rotates_by_phi() {
        let m = SpectralModel::new(0.8, vec![Level::with_weight(0.0, 1.0)]);
        let s = solve_secular(&m, 1e-13).unwrap();
        assert_eq!(s.pairs.len(), 1);
        assert_relative_eq!(s.pairs[0].lambda, 0.8, epsilon = 1e-12);
    }
}
