//! Iterated evolution of `S^q|s>` in the eigenbasis of `D_s`.
//!
//! A state is carried as the coordinates `c_l = <l|psi>` over the model levels,
//! so one step of `S = D_s I_t^phi` costs `O(L)` regardless of the Hilbert
//! space dimension the model stands for.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{validate, SpectralModel};

/// Which engine produced a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Predicted,
    Secular,
    Iterated,
    Lattice,
    Dense,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Predicted,
        Engine::Secular,
        Engine::Iterated,
        Engine::Lattice,
        Engine::Dense,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Engine::Predicted => "predicted",
            Engine::Secular => "secular",
            Engine::Iterated => "iterated",
            Engine::Lattice => "lattice",
            Engine::Dense => "dense",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.tag() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown engine '{s}'")))
    }
}

/// Success probability `P_t(q)` for `q = 0..=q_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub engine: Engine,
    pub probs: Vec<f64>,
    pub q_peak: usize,
    pub p_peak: f64,
    /// Plain target-site probability (coin traced out), lattice engine only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_probs: Option<Vec<f64>>,
}

impl Trace {
    pub fn new(engine: Engine, probs: Vec<f64>) -> Trace {
        let (q_peak, p_peak) = argmax(&probs);
        Trace {
            engine,
            probs,
            q_peak,
            p_peak,
            site_probs: None,
        }
    }

    pub fn q_max(&self) -> usize {
        self.probs.len().saturating_sub(1)
    }

    /// Largest pointwise difference against another trace over the common window.
    pub fn max_abs_diff(&self, other: &Trace) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `# engine=<tag>`, any extra comment lines, the column header and
    /// one row per iteration. Values carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        writeln!(out, "# engine={}", self.engine)?;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        match &self.site_probs {
            Some(site) => {
                writeln!(out, "q,prob,site_prob")?;
                for (q, (p, s)) in self.probs.iter().zip(site).enumerate() {
                    writeln!(out, "{q},{p:.16e},{s:.16e}")?;
                }
            }
            None => {
                writeln!(out, "q,prob")?;
                for (q, p) in self.probs.iter().enumerate() {
                    writeln!(out, "{q},{p:.16e}")?;
                }
            }
        }
        Ok(())
    }
}

fn argmax(probs: &[f64]) -> (usize, f64) {
    probs
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (q, p)| {
            if p > best.1 {
                (q, p)
            } else {
                best
            }
        })
}

/// Level-basis state `c_l = <l|psi>`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelState {
    pub coeffs: Vec<Complex64>,
}

impl LevelState {
    /// The source state: `c_l = <l|t> / alpha` on the `theta = 0` levels.
    pub fn source(model: &SpectralModel) -> LevelState {
        let alpha = model.alpha();
        let coeffs = model
            .levels
            .iter()
            .map(|l| {
                if l.theta == 0.0 {
                    l.amplitude() / alpha
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        LevelState { coeffs }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(Complex64::norm_sqr).sum()
    }
}

/// Precomputed factors for repeated application of `D_s I_t^phi`.
struct Stepper {
    tau: Vec<Complex64>,
    phases: Vec<Complex64>,
    kick: Complex64,
}

impl Stepper {
    fn new(model: &SpectralModel) -> Stepper {
        Stepper {
            tau: model.levels.iter().map(|l| l.amplitude()).collect(),
            phases: model
                .levels
                .iter()
                .map(|l| Complex64::from_polar(1.0, l.theta))
                .collect(),
            kick: Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, model.phi),
        }
    }

    /// `<t|psi> = sum conj(tau_l) c_l`.
    fn target_overlap(&self, c: &[Complex64]) -> Complex64 {
        self.tau.iter().zip(c).map(|(t, x)| t.conj() * x).sum()
    }

    /// Selective phase rotation of the target by `kick = 1 - e^{i phi}`.
    fn oracle(&self, c: &mut [Complex64]) {
        let shift = self.kick * self.target_overlap(c);
        for (x, t) in c.iter_mut().zip(&self.tau) {
            *x -= shift * t;
        }
    }

    fn diffuse(&self, c: &mut [Complex64]) {
        for (x, p) in c.iter_mut().zip(&self.phases) {
            *x *= p;
        }
    }
}

/// Runs `S^q|s>` for `q = 0..=q_max` and records `|<t|S^q|s>|^2` before each
/// step and after the last.
pub fn iterate(model: &SpectralModel, q_max: u64) -> Result<Trace> {
    let model = validate(model)?;
    let stepper = Stepper::new(&model);
    let mut state = LevelState::source(&model);
    let mut probs = Vec::with_capacity(q_max as usize + 1);
    for q in 0..=q_max {
        probs.push(stepper.target_overlap(&state.coeffs).norm_sqr());
        if q == q_max {
            break;
        }
        stepper.oracle(&mut state.coeffs);
        stepper.diffuse(&mut state.coeffs);
        debug_assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
    }
    Ok(Trace::new(Engine::Iterated, probs))
}

/// Direct evolution under the time-reversed operator `T = I_s^varphi D_t`.
///
/// Here the model describes `D_t`: eigenphases `theta_j` with overlaps
/// `<j|s>` of the known start state. The walk starts from `|s>` itself and the
/// recorded probability is the overlap with the eigenvector
/// `|t> = (1/alpha) sum_{theta_j = 0} <t_j|s> |t_j>`.
pub fn iterate_reversed(model: &SpectralModel, varphi: f64, q_max: u64) -> Result<Trace> {
    let mut probe = model.clone();
    probe.phi = varphi;
    let model = validate(&probe)?;
    let stepper = Stepper::new(&model);
    let alpha = model.alpha();
    let mut coeffs: Vec<Complex64> = stepper.tau.clone();
    let readout: Vec<Complex64> = model
        .levels
        .iter()
        .map(|l| {
            if l.theta == 0.0 {
                l.amplitude() / alpha
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();

    let mut probs = Vec::with_capacity(q_max as usize + 1);
    for q in 0..=q_max {
        let overlap: Complex64 = readout.iter().zip(&coeffs).map(|(r, x)| r.conj() * x).sum();
        probs.push(overlap.norm_sqr());
        if q == q_max {
            break;
        }
        stepper.diffuse(&mut coeffs);
        stepper.oracle(&mut coeffs);
    }
    Ok(Trace::new(Engine::Iterated, probs))
}

/// Location of the maximum of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub q_peak: usize,
    pub p_peak: f64,
    /// First local maximum reaching at least half of the global one.
    pub first_q: usize,
    pub first_p: f64,
}

pub fn find_peak(trace: &Trace) -> Result<Peak> {
    let probs = &trace.probs;
    if probs.is_empty() {
        return Err(Error::DegenerateTrace("empty trace"));
    }
    let (q_peak, p_peak) = argmax(probs);
    if p_peak.is_nan() || p_peak <= 0.0 {
        return Err(Error::DegenerateTrace("trace is identically zero"));
    }
    let n = probs.len();
    let first_q = (0..n)
        .find(|&q| {
            let rising = q == 0 || probs[q] >= probs[q - 1];
            let falling = q + 1 == n || probs[q] > probs[q + 1];
            rising && falling && probs[q] >= 0.5 * p_peak
        })
        .unwrap_or(q_peak);
    Ok(Peak {
        q_peak,
        p_peak,
        first_q,
        first_p: probs[first_q],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Level;
    use std::f64::consts::PI;

    fn grover(alpha: f64) -> SpectralModel {
        SpectralModel::new(
            PI,
            vec![
                Level::with_weight(0.0, alpha * alpha),
                Level::with_weight(-PI, 1.0 - alpha * alpha),
            ],
        )
    }

    #[test]
    fn starts_at_alpha_squared() {
        let t = iterate(&grover(0.3), 0).unwrap();
        assert_eq!(t.probs.len(), 1);
        assert!((t.probs[0] - 0.09).abs() < 1e-15);
    }

    #[test]
    fn grover_rotation_is_exact() {
        let alpha: f64 = 0.1;
        let t = iterate(&grover(alpha), 40).unwrap();
        let w = alpha.asin();
        for (q, p) in t.probs.iter().enumerate() {
            let expect = ((2 * q + 1) as f64 * w).sin().powi(2);
            assert!((p - expect).abs() < 1e-10, "q={q}: {p} vs {expect}");
        }
    }

    #[test]
    fn grover_peak_location() {
        let alpha = 1.0 / 32.0;
        let t = iterate(&grover(alpha), 60).unwrap();
        let peak = find_peak(&t).unwrap();
        assert!(peak.q_peak == 24 || peak.q_peak == 25, "{peak:?}");
        assert_eq!(peak.first_q, peak.q_peak);
    }

    #[test]
    fn find_peak_turning_point() {
        let t = Trace::new(Engine::Iterated, vec![0.1, 0.3, 0.7, 0.4, 0.2]);
        let p = find_peak(&t).unwrap();
        assert_eq!((p.q_peak, p.p_peak), (2, 0.7));
    }

    #[test]
    fn find_peak_reports_first_of_quasi_periodic_peaks() {
        let t = Trace::new(Engine::Iterated, vec![0.0, 0.8, 0.1, 0.0, 0.9, 0.2]);
        let p = find_peak(&t).unwrap();
        assert_eq!(p.q_peak, 4);
        assert_eq!(p.first_q, 1);
    }

    #[test]
    fn find_peak_rejects_zero_curve() {
        let t = Trace::new(Engine::Iterated, vec![0.0; 5]);
        assert!(matches!(find_peak(&t), Err(Error::DegenerateTrace(_))));
    }

    #[test]
    fn csv_layout() {
        let t = Trace::new(Engine::Secular, vec![0.25, 0.5]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &["alpha=0.5".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# engine=secular");
        assert_eq!(lines[1], "# alpha=0.5");
        assert_eq!(lines[2], "q,prob");
        assert_eq!(lines[3], "0,2.5000000000000000e-1");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn engine_tags_roundtrip() {
        for e in Engine::ALL {
            assert_eq!(e.tag().parse::<Engine>().unwrap(), e);
        }
        assert!("quantum".parse::<Engine>().is_err());
    }
}
