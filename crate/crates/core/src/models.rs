//! Constructors reducing the standard search problems to a [`SpectralModel`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::angle::{cot_half, wrap_phase};
use crate::error::{Error, Result};
use crate::spectral::{check_phi, moments, validate, Level, SpectralModel};

/// Grover-type search with a generalized diffusion `D_s = e^{-i phi_s} I_s^{phi_s}`.
///
/// The source sits at `theta = 0` with weight `alpha^2`; every other
/// eigenvector of `D_s` has phase `-phi_s`.
pub fn grover_model(alpha: f64, phi_t: f64, phi_s: f64) -> Result<SpectralModel> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha = {alpha} outside (0, 1)")));
    }
    check_phi(phi_t)?;
    check_phi(phi_s)?;
    let a2 = alpha * alpha;
    let model = SpectralModel::new(
        phi_t,
        vec![
            Level::with_weight(0.0, a2).labelled("s"),
            Level::with_weight(wrap_phase(-phi_s), 1.0 - a2).labelled("rest"),
        ],
    )
    .with_meta(format!("grover alpha={alpha} phi_t={phi_t} phi_s={phi_s}"));
    validate(&model)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatoParams {
    pub n: u32,
    pub phi: f64,
    /// Signed rotation angle: positive for `phi > 0`, mirrored for `phi < 0`.
    pub gamma: f64,
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    (0..k as u64).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1))
}

fn kato_levels(n: u32, gamma: f64, phi: f64) -> SpectralModel {
    let tau = (0.5f64).powf(n as f64 / 2.0);
    let levels = (0..=n)
        .map(|h| {
            Level::new(wrap_phase(-2.0 * gamma * h as f64), tau)
                .with_multiplicity(binomial(n, h))
                .labelled(format!("h={h}"))
        })
        .collect();
    SpectralModel::new(phi, levels)
}

/// Kato's product-operator search on `n` qubits with `gamma` chosen so that
/// `A(gamma) = 0`.
///
/// `A` increases monotonically in `gamma` on `(0, pi/(n+1)]` and tends to
/// `-inf` at zero, so the root is bracketed whenever `A` is non-negative at the
/// upper end. Negative `phi` is handled by mirroring `gamma`.
pub fn kato_model(n: u32, phi: f64) -> Result<(SpectralModel, KatoParams)> {
    if !(2..=30).contains(&n) {
        return Err(Error::Config(format!(
            "kato qubit count {n} outside [2, 30]"
        )));
    }
    check_phi(phi)?;
    if phi == PI {
        return Err(Error::PhaseRange {
            what: "phi (kato needs |phi| < pi)",
            value: phi,
        });
    }
    let sign = phi.signum();
    let target = phi.abs();
    let a_of = |gamma: f64| -> Result<f64> {
        let m = kato_levels(n, gamma, target);
        Ok(cot_half(target) + moments(&m)?.lambda1)
    };

    let upper = PI / (n as f64 + 1.0);
    let a_hi = a_of(upper)?;
    if a_hi < 0.0 {
        return Err(Error::NoRoot(format!(
            "A(gamma) = {a_hi} < 0 at gamma = pi/(n+1); no sign change for n = {n}, phi = {phi}"
        )));
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut gamma = upper;
    if a_hi != 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let a = a_of(mid)?;
            if a == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if a < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Pick the bracket end with the smaller residual.
        gamma = if lo > 0.0 && a_of(lo)?.abs() < a_of(hi)?.abs() {
            lo
        } else {
            hi
        };
    }

    let signed = sign * gamma;
    let model =
        kato_levels(n, signed, phi).with_meta(format!("kato n={n} phi={phi} gamma={signed}"));
    let model = validate(&model)?;
    Ok((
        model,
        KatoParams {
            n,
            phi,
            gamma: signed,
        },
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AkrParams {
    pub side: usize,
    pub n_sites: usize,
}

impl AkrParams {
    pub fn new(side: usize) -> AkrParams {
        AkrParams {
            side,
            n_sites: side * side,
        }
    }
}

/// `cos(2 pi a / side)` with the reflection symmetries imposed exactly, so
/// that degenerate eigenphases compare equal bit-for-bit.
fn cos_table(side: usize) -> Vec<f64> {
    let mut c = vec![0.0; side];
    for (a, slot) in c.iter_mut().enumerate() {
        *slot = (2.0 * PI * a as f64 / side as f64).cos();
    }
    c[0] = 1.0;
    for a in 1..side {
        let mirror = side - a;
        if mirror < a {
            c[a] = c[mirror];
        }
    }
    if side.is_multiple_of(2) {
        c[side / 2] = -1.0;
        for a in 0..=side / 2 {
            let b = side / 2 - a;
            if b < a {
                c[a] = -c[b];
            }
        }
        for a in side / 2 + 1..side {
            c[a] = c[side - a];
        }
    }
    if side.is_multiple_of(4) {
        c[side / 4] = 0.0;
        c[3 * side / 4] = 0.0;
    }
    c
}

/// Eigenphase `theta_{a,b}` of the walk step on the Fourier mode `(a, b)`:
/// `2 cos(theta) = cos(2 pi a / side) + cos(2 pi b / side)`.
pub fn akr_theta(side: usize, a: usize, b: usize) -> f64 {
    let c = cos_table(side);
    ((c[a % side] + c[b % side]) / 2.0).acos()
}

/// The coined 2D torus walk restricted to the subspace reached from the
/// uniform state: the source at `theta = 0` with weight `1/N` and a pair of
/// levels at `+-theta_{a,b}` with weight `1/(2N)` each for every other mode.
/// A mode with `theta = pi` becomes one level of multiplicity two.
pub fn akr_model(params: AkrParams) -> Result<SpectralModel> {
    let side = params.side;
    if side < 4 || params.n_sites != side * side {
        return Err(Error::Config(format!(
            "akr lattice needs side >= 4 and n_sites = side^2, got {params:?}"
        )));
    }
    let n = params.n_sites as f64;
    let c = cos_table(side);
    let tau = (2.0 * n).sqrt().recip();
    let mut levels = Vec::with_capacity(2 * params.n_sites);
    levels.push(Level::with_weight(0.0, 1.0 / n).labelled("s"));
    for a in 0..side {
        for b in 0..side {
            if a == 0 && b == 0 {
                continue;
            }
            let theta = ((c[a] + c[b]) / 2.0).acos();
            let label = format!("{a},{b}");
            if theta == PI {
                levels.push(Level::new(PI, tau).with_multiplicity(2).labelled(label));
            } else {
                levels.push(Level::new(theta, tau).labelled(format!("+{label}")));
                levels.push(Level::new(-theta, tau).labelled(format!("-{label}")));
            }
        }
    }
    let model = SpectralModel::new(PI, levels).with_meta(format!("akr2d side={side}"));
    validate(&model)
}

/// Search for the eigenvector of `D` with known eigenphase `theta_s`:
/// `D_s = e^{-i theta_s} D` moves that eigenphase to zero.
pub fn eigenfind_model(
    thetas: &[f64],
    weights: &[f64],
    theta_s: f64,
    phi: f64,
) -> Result<SpectralModel> {
    if thetas.len() != weights.len() {
        return Err(Error::Dimension(thetas.len(), weights.len()));
    }
    let levels = thetas
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&theta, &w))| {
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidLevel {
                    index: i,
                    reason: format!("weight {w}"),
                });
            }
            Ok(Level::with_weight(wrap_phase(theta - theta_s), w).labelled(format!("{i}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let model = SpectralModel::new(phi, levels).with_meta(format!("eigenfind theta_s={theta_s}"));
    validate(&model)
}
