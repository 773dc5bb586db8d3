//! Dense-matrix construction and evolution of small search operators.
//!
//! Nothing here touches the spectral machinery: operators are built from
//! their textbook definitions and iterated by plain matrix-vector products,
//! which makes this module an independent oracle for the other engines.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simulate::{Engine, Trace};

/// Largest dimension accepted by the dense builders.
pub const DENSE_CAP: usize = 8192;
const PAR_ROWS: usize = 256;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > DENSE_CAP {
        return Err(Error::Size {
            dim,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > -PI && omega <= PI) {
        return Err(Error::PhaseRange {
            what: "omega",
            value: omega,
        });
    }
    Ok(())
}

/// Row-major `dim x dim` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub dim: usize,
    pub amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn new(amplitudes: Vec<Complex64>) -> DenseState {
        DenseState {
            dim: amplitudes.len(),
            amplitudes,
        }
    }

    pub fn basis(dim: usize, index: usize) -> Result<DenseState> {
        if index >= dim {
            return Err(Error::Index { index, dim });
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        Ok(DenseState::new(amplitudes))
    }

    pub fn uniform(dim: usize) -> DenseState {
        let a = (dim as f64).sqrt().recip();
        DenseState::new(vec![c(a, 0.0); dim])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|a> (x) |self>` for a single-qubit ancilla in the high position.
    pub fn with_ancilla(&self, a0: Complex64, a1: Complex64) -> DenseState {
        let mut amplitudes = Vec::with_capacity(2 * self.dim);
        amplitudes.extend(self.amplitudes.iter().map(|x| a0 * x));
        amplitudes.extend(self.amplitudes.iter().map(|x| a1 * x));
        DenseState::new(amplitudes)
    }
}

impl DenseUnitary {
    pub fn identity(dim: usize) -> Result<DenseUnitary> {
        check_dim(dim)?;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = c(1.0, 0.0);
        }
        Ok(DenseUnitary { dim, entries })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let row = |i: usize| -> Complex64 {
            self.entries[i * self.dim..(i + 1) * self.dim]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum()
        };
        if self.dim >= PAR_ROWS {
            (0..self.dim).into_par_iter().map(row).collect()
        } else {
            (0..self.dim).map(row).collect()
        }
    }

    pub fn matmul(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        if self.dim != other.dim {
            return Err(Error::Dimension(self.dim, other.dim));
        }
        let n = self.dim;
        let mut entries = vec![c(0.0, 0.0); n * n];
        entries.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(&other.entries[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        });
        Ok(DenseUnitary { dim: n, entries })
    }

    pub fn adjoint(&self) -> DenseUnitary {
        let n = self.dim;
        let mut entries = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        DenseUnitary { dim: n, entries }
    }

    pub fn scale(mut self, factor: Complex64) -> DenseUnitary {
        for x in &mut self.entries {
            *x *= factor;
        }
        self
    }

    /// `self (x) other` with `self` on the high index.
    pub fn kron(&self, other: &DenseUnitary) -> Result<DenseUnitary> {
        let dim = self.dim * other.dim;
        check_dim(dim)?;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        entries
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(r, out)| {
                let (i, k) = (r / other.dim, r % other.dim);
                for j in 0..self.dim {
                    let a = self.get(i, j);
                    for l in 0..other.dim {
                        out[j * other.dim + l] = a * other.get(k, l);
                    }
                }
            });
        Ok(DenseUnitary { dim, entries })
    }

    /// `max |(U^dagger U - 1)_{ij}|`. Cubic in `dim`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let dot: Complex64 =
                            (0..n).map(|k| self.get(k, i).conj() * self.get(k, j)).sum();
                        let id = if i == j { 1.0 } else { 0.0 };
                        (dot - id).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `U - (1 - e^{i omega}) (U |psi>) <psi|`, i.e. `U I_psi^omega`.
    pub fn then_after_selective(&self, psi: &DenseState, omega: f64) -> Result<DenseUnitary> {
        if psi.dim != self.dim {
            return Err(Error::Dimension(self.dim, psi.dim));
        }
        let kick = c(1.0, 0.0) - Complex64::from_polar(1.0, omega);
        let u_psi = self.apply(&psi.amplitudes);
        let n = self.dim;
        let mut out = self.clone();
        out.entries
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                let left = kick * u_psi[i];
                for (x, p) in row.iter_mut().zip(&psi.amplitudes) {
                    *x -= left * p.conj();
                }
            });
        Ok(out)
    }
}

/// `I_psi^omega = 1 - (1 - e^{i omega}) |psi><psi|` for an arbitrary state.
pub fn selective_about(psi: &DenseState, omega: f64) -> Result<DenseUnitary> {
    check_omega(omega)?;
    DenseUnitary::identity(psi.dim)?.then_after_selective(psi, omega)
}

/// Selective phase rotation of the basis state `index`.
pub fn build_selective(dim: usize, index: usize, omega: f64) -> Result<DenseUnitary> {
    check_dim(dim)?;
    check_omega(omega)?;
    if index >= dim {
        return Err(Error::Index { index, dim });
    }
    let mut u = DenseUnitary::identity(dim)?;
    u.entries[index * dim + index] = Complex64::from_polar(1.0, omega);
    Ok(u)
}

/// Generalized Grover diffusion `e^{-i phi_s} I_s^{phi_s}` about the uniform state.
pub fn build_grover_diffusion(dim: usize, phi_s: f64) -> Result<DenseUnitary> {
    let s = DenseState::uniform(dim);
    Ok(selective_about(&s, phi_s)?.scale(Complex64::from_polar(1.0, -phi_s)))
}

/// `(H Z_gamma H)^{(x) n}` with `Z_gamma = diag(1, e^{-2 i gamma})`.
pub fn build_kato_dense(n: u32, gamma: f64) -> Result<DenseUnitary> {
    if n == 0 || n >= usize::BITS || (1usize << n) > DENSE_CAP {
        return Err(Error::Size {
            dim: 1usize.checked_shl(n).unwrap_or(usize::MAX),
            cap: DENSE_CAP,
        });
    }
    let z = Complex64::from_polar(1.0, -2.0 * gamma);
    // H diag(1, z) H = [[1 + z, 1 - z], [1 - z, 1 + z]] / 2
    let p = (c(1.0, 0.0) + z) * 0.5;
    let m = (c(1.0, 0.0) - z) * 0.5;
    let block = DenseUnitary {
        dim: 2,
        entries: vec![p, m, m, p],
    };
    let mut out = block.clone();
    for _ in 1..n {
        out = out.kron(&block)?;
    }
    Ok(out)
}

/// `H^{(x) n} |0>`.
pub fn hadamard_source(n: u32) -> DenseState {
    DenseState::uniform(1usize << n)
}

/// Which ancilla construction to apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlKind {
    /// `D' = (c1 D^dagger)(c0 D)`.
    Alg1,
    /// `D'' = (Z (x) 1)(c0 D)`, with the ancilla target `sin(zeta)|0> + cos(zeta)|1>`.
    Alg2 { zeta: f64 },
}

/// The controlled diffusion alone, ancilla on the high index.
pub fn controlled_diffusion(base: &DenseUnitary, kind: ControlKind) -> Result<DenseUnitary> {
    let n = base.dim;
    check_dim(2 * n)?;
    let lower = match kind {
        ControlKind::Alg1 => base.adjoint(),
        ControlKind::Alg2 { .. } => DenseUnitary::identity(n)?.scale(c(-1.0, 0.0)),
    };
    let dim = 2 * n;
    let mut entries = vec![c(0.0, 0.0); dim * dim];
    for i in 0..n {
        entries[i * dim..i * dim + n].copy_from_slice(&base.entries[i * n..(i + 1) * n]);
        entries[(n + i) * dim + n..(n + i + 1) * dim]
            .copy_from_slice(&lower.entries[i * n..(i + 1) * n]);
    }
    Ok(DenseUnitary { dim, entries })
}

/// Ancilla-extended source and target states for a construction.
pub fn controlled_states(
    kind: ControlKind,
    source: &DenseState,
    target: &DenseState,
) -> (DenseState, DenseState) {
    let plus = c(FRAC_1_SQRT_2, 0.0);
    match kind {
        ControlKind::Alg1 => (
            source.with_ancilla(plus, plus),
            target.with_ancilla(plus, plus),
        ),
        ControlKind::Alg2 { zeta } => (
            source.with_ancilla(c(1.0, 0.0), c(0.0, 0.0)),
            target.with_ancilla(c(zeta.sin(), 0.0), c(zeta.cos(), 0.0)),
        ),
    }
}

/// Full controlled search step `D' I_{t'}^pi` on the doubled space.
pub fn build_controlled_dense(
    base: &DenseUnitary,
    kind: ControlKind,
    target: &DenseState,
) -> Result<DenseUnitary> {
    if let ControlKind::Alg2 { zeta } = kind {
        if !(zeta > 0.0 && zeta <= PI / 2.0) {
            return Err(Error::PhaseRange {
                what: "zeta",
                value: zeta,
            });
        }
    }
    if target.dim != base.dim {
        return Err(Error::Dimension(base.dim, target.dim));
    }
    let d = controlled_diffusion(base, kind)?;
    let (_, t_ext) = controlled_states(kind, target, target);
    d.then_after_selective(&t_ext, PI)
}

/// `|<t|U^q|start>|^2` for `q = 0..=q_max`.
pub fn evolve_dense(
    op: &DenseUnitary,
    start: &DenseState,
    target: &DenseState,
    q_max: u64,
) -> Result<Trace> {
    if start.dim != op.dim {
        return Err(Error::Dimension(op.dim, start.dim));
    }
    if target.dim != op.dim {
        return Err(Error::Dimension(op.dim, target.dim));
    }
    let mut psi = start.clone();
    let mut probs = Vec::with_capacity(q_max as usize + 1);
    for q in 0..=q_max {
        probs.push(target.inner(&psi).norm_sqr());
        if q == q_max {
            break;
        }
        psi.amplitudes = op.apply(&psi.amplitudes);
        debug_assert!((psi.norm_sqr() - 1.0).abs() < 1e-9);
    }
    Ok(Trace::new(Engine::Dense, probs))
}

/// `|<t|(D I_t^phi)^q|start>|^2` without forming the product matrix, which
/// halves peak memory for the largest instances.
pub fn evolve_search(
    diffusion: &DenseUnitary,
    target: &DenseState,
    phi: f64,
    start: &DenseState,
    q_max: u64,
) -> Result<Trace> {
    for dim in [target.dim, start.dim] {
        if dim != diffusion.dim {
            return Err(Error::Dimension(diffusion.dim, dim));
        }
    }
    let kick = c(1.0, 0.0) - Complex64::from_polar(1.0, phi);
    let mut psi = start.clone();
    let mut probs = Vec::with_capacity(q_max as usize + 1);
    for q in 0..=q_max {
        let overlap = target.inner(&psi);
        probs.push(overlap.norm_sqr());
        if q == q_max {
            break;
        }
        for (x, t) in psi.amplitudes.iter_mut().zip(&target.amplitudes) {
            *x -= kick * overlap * t;
        }
        psi.amplitudes = diffusion.apply(&psi.amplitudes);
    }
    Ok(Trace::new(Engine::Dense, probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eigenphase(u: &DenseUnitary, v: &DenseState) -> f64 {
        let uv = DenseState::new(u.apply(&v.amplitudes));
        let ratio = v.inner(&uv) / v.norm_sqr();
        let residual: f64 = uv
            .amplitudes
            .iter()
            .zip(&v.amplitudes)
            .map(|(a, b)| (a - ratio * b).norm_sqr())
            .sum();
        assert!(residual < 1e-24, "not an eigenvector: {residual}");
        ratio.arg()
    }

    /// `H^{(x) n} |x>`.
    fn hadamard_vector(n: u32, x: usize) -> DenseState {
        let dim = 1usize << n;
        let a = (dim as f64).sqrt().recip();
        DenseState::new(
            (0..dim)
                .map(|j| {
                    let sign = if (j & x).count_ones().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    c(sign * a, 0.0)
                })
                .collect(),
        )
    }

    #[test]
    fn selective_reflection() {
        let u = build_selective(4, 2, PI).unwrap();
        assert_relative_eq!(u.get(2, 2).re, -1.0, epsilon = 1e-15);
        assert_eq!(u.get(1, 1), c(1.0, 0.0));
        assert!(u.unitarity_residual() <= 1e-12);
        let near_id = build_selective(4, 2, 1e-14).unwrap();
        let id = DenseUnitary::identity(4).unwrap();
        let diff = near_id
            .entries
            .iter()
            .zip(&id.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-13);
        assert!(matches!(
            build_selective(4, 4, PI),
            Err(Error::Index { .. })
        ));
        assert!(matches!(
            build_selective(4, 1, 4.0),
            Err(Error::PhaseRange { .. })
        ));
    }

    #[test]
    fn selective_about_state_is_unitary() {
        let psi = DenseState::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let u = selective_about(&psi, 1.3).unwrap();
        assert!(u.unitarity_residual() <= 1e-12);
        assert_relative_eq!(eigenphase(&u, &psi), 1.3, epsilon = 1e-12);
    }

    #[test]
    fn four_item_grover_finds_target_in_one_step() {
        let d = build_grover_diffusion(4, PI).unwrap();
        let t = DenseState::basis(4, 3).unwrap();
        let s = d.then_after_selective(&t, PI).unwrap();
        let trace = evolve_dense(&s, &DenseState::uniform(4), &t, 2).unwrap();
        assert_relative_eq!(trace.probs[0], 0.25, epsilon = 1e-15);
        assert_relative_eq!(trace.probs[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn grover_diffusion_spectrum() {
        let d = build_grover_diffusion(8, 0.7).unwrap();
        assert!(d.unitarity_residual() <= 1e-12);
        assert_relative_eq!(
            eigenphase(&d, &DenseState::uniform(8)),
            0.0,
            epsilon = 1e-12
        );
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(1.0, 0.0);
        v[1] = c(-1.0, 0.0);
        assert_relative_eq!(eigenphase(&d, &DenseState::new(v)), -0.7, epsilon = 1e-12);
    }

    #[test]
    fn kato_single_qubit_phases() {
        let gamma = 0.3;
        let k = build_kato_dense(1, gamma).unwrap();
        assert_relative_eq!(eigenphase(&k, &hadamard_vector(1, 0)), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            eigenphase(&k, &hadamard_vector(1, 1)),
            -2.0 * gamma,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kato_two_qubit_phase() {
        let gamma = 0.9;
        let k = build_kato_dense(2, gamma).unwrap();
        assert!(k.unitarity_residual() <= 1e-12);
        let expect = crate::angle::wrap_phase(-4.0 * gamma);
        assert_relative_eq!(
            eigenphase(&k, &hadamard_vector(2, 3)),
            expect,
            epsilon = 1e-12
        );
        assert_relative_eq!(eigenphase(&k, &hadamard_source(2)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kato_size_cap() {
        assert!(matches!(build_kato_dense(14, 0.1), Err(Error::Size { .. })));
        assert!(build_kato_dense(0, 0.1).is_err());
    }

    #[test]
    fn alg1_of_identity_is_identity() {
        let id = DenseUnitary::identity(3).unwrap();
        let d = controlled_diffusion(&id, ControlKind::Alg1).unwrap();
        assert_eq!(d, DenseUnitary::identity(6).unwrap());
    }

    #[test]
    fn alg1_phases_are_mirrored() {
        let phi_s = 1.1;
        let base = build_grover_diffusion(4, phi_s).unwrap();
        let d = controlled_diffusion(&base, ControlKind::Alg1).unwrap();
        assert!(d.unitarity_residual() <= 1e-12);
        let v = DenseState::new(vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let up = v.with_ancilla(c(1.0, 0.0), c(0.0, 0.0));
        let down = v.with_ancilla(c(0.0, 0.0), c(1.0, 0.0));
        assert_relative_eq!(eigenphase(&d, &up), -phi_s, epsilon = 1e-12);
        assert_relative_eq!(eigenphase(&d, &down), phi_s, epsilon = 1e-12);
    }

    #[test]
    fn alg2_lower_block_is_pi() {
        let base = build_grover_diffusion(4, 0.4).unwrap();
        let d = controlled_diffusion(&base, ControlKind::Alg2 { zeta: 0.3 }).unwrap();
        for j in 0..4 {
            let v = DenseState::basis(4, j).unwrap();
            let down = v.with_ancilla(c(0.0, 0.0), c(1.0, 0.0));
            assert_relative_eq!(eigenphase(&d, &down).abs(), PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn controlled_search_is_unitary() {
        let base = build_grover_diffusion(8, PI - 0.3).unwrap();
        let t = DenseState::basis(8, 5).unwrap();
        for kind in [ControlKind::Alg1, ControlKind::Alg2 { zeta: 0.6 }] {
            let s = build_controlled_dense(&base, kind, &t).unwrap();
            assert_eq!(s.dim, 16);
            assert!(s.unitarity_residual() <= 1e-12);
        }
    }

    #[test]
    fn lazy_search_matches_product_operator() {
        let d = build_grover_diffusion(16, 2.0).unwrap();
        let t = DenseState::basis(16, 7).unwrap();
        let s = DenseState::uniform(16);
        let full = evolve_dense(&d.then_after_selective(&t, 1.2).unwrap(), &s, &t, 40).unwrap();
        let lazy = evolve_search(&d, &t, 1.2, &s, 40).unwrap();
        assert!(full.max_abs_diff(&lazy) < 1e-13);
    }

    #[test]
    fn evolve_checks_dimensions() {
        let u = DenseUnitary::identity(4).unwrap();
        let s = DenseState::uniform(3);
        let t = DenseState::uniform(4);
        assert!(matches!(
            evolve_dense(&u, &s, &t, 3),
            Err(Error::Dimension(4, 3))
        ));
    }

    #[test]
    fn kron_matches_matmul_of_factors() {
        let a = build_grover_diffusion(2, 0.5).unwrap();
        let b = build_kato_dense(1, 0.2).unwrap();
        let ab = a.kron(&b).unwrap();
        assert!(ab.unitarity_residual() < 1e-12);
        assert_eq!(ab.get(1, 2), a.get(0, 1) * b.get(1, 0));
        let sq = ab.matmul(&ab.adjoint()).unwrap();
        for i in 0..4 {
            assert_relative_eq!(sq.get(i, i).re, 1.0, epsilon = 1e-12);
        }
    }
}
