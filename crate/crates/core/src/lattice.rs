//! Coined quantum walk search on a periodic `side x side` lattice.
//!
//! Amplitudes are stored per (ancilla plane, x, y, coin) with coins ordered
//! right, left, up, down. One step applies the oracle (a reflection of the
//! uniform coin state at the target site), the Grover coin at every site, and
//! the flip-flop shift, in that order. Optional ancilla stages double the
//! register and run the walk, its inverse or a phase flip on each half, which
//! realizes the controlled constructions at `O(N)` cost per step.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::{Engine, Trace};

pub const RIGHT: usize = 0;
pub const LEFT: usize = 1;
pub const UP: usize = 2;
pub const DOWN: usize = 3;
const COINS: usize = 4;

/// One ancilla construction applied on top of the plain walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControlStage {
    /// Walk on ancilla `|0>`, inverse walk on `|1>`; ancilla starts and is
    /// searched for in `|+>`.
    Alg1,
    /// Walk on `|0>`, phase flip on `|1>`; start `|0>`, target
    /// `sin(zeta)|0> + cos(zeta)|1>`.
    Alg2 { zeta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PlaneOp {
    Forward,
    Backward,
    Identity,
}

/// Amplitude field over `(plane, x, y, coin)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    pub side: usize,
    pub planes: usize,
    pub amps: Vec<Complex64>,
}

impl WalkState {
    pub fn zeros(side: usize, planes: usize) -> WalkState {
        WalkState {
            side,
            planes,
            amps: vec![Complex64::new(0.0, 0.0); planes * side * side * COINS],
        }
    }

    pub fn index(&self, plane: usize, x: usize, y: usize, coin: usize) -> usize {
        ((plane * self.side + x) * self.side + y) * COINS + coin
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn plane_mut(&mut self, plane: usize) -> &mut [Complex64] {
        let len = self.side * self.side * COINS;
        &mut self.amps[plane * len..(plane + 1) * len]
    }
}

/// Walk configuration: lattice, target and ancilla stages.
#[derive(Clone, Debug, PartialEq)]
pub struct Walk {
    pub side: usize,
    pub target: (usize, usize),
    ops: Vec<(PlaneOp, f64)>,
    target_ancilla: Vec<f64>,
    start_ancilla: Vec<f64>,
}

impl Walk {
    pub fn new(side: usize, target: (usize, usize), stages: &[ControlStage]) -> Result<Walk> {
        if side < 2 {
            return Err(Error::Config(format!("lattice side {side} < 2")));
        }
        if target.0 >= side || target.1 >= side {
            return Err(Error::Target {
                x: target.0,
                y: target.1,
                side,
            });
        }
        let mut ops = vec![(PlaneOp::Forward, 1.0)];
        let mut t_anc = vec![1.0];
        let mut s_anc = vec![1.0];
        for stage in stages {
            match *stage {
                ControlStage::Alg1 => {
                    let dagger = ops.iter().map(|&(op, sign)| {
                        let op = match op {
                            PlaneOp::Forward => PlaneOp::Backward,
                            PlaneOp::Backward => PlaneOp::Forward,
                            PlaneOp::Identity => PlaneOp::Identity,
                        };
                        (op, sign)
                    });
                    ops = ops.iter().copied().chain(dagger).collect();
                    t_anc = split(&t_anc, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
                    s_anc = split(&s_anc, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
                }
                ControlStage::Alg2 { zeta } => {
                    if !(zeta > 0.0 && zeta <= FRAC_PI_2) {
                        return Err(Error::PhaseRange {
                            what: "zeta",
                            value: zeta,
                        });
                    }
                    let (s, c) = if zeta == FRAC_PI_2 {
                        (1.0, 0.0)
                    } else {
                        zeta.sin_cos()
                    };
                    let n = ops.len();
                    ops.extend(std::iter::repeat_n((PlaneOp::Identity, -1.0), n));
                    t_anc = split(&t_anc, s, c);
                    s_anc = split(&s_anc, 1.0, 0.0);
                }
            }
        }
        Ok(Walk {
            side,
            target,
            ops,
            target_ancilla: t_anc,
            start_ancilla: s_anc,
        })
    }

    pub fn planes(&self) -> usize {
        self.ops.len()
    }

    pub fn n_sites(&self) -> usize {
        self.side * self.side
    }

    /// Uniform coin and position on every plane, weighted by the ancilla start state.
    pub fn start_state(&self) -> WalkState {
        let mut state = WalkState::zeros(self.side, self.planes());
        let amp = 0.5 / (self.n_sites() as f64).sqrt();
        let len = self.n_sites() * COINS;
        for (p, &a) in self.start_ancilla.iter().enumerate() {
            for x in &mut state.amps[p * len..(p + 1) * len] {
                *x = Complex64::new(a * amp, 0.0);
            }
        }
        state
    }

    /// `<u_c, target|` projected per plane: `sum_c amp(p, target, c) / 2`.
    fn plane_overlaps<'a>(&'a self, state: &'a WalkState) -> impl Iterator<Item = Complex64> + 'a {
        let (tx, ty) = self.target;
        (0..self.planes()).map(move |p| {
            let base = state.index(p, tx, ty, 0);
            state.amps[base..base + COINS].iter().sum::<Complex64>() * 0.5
        })
    }

    /// `|<t'|psi>|^2` with `|t'>` the ancilla target times uniform coin at the target site.
    pub fn success(&self, state: &WalkState) -> f64 {
        self.plane_overlaps(state)
            .zip(&self.target_ancilla)
            .map(|(o, &a)| o * a)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Total probability of finding the walker on the target site.
    pub fn site_prob(&self, state: &WalkState) -> f64 {
        let (tx, ty) = self.target;
        (0..self.planes())
            .map(|p| {
                let base = state.index(p, tx, ty, 0);
                state.amps[base..base + COINS]
                    .iter()
                    .map(Complex64::norm_sqr)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Reflection `1 - 2|t'><t'|`.
    pub fn oracle(&self, state: &mut WalkState) {
        let overlap: Complex64 = self
            .plane_overlaps(state)
            .zip(&self.target_ancilla)
            .map(|(o, &a)| o * a)
            .sum();
        let (tx, ty) = self.target;
        for (p, &a) in self.target_ancilla.iter().enumerate() {
            let base = state.index(p, tx, ty, 0);
            for x in &mut state.amps[base..base + COINS] {
                *x -= overlap * a;
            }
        }
    }

    /// The oracle-free part of the step on every plane.
    pub fn diffuse(&self, state: &mut WalkState, scratch: &mut Vec<Complex64>) {
        let side = self.side;
        for (p, &(op, sign)) in self.ops.iter().enumerate() {
            let plane = state.plane_mut(p);
            match op {
                PlaneOp::Forward => {
                    coin(plane);
                    shift(plane, side, scratch);
                }
                PlaneOp::Backward => {
                    shift(plane, side, scratch);
                    coin(plane);
                }
                PlaneOp::Identity => {}
            }
            if sign != 1.0 {
                plane.par_iter_mut().for_each(|x| *x *= sign);
            }
        }
    }

    pub fn step(&self, state: &mut WalkState, scratch: &mut Vec<Complex64>) {
        self.oracle(state);
        self.diffuse(state, scratch);
    }
}

fn split(anc: &[f64], a0: f64, a1: f64) -> Vec<f64> {
    anc.iter()
        .map(|x| x * a0)
        .chain(anc.iter().map(|x| x * a1))
        .collect()
}

/// Grover coin `2|u_c><u_c| - 1` at every site.
fn coin(plane: &mut [Complex64]) {
    plane.par_chunks_mut(COINS).for_each(|v| {
        let half = (v[0] + v[1] + v[2] + v[3]) * 0.5;
        for x in v.iter_mut() {
            *x = half - *x;
        }
    });
}

/// Flip-flop shift on the torus. It is its own inverse.
fn shift(plane: &mut [Complex64], side: usize, scratch: &mut Vec<Complex64>) {
    scratch.clear();
    scratch.extend_from_slice(plane);
    let old = &scratch[..];
    let at = |x: usize, y: usize, c: usize| (x * side + y) * COINS + c;
    plane
        .par_chunks_mut(side * COINS)
        .enumerate()
        .for_each(|(x, row)| {
            let xm = (x + side - 1) % side;
            let xp = (x + 1) % side;
            for y in 0..side {
                let ym = (y + side - 1) % side;
                let yp = (y + 1) % side;
                let out = &mut row[y * COINS..(y + 1) * COINS];
                out[LEFT] = old[at(xm, y, RIGHT)];
                out[RIGHT] = old[at(xp, y, LEFT)];
                out[DOWN] = old[at(x, ym, UP)];
                out[UP] = old[at(x, yp, DOWN)];
            }
        });
}

/// One search step on `state`, optionally with ancilla stages.
pub fn walk_step(
    state: &WalkState,
    target: (usize, usize),
    controlled: Option<&[ControlStage]>,
) -> Result<WalkState> {
    let walk = Walk::new(state.side, target, controlled.unwrap_or(&[]))?;
    if walk.planes() != state.planes {
        return Err(Error::Dimension(walk.planes(), state.planes));
    }
    let mut out = state.clone();
    walk.step(&mut out, &mut Vec::new());
    Ok(out)
}

/// Runs the search from the uniform state and records `|<t'|psi>|^2` and the
/// target-site probability for `q = 0..=q_max`.
pub fn run_walk(
    side: usize,
    target: (usize, usize),
    q_max: u64,
    controlled: Option<&[ControlStage]>,
) -> Result<Trace> {
    let walk = Walk::new(side, target, controlled.unwrap_or(&[]))?;
    let mut state = walk.start_state();
    let mut scratch = Vec::with_capacity(side * side * COINS);
    let mut probs = Vec::with_capacity(q_max as usize + 1);
    let mut sites = Vec::with_capacity(q_max as usize + 1);
    for q in 0..=q_max {
        probs.push(walk.success(&state));
        sites.push(walk.site_prob(&state));
        if q == q_max {
            break;
        }
        walk.step(&mut state, &mut scratch);
    }
    let mut trace = Trace::new(Engine::Lattice, probs);
    trace.site_probs = Some(sites);
    Ok(trace)
}
