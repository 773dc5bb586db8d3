//! Spectral analysis and simulation of generalized quantum search.
//!
//! The search operator is `S = D_s I_t^phi`: a selective phase rotation of the
//! target state followed by a unitary `D_s` that leaves the source state `|s>`
//! invariant. Given the eigenphases of `D_s` and the overlaps of the target
//! with its eigenvectors, this crate
//!
//! - predicts the success probability and iteration count in closed form
//!   ([`spectral`]),
//! - solves the exact eigenproblem of `S` via its secular equation
//!   ([`secular`]),
//! - iterates `S` in the level basis ([`simulate`]), as dense matrices
//!   ([`dense`]) and as a coined walk on a 2D torus ([`lattice`]),
//! - builds the standard instances ([`models`]) and the ancilla-controlled
//!   moment transforms ([`controlled`]),
//! - drives experiments and sweeps ([`runner`]).
//!
//! # Examples
//!
//! Each capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --example predict_model            # closed-form prediction, JSON schema
//! cargo run --example secular_spectrum         # exact eigenphases and overlaps
//! cargo run --example grover_phase_matching    # detuned phases collapse the peak
//! cargo run --example time_reversal            # swapping the roles of |s> and |t>
//! cargo run --release --example kato_search        # single-qubit diffusion, dense check
//! cargo run --release --example spatial_search     # coined walk on a torus
//! cargo run --release --example controlled_search  # ancilla-controlled walk
//! cargo run --release --example eigenstate_finding # reversed search for an eigenvector
//! cargo run --release --example dense_circuits     # explicit controlled matrices
//! cargo run --release --example parameter_sweep    # runner sweep to CSV
//! ```

pub mod angle;
pub mod controlled;
pub mod dense;
pub mod error;
pub mod lattice;
pub mod models;
pub mod runner;
pub mod secular;
pub mod simulate;
pub mod spectral;

pub use angle::{parse_angle, wrap_phase};
pub use error::{Error, Result};
pub use secular::{exact_evolution, solve_secular, EigenPair, ExactSpectrum};
pub use simulate::{find_peak, iterate, iterate_reversed, Engine, Peak, Trace};
pub use spectral::{
    coefficients, merge_degenerate, moments, overlap_curve_predicted, predict, time_reverse,
    validate, Coefficients, Level, Moments, Prediction, SpectralModel,
};
