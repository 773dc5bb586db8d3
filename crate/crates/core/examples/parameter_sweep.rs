//! Sweeps lattice size through the runner and prints the aggregated CSV.
//! Set `QSEARCH_THREADS` to bound the worker pool.
//!
//! Run with `cargo run --release --example parameter_sweep`.

use std::io;

use qsearch::runner::{sweep, RunConfig, ScenarioKind, SweepAxis};
use qsearch::Engine;

fn main() -> qsearch::Result<()> {
    let mut cfg = RunConfig::new(ScenarioKind::Akr2d);
    cfg.engines = Some(vec![Engine::Predicted, Engine::Lattice]);
    let axis = SweepAxis::parse("side", "8,16,32,64")?;
    let table = sweep(&cfg, &[axis])?;
    table.write_csv(io::stdout().lock(), &["akr2d side sweep".to_string()])?;
    Ok(())
}
