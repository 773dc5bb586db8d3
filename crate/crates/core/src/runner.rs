//! Experiment runner: scenario construction, multi-engine runs, reports and
//! parameter sweeps. The `qsearch` binary is a thin shell over this module.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{parse_angle, wrap_phase};
use crate::controlled::{
    algorithm1, algorithm2, cross_check_zeta, optimize_zeta, ZetaCheck, ZetaScan, MOMENT_TOL,
};
use crate::dense::{
    build_grover_diffusion, build_kato_dense, controlled_diffusion, controlled_states,
    evolve_search, ControlKind, DenseState, DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::lattice::{run_walk, ControlStage};
use crate::models::{akr_model, eigenfind_model, grover_model, kato_model, AkrParams};
use crate::secular::{secular_trace, solve_secular};
use crate::simulate::{find_peak, iterate, iterate_reversed, Engine, Trace};
use crate::spectral::{
    merge_degenerate, moments, overlap_curve_predicted, predict, time_reverse, Prediction,
    SpectralModel, MARGIN_WARNING,
};

/// Environment variable bounding the sweep worker pool.
pub const THREADS_ENV: &str = "QSEARCH_THREADS";
/// Root bracket used by the secular engine.
pub const SECULAR_TOL: f64 = 1e-12;
/// Iteration cap applied to the default `q_max`.
pub const MAX_DEFAULT_Q: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Grover,
    Kato,
    Akr2d,
    Alg1,
    Alg2,
    Eigenfind,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Grover,
        ScenarioKind::Kato,
        ScenarioKind::Akr2d,
        ScenarioKind::Alg1,
        ScenarioKind::Alg2,
        ScenarioKind::Eigenfind,
        ScenarioKind::Custom,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ScenarioKind::Grover => "grover",
            ScenarioKind::Kato => "kato",
            ScenarioKind::Akr2d => "akr2d",
            ScenarioKind::Alg1 => "alg1",
            ScenarioKind::Alg2 => "alg2",
            ScenarioKind::Eigenfind => "eigenfind",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.tag() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

/// Output layout for [`run`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// `summary.json` plus one `trace_<engine>.csv` per engine.
    #[default]
    Csv,
    /// A single `summary.json` with the traces inlined.
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// Parameters shared by all scenarios; each scenario reads the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub alpha: f64,
    pub phi_t: f64,
    pub phi_s: f64,
    /// Kato qubit count.
    pub n: u32,
    /// Oracle phase for kato, eigenfind and custom overrides.
    pub phi: f64,
    pub side: usize,
    /// Base scenario for `alg1` and `alg2`.
    pub base: ScenarioKind,
    pub zeta: Option<f64>,
    pub optimize_zeta: bool,
    /// Cross-check three `zeta` values by full iteration.
    pub simulate: bool,
    /// Apply `alg2` directly, without symmetrizing first (needs `Lambda_1 = 0`).
    pub skip_alg1: bool,
    pub model_path: Option<PathBuf>,
    /// Eigenfind: number of levels, minimum gap, known eigenphase and seed.
    pub levels: usize,
    pub gap: f64,
    pub theta_s: f64,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            alpha: 1.0 / 32.0,
            phi_t: std::f64::consts::PI,
            phi_s: std::f64::consts::PI,
            n: 10,
            phi: std::f64::consts::FRAC_PI_2,
            side: 16,
            base: ScenarioKind::Akr2d,
            zeta: None,
            optimize_zeta: false,
            simulate: false,
            skip_alg1: false,
            model_path: None,
            levels: 64,
            gap: 0.3,
            theta_s: 0.0,
            seed: 1,
        }
    }
}

impl ScenarioParams {
    /// Sets one parameter from text, as used by sweeps. `detuning` sets
    /// `phi_s = phi_t - value`.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn fmt::Display| Error::Config(format!("{name} = '{value}': {e}"));
        match name {
            "alpha" => self.alpha = value.parse().map_err(|e| bad(&e))?,
            "phi-t" | "phi_t" => self.phi_t = parse_angle(value)?,
            "phi-s" | "phi_s" => self.phi_s = parse_angle(value)?,
            "detuning" => self.phi_s = wrap_phase(self.phi_t - parse_angle(value)?),
            "n" => self.n = value.parse().map_err(|e| bad(&e))?,
            "phi" => self.phi = parse_angle(value)?,
            "side" => self.side = value.parse().map_err(|e| bad(&e))?,
            "zeta" => self.zeta = Some(parse_angle(value)?),
            "levels" => self.levels = value.parse().map_err(|e| bad(&e))?,
            "gap" => self.gap = value.parse().map_err(|e| bad(&e))?,
            "theta-s" | "theta_s" => self.theta_s = parse_angle(value)?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            "base" => self.base = value.parse()?,
            _ => return Err(Error::Config(format!("unknown sweep parameter '{name}'"))),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub params: ScenarioParams,
    /// `None` selects the defaults for the scenario.
    pub engines: Option<Vec<Engine>>,
    /// `None` selects `2 q_m + 2` from the prediction.
    pub q_max: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub strict: bool,
}

impl RunConfig {
    pub fn new(scenario: ScenarioKind) -> RunConfig {
        RunConfig {
            scenario,
            params: ScenarioParams::default(),
            engines: None,
            q_max: None,
            out: None,
            format: Format::Csv,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum DenseBase {
    Grover { dim: usize, phi_s: f64 },
    Kato { n: u32, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
struct DenseSetup {
    base: DenseBase,
    phi: f64,
    stages: Vec<ControlKind>,
}

/// A scenario reduced to its spectral model plus whatever the structural
/// engines need to rebuild the same operator.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltScenario {
    pub model: SpectralModel,
    /// Scalar facts about the construction (gamma, zeta, B before and after, ...).
    pub notes: BTreeMap<String, f64>,
    pub zeta_scan: Option<ZetaScan>,
    pub zeta_checks: Option<Vec<ZetaCheck>>,
    lattice: Option<(usize, Vec<ControlStage>)>,
    dense: Option<DenseSetup>,
    /// Eigenfind: the pre-reversal model, iterated directly as `T = I_s D_t`.
    reversed_from: Option<SpectralModel>,
}

impl BuiltScenario {
    fn plain(model: SpectralModel) -> BuiltScenario {
        BuiltScenario {
            model,
            notes: BTreeMap::new(),
            zeta_scan: None,
            zeta_checks: None,
            lattice: None,
            dense: None,
            reversed_from: None,
        }
    }

    pub fn supports(&self, engine: Engine) -> bool {
        match engine {
            Engine::Lattice => self.lattice.is_some(),
            Engine::Dense => self.dense.is_some(),
            _ => true,
        }
    }

    /// Engines run when none are requested.
    pub fn default_engines(&self) -> Vec<Engine> {
        let mut e = vec![Engine::Predicted, Engine::Secular, Engine::Iterated];
        if self.lattice.is_some() {
            e.push(Engine::Lattice);
        }
        if self.dense.is_some() {
            e.push(Engine::Dense);
        }
        e
    }
}

fn dense_grover_dim(alpha: f64) -> Option<usize> {
    let n = (alpha * alpha).recip();
    let r = n.round();
    ((n - r).abs() < 1e-9 && r >= 2.0 && r <= DENSE_CAP as f64).then_some(r as usize)
}

/// Random gapped spectrum around `theta_s` for eigenstate finding.
pub fn random_eigenfind_spectrum(
    levels: usize,
    gap: f64,
    theta_s: f64,
    alpha: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if levels < 2 || !(gap > 0.0 && gap < std::f64::consts::PI) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "eigenfind needs levels >= 2, 0 < gap < pi and 0 < alpha < 1 (got {levels}, {gap}, {alpha})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas = vec![theta_s];
    let mut raw = vec![0.0];
    let span = 2.0 * (std::f64::consts::PI - gap);
    for _ in 1..levels {
        let offset = gap + rng.gen::<f64>() * span;
        thetas.push(wrap_phase(theta_s + offset));
        raw.push(rng.gen_range(0.1..1.0));
    }
    let total: f64 = raw.iter().sum();
    let rest = 1.0 - alpha * alpha;
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total * rest).collect();
    weights[0] = alpha * alpha;
    Ok((thetas, weights))
}

fn load_model(path: &Path) -> Result<SpectralModel> {
    let text = fs::read_to_string(path)?;
    SpectralModel::from_json(&text)
}

/// Builds the spectral model (and structural engine setups) for a scenario.
pub fn build_scenario(kind: ScenarioKind, p: &ScenarioParams) -> Result<BuiltScenario> {
    match kind {
        ScenarioKind::Grover => {
            let mut b = BuiltScenario::plain(grover_model(p.alpha, p.phi_t, p.phi_s)?);
            b.dense = dense_grover_dim(p.alpha).map(|dim| DenseSetup {
                base: DenseBase::Grover {
                    dim,
                    phi_s: p.phi_s,
                },
                phi: p.phi_t,
                stages: Vec::new(),
            });
            Ok(b)
        }
        ScenarioKind::Kato => {
            let (model, params) = kato_model(p.n, p.phi)?;
            let mut b = BuiltScenario::plain(model);
            b.notes.insert("gamma".into(), params.gamma);
            if (1usize << p.n) <= DENSE_CAP {
                b.dense = Some(DenseSetup {
                    base: DenseBase::Kato {
                        n: p.n,
                        gamma: params.gamma,
                    },
                    phi: p.phi,
                    stages: Vec::new(),
                });
            }
            Ok(b)
        }
        ScenarioKind::Akr2d => {
            let mut b = BuiltScenario::plain(akr_model(AkrParams::new(p.side))?);
            b.lattice = Some((p.side, Vec::new()));
            b.notes.insert("n_sites".into(), (p.side * p.side) as f64);
            Ok(b)
        }
        ScenarioKind::Custom => {
            let path = p
                .model_path
                .as_ref()
                .ok_or_else(|| Error::Config("custom scenario needs --model <json>".into()))?;
            Ok(BuiltScenario::plain(load_model(path)?))
        }
        ScenarioKind::Eigenfind => {
            let (thetas, weights) =
                random_eigenfind_spectrum(p.levels, p.gap, p.theta_s, p.alpha, p.seed)?;
            let base = eigenfind_model(&thetas, &weights, p.theta_s, std::f64::consts::PI)?;
            let sym = algorithm1(&base)?;
            let reversed = time_reverse(&sym.model, std::f64::consts::PI)?;
            let mut b = BuiltScenario::plain(reversed);
            b.notes.insert("b_prime".into(), sym.b_prime);
            b.reversed_from = Some(sym.model);
            Ok(b)
        }
        ScenarioKind::Alg1 | ScenarioKind::Alg2 => {
            if matches!(p.base, ScenarioKind::Alg1 | ScenarioKind::Alg2) {
                return Err(Error::Config(format!("base scenario cannot be {}", p.base)));
            }
            let base = build_scenario(p.base, p)?;
            if base.reversed_from.is_some() {
                return Err(Error::Config(
                    "eigenfind already applies alg1; run it directly".into(),
                ));
            }
            let base_m = moments(&base.model)?;
            let mut built = BuiltScenario::plain(base.model.clone());
            built.notes = base.notes.clone();
            built
                .notes
                .insert("b".into(), (1.0 + base_m.lambda2).sqrt());
            built.notes.insert("lambda1".into(), base_m.lambda1);
            built.lattice = base.lattice.clone();
            built.dense = base.dense.clone();

            let needs_alg1 = kind == ScenarioKind::Alg1 || !p.skip_alg1;
            if needs_alg1 {
                let r = algorithm1(&built.model)?;
                built.notes.insert("b_prime".into(), r.b_prime);
                built.notes.insert("alpha_prime".into(), r.alpha_prime);
                built.model = r.model;
                push_stage(&mut built, ControlStage::Alg1, ControlKind::Alg1);
            } else if base_m.lambda1.abs() > MOMENT_TOL {
                return Err(Error::Moment(base_m.lambda1));
            }
            if kind == ScenarioKind::Alg2 {
                let mut zeta = p.zeta;
                if p.optimize_zeta || zeta.is_none() {
                    let scan = optimize_zeta(&built.model)?;
                    built.notes.insert("zeta_star".into(), scan.zeta_star);
                    built
                        .notes
                        .insert("zeta_analytic".into(), scan.zeta_analytic());
                    built.notes.insert("q_min".into(), scan.q_min);
                    built
                        .notes
                        .insert("q_min_analytic".into(), scan.q_min_analytic());
                    zeta = zeta.or(Some(scan.zeta_star));
                    if p.simulate {
                        let z = scan.zeta_star;
                        let grid = [0.5 * z, z, (2.0 * z).min(std::f64::consts::FRAC_PI_2)];
                        built.zeta_checks = Some(cross_check_zeta(&built.model, &grid)?);
                    }
                    built.zeta_scan = Some(scan);
                }
                let zeta = zeta.expect("zeta resolved above");
                let r = algorithm2(&built.model, zeta)?;
                built.notes.insert("zeta".into(), zeta);
                built.notes.insert("b_double_prime".into(), r.b_prime);
                built
                    .notes
                    .insert("alpha_double_prime".into(), r.alpha_prime);
                built.model = r.model;
                push_stage(
                    &mut built,
                    ControlStage::Alg2 { zeta },
                    ControlKind::Alg2 { zeta },
                );
            }
            Ok(built)
        }
    }
}

fn push_stage(b: &mut BuiltScenario, walk: ControlStage, dense: ControlKind) {
    if let Some((_, stages)) = &mut b.lattice {
        stages.push(walk);
    }
    if let Some(setup) = &mut b.dense {
        setup.stages.push(dense);
        setup.phi = std::f64::consts::PI;
        let dim = match setup.base {
            DenseBase::Grover { dim, .. } => dim,
            DenseBase::Kato { n, .. } => 1 << n,
        };
        if dim << setup.stages.len() > DENSE_CAP {
            b.dense = None;
        }
    }
}

fn dense_trace(setup: &DenseSetup, q_max: u64) -> Result<Trace> {
    let (mut d, mut source, mut target) = match setup.base {
        DenseBase::Grover { dim, phi_s } => (
            build_grover_diffusion(dim, phi_s)?,
            DenseState::uniform(dim),
            DenseState::basis(dim, 0)?,
        ),
        DenseBase::Kato { n, gamma } => {
            let dim = 1usize << n;
            (
                build_kato_dense(n, gamma)?,
                DenseState::uniform(dim),
                DenseState::basis(dim, 0)?,
            )
        }
    };
    for &kind in &setup.stages {
        d = controlled_diffusion(&d, kind)?;
        let (s, t) = controlled_states(kind, &source, &target);
        source = s;
        target = t;
    }
    evolve_search(&d, &target, setup.phi, &source, q_max)
}

/// Runs one engine on a built scenario.
pub fn run_engine(built: &BuiltScenario, engine: Engine, q_max: u64) -> Result<Trace> {
    match engine {
        Engine::Predicted => overlap_curve_predicted(&built.model, q_max),
        Engine::Secular => {
            let spectrum = solve_secular(&merge_degenerate(&built.model), SECULAR_TOL)?;
            Ok(secular_trace(&spectrum, q_max))
        }
        Engine::Iterated => match &built.reversed_from {
            Some(forward) => iterate_reversed(forward, std::f64::consts::PI, q_max),
            None => iterate(&built.model, q_max),
        },
        Engine::Lattice => {
            let (side, stages) = built.lattice.as_ref().ok_or_else(|| {
                Error::Config("lattice engine needs an akr2d-based scenario".into())
            })?;
            run_walk(*side, (0, 0), q_max, Some(stages))
        }
        Engine::Dense => {
            let setup = built.dense.as_ref().ok_or_else(|| {
                Error::Config(
                    "dense engine needs a grover (1/alpha^2 integral) or kato base within the size cap"
                        .into(),
                )
            })?;
            dense_trace(setup, q_max)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineSummary {
    pub engine: Engine,
    pub q_peak: usize,
    pub p_peak: f64,
    pub first_q: usize,
    pub first_p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDiff {
    pub a: Engine,
    pub b: Engine,
    pub max_abs_diff: f64,
}

/// Everything a run reports, serialized as `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: ScenarioKind,
    pub params: ScenarioParams,
    pub model: SpectralModel,
    pub prediction: Prediction,
    pub q_max_run: u64,
    pub engines: Vec<EngineSummary>,
    pub diffs: Vec<TraceDiff>,
    pub notes: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_checks: Option<Vec<ZetaCheck>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<Trace>>,
}

/// Result of [`run`]: the summary plus the raw traces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub summary: Summary,
    pub traces: Vec<Trace>,
    /// Set when `strict` was requested and the validity margin is below the threshold.
    pub strict_violation: bool,
}

fn resolve_q_max(config: &RunConfig, prediction: &Prediction) -> u64 {
    config
        .q_max
        .unwrap_or_else(|| (2 * prediction.q_max + 2).min(MAX_DEFAULT_Q))
}

/// Builds the scenario, runs the engines and assembles the summary. Files are
/// written only when `config.out` is set.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let built = build_scenario(config.scenario, &config.params)?;
    let prediction = predict(&built.model)?;
    let engines = match &config.engines {
        Some(e) => e.clone(),
        None => built.default_engines(),
    };
    for &e in &engines {
        if !built.supports(e) {
            return Err(Error::Config(format!(
                "engine '{e}' is not available for scenario '{}'",
                config.scenario
            )));
        }
    }
    let q_max = resolve_q_max(config, &prediction);
    let traces = engines
        .iter()
        .map(|&e| run_engine(&built, e, q_max))
        .collect::<Result<Vec<_>>>()?;

    let engine_summaries = traces
        .iter()
        .map(|t| {
            let peak = find_peak(t)?;
            Ok(EngineSummary {
                engine: t.engine,
                q_peak: peak.q_peak,
                p_peak: peak.p_peak,
                first_q: peak.first_q,
                first_p: peak.first_p,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut diffs = Vec::new();
    for i in 0..traces.len() {
        for j in i + 1..traces.len() {
            diffs.push(TraceDiff {
                a: traces[i].engine,
                b: traces[j].engine,
                max_abs_diff: traces[i].max_abs_diff(&traces[j]),
            });
        }
    }
    let strict_violation = config.strict && prediction.validity_margin < MARGIN_WARNING;
    let summary = Summary {
        scenario: config.scenario,
        params: config.params.clone(),
        model: built.model.clone(),
        prediction,
        q_max_run: q_max,
        engines: engine_summaries,
        diffs,
        notes: built.notes.clone(),
        zeta_checks: built.zeta_checks.clone(),
        traces: (config.format == Format::Json).then(|| traces.clone()),
    };
    if let Some(dir) = &config.out {
        write_report(dir, &summary, &traces, config.format)?;
    }
    Ok(RunOutput {
        summary,
        traces,
        strict_violation,
    })
}

fn csv_comments(summary: &Summary) -> Vec<String> {
    let p = &summary.prediction;
    let mut c = vec![
        format!("scenario={}", summary.scenario),
        format!("model={}", summary.model.meta),
        format!(
            "alpha={:.16e} theta_min={:.16e} A={:.16e} B={:.16e}",
            p.alpha(),
            p.moments.theta_min,
            p.a(),
            p.b()
        ),
        format!(
            "p_max={:.16e} q_max={} validity_margin={:.16e}",
            p.p_max, p.q_max, p.validity_margin
        ),
    ];
    for (k, v) in &summary.notes {
        c.push(format!("{k}={v:.16e}"));
    }
    c
}

/// Writes `summary.json` and, for CSV output, `trace_<engine>.csv` per engine.
pub fn write_report(dir: &Path, summary: &Summary, traces: &[Trace], format: Format) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(summary)?,
    )?;
    if format == Format::Csv {
        let comments = csv_comments(summary);
        for t in traces {
            let file = fs::File::create(dir.join(format!("trace_{}.csv", t.engine)))?;
            let mut w = std::io::BufWriter::new(file);
            t.write_csv(&mut w, &comments)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// One sweep axis: a parameter name and the values it takes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<String>,
}

impl SweepAxis {
    /// Parses `a,b,c` or an inclusive integer range `lo..hi`.
    pub fn parse(name: &str, text: &str) -> Result<SweepAxis> {
        let values = if let Some((lo, hi)) = text.split_once("..") {
            let lo: i64 = lo
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad range '{text}'")))?;
            let hi: i64 = hi
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad range '{text}'")))?;
            if hi < lo {
                return Err(Error::Config(format!("empty range '{text}'")));
            }
            (lo..=hi).map(|v| v.to_string()).collect()
        } else {
            text.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect::<Vec<_>>()
        };
        if values.is_empty() {
            return Err(Error::Config(format!("no values for sweep axis '{name}'")));
        }
        Ok(SweepAxis {
            name: name.to_string(),
            values,
        })
    }
}

/// One grid point of a sweep; `error` is set instead of `summary` on failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coords: Vec<String>,
    pub summary: Option<Summary>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axes: Vec<String>,
    pub engines: Vec<Engine>,
    pub rows: Vec<SweepRow>,
}

fn grid(axes: &[SweepAxis]) -> Vec<Vec<String>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect()
    })
}

/// Worker pool sized from [`THREADS_ENV`], falling back to rayon's default.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var(THREADS_ENV) {
        let n: usize = text
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}='{text}' is not a thread count")))?;
        if n == 0 {
            return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs `base` at every grid point. Rows come back in grid order regardless
/// of scheduling; a failing point records its error and the sweep continues.
pub fn sweep(base: &RunConfig, axes: &[SweepAxis]) -> Result<SweepTable> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::Config("sweep takes one or two axes".into()));
    }
    let points = grid(axes);
    let mut point_config = base.clone();
    point_config.out = None;
    point_config.format = Format::Csv;
    let pool = worker_pool()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|coords| {
                let mut cfg = point_config.clone();
                // Detuning is relative to phi_t, so it is applied last.
                let mut pairs: Vec<(&SweepAxis, &String)> = axes.iter().zip(coords).collect();
                pairs.sort_by_key(|(axis, _)| axis.name == "detuning");
                let outcome = pairs
                    .into_iter()
                    .try_for_each(|(axis, v)| cfg.params.set(&axis.name, v))
                    .and_then(|_| run(&cfg));
                match outcome {
                    Ok(out) => SweepRow {
                        coords: coords.clone(),
                        summary: Some(out.summary),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        coords: coords.clone(),
                        summary: None,
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });
    let mut engines: Vec<Engine> = Vec::new();
    for row in &rows {
        if let Some(s) = &row.summary {
            for e in &s.engines {
                if !engines.contains(&e.engine) {
                    engines.push(e.engine);
                }
            }
        }
    }
    engines.sort();
    Ok(SweepTable {
        axes: axes.iter().map(|a| a.name.clone()).collect(),
        engines,
        rows,
    })
}

const SWEEP_COLUMNS: [&str; 15] = [
    "alpha",
    "theta_min",
    "lambda1",
    "lambda2",
    "A",
    "B",
    "B2",
    "eta",
    "lambda_plus",
    "lambda_minus",
    "p_max",
    "q_max",
    "Q",
    "validity_margin",
    "margin_warning",
];

impl SweepTable {
    /// Aggregated CSV: `#` comments, a header, then one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut header: Vec<String> = self.axes.clone();
        header.extend(SWEEP_COLUMNS.iter().map(|s| s.to_string()));
        for e in &self.engines {
            header.push(format!("{e}_q_peak"));
            header.push(format!("{e}_p_peak"));
        }
        header.push("error".into());
        writeln!(out, "{}", header.join(","))?;
        let blank = SWEEP_COLUMNS.len() + 2 * self.engines.len();
        for row in &self.rows {
            let mut cells = row.coords.clone();
            match &row.summary {
                Some(s) => {
                    let p = &s.prediction;
                    let f = |x: f64| format!("{x:.16e}");
                    cells.extend([
                        f(p.alpha()),
                        f(p.moments.theta_min),
                        f(p.moments.lambda1),
                        f(p.moments.lambda2),
                        f(p.a()),
                        f(p.b()),
                        f(p.b() * p.b()),
                        f(p.eta),
                        f(p.lambda_plus),
                        f(p.lambda_minus),
                        f(p.p_max),
                        p.q_max.to_string(),
                        f(p.query_complexity),
                        f(p.validity_margin),
                        p.margin_warning.to_string(),
                    ]);
                    for e in &self.engines {
                        match s.engines.iter().find(|x| x.engine == *e) {
                            Some(x) => {
                                cells.push(x.q_peak.to_string());
                                cells.push(f(x.p_peak));
                            }
                            None => cells.extend([String::new(), String::new()]),
                        }
                    }
                    cells.push(String::new());
                }
                None => {
                    cells.extend(std::iter::repeat_n(String::new(), blank));
                    let msg = row.error.clone().unwrap_or_default();
                    cells.push(format!("\"{}\"", msg.replace('"', "'")));
                }
            }
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scenario_tags_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.tag().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("nope".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn grover_run_summary() {
        let mut cfg = RunConfig::new(ScenarioKind::Grover);
        cfg.params.alpha = 1.0 / 32.0;
        let out = run(&cfg).unwrap();
        let s = &out.summary;
        assert_eq!(s.prediction.q_max, 25);
        assert!((s.prediction.p_max - 1.0).abs() < 1e-12);
        assert!(s.engines.iter().any(|e| e.engine == Engine::Dense));
        for d in &s.diffs {
            if d.a != Engine::Predicted && d.b != Engine::Predicted {
                assert!(d.max_abs_diff < 1e-9, "{d:?}");
            }
        }
    }

    #[test]
    fn unsupported_engine_is_rejected() {
        let mut cfg = RunConfig::new(ScenarioKind::Grover);
        cfg.engines = Some(vec![Engine::Lattice]);
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn custom_without_model_fails() {
        let cfg = RunConfig::new(ScenarioKind::Custom);
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn axis_parsing() {
        assert_eq!(
            SweepAxis::parse("n", "8..10").unwrap().values,
            vec!["8", "9", "10"]
        );
        assert_eq!(
            SweepAxis::parse("side", "8, 16").unwrap().values,
            vec!["8", "16"]
        );
        assert!(SweepAxis::parse("n", "9..8").is_err());
        assert!(SweepAxis::parse("n", "").is_err());
    }

    #[test]
    fn grid_order_is_row_major() {
        let axes = [
            SweepAxis::parse("a", "1,2").unwrap(),
            SweepAxis::parse("b", "x,y").unwrap(),
        ];
        let g = grid(&axes);
        assert_eq!(
            g,
            vec![
                vec!["1", "x"],
                vec!["1", "y"],
                vec!["2", "x"],
                vec!["2", "y"]
            ]
        );
    }

    #[test]
    fn sweep_records_errors_and_continues() {
        let mut cfg = RunConfig::new(ScenarioKind::Grover);
        cfg.engines = Some(vec![Engine::Predicted]);
        let axis = SweepAxis::parse("alpha", "0.1,2.0,0.05").unwrap();
        let table = sweep(&cfg, &[axis]).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows[0].summary.is_some());
        assert!(table.rows[1].error.is_some());
        assert!(table.rows[2].summary.is_some());
        let mut buf = Vec::new();
        table.write_csv(&mut buf, &["test".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# test");
        assert!(lines[1].starts_with("alpha,alpha,theta_min"));
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn detuning_parameter() {
        let mut p = ScenarioParams::default();
        p.set("detuning", "0.3").unwrap();
        assert!((p.phi_s - (PI - 0.3)).abs() < 1e-15);
        assert!(p.set("bogus", "1").is_err());
    }

    #[test]
    fn eigenfind_spectrum_is_gapped_and_normalized() {
        let (t, w) = random_eigenfind_spectrum(64, 0.2, 0.7, 0.05, 9).unwrap();
        assert_eq!(t[0], 0.7);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for &theta in &t[1..] {
            assert!(wrap_phase(theta - 0.7).abs() >= 0.2 - 1e-12);
        }
    }
}
