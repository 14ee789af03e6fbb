//! Parameter sweeps: network ensembles, immunization over a removal-fraction grid,
//! SIR replicates and mean/std aggregation.
//!
//! Every random stream is derived from the master seed and the coordinates of what it
//! drives, so a single cell can be recomputed in isolation and the output does not
//! depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::inter_community_fraction;
use crate::io;
use crate::lfr::{generate, LfrNetwork, LfrParams};
use crate::sir::{self, SirParams};
use crate::strategy::{self, ImmunizationPlan, StrategyKind};
use crate::util::{derive_seed, quota, rng_from_seed, round_half_up};

/// Environment variable naming the default directory for sweep output and caches.
pub const OUT_DIR_VAR: &str = "COMMIMMUNE_OUT_DIR";

/// Header of the sweep CSV.
pub const RECORD_HEADER: &str =
    "mu,lambda,sigma,strategy,fraction_removed,mean_total_infected,std_total_infected,sample_count";

// Stream tags keep the seed families apart.
const NETWORK_STREAM: u64 = 1;
const PLAN_STREAM: u64 = 2;
const SIR_STREAM: u64 = 3;

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// `0.0, 0.05, ..., 0.6`, built as `k / 20` so every value is the nearest double.
pub fn default_fractions() -> Vec<f64> {
    (0..=12).map(|k| k as f64 / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Template; `mu` and `seed` are replaced per ensemble member.
    pub lfr: LfrParams,
    pub mu_values: Vec<f64>,
    pub networks_per_mu: usize,
    /// Template; `lambda`, `sigma` and `seed` are replaced per run.
    pub sir: SirParams,
    pub lambda_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    pub fractions: Vec<f64>,
    pub replicates_per_network: usize,
    pub master_seed: u64,
    pub output_path: PathBuf,
    /// Where networks and global plans are cached; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
    /// Betweenness plans are rescored after every `round(betweenness_batch * n)`
    /// removals (at least one). Zero means after every removal.
    pub betweenness_batch: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let out = default_output_dir();
        ExperimentConfig {
            lfr: LfrParams::default(),
            mu_values: vec![0.3, 0.5, 0.7],
            networks_per_mu: 10,
            sir: SirParams::default(),
            lambda_values: vec![0.1],
            sigma_values: vec![0.1],
            strategies: StrategyKind::COMPARED.to_vec(),
            fractions: default_fractions(),
            replicates_per_network: 1,
            master_seed: 0,
            output_path: out.join("sweep.csv"),
            cache_dir: Some(out.join("cache")),
            betweenness_batch: 0.002,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: invalid value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment. The list
    /// keys `mu`, `lambda`, `sigma`, `strategy` and `fraction` may repeat; the first
    /// occurrence replaces the default list and later ones append.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut lists: BTreeMap<&str, Vec<(usize, &str)>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mu" | "lambda" | "sigma" | "strategy" | "fraction" => {
                    lists.entry(key).or_default().push((line, value));
                }
                "networks_per_mu" => cfg.networks_per_mu = parse_value(key, value, line)?,
                "replicates_per_network" => {
                    cfg.replicates_per_network = parse_value(key, value, line)?
                }
                "master_seed" => cfg.master_seed = parse_value(key, value, line)?,
                "output" => cfg.output_path = PathBuf::from(value),
                "cache_dir" => {
                    cfg.cache_dir = match value {
                        "" | "none" => None,
                        dir => Some(PathBuf::from(dir)),
                    }
                }
                "betweenness_batch" => cfg.betweenness_batch = parse_value(key, value, line)?,
                "initial_infected_fraction" => {
                    cfg.sir.initial_infected_fraction = parse_value(key, value, line)?
                }
                "max_steps" => cfg.sir.max_steps = parse_value(key, value, line)?,
                "seed" => {
                    return Err(Error::Config(format!(
                        "line {line}: network seeds derive from master_seed"
                    )))
                }
                _ => {
                    if !cfg
                        .lfr
                        .set(key, value)
                        .map_err(|e| Error::Config(format!("line {line}: {e}")))?
                    {
                        return Err(Error::Config(format!("line {line}: unknown key {key:?}")));
                    }
                }
            }
        }
        for (key, values) in lists {
            match key {
                "strategy" => {
                    cfg.strategies = values
                        .iter()
                        .map(|(line, v)| {
                            v.parse()
                                .map_err(|e| Error::Config(format!("line {line}: {e}")))
                        })
                        .collect::<Result<_>>()?;
                }
                _ => {
                    let parsed = values
                        .iter()
                        .map(|&(line, v)| parse_value::<f64>(key, v, line))
                        .collect::<Result<Vec<_>>>()?;
                    match key {
                        "mu" => cfg.mu_values = parsed,
                        "lambda" => cfg.lambda_values = parsed,
                        "sigma" => cfg.sigma_values = parsed,
                        _ => cfg.fractions = parsed,
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grids = [
            ("mu", self.mu_values.len()),
            ("lambda", self.lambda_values.len()),
            ("sigma", self.sigma_values.len()),
            ("strategy", self.strategies.len()),
            ("fraction", self.fractions.len()),
        ];
        for (name, len) in grids {
            if len == 0 {
                return Err(Error::Config(format!("{name} grid is empty")));
            }
        }
        if self.networks_per_mu == 0 || self.replicates_per_network == 0 {
            return Err(Error::Config(
                "networks_per_mu and replicates_per_network must be positive".into(),
            ));
        }
        for &f in &self.fractions {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Config(format!("fraction {f} outside [0, 1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.betweenness_batch) {
            return Err(Error::Config(format!(
                "betweenness_batch {} outside [0, 1]",
                self.betweenness_batch
            )));
        }
        for &mu in &self.mu_values {
            self.network_params(mu, 0).validate()?;
        }
        for &lambda in &self.lambda_values {
            for &sigma in &self.sigma_values {
                self.sir_params(lambda, sigma, 0).validate()?;
            }
        }
        Ok(())
    }

    /// Number of records a sweep produces.
    pub fn grid_size(&self) -> usize {
        self.mu_values.len()
            * self.lambda_values.len()
            * self.sigma_values.len()
            * self.strategies.len()
            * self.fractions.len()
    }

    /// Parameters of ensemble member `index` at mixing `mu`.
    pub fn network_params(&self, mu: f64, index: usize) -> LfrParams {
        LfrParams {
            mu,
            seed: derive_seed(
                self.master_seed,
                &[NETWORK_STREAM, mu.to_bits(), index as u64],
            ),
            ..self.lfr.clone()
        }
    }

    fn sir_params(&self, lambda: f64, sigma: f64, seed: u64) -> SirParams {
        SirParams {
            lambda,
            sigma,
            seed,
            ..self.sir.clone()
        }
    }

    fn batch_size(&self) -> usize {
        round_half_up(self.betweenness_batch * self.lfr.n as f64).max(1)
    }
}

/// One grid cell of a sweep. A failed cell has `sample_count == 0` and NaN statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub mu: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub strategy: StrategyKind,
    pub fraction_removed: f64,
    pub mean_total_infected: f64,
    pub std_total_infected: f64,
    pub sample_count: usize,
}

impl SweepRecord {
    pub fn is_failed(&self) -> bool {
        self.sample_count == 0
    }
}

/// Coordinates of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub mu: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub strategy: StrategyKind,
    pub fraction: f64,
}

impl Cell {
    fn record(&self, totals: &[usize]) -> SweepRecord {
        let (mean, std) = if totals.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            mean_std(totals)
        };
        SweepRecord {
            mu: self.mu,
            lambda: self.lambda,
            sigma: self.sigma,
            strategy: self.strategy,
            fraction_removed: self.fraction,
            mean_total_infected: mean,
            std_total_infected: std,
            sample_count: totals.len(),
        }
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[usize]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    (mean, var.sqrt())
}

fn strategy_code(kind: StrategyKind) -> u64 {
    StrategyKind::ALL.iter().position(|&k| k == kind).unwrap() as u64
}

fn sir_seed(cfg: &ExperimentConfig, cell: &Cell, network: usize, replicate: usize) -> u64 {
    derive_seed(
        cfg.master_seed,
        &[
            SIR_STREAM,
            cell.mu.to_bits(),
            cell.lambda.to_bits(),
            cell.sigma.to_bits(),
            strategy_code(cell.strategy),
            cell.fraction.to_bits(),
            network as u64,
            replicate as u64,
        ],
    )
}

fn plan_seed(cfg: &ExperimentConfig, mu: f64, network: usize, kind: StrategyKind, f: f64) -> u64 {
    derive_seed(
        cfg.master_seed,
        &[
            PLAN_STREAM,
            mu.to_bits(),
            network as u64,
            strategy_code(kind),
            f.to_bits(),
        ],
    )
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn network_stem(cfg: &ExperimentConfig, params: &LfrParams, index: usize) -> Option<PathBuf> {
    cfg.cache_dir
        .as_ref()
        .map(|dir| dir.join(format!("lfr-{:016x}-{index}", params.cache_key())))
}

fn load_network(stem: &Path, n: usize) -> Result<LfrNetwork> {
    let graph = io::read_edge_list_with_nodes(&stem.with_extension("edges"), n)?;
    let partition = io::read_communities(&stem.with_extension("communities"))?;
    partition.check_covers(&graph)?;
    let achieved_mu = inter_community_fraction(&graph, &partition)?;
    Ok(LfrNetwork {
        graph,
        partition,
        achieved_mu,
    })
}

/// Ensemble member `index` at mixing `mu`, read from the cache when present.
pub fn ensemble_member(cfg: &ExperimentConfig, mu: f64, index: usize) -> Result<LfrNetwork> {
    let params = cfg.network_params(mu, index);
    let stem = network_stem(cfg, &params, index);
    if let Some(stem) = &stem {
        if let Ok(net) = load_network(stem, params.n) {
            if net.graph.node_count() == params.n {
                return Ok(net);
            }
        }
    }
    let net = generate(&params)?;
    if let Some(stem) = &stem {
        if let Some(dir) = stem.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        write_atomic(
            &stem.with_extension("edges"),
            &io::format_edge_list(&net.graph),
        )?;
        write_atomic(
            &stem.with_extension("communities"),
            &io::format_communities(&net.partition, params.n),
        )?;
        write_atomic(&stem.with_extension("meta"), &net.metadata(&params))?;
    }
    Ok(net)
}

fn plan_cache_path(
    cfg: &ExperimentConfig,
    mu: f64,
    index: usize,
    kind: StrategyKind,
    batch: usize,
) -> Option<PathBuf> {
    let params = cfg.network_params(mu, index);
    cfg.cache_dir.as_ref().map(|dir| {
        dir.join(format!(
            "plan-{:016x}-{index}-{kind}-{batch}.txt",
            params.cache_key()
        ))
    })
}

/// Global plan for `fraction`, taken as a prefix of a cached longer plan when one
/// exists. Greedy plans are prefix-closed, so the result equals planning directly.
fn global_plan(
    cfg: &ExperimentConfig,
    mu: f64,
    index: usize,
    net: &LfrNetwork,
    kind: StrategyKind,
    fraction: f64,
) -> Result<ImmunizationPlan> {
    let n = net.graph.node_count();
    let batch = if kind == StrategyKind::GlobalBetweenness {
        cfg.batch_size()
    } else {
        1
    };
    let needed = quota(fraction, n);
    let path = plan_cache_path(cfg, mu, index, kind, batch);
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            let order: Option<Vec<usize>> = text.lines().map(|l| l.parse().ok()).collect();
            if let Some(order) = order.filter(|o| o.len() >= needed) {
                return Ok(ImmunizationPlan {
                    order: order[..needed].to_vec(),
                    strategy: kind,
                    fraction,
                });
            }
        }
    }
    // Plan once up to the largest fraction on the grid and keep it for the rest.
    let longest = cfg.fractions.iter().copied().fold(fraction, f64::max);
    let full = strategy::plan_global_batched(&net.graph, kind, longest, batch)?;
    if let Some(path) = &path {
        let mut text = String::new();
        for v in &full.order {
            let _ = writeln!(text, "{v}");
        }
        write_atomic(path, &text)?;
    }
    Ok(full.prefix(fraction, n))
}

fn build_plan(
    cfg: &ExperimentConfig,
    mu: f64,
    index: usize,
    net: &LfrNetwork,
    kind: StrategyKind,
    fraction: f64,
    longest: Option<&ImmunizationPlan>,
) -> Result<ImmunizationPlan> {
    if let Some(full) = longest {
        return Ok(full.prefix(fraction, net.graph.node_count()));
    }
    if kind.is_global() {
        return global_plan(cfg, mu, index, net, kind, fraction);
    }
    let mut rng = rng_from_seed(plan_seed(cfg, mu, index, kind, fraction));
    strategy::plan(&net.graph, Some(&net.partition), kind, fraction, &mut rng)
}

/// Totals of every (λ, σ) pair for one network, strategy and fraction, replicates in
/// order.
#[allow(clippy::too_many_arguments)]
fn run_member(
    cfg: &ExperimentConfig,
    mu: f64,
    index: usize,
    net: &LfrNetwork,
    kind: StrategyKind,
    fraction: f64,
    longest: Option<&ImmunizationPlan>,
    pairs: &[(f64, f64)],
) -> Result<Vec<Vec<usize>>> {
    let plan = build_plan(cfg, mu, index, net, kind, fraction, longest)?;
    let residual = net.graph.remove_nodes(&plan.order)?;
    pairs
        .iter()
        .map(|&(lambda, sigma)| {
            let cell = Cell {
                mu,
                lambda,
                sigma,
                strategy: kind,
                fraction,
            };
            (0..cfg.replicates_per_network)
                .map(|r| {
                    let seed = sir_seed(cfg, &cell, index, r);
                    let params = cfg.sir_params(lambda, sigma, seed);
                    let mut rng = rng_from_seed(seed);
                    sir::run(&residual, &params, &mut rng).map(|o| o.total_ever_infected)
                })
                .collect()
        })
        .collect()
}

fn ensemble(cfg: &ExperimentConfig, mu: f64) -> Result<Vec<LfrNetwork>> {
    (0..cfg.networks_per_mu)
        .into_par_iter()
        .map(|i| ensemble_member(cfg, mu, i))
        .collect()
}

/// Recomputes one cell on its own. Returns the record and the per-run totals it
/// aggregates, network-major.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<(SweepRecord, Vec<usize>)> {
    cfg.validate()?;
    let nets = match ensemble(cfg, cell.mu) {
        Ok(nets) => nets,
        Err(Error::GenerationFailure(_)) => return Ok((cell.record(&[]), Vec::new())),
        Err(e) => return Err(e),
    };
    let mut totals = Vec::new();
    for (i, net) in nets.iter().enumerate() {
        let runs = run_member(
            cfg,
            cell.mu,
            i,
            net,
            cell.strategy,
            cell.fraction,
            None,
            &[(cell.lambda, cell.sigma)],
        )?;
        totals.extend(runs.into_iter().flatten());
    }
    Ok((cell.record(&totals), totals))
}

/// Runs the whole grid. Records come out in grid order: μ, λ, σ, strategy, fraction.
/// An ensemble that cannot be generated yields failed records for its μ.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let pairs: Vec<(f64, f64)> = cfg
        .lambda_values
        .iter()
        .flat_map(|&l| cfg.sigma_values.iter().map(move |&s| (l, s)))
        .collect();
    let mut records = Vec::with_capacity(cfg.grid_size());
    for &mu in &cfg.mu_values {
        let nets = match ensemble(cfg, mu) {
            Ok(nets) => Some(nets),
            Err(Error::GenerationFailure(_)) => None,
            Err(e) => return Err(e),
        };
        // (strategy, fraction, network) -> totals per (λ, σ) pair
        let mut by_task: BTreeMap<(usize, usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        if let Some(nets) = &nets {
            // Global plans are built once per network, up to the largest fraction, so
            // concurrent tasks never plan (or cache) the same thing twice.
            let longest = cfg.fractions.iter().copied().fold(0.0, f64::max);
            let global_jobs: Vec<(usize, usize)> = (0..cfg.strategies.len())
                .filter(|&s| cfg.strategies[s].is_global())
                .flat_map(|s| (0..cfg.networks_per_mu).map(move |i| (s, i)))
                .collect();
            let global_plans: BTreeMap<(usize, usize), ImmunizationPlan> = global_jobs
                .par_iter()
                .map(|&(s, i)| {
                    global_plan(cfg, mu, i, &nets[i], cfg.strategies[s], longest)
                        .map(|plan| ((s, i), plan))
                })
                .collect::<Result<_>>()?;
            let tasks: Vec<(usize, usize, usize)> = (0..cfg.strategies.len())
                .flat_map(|s| {
                    (0..cfg.fractions.len())
                        .flat_map(move |f| (0..cfg.networks_per_mu).map(move |i| (s, f, i)))
                })
                .collect();
            let results: Vec<_> = tasks
                .par_iter()
                .map(|&(s, f, i)| {
                    let kind = cfg.strategies[s];
                    let full = global_plans.get(&(s, i));
                    run_member(cfg, mu, i, &nets[i], kind, cfg.fractions[f], full, &pairs)
                        .map(|totals| ((s, f, i), totals))
                })
                .collect::<Result<_>>()?;
            by_task.extend(results);
        }
        for (p, &(lambda, sigma)) in pairs.iter().enumerate() {
            for (s, &strategy) in cfg.strategies.iter().enumerate() {
                for (f, &fraction) in cfg.fractions.iter().enumerate() {
                    let cell = Cell {
                        mu,
                        lambda,
                        sigma,
                        strategy,
                        fraction,
                    };
                    let totals: Vec<usize> = (0..cfg.networks_per_mu)
                        .filter_map(|i| by_task.get(&(s, f, i)))
                        .flat_map(|per_pair| per_pair[p].iter().copied())
                        .collect();
                    records.push(cell.record(&totals));
                }
            }
        }
    }
    Ok(records)
}

pub fn format_records(records: &[SweepRecord]) -> String {
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.mu,
            r.lambda,
            r.sigma,
            r.strategy,
            r.fraction_removed,
            r.mean_total_infected,
            r.std_total_infected,
            r.sample_count
        );
    }
    out
}

pub fn write_records(records: &[SweepRecord], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, format_records(records)).map_err(|e| Error::io(path, e))
}

pub fn parse_records(path: &Path, text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == RECORD_HEADER => {}
        _ => return Err(Error::parse(path, 1, "missing sweep header")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::parse(path, line_no, "expected 8 fields"));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad number {:?}", fields[i])))
        };
        records.push(SweepRecord {
            mu: num(0)?,
            lambda: num(1)?,
            sigma: num(2)?,
            strategy: fields[3]
                .parse()
                .map_err(|e| Error::parse(path, line_no, format!("{e}")))?,
            fraction_removed: num(4)?,
            mean_total_infected: num(5)?,
            std_total_infected: num(6)?,
            sample_count: fields[7]
                .parse()
                .map_err(|_| Error::parse(path, line_no, "bad sample count"))?,
        });
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(path, &text)
}

/// Largest mean total at which an outbreak still counts as dead: the seeds plus
/// `threshold` of the nodes left active after removing `fraction` of `nodes`.
pub fn death_level(nodes: usize, fraction: f64, initial_infected: f64, threshold: f64) -> f64 {
    let active = nodes - quota(fraction, nodes);
    let seeds = round_half_up(initial_infected * active as f64).min(active);
    seeds as f64 + threshold * active as f64
}

/// Per-strategy summary of one (μ, λ, σ) curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub mu: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub strategy: StrategyKind,
    /// Smallest grid fraction from which every larger fraction is also dead.
    pub death_fraction: Option<f64>,
}

/// Outbreak-death fractions per curve and strategy, in first-appearance order.
pub fn report(
    records: &[SweepRecord],
    nodes: usize,
    initial_infected: f64,
    threshold: f64,
) -> Vec<ReportRow> {
    let mut curves: Vec<(ReportRow, Vec<&SweepRecord>)> = Vec::new();
    for r in records {
        let found = curves.iter_mut().find(|(row, _)| {
            row.mu == r.mu
                && row.lambda == r.lambda
                && row.sigma == r.sigma
                && row.strategy == r.strategy
        });
        match found {
            Some((_, points)) => points.push(r),
            None => curves.push((
                ReportRow {
                    mu: r.mu,
                    lambda: r.lambda,
                    sigma: r.sigma,
                    strategy: r.strategy,
                    death_fraction: None,
                },
                vec![r],
            )),
        }
    }
    curves
        .into_iter()
        .map(|(mut row, mut points)| {
            points.sort_by(|a, b| a.fraction_removed.total_cmp(&b.fraction_removed));
            let mut death = None;
            for p in points.iter().rev() {
                let level = death_level(nodes, p.fraction_removed, initial_infected, threshold);
                if p.is_failed() || p.mean_total_infected > level {
                    break;
                }
                death = Some(p.fraction_removed);
            }
            row.death_fraction = death;
            row
        })
        .collect()
}

pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = String::from("mu,lambda,sigma,strategy,death_fraction\n");
    for r in rows {
        let death = r
            .death_fraction
            .map_or_else(|| "none".to_string(), |f| f.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{death}",
            r.mu, r.lambda, r.sigma, r.strategy
        );
    }
    out
}

/// Writes the partition and graph of `net` in the interchange formats.
pub fn write_network(net: &LfrNetwork, n: usize, edges: &Path, communities: &Path) -> Result<()> {
    io::write_edge_list(&net.graph, edges)?;
    io::write_communities(&net.partition, n, communities)
}
