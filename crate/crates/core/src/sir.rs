//! Discrete-time stochastic SIR dynamics.
//!
//! Each step is synchronous against the step-start snapshot: a susceptible node with
//! `I` infected neighbors becomes infected with probability `1 - (1 - lambda)^I`, and
//! every node infected at step start recovers with probability `sigma`. A node
//! infected during a step cannot recover in that same step.
//!
//! Immunized (removed) nodes start out resistant and are never counted as infected.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::strategy::ImmunizationPlan;
use crate::util::round_half_up;

#[derive(Clone, Debug, PartialEq)]
pub struct SirParams {
    /// Per-contact, per-step transmission probability.
    pub lambda: f64,
    /// Per-step recovery probability.
    pub sigma: f64,
    pub initial_infected_fraction: f64,
    /// Safety cap; a run still infected at this step is flagged as truncated.
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for SirParams {
    fn default() -> Self {
        SirParams {
            lambda: 0.1,
            sigma: 0.1,
            initial_infected_fraction: 0.01,
            max_steps: 100_000,
            seed: 0,
        }
    }
}

impl SirParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("sigma", self.sigma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let f = self.initial_infected_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::Config(format!(
                "initial_infected_fraction = {f} outside (0, 1]"
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Number of seeds placed among `active` nodes.
    pub fn seed_count(&self, active: usize) -> usize {
        round_half_up(self.initial_infected_fraction * active as f64).min(active)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeState {
    Susceptible,
    Infected,
    Resistant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub s: usize,
    pub i: usize,
    pub r: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.s + self.i + self.r
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpidemicState {
    pub states: Vec<NodeState>,
    pub step: usize,
}

impl EpidemicState {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for s in &self.states {
            match s {
                NodeState::Susceptible => c.s += 1,
                NodeState::Infected => c.i += 1,
                NodeState::Resistant => c.r += 1,
            }
        }
        c
    }

    /// Infected nodes in ascending order.
    pub fn infected(&self) -> Vec<NodeId> {
        (0..self.states.len())
            .filter(|&i| self.states[i] == NodeState::Infected)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SirOutcome {
    /// Nodes that were ever infected, seeds included, immunized nodes excluded.
    pub total_ever_infected: usize,
    pub peak_infected: usize,
    /// Steps executed before halting.
    pub duration: usize,
    /// `(S, I, R)` at step 0 and after every step. Immunized nodes count as `R`.
    pub series: Vec<Counts>,
    pub seeds: usize,
    pub immunized: usize,
    /// True when `max_steps` was reached with infected nodes left.
    pub truncated: bool,
}

impl SirOutcome {
    /// CSV with header `step,s_count,i_count,r_count`.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("step,s_count,i_count,r_count\n");
        for (step, c) in self.series.iter().enumerate() {
            let _ = writeln!(out, "{step},{},{},{}", c.s, c.i, c.r);
        }
        out
    }
}

/// Infects `round(initial_infected_fraction * active)` distinct active nodes; removed
/// nodes start resistant.
pub fn seed_infection<R: Rng + ?Sized>(
    g: &Graph,
    params: &SirParams,
    rng: &mut R,
) -> Result<EpidemicState> {
    params.validate()?;
    let mut active: Vec<NodeId> = g.active_nodes().collect();
    if active.is_empty() {
        return Err(Error::Capacity("no active nodes to seed".into()));
    }
    let count = params.seed_count(active.len());
    let mut states: Vec<NodeState> = (0..g.node_count())
        .map(|i| {
            if g.is_active(i) {
                NodeState::Susceptible
            } else {
                NodeState::Resistant
            }
        })
        .collect();
    let (seeds, _) = active.partial_shuffle(rng, count);
    for &s in seeds.iter() {
        states[s] = NodeState::Infected;
    }
    Ok(EpidemicState { states, step: 0 })
}

/// Scratch space for stepping without rescanning the whole graph.
struct Stepper {
    pressure: Vec<u32>,
    touched: Vec<NodeId>,
    miss: Vec<f64>,
}

impl Stepper {
    fn new(n: usize, lambda: f64) -> Self {
        Stepper {
            pressure: vec![0; n],
            touched: Vec::new(),
            // miss[k] = (1 - lambda)^k, grown on demand
            miss: vec![1.0, 1.0 - lambda],
        }
    }

    fn miss_probability(&mut self, k: usize) -> f64 {
        while self.miss.len() <= k {
            let next = self.miss.last().unwrap() * self.miss[1];
            self.miss.push(next);
        }
        self.miss[k]
    }

    /// Advances `states` by one step given the ascending list of infected nodes.
    /// Returns `(newly_infected, recovered)`, each in ascending order.
    fn advance<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        states: &mut [NodeState],
        infected: &[NodeId],
        sigma: f64,
        rng: &mut R,
    ) -> (Vec<NodeId>, Vec<NodeId>) {
        self.touched.clear();
        for &v in infected {
            for &u in g.neighbors(v) {
                if states[u] == NodeState::Susceptible {
                    if self.pressure[u] == 0 {
                        self.touched.push(u);
                    }
                    self.pressure[u] += 1;
                }
            }
        }
        let mut touched = std::mem::take(&mut self.touched);
        touched.sort_unstable();
        let mut newly = Vec::new();
        for &u in &touched {
            let k = self.pressure[u] as usize;
            self.pressure[u] = 0;
            let p = 1.0 - self.miss_probability(k);
            if rng.gen::<f64>() < p {
                newly.push(u);
            }
        }
        self.touched = touched;

        let mut recovered = Vec::new();
        for &v in infected {
            if rng.gen::<f64>() < sigma {
                recovered.push(v);
            }
        }
        for &u in &newly {
            states[u] = NodeState::Infected;
        }
        for &v in &recovered {
            states[v] = NodeState::Resistant;
        }
        (newly, recovered)
    }
}

/// One synchronous update of the whole population.
pub fn step<R: Rng + ?Sized>(
    g: &Graph,
    st: &EpidemicState,
    params: &SirParams,
    rng: &mut R,
) -> EpidemicState {
    let mut next = st.clone();
    let infected = st.infected();
    Stepper::new(g.node_count(), params.lambda).advance(
        g,
        &mut next.states,
        &infected,
        params.sigma,
        rng,
    );
    next.step += 1;
    next
}

/// Seeds an epidemic and steps it until no node is infected or `max_steps` is hit.
/// A graph with no active node yields an empty outcome.
pub fn run<R: Rng + ?Sized>(g: &Graph, params: &SirParams, rng: &mut R) -> Result<SirOutcome> {
    params.validate()?;
    let immunized = g.removed_count();
    if g.active_count() == 0 {
        return Ok(SirOutcome {
            total_ever_infected: 0,
            peak_infected: 0,
            duration: 0,
            series: vec![Counts {
                s: 0,
                i: 0,
                r: immunized,
            }],
            seeds: 0,
            immunized,
            truncated: false,
        });
    }
    let mut state = seed_infection(g, params, rng)?;
    let mut infected = state.infected();
    let mut counts = state.counts();
    let seeds = counts.i;
    let mut series = vec![counts];
    let mut total = seeds;
    let mut peak = seeds;
    let mut stepper = Stepper::new(g.node_count(), params.lambda);

    while !infected.is_empty() && state.step < params.max_steps {
        let (newly, recovered) =
            stepper.advance(g, &mut state.states, &infected, params.sigma, rng);
        state.step += 1;
        total += newly.len();
        counts.s -= newly.len();
        counts.i = counts.i + newly.len() - recovered.len();
        counts.r += recovered.len();
        peak = peak.max(counts.i);
        series.push(counts);
        infected = merge_sorted_excluding(&infected, &recovered, &newly);
    }
    Ok(SirOutcome {
        total_ever_infected: total,
        peak_infected: peak,
        duration: state.step,
        series,
        seeds,
        immunized,
        truncated: !infected.is_empty(),
    })
}

/// `(current \ removed) ∪ added`, all inputs ascending and `added` disjoint from
/// `current`.
fn merge_sorted_excluding(current: &[NodeId], removed: &[NodeId], added: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(current.len() + added.len());
    let mut r = removed.iter().peekable();
    let kept = current.iter().copied().filter(|&v| {
        while r.peek().is_some_and(|&&x| x < v) {
            r.next();
        }
        r.peek() != Some(&&v)
    });
    let mut kept = kept.peekable();
    let mut add = added.iter().copied().peekable();
    loop {
        match (kept.peek(), add.peek()) {
            (Some(&a), Some(&b)) => {
                if a < b {
                    out.push(a);
                    kept.next();
                } else {
                    out.push(b);
                    add.next();
                }
            }
            (Some(_), None) => out.extend(kept.by_ref()),
            (None, Some(_)) => out.extend(add.by_ref()),
            (None, None) => break,
        }
    }
    out
}

/// Removes every planned node, then seeds among the remaining active nodes and runs.
pub fn run_immunized<R: Rng + ?Sized>(
    g: &Graph,
    plan: &ImmunizationPlan,
    params: &SirParams,
    rng: &mut R,
) -> Result<SirOutcome> {
    let residual = g.remove_nodes(&plan.order)?;
    run(&residual, params, rng)
}
