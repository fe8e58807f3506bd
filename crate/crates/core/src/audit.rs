//! Cycle monotonicity, payment synthesis and incentive-compatibility checks.
//!
//! For agent `i` and fixed opponents `t_{-i}`, the allocation graph has a
//! node per alternative that `f(·, t_{-i})` attains on the agent's grid and
//! an edge `a → b` of weight `min { s^b − s^a : f(s, t_{-i}) = b }`. The
//! mechanism is implementable on the grid iff no such graph has a negative
//! cycle, and shortest-path distances from a root give implementing payments.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{Alternative, TypeGrid, TypeVector};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::payment::PaymentRule;
use crate::report::{CheckReport, Counterexample, Verdict, GRID_CAVEAT};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct AllocationGraph {
    pub agent: usize,
    /// Grid profile with the agent's own type index 0 and the fixed opponents.
    pub profile: usize,
    /// Attained alternatives in label order.
    pub nodes: Vec<Alternative>,
    weights: Vec<Vec<f64>>,
    witnesses: Vec<Vec<usize>>,
}

impl AllocationGraph {
    /// Graph from an explicit list of own types and the outcomes they get.
    pub fn from_types(agent: usize, alternatives: usize, types: &[(TypeVector, Alternative)]) -> Self {
        let mut g = Self::empty(agent, 0, alternatives);
        for (k, (s, b)) in types.iter().enumerate() {
            g.add(k, s, *b);
        }
        g.finish_nodes();
        g
    }

    fn empty(agent: usize, profile: usize, m: usize) -> Self {
        AllocationGraph {
            agent,
            profile,
            nodes: Vec::new(),
            weights: vec![vec![f64::INFINITY; m]; m],
            witnesses: vec![vec![usize::MAX; m]; m],
        }
    }

    fn add(&mut self, k: usize, s: &[f64], b: Alternative) {
        for a in 0..s.len() {
            let w = s[b] - s[a];
            if w < self.weights[a][b] {
                self.weights[a][b] = w;
                self.witnesses[a][b] = k;
            }
        }
    }

    fn finish_nodes(&mut self) {
        let m = self.weights.len();
        self.nodes = (0..m).filter(|&b| self.weights[b][b].is_finite()).collect();
    }

    /// `ℓ(a → b)`, or `None` when `b` is never chosen.
    pub fn weight(&self, a: Alternative, b: Alternative) -> Option<f64> {
        let w = self.weights[a][b];
        w.is_finite().then_some(w)
    }

    /// Own type index attaining `ℓ(a → b)`.
    pub fn witness(&self, a: Alternative, b: Alternative) -> Option<usize> {
        let k = self.witnesses[a][b];
        (k != usize::MAX).then_some(k)
    }

    pub fn cycle_weight(&self, cycle: &[Alternative]) -> f64 {
        (0..cycle.len())
            .map(|k| self.weights[cycle[k]][cycle[(k + 1) % cycle.len()]])
            .sum()
    }

    /// A cycle of weight below `-tau`, as its node sequence and weight.
    ///
    /// Bellman–Ford from a virtual source runs on weights lifted by
    /// `tau / k`, so float noise on zero-weight cycles never registers while
    /// every cycle lighter than `-tau` stays negative.
    pub fn negative_cycle(&self, tau: f64) -> Option<(Vec<Alternative>, f64)> {
        let k = self.nodes.len();
        if k < 2 {
            return None;
        }
        let eta = tau / k as f64;
        let mut dist = vec![0.0f64; k];
        let mut pred = vec![usize::MAX; k];
        let mut last = None;
        for _ in 0..=k {
            last = None;
            for u in 0..k {
                for v in 0..k {
                    if u == v {
                        continue;
                    }
                    let w = self.weights[self.nodes[u]][self.nodes[v]] + eta;
                    if dist[u] + w < dist[v] {
                        dist[v] = dist[u] + w;
                        pred[v] = u;
                        last = Some(v);
                    }
                }
            }
            last?;
        }
        let mut v = last?;
        for _ in 0..k {
            v = pred[v];
        }
        let start = v;
        let mut cycle = vec![self.nodes[start]];
        let mut u = pred[start];
        while u != start {
            cycle.push(self.nodes[u]);
            u = pred[u];
        }
        cycle.reverse();
        let w = self.cycle_weight(&cycle);
        (w < -tau).then_some((cycle, w))
    }

    /// Shortest distances from the first node with exact weights, indexed by
    /// alternative (`+∞` for unattained alternatives).
    pub fn potentials(&self) -> Vec<f64> {
        let m = self.weights.len();
        let mut dist = vec![f64::INFINITY; m];
        let Some(&root) = self.nodes.first() else {
            return dist;
        };
        dist[root] = 0.0;
        for _ in 1..self.nodes.len() {
            let mut changed = false;
            for &u in &self.nodes {
                for &v in &self.nodes {
                    if u != v && dist[u] + self.weights[u][v] < dist[v] {
                        dist[v] = dist[u] + self.weights[u][v];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }
}

/// Own types of `agent` as flat vectors, in grid order.
fn agent_types(grid: &TypeGrid, agent: usize) -> Vec<TypeVector> {
    grid.grid_points(agent)
}

/// Profiles whose `agent` coordinate is type 0; one per opponents profile.
pub fn anchors(grid: &TypeGrid, agent: usize) -> impl Iterator<Item = usize> + '_ {
    (0..grid.profile_count()).filter(move |&idx| grid.agent_type(idx, agent) == 0)
}

fn graph_from_choices(
    grid: &TypeGrid,
    types: &[TypeVector],
    choices: &[Alternative],
    agent: usize,
    anchor: usize,
) -> AllocationGraph {
    let stride = grid.stride(agent);
    let mut g = AllocationGraph::empty(agent, anchor, grid.alternatives());
    for (k, s) in types.iter().enumerate() {
        g.add(k, s, choices[anchor + k * stride]);
    }
    g.finish_nodes();
    g
}

pub fn build_allocation_graph(
    f: &Mechanism,
    agent: usize,
    profile: usize,
    grid: &TypeGrid,
    tol: &Tolerances,
) -> Result<AllocationGraph> {
    let anchor = grid.with_agent_type(profile, agent, 0);
    let types = agent_types(grid, agent);
    let stride = grid.stride(agent);
    let choices = (0..types.len())
        .map(|k| f.evaluate(&grid.profile(anchor + k * stride), tol))
        .collect::<Result<Vec<_>>>()?;
    let mut g = AllocationGraph::empty(agent, anchor, grid.alternatives());
    for (k, s) in types.iter().enumerate() {
        g.add(k, s, choices[k]);
    }
    g.finish_nodes();
    Ok(g)
}

fn cycle_counterexample(g: &AllocationGraph, grid: &TypeGrid, cycle: &[Alternative], weight: f64) -> Counterexample {
    let stride = grid.stride(g.agent);
    let mut profiles: Vec<usize> = (0..cycle.len())
        .filter_map(|k| g.witness(cycle[k], cycle[(k + 1) % cycle.len()]))
        .map(|w| g.profile + w * stride)
        .collect();
    profiles.dedup();
    let names: Vec<_> = cycle.iter().chain(cycle.first()).map(|a| format!("{a}")).collect();
    Counterexample {
        profiles,
        agent: Some(g.agent),
        explanation: format!(
            "agent {}: cycle {} has weight {weight:.6}",
            g.agent,
            names.join("→")
        ),
        margin: -weight,
    }
}

pub fn check_cycle_monotonicity(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances) -> Result<CheckReport> {
    let choices = f.tabulate(grid, tol)?;
    Ok(cycle_monotonicity_from_choices(grid, &choices, tol))
}

pub fn cycle_monotonicity_from_choices(grid: &TypeGrid, choices: &[Alternative], tol: &Tolerances) -> CheckReport {
    let mut report = CheckReport::new("cycle-monotonicity");
    report.stats.profiles_examined = grid.profile_count();
    for agent in 0..grid.agents() {
        let types = agent_types(grid, agent);
        for anchor in anchors(grid, agent) {
            let g = graph_from_choices(grid, &types, choices, agent, anchor);
            report.stats.comparisons += 1;
            if let Some((cycle, w)) = g.negative_cycle(tol.numeric) {
                report.violation(cycle_counterexample(&g, grid, &cycle, w));
            }
        }
    }
    if report.passed() {
        report.note(GRID_CAVEAT);
    }
    report.finish(false)
}

/// Payments `p_i(b) = −dist(a₀ → b)` on every allocation graph.
pub fn synthesize_payments(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances) -> Result<PaymentRule> {
    let choices = f.tabulate(grid, tol)?;
    let mut payments = vec![vec![0.0; grid.profile_count()]; grid.agents()];
    for (agent, row) in payments.iter_mut().enumerate() {
        let types = agent_types(grid, agent);
        let stride = grid.stride(agent);
        for anchor in anchors(grid, agent) {
            let g = graph_from_choices(grid, &types, &choices, agent, anchor);
            if let Some((cycle, weight)) = g.negative_cycle(tol.numeric) {
                return Err(Error::NegativeCycle { agent, profile: anchor, cycle, weight });
            }
            let dist = g.potentials();
            for k in 0..types.len() {
                let idx = anchor + k * stride;
                row[idx] = -dist[choices[idx]];
            }
        }
    }
    Ok(PaymentRule::Table { grid: grid.clone(), payments })
}

/// Exhaustive check of `t_i^{f(t)} + p_i(t) ≥ t_i^{f(s_i,t_{-i})} + p_i(s_i,t_{-i}) − τ`.
pub fn verify_ic(f: &Mechanism, p: &PaymentRule, grid: &TypeGrid, tol: &Tolerances) -> Result<CheckReport> {
    let choices = f.tabulate(grid, tol)?;
    let pay = p.tabulate(grid, &choices)?;
    let m = grid.alternatives();
    let mut report = CheckReport::new("ic-verify");
    report.stats.profiles_examined = grid.profile_count();
    for (agent, pay) in pay.iter().enumerate() {
        let types = agent_types(grid, agent);
        let stride = grid.stride(agent);
        let r = types.len();
        for anchor in anchors(grid, agent) {
            // best payment reachable through each outcome
            let mut best = vec![(f64::NEG_INFINITY, usize::MAX); m];
            for k in 0..r {
                let idx = anchor + k * stride;
                let b = choices[idx];
                if pay[idx] > best[b].0 {
                    best[b] = (pay[idx], idx);
                }
            }
            report.stats.comparisons += (r * r) as u64;
            for (k, t) in types.iter().enumerate() {
                let idx = anchor + k * stride;
                let truthful = t[choices[idx]] + pay[idx];
                let mut worst: Option<(f64, usize)> = None;
                for (b, &(pb, sidx)) in best.iter().enumerate() {
                    if sidx == usize::MAX {
                        continue;
                    }
                    let gain = t[b] + pb - truthful;
                    if gain > tol.numeric && worst.is_none_or(|(g, _)| gain > g) {
                        worst = Some((gain, sidx));
                    }
                }
                if let Some((gain, sidx)) = worst {
                    report.violation(Counterexample {
                        profiles: vec![idx, sidx],
                        agent: Some(agent),
                        explanation: format!(
                            "agent {agent} gains {gain:.6} by reporting the type of profile {sidx}"
                        ),
                        margin: gain,
                    });
                }
            }
        }
    }
    if report.passed() {
        report.note(GRID_CAVEAT);
    }
    Ok(report.finish(false))
}

/// Whether `p − q` is constant in each agent's own type for every opponents
/// profile. Inconclusive unless both rules implement `f`.
pub fn check_revenue_equivalence(
    p: &PaymentRule,
    q: &PaymentRule,
    f: &Mechanism,
    grid: &TypeGrid,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("revenue-equivalence");
    let first = verify_ic(f, p, grid, tol)?;
    let second = verify_ic(f, q, grid, tol)?;
    if !first.passed() || !second.passed() {
        report.verdict = Verdict::Inconclusive;
        report.note(format!(
            "precondition failed: first rule ic-verify {}, second rule ic-verify {}",
            first.verdict.as_str(),
            second.verdict.as_str()
        ));
        return Ok(report);
    }
    let choices = f.tabulate(grid, tol)?;
    let pp = p.tabulate(grid, &choices)?;
    let qq = q.tabulate(grid, &choices)?;
    report.stats.profiles_examined = grid.profile_count();
    let mut max_spread = 0.0f64;
    for agent in 0..grid.agents() {
        let stride = grid.stride(agent);
        let r = grid.type_count(agent);
        for anchor in anchors(grid, agent) {
            report.stats.comparisons += 1;
            let (mut lo, mut hi) = ((f64::INFINITY, 0), (f64::NEG_INFINITY, 0));
            for k in 0..r {
                let idx = anchor + k * stride;
                let d = pp[agent][idx] - qq[agent][idx];
                if d < lo.0 {
                    lo = (d, idx);
                }
                if d > hi.0 {
                    hi = (d, idx);
                }
            }
            let spread = hi.0 - lo.0;
            max_spread = max_spread.max(spread);
            if spread > tol.numeric {
                let mut profiles = vec![lo.1, hi.1];
                profiles.sort_unstable();
                report.violation(Counterexample {
                    profiles,
                    agent: Some(agent),
                    explanation: format!(
                        "agent {agent}: payment difference varies by {spread:.6} across own types"
                    ),
                    margin: spread,
                });
            }
        }
    }
    report.note(format!("largest spread {max_spread:.3e}"));
    Ok(report.finish(false))
}
