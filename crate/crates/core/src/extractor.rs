//! The detection pipeline: penalty tuning, iterative peeling, and the
//! permutation filter for small communities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::criteria::{phi_of, psi_of};
use crate::error::{Error, Result};
use crate::graph::{set_stats, Graph};
use crate::models::gnm;
use crate::scalar::Scalar;
use crate::solver::{two_phase_solve_with, SolverConfig, SolverOutcome};
use crate::tail::ln_binom_upper_tail;

/// Settings for [`detect`] and its stages.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    /// Penalty grid is `{0, B/n, 2B/n, ..., c B/n}` with c = `c_grid`.
    pub c_grid: usize,
    /// Grid scale B.
    pub b_grid: f64,
    /// Communities with fewer nodes than this are tested; larger ones are kept.
    pub m_small: usize,
    /// Number of null graphs in the permutation test.
    pub n_perm: usize,
    /// A tested community is filtered when its permutation p-value is >= alpha.
    pub alpha: f64,
    pub seed: u64,
    pub eps: f64,
    pub max_iter: usize,
    /// Overrides the coupling weight; `None` uses 1/sqrt(n) of the graph being solved.
    pub lambda: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            c_grid: 10,
            b_grid: 1.0,
            m_small: 20,
            n_perm: 100,
            alpha: 0.05,
            seed: 0,
            eps: 1e-4,
            max_iter: 500,
            lambda: None,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.c_grid < 1 {
            return bad("c_grid must be at least 1");
        }
        if !(self.b_grid > 0.0) {
            return bad("b_grid must be positive");
        }
        if self.m_small < 2 {
            return bad("m_small must be at least 2");
        }
        if self.n_perm < 1 {
            return bad("n_perm must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return bad("lambda must be positive");
            }
        }
        Ok(())
    }

    /// Penalty values tried for a graph with `n` nodes, ascending.
    pub fn eta_grid(&self, n: usize) -> Vec<f64> {
        (0..=self.c_grid)
            .map(|k| k as f64 * self.b_grid / n as f64)
            .collect()
    }

    fn solver_config<T: Scalar>(&self, n: usize, eta: f64) -> SolverConfig<T> {
        let mut cfg = SolverConfig::for_nodes(n, T::of(eta));
        if let Some(l) = self.lambda {
            cfg.lambda = T::of(l);
        }
        cfg.eps = T::of(self.eps);
        cfg.max_iter = self.max_iter;
        cfg
    }
}

/// One extracted community.
#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    /// Node indices of the input graph, ascending.
    pub members: Vec<usize>,
    pub n_nodes: usize,
    pub n_internal_edges: u64,
    /// P(X >= E) for the internal edge count under the reference density:
    /// the whole-graph density after extraction, the density of the tested
    /// subnetwork after filtering.
    pub tail_prob: f64,
    pub ln_tail_prob: f64,
    /// Permutation p-value; `None` when the community was not tested.
    pub perm_pvalue: Option<f64>,
    pub kept: bool,
}

/// Per-round record of the peeling loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundDiagnostics {
    pub eta: f64,
    pub phi: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Size of the (isolate-free) remaining graph the round was solved on.
    pub remaining_nodes: usize,
    pub remaining_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub n: usize,
    /// Communities in extraction order.
    pub communities: Vec<Community>,
    /// Nodes in no kept community, ascending.
    pub unassigned: Vec<usize>,
    /// Chosen penalty per extraction round.
    pub etas: Vec<f64>,
    pub diagnostics: Vec<RoundDiagnostics>,
    pub notes: Vec<String>,
}

/// How a node ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    /// In the kept community with this 1-based extraction rank.
    Kept(usize),
    /// In a community (1-based rank) removed by the filter.
    Filtered(usize),
    Unassigned,
}

impl DetectionResult {
    pub fn kept(&self) -> impl Iterator<Item = &Community> {
        self.communities.iter().filter(|c| c.kept)
    }

    pub fn kept_count(&self) -> usize {
        self.kept().count()
    }

    pub fn node_status(&self) -> Vec<NodeStatus> {
        let mut status = vec![NodeStatus::Unassigned; self.n];
        for (rank, c) in self.communities.iter().enumerate() {
            let s = if c.kept {
                NodeStatus::Kept(rank + 1)
            } else {
                NodeStatus::Filtered(rank + 1)
            };
            for &i in &c.members {
                status[i] = s;
            }
        }
        status
    }

    /// Kept-community label (1-based extraction rank) per node.
    pub fn labels(&self) -> Vec<Option<usize>> {
        self.node_status()
            .into_iter()
            .map(|s| match s {
                NodeStatus::Kept(r) => Some(r),
                _ => None,
            })
            .collect()
    }

    /// Re-applies the filter threshold to already computed p-values.
    pub fn with_alpha(&self, alpha: f64) -> DetectionResult {
        let mut out = self.clone();
        for c in &mut out.communities {
            if let Some(p) = c.perm_pvalue {
                c.kept = p < alpha;
            }
        }
        out.recompute_unassigned();
        out
    }

    fn recompute_unassigned(&mut self) {
        let mut assigned = vec![false; self.n];
        for c in self.kept() {
            for &i in &c.members {
                assigned[i] = true;
            }
        }
        self.unassigned = (0..self.n).filter(|&i| !assigned[i]).collect();
    }
}

/// Connected components of the subgraph induced by `nodes`, each ascending,
/// ordered by smallest member.
fn induced_components(g: &Graph, nodes: &[usize]) -> Vec<Vec<usize>> {
    let mut inside = vec![false; g.n()];
    for &i in nodes {
        inside[i] = true;
    }
    let mut seen = vec![false; g.n()];
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    let mut components = Vec::new();
    for &start in &sorted {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut head = 0;
        while head < comp.len() {
            let i = comp[head];
            head += 1;
            for &j in g.neighbors(i) {
                if inside[j] && !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Replaces a disconnected support by its component with the largest
/// W/V - eta|S| (first component on ties). A union of disconnected pieces
/// never scores above its best piece, so this only improves the criterion.
fn best_component(g: &Graph, support: Vec<usize>, eta: f64) -> Result<Vec<usize>> {
    let components = induced_components(g, &support);
    if components.len() <= 1 {
        return Ok(support);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for comp in components {
        let score = psi_of(&set_stats(g, &comp)?, eta)?;
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, comp));
        }
    }
    Ok(best.map(|(_, c)| c).unwrap_or_default())
}

/// A tuned single extraction.
#[derive(Debug, Clone)]
pub struct TunedCandidate<T> {
    pub eta: f64,
    pub phi: f64,
    pub outcome: SolverOutcome<T>,
}

/// Solves at every grid penalty and keeps the support with the largest phi.
///
/// A disconnected support is first cut down to its best connected piece.
/// Supports of one node or fewer never win. A support covering the whole
/// graph ranks below any proper subset with finite phi. Ties go to the
/// smallest penalty. Returns `None` when every candidate is degenerate.
pub fn tune_eta<T: Scalar>(g: &Graph, cfg: &DetectionConfig) -> Result<Option<TunedCandidate<T>>> {
    cfg.validate()?;
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let n = g.n();
    let candidates: Vec<TunedCandidate<T>> = cfg
        .eta_grid(n)
        .into_par_iter()
        .map(|eta| {
            let mut outcome = two_phase_solve_with(g, &cfg.solver_config(n, eta))?;
            outcome.support = best_component(g, std::mem::take(&mut outcome.support), eta)?;
            let phi = if outcome.support.len() <= 1 {
                f64::NEG_INFINITY
            } else {
                phi_of(&set_stats(g, &outcome.support)?, n)
            };
            Ok(TunedCandidate { eta, phi, outcome })
        })
        .collect::<Result<_>>()?;

    let rank = |c: &TunedCandidate<T>| (c.outcome.support.len() < n, c.phi);
    let mut best: Option<TunedCandidate<T>> = None;
    for c in candidates {
        if c.phi == f64::NEG_INFINITY {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                let (cp, cphi) = rank(&c);
                let (bp, bphi) = rank(b);
                (cp && !bp) || (cp == bp && cphi > bphi)
            }
        };
        if better {
            best = Some(c);
        }
    }
    Ok(best)
}

fn density(g: &Graph) -> f64 {
    let n = g.n() as f64;
    if g.n() < 2 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / (n * (n - 1.0))
    }
}

fn ln_tail(n_nodes: usize, edges: u64, p_bar: f64) -> f64 {
    if n_nodes < 2 {
        return 0.0;
    }
    ln_binom_upper_tail(n_nodes, edges, p_bar).unwrap_or(0.0)
}

/// Peels communities one at a time until no edges remain.
///
/// Each round tunes the penalty on the subgraph of remaining nodes with
/// isolated nodes dropped. The loop also stops early when no candidate of
/// two or more nodes is found. All communities come back with `kept = true`.
pub fn extract_all<T: Scalar>(g: &Graph, cfg: &DetectionConfig) -> Result<DetectionResult> {
    cfg.validate()?;
    let p_graph = density(g);
    let mut remaining: Vec<usize> = (0..g.n()).collect();
    let mut communities = Vec::new();
    let mut etas = Vec::new();
    let mut diagnostics = Vec::new();
    let mut notes = Vec::new();

    loop {
        let sub = g.induced_subgraph(&remaining)?;
        if sub.edge_count() == 0 {
            break;
        }
        let active = sub.non_isolated();
        let core = sub.induced_subgraph(&active)?;
        let tuned = match tune_eta::<T>(&core, cfg)? {
            Some(t) => t,
            None => {
                notes.push(format!(
                    "stopped with {} edges left: no candidate of two or more nodes",
                    core.edge_count()
                ));
                break;
            }
        };
        let mut members: Vec<usize> = tuned
            .outcome
            .support
            .iter()
            .map(|&k| remaining[active[k]])
            .collect();
        members.sort_unstable();
        let stats = set_stats(g, &members)?;
        let edges = stats.internal_edges();
        let ln_p = ln_tail(members.len(), edges, p_graph);
        diagnostics.push(RoundDiagnostics {
            eta: tuned.eta,
            phi: tuned.phi,
            converged: tuned.outcome.converged,
            iterations: tuned.outcome.iterations,
            remaining_nodes: core.n(),
            remaining_edges: core.edge_count(),
        });
        etas.push(tuned.eta);
        communities.push(Community {
            n_nodes: members.len(),
            n_internal_edges: edges,
            tail_prob: ln_p.exp(),
            ln_tail_prob: ln_p,
            perm_pvalue: None,
            kept: true,
            members: members.clone(),
        });
        let mut taken = vec![false; g.n()];
        for &i in &members {
            taken[i] = true;
        }
        remaining.retain(|&i| !taken[i]);
    }

    let mut result = DetectionResult {
        n: g.n(),
        communities,
        unassigned: Vec::new(),
        etas,
        diagnostics,
        notes,
    };
    result.recompute_unassigned();
    Ok(result)
}

/// ln P(X >= E) of the first community extracted from one null graph.
/// Degenerate extractions score 0 (probability 1).
fn null_replicate<T: Scalar>(
    n0: usize,
    e0: usize,
    p_bar: f64,
    cfg: &DetectionConfig,
    replicate: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(replicate);
    let er = gnm(n0, e0, &mut rng)?;
    let active = er.non_isolated();
    let core = er.induced_subgraph(&active)?;
    if core.edge_count() == 0 {
        return Ok(0.0);
    }
    Ok(match tune_eta::<T>(&core, cfg)? {
        Some(t) => {
            let stats = set_stats(&core, &t.outcome.support)?;
            ln_tail(stats.len(), stats.internal_edges(), p_bar)
        }
        None => 0.0,
    })
}

/// Tests every community smaller than `m_small` against null graphs.
///
/// The tested subnetwork G0 is induced by the union of the small
/// communities. Each of `n_perm` null graphs is a uniform simple graph with
/// G0's node and edge counts; its first extracted community yields a tail
/// probability. A small community's p-value is the fraction of null tail
/// probabilities at or below its own; it is filtered when that is >= alpha.
pub fn permutation_filter<T: Scalar>(
    g: &Graph,
    result: &DetectionResult,
    cfg: &DetectionConfig,
) -> Result<DetectionResult> {
    cfg.validate()?;
    let mut out = result.clone();
    let small: Vec<usize> = (0..out.communities.len())
        .filter(|&k| out.communities[k].n_nodes < cfg.m_small)
        .collect();
    if small.is_empty() {
        return Ok(out);
    }
    let mut g0_nodes: Vec<usize> = small
        .iter()
        .flat_map(|&k| out.communities[k].members.iter().copied())
        .collect();
    g0_nodes.sort_unstable();
    let g0 = g.induced_subgraph(&g0_nodes)?;
    let (n0, e0) = (g0.n(), g0.edge_count());

    if n0 < 2 || e0 == 0 {
        out.notes.push(format!(
            "permutation test skipped: tested subnetwork has {n0} nodes and {e0} edges"
        ));
        for &k in &small {
            let c = &mut out.communities[k];
            c.kept = c.n_nodes >= 2 && c.n_internal_edges >= 1;
        }
        out.recompute_unassigned();
        return Ok(out);
    }

    let p_bar = density(&g0);
    let null: Vec<f64> = (0..cfg.n_perm as u64)
        .into_par_iter()
        .map(|j| null_replicate::<T>(n0, e0, p_bar, cfg, j))
        .collect::<Result<_>>()?;

    for c in &mut out.communities {
        c.ln_tail_prob = ln_tail(c.n_nodes, c.n_internal_edges, p_bar);
        c.tail_prob = c.ln_tail_prob.exp();
    }
    for &k in &small {
        let c = &mut out.communities[k];
        let hits = null.iter().filter(|&&x| x <= c.ln_tail_prob).count();
        let p = hits as f64 / cfg.n_perm as f64;
        c.perm_pvalue = Some(p);
        c.kept = p < cfg.alpha;
    }
    out.recompute_unassigned();
    Ok(out)
}

/// Full pipeline: [`extract_all`] followed by [`permutation_filter`].
pub fn detect<T: Scalar>(g: &Graph, cfg: &DetectionConfig) -> Result<DetectionResult> {
    let raw = extract_all::<T>(g, cfg)?;
    permutation_filter::<T>(g, &raw, cfg)
}
