//! The end-to-end APSP protocol: `h`-hop trees, blocker set, exact SSSP from
//! each blocker, broadcast of blocker columns, and a local combine.

use std::fmt::Write as _;

use crate::blocker::{compute_blocker_with, BlockerSet, BlockerStep};
use crate::engine::{compose_reports, RoundReport, Simulator};
use crate::error::{ConfigError, Error};
use crate::graph::{NodeId, WeightedDigraph};
use crate::primitives::{full_sssp, hhop_sssp, pipelined_broadcast, HopTree};
use crate::scalar::{Distance, Weight};

/// `n × n` distances; entry `(u, v)` is the distance from `u` to `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix<W: Weight> {
    n: usize,
    cells: Vec<Distance<W>>,
}

impl<W: Weight> DistanceMatrix<W> {
    pub fn filled(n: usize, d: Distance<W>) -> Self {
        DistanceMatrix { n, cells: vec![d; n * n] }
    }

    /// Builds the matrix from per-node columns: `columns[v - 1][u - 1]` is `δ(u, v)`.
    pub fn from_columns(columns: &[Vec<Distance<W>>]) -> Self {
        let n = columns.len();
        let mut m = Self::filled(n, Distance::infinity());
        for (v, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "square matrix");
            for (u, &d) in col.iter().enumerate() {
                m.cells[u * n + v] = d;
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Distance<W>>]) -> Self {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "square matrix");
            cells.extend_from_slice(row);
        }
        DistanceMatrix { n, cells }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> Distance<W> {
        self.cells[(u - 1) * self.n + (v - 1)]
    }

    pub fn set(&mut self, u: NodeId, v: NodeId, d: Distance<W>) {
        self.cells[(u - 1) * self.n + (v - 1)] = d;
    }

    pub fn row(&self, u: NodeId) -> &[Distance<W>] {
        &self.cells[(u - 1) * self.n..u * self.n]
    }

    /// First `(u, v)` in row-major order where the two matrices differ.
    pub fn first_difference(&self, other: &Self) -> Option<(NodeId, NodeId)> {
        assert_eq!(self.n, other.n, "matrices of equal size");
        let i = self.cells.iter().zip(&other.cells).position(|(a, b)| a != b)?;
        Some((i / self.n + 1, i % self.n + 1))
    }

    /// Tab-separated rows, `INF` for unreachable pairs.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for u in 1..=self.n {
            for (i, d) in self.row(u).iter().enumerate() {
                if i > 0 {
                    out.push('\t');
                }
                let _ = write!(out, "{d}");
            }
            out.push('\n');
        }
        out
    }
}

/// `⌈√(n·⌈log₂ n⌉)⌉` clamped to `[1, n − 1]`.
pub fn default_h(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    let log = n.next_power_of_two().trailing_zeros() as usize;
    let target = n * log;
    let mut h = (target as f64).sqrt() as usize;
    while h * h < target {
        h += 1;
    }
    while h > 1 && (h - 1) * (h - 1) >= target {
        h -= 1;
    }
    h.clamp(1, n - 1)
}

/// The closed-form round budget of [`run_apsp`] for `|Q| = q`.
pub fn round_budget(n: usize, h: usize, q: usize) -> usize {
    let step1 = n * (h + 1);
    let blocker = n * h + n * h + 5 * n + q * ((n - 1 + h) + 5 * n);
    let sssp = q * n;
    let bcast = q * (2 * n + n);
    step1 + blocker + sssp + bcast
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApspConfig {
    /// Hop parameter; [`default_h`] when unset.
    pub h: Option<usize>,
}

impl ApspConfig {
    pub fn with_h(h: usize) -> Self {
        ApspConfig { h: Some(h) }
    }

    pub fn resolve_h(&self, n: usize) -> Result<usize, ConfigError> {
        if n < 2 {
            return Err(ConfigError::Invalid(format!("the protocol needs at least 2 nodes, got {n}")));
        }
        let h = self.h.unwrap_or_else(|| default_h(n));
        if h == 0 || h > n - 1 {
            return Err(ConfigError::HopBound { h, n, max: n - 1 });
        }
        Ok(h)
    }
}

/// Composed reports of the four communicating steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReports {
    pub step1: RoundReport,
    pub blocker: RoundReport,
    pub sssp: RoundReport,
    pub bcast: RoundReport,
}

#[derive(Debug, Clone)]
pub struct ApspRun<W: Weight> {
    pub h: usize,
    pub distances: DistanceMatrix<W>,
    /// The `h`-hop distances from step 1.
    pub hop_distances: DistanceMatrix<W>,
    pub trees: Vec<HopTree<W>>,
    pub blockers: BlockerSet,
    pub steps: StepReports,
    pub total: RoundReport,
    /// Every engine phase in execution order.
    pub log: Vec<RoundReport>,
}

impl<W: Weight> ApspRun<W> {
    pub fn budget(&self) -> usize {
        round_budget(self.distances.node_count(), self.h, self.blockers.len())
    }
}

/// `δ(u, v) = min(δ_h(u, v), min_c δ_h(u, c) + δ(c, v))` for every `u`, at one node `v`.
///
/// `via` holds, per blocker `c`, the pair `(δ(c, v), δ_h(·, c))`.
pub fn combine_distances<W: Weight>(own: &[Distance<W>], via: &[(Distance<W>, Vec<Distance<W>>)]) -> Vec<Distance<W>> {
    own.iter()
        .enumerate()
        .map(|(u, &direct)| via.iter().map(|(dcv, col)| col[u].plus(*dcv)).fold(direct, Distance::min))
        .collect()
}

pub fn run_apsp<W: Weight>(graph: &WeightedDigraph<W>, cfg: &ApspConfig) -> Result<ApspRun<W>, Error> {
    run_apsp_with(graph, cfg, |_| {})
}

/// [`run_apsp`] with an observer called after every blocker selection.
pub fn run_apsp_with<W: Weight>(
    graph: &WeightedDigraph<W>,
    cfg: &ApspConfig,
    observer: impl FnMut(&BlockerStep<'_>),
) -> Result<ApspRun<W>, Error> {
    let n = graph.node_count();
    let h = cfg.resolve_h(n)?;
    let mut sim = Simulator::new(graph.topology());

    let mut trees = Vec::with_capacity(n);
    let mut step1 = Vec::with_capacity(n);
    for x in 1..=n {
        let (tree, report) = hhop_sssp(&mut sim, graph, x, h)?;
        trees.push(tree);
        step1.push(report);
    }
    let step1 = compose_reports("step1", &step1);

    let outcome = compute_blocker_with(&mut sim, &trees, h, observer)?;
    let q = outcome.blockers.sorted();

    // Step 3: column `c` of `exact[c]` is what node `v` holds after SSSP from `c`.
    let mut exact = Vec::with_capacity(q.len());
    let mut sssp = Vec::with_capacity(q.len());
    for &c in &q {
        let (dist, report) = full_sssp(&mut sim, graph, c)?;
        exact.push(dist);
        sssp.push(report);
    }
    let sssp = compose_reports("sssp", &sssp);

    // Step 4: c broadcasts δ_h(v, c) for every v; node v keeps the received vectors.
    let mut received: Vec<Vec<Vec<Distance<W>>>> = vec![Vec::with_capacity(q.len()); n];
    let mut bcast = Vec::with_capacity(q.len());
    for &c in &q {
        let values: Vec<(u64, u64)> = (1..=n).map(|v| (v as u64, trees[v - 1].dist(c).to_word())).collect();
        let (diss, report) = pipelined_broadcast(&mut sim, c, &values)?;
        for (v, held) in diss.held.into_iter().enumerate() {
            let mut col = vec![Distance::infinity(); n];
            for (tag, word) in held {
                col[tag as usize - 1] = Distance::from_word(word);
            }
            received[v].push(col);
        }
        bcast.push(report);
    }
    let bcast = compose_reports("bcast", &bcast);

    // Step 5: local at every node.
    let columns: Vec<Vec<Distance<W>>> = (1..=n)
        .map(|v| {
            let own: Vec<Distance<W>> = trees.iter().map(|t| t.dist(v)).collect();
            let via: Vec<_> = q.iter().enumerate().map(|(i, _)| (exact[i][v - 1], received[v - 1][i].clone())).collect();
            combine_distances(&own, &via)
        })
        .collect();
    let distances = DistanceMatrix::from_columns(&columns);
    let hop_distances = DistanceMatrix::from_rows(&trees.iter().map(HopTree::distances).collect::<Vec<_>>());

    let steps = StepReports { step1, blocker: outcome.report, sssp, bcast };
    let total = compose_reports("total", [&steps.step1, &steps.blocker, &steps.sssp, &steps.bcast]);
    Ok(ApspRun { h, distances, hop_distances, trees, blockers: outcome.blockers, steps, total, log: sim.into_log() })
}
