//! Sequential ground truth and structural checks, independent of the simulator.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::apsp::{ApspRun, DistanceMatrix};
use crate::graph::{NodeId, WeightedDigraph};
use crate::primitives::HopTree;
use crate::scalar::{Distance, Weight};

/// Floyd-Warshall over the directed edges.
pub fn oracle_apsp<W: Weight>(g: &WeightedDigraph<W>) -> DistanceMatrix<W> {
    let n = g.node_count();
    let mut m = DistanceMatrix::filled(n, Distance::infinity());
    for u in 1..=n {
        m.set(u, u, Distance::zero());
        for &(v, w) in g.out_edges(u) {
            if Distance::finite(w) < m.get(u, v) {
                m.set(u, v, Distance::finite(w));
            }
        }
    }
    for k in 1..=n {
        for u in 1..=n {
            let uk = m.get(u, k);
            if uk.is_infinite() {
                continue;
            }
            for v in 1..=n {
                let cand = uk.plus(m.get(k, v));
                if cand < m.get(u, v) {
                    m.set(u, v, cand);
                }
            }
        }
    }
    m
}

/// Minimum weight of a `root -> v` path with at most `h` edges, for every `v`.
pub fn oracle_hhop<W: Weight>(g: &WeightedDigraph<W>, root: NodeId, h: usize) -> Vec<Distance<W>> {
    let n = g.node_count();
    let mut layer = vec![Distance::infinity(); n];
    layer[root - 1] = Distance::zero();
    let mut best = layer.clone();
    for _ in 0..h {
        let mut next = vec![Distance::infinity(); n];
        for v in 1..=n {
            for &(u, w) in g.in_edges(v) {
                let cand = layer[u - 1].plus_weight(w);
                if cand < next[v - 1] {
                    next[v - 1] = cand;
                }
            }
        }
        for (b, &d) in best.iter_mut().zip(&next) {
            *b = (*b).min(d);
        }
        layer = next;
    }
    best
}

/// Root-to-`v` node sequence following parent links, if the walk reaches the root.
fn walk_to_root<W: Weight>(tree: &HopTree<W>, v: NodeId) -> Option<Vec<NodeId>> {
    let mut path = vec![v];
    let mut cur = v;
    while cur != tree.root() {
        cur = tree.parent(cur)?;
        if path.len() > tree.node_count() {
            return None;
        }
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Every root-to-leaf path with exactly `h` edges in `tree`, ascending by leaf.
pub fn depth_h_paths<W: Weight>(tree: &HopTree<W>) -> Vec<Vec<NodeId>> {
    (1..=tree.node_count()).filter_map(|v| walk_to_root(tree, v)).filter(|p| p.len() == tree.h() + 1).collect()
}

/// `scores[x - 1][v - 1]`: depth-`h` paths of `T_x` through `v` that avoid every blocker.
pub fn oracle_scores<W: Weight>(trees: &[HopTree<W>], blockers: &[NodeId]) -> Vec<Vec<u64>> {
    let q: BTreeSet<NodeId> = blockers.iter().copied().collect();
    trees
        .iter()
        .map(|t| {
            let mut row = vec![0; t.node_count()];
            for path in depth_h_paths(t).into_iter().filter(|p| p.iter().all(|v| !q.contains(v))) {
                for v in path {
                    row[v - 1] += 1;
                }
            }
            row
        })
        .collect()
}

/// Number of depth-`h` paths over all trees that avoid every blocker.
pub fn surviving_paths<W: Weight>(trees: &[HopTree<W>], blockers: &[NodeId]) -> usize {
    let q: BTreeSet<NodeId> = blockers.iter().copied().collect();
    trees.iter().flat_map(depth_h_paths).filter(|p| p.iter().all(|v| !q.contains(v))).count()
}

/// `Err` carries the first depth-`h` path (root first) containing no member of `q`.
pub fn oracle_blocker_check<W: Weight>(trees: &[HopTree<W>], q: &[NodeId]) -> Result<(), Vec<NodeId>> {
    let q: BTreeSet<NodeId> = q.iter().copied().collect();
    for t in trees {
        if let Some(p) = depth_h_paths(t).into_iter().find(|p| p.iter().all(|v| !q.contains(v))) {
            return Err(p);
        }
    }
    Ok(())
}

/// `⌈(n/h)·ln(max(p₀, 2))⌉ + 1`.
pub fn greedy_size_bound(n: usize, h: usize, p0: usize) -> usize {
    ((n as f64 / h as f64) * (p0.max(2) as f64).ln()).ceil() as usize + 1
}

/// A node with two different successors toward `c` on the union of tree paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InTreeViolation {
    pub node: NodeId,
    pub successors: Vec<NodeId>,
}

/// Whether the tree paths `x -> c`, over every root `x ≠ c` whose tree holds `c`,
/// together form an in-tree rooted at `c`.
pub fn intree_check<W: Weight>(trees: &[HopTree<W>], c: NodeId) -> Result<(), InTreeViolation> {
    let n = trees.first().map_or(0, HopTree::node_count);
    let mut next: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    for t in trees.iter().filter(|t| t.root() != c) {
        if let Some(path) = walk_to_root(t, c) {
            for pair in path.windows(2) {
                next[pair[0] - 1].insert(pair[1]);
            }
        }
    }
    match next.iter().position(|s| s.len() > 1) {
        Some(i) => Err(InTreeViolation { node: i + 1, successors: next[i].iter().copied().collect() }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Always present when `passed` is false.
    pub witness: Option<String>,
    /// Reported but not part of the overall verdict.
    pub advisory: bool,
}

/// Named pass/fail checks with a counterexample for each failure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn push(&mut self, name: &str, outcome: Result<(), String>) {
        self.push_check(name, outcome, false);
    }

    pub fn push_advisory(&mut self, name: &str, outcome: Result<(), String>) {
        self.push_check(name, outcome, true);
    }

    fn push_check(&mut self, name: &str, outcome: Result<(), String>, advisory: bool) {
        let (passed, witness) = match outcome {
            Ok(()) => (true, None),
            Err(w) => (false, Some(w)),
        };
        self.checks.push(Check { name: name.into(), passed, witness, advisory });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.advisory)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let note = if c.advisory { " [advisory]" } else { "" };
            match &c.witness {
                None => writeln!(f, "{}: PASS{note}", c.name)?,
                Some(w) => writeln!(f, "{}: FAIL ({w}){note}", c.name)?,
            }
        }
        writeln!(f, "verify: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn fmt_path(p: &[NodeId]) -> String {
    p.iter().map(NodeId::to_string).collect::<Vec<_>>().join("->")
}

/// Checks a finished run against the oracles.
pub fn verify_run<W: Weight>(g: &WeightedDigraph<W>, run: &ApspRun<W>) -> OracleReport {
    let mut report = OracleReport::default();
    let n = g.node_count();

    let expected = oracle_apsp(g);
    report.push(
        "apsp",
        match run.distances.first_difference(&expected) {
            None => Ok(()),
            Some((u, v)) => {
                Err(format!("d({u},{v}) = {} but oracle gives {}", run.distances.get(u, v), expected.get(u, v)))
            }
        },
    );

    let hhop = (1..=n).find_map(|x| {
        let want = oracle_hhop(g, x, run.h);
        (1..=n).find(|&v| run.hop_distances.get(x, v) != want[v - 1]).map(|v| {
            format!("d_h({x},{v}) = {} but oracle gives {}", run.hop_distances.get(x, v), want[v - 1])
        })
    });
    report.push("hhop", hhop.map_or(Ok(()), Err));

    let q = run.blockers.members();
    report.push(
        "blocker_cover",
        oracle_blocker_check(&run.trees, &q).map_err(|p| format!("path {} avoids Q", fmt_path(&p))),
    );

    let p0 = surviving_paths(&run.trees, &[]);
    let bound = greedy_size_bound(n, run.h, p0);
    report.push(
        "blocker_size",
        if q.len() <= bound { Ok(()) } else { Err(format!("|Q| = {} exceeds {bound} (p0 = {p0})", q.len())) },
    );

    let intree = q.iter().find_map(|&c| {
        intree_check(&run.trees, c)
            .err()
            .map(|e| format!("c = {c}: node {} has successors {:?}", e.node, e.successors))
    });
    // Hop-truncated trees can break the in-tree shape; the update tolerates it.
    report.push_advisory("intree", intree.map_or(Ok(()), Err));
    report
}
