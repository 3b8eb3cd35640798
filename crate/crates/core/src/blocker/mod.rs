//! Deterministic blocker set: a vertex set hitting every depth-`h` root-to-leaf
//! path of every `h`-hop tree, chosen greedily by score.

mod scores;
mod update;

use serde::Serialize;

use crate::engine::{EngineError, RoundReport, Simulator};
use crate::graph::NodeId;
use crate::primitives::{all_to_all_broadcast, HopTree};
use crate::scalar::Weight;

pub use scores::{compute_ancestors, init_scores, prune_detached, ScoreState};
pub use update::{ancestor_update, descendant_update, descendant_update_at, take_list, UpdateStats};

/// One greedy step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub c: NodeId,
    /// `score(c)` when it was selected.
    pub score: u64,
    /// 1-based.
    pub iteration: usize,
    /// The `⟨x, score_x(c)⟩` entries `c` sent up, ascending by `x`.
    pub list: Vec<(NodeId, u64)>,
}

#[derive(Serialize)]
struct AuditLine {
    c: NodeId,
    score: u64,
    iteration: usize,
    list_len: usize,
}

impl Selection {
    /// `{"c":..,"score":..,"iteration":..,"list_len":..}`
    pub fn audit_json(&self) -> String {
        let line = AuditLine { c: self.c, score: self.score, iteration: self.iteration, list_len: self.list.len() };
        serde_json::to_string(&line).expect("audit line serializes")
    }
}

/// The selected blockers `Q`, in selection order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockerSet {
    selections: Vec<Selection>,
}

impl BlockerSet {
    pub fn selections(&self) -> &[Selection] {
        &self.selections
    }

    /// Members in selection order.
    pub fn members(&self) -> Vec<NodeId> {
        self.selections.iter().map(|s| s.c).collect()
    }

    /// Members in ascending id order.
    pub fn sorted(&self) -> Vec<NodeId> {
        let mut q = self.members();
        q.sort_unstable();
        q
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.selections.iter().any(|s| s.c == v)
    }

    /// One audit line per selection, newline-terminated.
    pub fn audit_jsonl(&self) -> String {
        self.selections.iter().map(|s| s.audit_json() + "\n").collect()
    }
}

/// Min-id node among those with maximum score, or `None` if every score is 0.
pub fn select_max_score(scores: &[u64]) -> Option<NodeId> {
    let mut best: Option<(NodeId, u64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > 0 && best.is_none_or(|(_, b)| s > b) {
            best = Some((i + 1, s));
        }
    }
    best.map(|(v, _)| v)
}

/// State handed to the observer of [`compute_blocker_with`] after each selection.
#[derive(Debug)]
pub struct BlockerStep<'a> {
    pub selection: &'a Selection,
    /// Blockers so far, including this one, in selection order.
    pub chosen: &'a [NodeId],
    /// Scores after the descendant and ancestor updates for this selection.
    pub scores: &'a ScoreState,
    pub update_report: &'a RoundReport,
    pub update_stats: UpdateStats,
}

#[derive(Debug, Clone)]
pub struct BlockerOutcome {
    pub blockers: BlockerSet,
    pub scores: ScoreState,
    pub report: RoundReport,
}

pub fn compute_blocker<W: Weight>(
    sim: &mut Simulator<'_>,
    trees: &[HopTree<W>],
    h: usize,
) -> Result<BlockerOutcome, EngineError> {
    compute_blocker_with(sim, trees, h, |_| {})
}

/// Greedy blocker computation with `n·h + n·h + 5n + |Q|·((n − 1 + h) + 5n)` rounds.
///
/// Scores and ancestor sets are built once. Every node then learns every
/// score by all-to-all broadcast, picks the same `c`, applies the local
/// descendant update, and `c`'s per-tree scores are subtracted along its
/// ancestors before scores are broadcast again. Stops once all scores are 0.
pub fn compute_blocker_with<W: Weight>(
    sim: &mut Simulator<'_>,
    trees: &[HopTree<W>],
    h: usize,
    mut observer: impl FnMut(&BlockerStep<'_>),
) -> Result<BlockerOutcome, EngineError> {
    let n = sim.node_count();
    let mark = sim.log().len();
    let (mut state, _) = init_scores(sim, trees, h)?;
    compute_ancestors(sim, trees, h, &mut state)?;
    prune_detached(&mut state);

    let mut chosen = Vec::new();
    let mut in_q = vec![false; n];
    let mut blockers = BlockerSet::default();
    loop {
        let (vectors, _) = all_to_all_broadcast(sim, state.totals())?;
        let picks: Vec<Option<NodeId>> = vectors.iter().map(|scores| select_max_score(scores)).collect();
        if let Some(i) = picks.iter().position(|p| *p != picks[0]) {
            return Err(EngineError::Incomplete {
                phase: "all_to_all_broadcast".into(),
                detail: format!("node {} selected {:?}, node 1 selected {:?}", i + 1, picks[i], picks[0]),
            });
        }
        let Some(c) = picks[0] else { break };

        let score = vectors[0][c - 1];
        descendant_update(&mut state, c);
        let list = take_list(&mut state, c);
        let (update_report, update_stats) = ancestor_update(sim, trees, h, c, &list, &in_q, &mut state)?;
        in_q[c - 1] = true;
        chosen.push(c);
        let selection = Selection { c, score, iteration: chosen.len(), list };
        observer(&BlockerStep { selection: &selection, chosen: &chosen, scores: &state, update_report: &update_report, update_stats });
        blockers.selections.push(selection);
    }
    Ok(BlockerOutcome { blockers, scores: state, report: sim.compose_since(mark, "blocker") })
}
