//! Per-root leaf scores and ancestor sets, built by upward and downward sweeps of every tree.

use bitvec::vec::BitVec;

use crate::engine::{compose_reports, EngineError, Envelope, Message, NodeCtx, Outbox, Protocol, RoundReport, Simulator, Tag};
use crate::graph::NodeId;
use crate::primitives::HopTree;
use crate::scalar::Weight;

/// What every node knows about its standing in every tree.
///
/// `score_x(v)` counts the surviving depth-`h` leaves below `v` in `T_x`;
/// `score(v)` is the sum over `x`. `Anc_x(v)` is the set of strict
/// ancestors of `v` in `T_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreState {
    n: usize,
    scores: Vec<u64>,
    totals: Vec<u64>,
    ancestors: BitVec,
}

impl ScoreState {
    fn new(n: usize) -> Self {
        ScoreState { n, scores: vec![0; n * n], totals: vec![0; n], ancestors: BitVec::repeat(false, n * n * n) }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    fn slot(&self, v: NodeId, x: NodeId) -> usize {
        (v - 1) * self.n + (x - 1)
    }

    pub fn score_x(&self, v: NodeId, x: NodeId) -> u64 {
        self.scores[self.slot(v, x)]
    }

    pub fn score(&self, v: NodeId) -> u64 {
        self.totals[v - 1]
    }

    /// `score(v)` for every node, indexed by id − 1.
    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    /// Whether `y ∈ Anc_x(v)`.
    pub fn is_ancestor(&self, v: NodeId, x: NodeId, y: NodeId) -> bool {
        self.ancestors[self.slot(v, x) * self.n + (y - 1)]
    }

    /// `Anc_x(v)` in ascending order.
    pub fn ancestors(&self, v: NodeId, x: NodeId) -> Vec<NodeId> {
        let base = self.slot(v, x) * self.n;
        self.ancestors[base..base + self.n].iter_ones().map(|i| i + 1).collect()
    }

    fn add_ancestor(&mut self, v: NodeId, x: NodeId, y: NodeId) {
        let i = self.slot(v, x) * self.n + (y - 1);
        self.ancestors.set(i, true);
    }

    fn set_score(&mut self, v: NodeId, x: NodeId, s: u64) {
        let i = self.slot(v, x);
        self.totals[v - 1] = self.totals[v - 1] - self.scores[i] + s;
        self.scores[i] = s;
    }

    pub(crate) fn zero(&mut self, v: NodeId, x: NodeId) {
        self.set_score(v, x, 0);
    }

    pub(crate) fn subtract(&mut self, v: NodeId, x: NodeId, s: u64) {
        let cur = self.score_x(v, x);
        debug_assert!(s <= cur, "score_{x}({v}) = {cur} cannot drop by {s}");
        self.set_score(v, x, cur.saturating_sub(s));
    }
}

struct ScoreUp<'a, W: Weight> {
    tree: &'a HopTree<W>,
}

impl<W: Weight> Protocol for ScoreUp<'_, W> {
    type State = u64;

    fn send(&self, ctx: &NodeCtx<'_>, score: &mut u64, out: &mut Outbox) {
        let t = self.tree;
        if let (Some(k), Some(p)) = (t.hops(ctx.id), t.parent(ctx.id)) {
            if k >= 1 && k <= t.h() && ctx.round == t.h() - k + 1 {
                out.send(p, Message::one(Tag::Score, *score));
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, score: &mut u64, inbox: &[Envelope]) {
        let children = self.tree.children(ctx.id);
        for env in inbox.iter().filter(|e| e.msg.tag == Tag::Score && children.contains(&e.from)) {
            *score += env.msg.first();
        }
    }
}

/// Leaf counts for every tree by upward aggregation, `h` rounds per tree.
///
/// A node at depth `h` starts with 1; a node at depth `d` reports to its
/// parent in round `h − d + 1`, after all its children have reported.
/// The returned state has no ancestor sets yet.
pub fn init_scores<W: Weight>(
    sim: &mut Simulator<'_>,
    trees: &[HopTree<W>],
    h: usize,
) -> Result<(ScoreState, RoundReport), EngineError> {
    let n = sim.node_count();
    let mut state = ScoreState::new(n);
    let mut reports = Vec::with_capacity(trees.len());
    for tree in trees {
        let x = tree.root();
        let init = (1..=n).map(|v| u64::from(tree.hops(v) == Some(h))).collect();
        let (scores, report) = sim.run_phase(&format!("init_scores[{x}]"), &ScoreUp { tree }, init, h)?;
        for (i, s) in scores.into_iter().enumerate() {
            state.set_score(i + 1, x, s);
        }
        reports.push(report);
    }
    Ok((state, compose_reports("init_scores", &reports)))
}

#[derive(Debug, Clone, Default)]
struct AncState {
    pending: Option<NodeId>,
    got: Vec<NodeId>,
}

struct AncestorsDown<'a, W: Weight> {
    tree: &'a HopTree<W>,
}

impl<W: Weight> Protocol for AncestorsDown<'_, W> {
    type State = AncState;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut AncState, out: &mut Outbox) {
        let relay = if ctx.round == 1 { Some(ctx.id) } else { st.pending.take() };
        if let Some(y) = relay {
            for &c in self.tree.children(ctx.id) {
                out.send(c, Message::one(Tag::Ancestor, y as u64));
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, st: &mut AncState, inbox: &[Envelope]) {
        let parent = self.tree.parent(ctx.id);
        for env in inbox.iter().filter(|e| e.msg.tag == Tag::Ancestor && Some(e.from) == parent) {
            let y = env.msg.first() as NodeId;
            st.got.push(y);
            st.pending = Some(y);
        }
    }
}

/// Fills `Anc_x(v)` for every tree by relaying ids down, `h` rounds per tree.
///
/// In round 1 every node sends its own id to its children; afterwards it
/// forwards whatever id it received in the previous round.
pub fn compute_ancestors<W: Weight>(
    sim: &mut Simulator<'_>,
    trees: &[HopTree<W>],
    h: usize,
    state: &mut ScoreState,
) -> Result<RoundReport, EngineError> {
    let n = sim.node_count();
    let mut reports = Vec::with_capacity(trees.len());
    for tree in trees {
        let x = tree.root();
        let init = vec![AncState::default(); n];
        let (states, report) = sim.run_phase(&format!("ancestors[{x}]"), &AncestorsDown { tree }, init, h)?;
        for (i, st) in states.into_iter().enumerate() {
            for y in st.got {
                state.add_ancestor(i + 1, x, y);
            }
        }
        reports.push(report);
    }
    Ok(compose_reports("ancestors", &reports))
}

/// Local step: a node that did not hear its tree's root among its ancestors
/// sits in a detached fragment and drops its score for that tree.
pub fn prune_detached(state: &mut ScoreState) {
    let n = state.node_count();
    for v in 1..=n {
        for x in (1..=n).filter(|&x| x != v) {
            if state.score_x(v, x) > 0 && !state.is_ancestor(v, x, x) {
                state.zero(v, x);
            }
        }
    }
}
