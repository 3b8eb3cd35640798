//! Score maintenance after a node joins the blocker set.

use std::collections::{BTreeMap, VecDeque};

use crate::engine::{EngineError, Envelope, Message, NodeCtx, Outbox, Protocol, RoundReport, Simulator, Tag};
use crate::graph::NodeId;
use crate::primitives::HopTree;
use crate::scalar::Weight;

use super::scores::ScoreState;

/// Local step at every node: trees in which `c` is an ancestor of `v` lose all
/// their paths through `v`.
pub fn descendant_update(state: &mut ScoreState, c: NodeId) {
    for v in 1..=state.node_count() {
        descendant_update_at(state, v, c);
    }
}

/// [`descendant_update`] restricted to one node's own state.
pub fn descendant_update_at(state: &mut ScoreState, v: NodeId, c: NodeId) {
    for x in 1..=state.node_count() {
        if state.score_x(v, x) > 0 && state.is_ancestor(v, x, c) {
            state.zero(v, x);
        }
    }
}

/// Builds `list_c` at `c`: its nonzero `⟨x, score_x(c)⟩` entries for `x ≠ c`,
/// ascending by `x`, and zeroes all of `c`'s own scores.
pub fn take_list(state: &mut ScoreState, c: NodeId) -> Vec<(NodeId, u64)> {
    let n = state.node_count();
    let list = (1..=n).filter(|&x| x != c).map(|x| (x, state.score_x(c, x))).filter(|&(_, s)| s > 0).collect();
    for x in 1..=n {
        state.zero(c, x);
    }
    list
}

#[derive(Debug, Clone, Default)]
struct UpdateState {
    /// Entries waiting for each parent channel, oldest first.
    queues: BTreeMap<NodeId, VecDeque<(NodeId, u64)>>,
    received: Vec<(NodeId, u64)>,
    /// Rounds in which more than one entry arrived.
    crowded_rounds: usize,
    last_arrival: usize,
    blocked: bool,
}

struct AncestorUp<'a, W: Weight> {
    trees: &'a [HopTree<W>],
    c: NodeId,
    list: &'a [(NodeId, u64)],
    in_q: &'a [bool],
}

impl<W: Weight> Protocol for AncestorUp<'_, W> {
    type State = UpdateState;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut UpdateState, out: &mut Outbox) {
        if ctx.id == self.c {
            if let Some(&(x, s)) = self.list.get(ctx.round - 1) {
                if let Some(p) = self.trees[x - 1].parent(ctx.id) {
                    out.send(p, Message::two(Tag::AncestorUpdate, x as u64, s));
                }
            }
            return;
        }
        for (&p, queue) in st.queues.iter_mut() {
            if let Some((x, s)) = queue.pop_front() {
                out.send(p, Message::two(Tag::AncestorUpdate, x as u64, s));
            }
        }
        st.queues.retain(|_, q| !q.is_empty());
    }

    fn receive(&self, ctx: &NodeCtx<'_>, st: &mut UpdateState, inbox: &[Envelope]) {
        let mut arrived = 0;
        for env in inbox.iter().filter(|e| e.msg.tag == Tag::AncestorUpdate) {
            arrived += 1;
            let (x, s) = (env.msg.first() as NodeId, env.msg.second());
            if ctx.id == self.c || self.in_q[ctx.id - 1] {
                st.blocked = true;
                continue;
            }
            st.received.push((x, s));
            if x != ctx.id {
                if let Some(p) = self.trees[x - 1].parent(ctx.id) {
                    st.queues.entry(p).or_default().push_back((x, s));
                }
            }
        }
        if arrived > 0 {
            st.last_arrival = ctx.round;
        }
        if arrived > 1 {
            st.crowded_rounds += 1;
        }
    }
}

/// Delivery statistics of one [`ancestor_update`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// `(node, round)` pairs at which two or more entries arrived together.
    pub crowded: usize,
    /// Last round in which any entry arrived; 0 if none was sent.
    pub last_arrival: usize,
}

/// Pushes each `⟨x, score_x(c)⟩` up `T_x` from `c` to `x`, one entry leaving
/// `c` per round, every ancestor subtracting it on the way. `n − 1 + h` rounds.
///
/// Entries that meet at a node may share a parent channel; each node keeps
/// one queue per parent and sends at most one entry on each per round.
/// `in_q` marks the blockers selected before `c`. Fails if an entry is still
/// queued when the budget runs out, or if a blocker receives one.
pub fn ancestor_update<W: Weight>(
    sim: &mut Simulator<'_>,
    trees: &[HopTree<W>],
    h: usize,
    c: NodeId,
    list: &[(NodeId, u64)],
    in_q: &[bool],
    state: &mut ScoreState,
) -> Result<(RoundReport, UpdateStats), EngineError> {
    let n = sim.node_count();
    let phase = format!("ancestor_update[{c}]");
    let program = AncestorUp { trees, c, list, in_q };
    let (states, report) = sim.run_phase(&phase, &program, vec![UpdateState::default(); n], n - 1 + h)?;
    if let Some(i) = states.iter().position(|s| s.blocked) {
        return Err(EngineError::Incomplete { phase, detail: format!("blocker {} received an update", i + 1) });
    }
    if let Some(i) = states.iter().position(|s| !s.queues.is_empty()) {
        return Err(EngineError::Incomplete { phase, detail: format!("node {} still holds queued updates", i + 1) });
    }
    let stats = UpdateStats {
        crowded: states.iter().map(|s| s.crowded_rounds).sum(),
        last_arrival: states.iter().map(|s| s.last_arrival).max().unwrap_or(0),
    };
    for (i, st) in states.into_iter().enumerate() {
        for (x, s) in st.received {
            state.subtract(i + 1, x, s);
        }
    }
    Ok((report, stats))
}
