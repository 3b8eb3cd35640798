//! BFS trees and pipelined dissemination over the communication topology.

use std::collections::VecDeque;

use crate::engine::{EngineError, Envelope, Message, NodeCtx, Outbox, Protocol, RoundReport, Simulator, Tag};
use crate::graph::NodeId;

/// Unweighted BFS tree over the undirected topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub depth: Vec<usize>,
    pub children: Vec<Vec<NodeId>>,
}

impl BfsTree {
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v - 1]
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v - 1]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v - 1]
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
struct BfsState {
    depth: Option<usize>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    announced: bool,
}

struct BuildBfs;

impl Protocol for BuildBfs {
    type State = BfsState;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut BfsState, out: &mut Outbox) {
        let Some(depth) = st.depth else { return };
        if st.announced {
            return;
        }
        st.announced = true;
        for &u in ctx.neighbors {
            if Some(u) == st.parent {
                out.send(u, Message::empty(Tag::Join));
            } else {
                out.send(u, Message::one(Tag::Explore, depth as u64));
            }
        }
    }

    fn receive(&self, _ctx: &NodeCtx<'_>, st: &mut BfsState, inbox: &[Envelope]) {
        for env in inbox {
            match env.msg.tag {
                // Inbox is sorted by sender, so the first explorer has the minimum id.
                Tag::Explore if st.depth.is_none() => {
                    st.depth = Some(env.msg.first() as usize + 1);
                    st.parent = Some(env.from);
                }
                Tag::Join => st.children.push(env.from),
                _ => {}
            }
        }
    }
}

/// BFS tree rooted at `root`, built in a budget of `n` rounds.
pub fn bfs_tree(sim: &mut Simulator<'_>, root: NodeId) -> Result<(BfsTree, RoundReport), EngineError> {
    let n = sim.node_count();
    let init = (1..=n)
        .map(|v| BfsState { depth: (v == root).then_some(0), ..BfsState::default() })
        .collect();
    let phase = format!("bfs[{root}]");
    let (states, report) = sim.run_phase(&phase, &BuildBfs, init, n)?;
    let mut tree = BfsTree { root, parent: Vec::with_capacity(n), depth: Vec::with_capacity(n), children: Vec::with_capacity(n) };
    for (i, st) in states.into_iter().enumerate() {
        let depth = st.depth.ok_or_else(|| EngineError::Incomplete {
            phase: phase.clone(),
            detail: format!("node {} not reached", i + 1),
        })?;
        tree.parent.push(st.parent);
        tree.depth.push(depth);
        tree.children.push(st.children);
    }
    Ok((tree, report))
}

/// A `(tag, value)` pair carried by one message.
pub type Tagged = (u64, u64);

#[derive(Debug, Clone, Default)]
struct DownState {
    pending: VecDeque<Tagged>,
    held: Vec<Tagged>,
    arrivals: Vec<usize>,
}

struct PipelineDown<'a> {
    tree: &'a BfsTree,
}

impl Protocol for PipelineDown<'_> {
    type State = DownState;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut DownState, out: &mut Outbox) {
        let children = self.tree.children(ctx.id);
        if children.is_empty() {
            st.pending.clear();
            return;
        }
        if let Some((tag, value)) = st.pending.pop_front() {
            for &c in children {
                out.send(c, Message::two(Tag::Value, tag, value));
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, st: &mut DownState, inbox: &[Envelope]) {
        let parent = self.tree.parent(ctx.id);
        for env in inbox.iter().filter(|e| Some(e.from) == parent && e.msg.tag == Tag::Value) {
            let item = (env.msg.first(), env.msg.second());
            st.held.push(item);
            st.pending.push_back(item);
            st.arrivals.push(ctx.round);
        }
    }
}

/// Result of pushing a value sequence down a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dissemination {
    /// Values held by each node in arrival order (the root holds its own sequence).
    pub held: Vec<Vec<Tagged>>,
    /// Pipeline round in which each held value arrived; empty for the root.
    pub arrivals: Vec<Vec<usize>>,
}

fn pipeline_down(
    sim: &mut Simulator<'_>,
    phase: &str,
    tree: &BfsTree,
    values: &[Tagged],
    budget: usize,
) -> Result<(Dissemination, RoundReport), EngineError> {
    let n = sim.node_count();
    let init = (1..=n)
        .map(|v| {
            if v == tree.root {
                DownState { pending: values.iter().copied().collect(), held: values.to_vec(), arrivals: Vec::new() }
            } else {
                DownState::default()
            }
        })
        .collect();
    let (states, report) = sim.run_phase(phase, &PipelineDown { tree }, init, budget)?;
    if let Some(i) = states.iter().position(|s| s.held.len() != values.len()) {
        return Err(EngineError::Incomplete {
            phase: phase.into(),
            detail: format!("node {} holds {} of {} values", i + 1, states[i].held.len(), values.len()),
        });
    }
    let (held, arrivals) = states.into_iter().map(|s| (s.held, s.arrivals)).unzip();
    Ok((Dissemination { held, arrivals }, report))
}

/// Broadcasts `values` from `root` to every node: BFS build (`n` rounds), then
/// value `i` leaves the root in round `i` and is forwarded one hop per round
/// (`n + k` rounds).
pub fn pipelined_broadcast(
    sim: &mut Simulator<'_>,
    root: NodeId,
    values: &[Tagged],
) -> Result<(Dissemination, RoundReport), EngineError> {
    let n = sim.node_count();
    let mark = sim.log().len();
    let (tree, _) = bfs_tree(sim, root)?;
    let (diss, _) = pipeline_down(sim, &format!("pipeline[{root}]"), &tree, values, n + values.len())?;
    Ok((diss, sim.compose_since(mark, &format!("pipelined_broadcast[{root}]"))))
}

#[derive(Debug, Clone, Default)]
struct UpState {
    queue: VecDeque<Tagged>,
    collected: Vec<Tagged>,
}

struct Upcast<'a> {
    tree: &'a BfsTree,
}

impl Protocol for Upcast<'_> {
    type State = UpState;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut UpState, out: &mut Outbox) {
        if let Some(p) = self.tree.parent(ctx.id) {
            if let Some((tag, value)) = st.queue.pop_front() {
                out.send(p, Message::two(Tag::Value, tag, value));
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, st: &mut UpState, inbox: &[Envelope]) {
        let is_root = ctx.id == self.tree.root;
        for env in inbox.iter().filter(|e| e.msg.tag == Tag::Value) {
            let item = (env.msg.first(), env.msg.second());
            if is_root {
                st.collected.push(item);
            } else {
                st.queue.push_back(item);
            }
        }
    }
}

/// Node that gathers and redistributes values in [`all_to_all_broadcast`].
pub const ALL_TO_ALL_LEADER: NodeId = 1;

/// Every node learns every node's value: BFS from the leader (`n` rounds),
/// pipelined convergecast to the leader (`2n`), pipelined broadcast back
/// down in id order (`2n`). Returns the `n`-vector held at each node.
pub fn all_to_all_broadcast(
    sim: &mut Simulator<'_>,
    values: &[u64],
) -> Result<(Vec<Vec<u64>>, RoundReport), EngineError> {
    let n = sim.node_count();
    assert_eq!(values.len(), n, "one value per node");
    let mark = sim.log().len();
    let (tree, _) = bfs_tree(sim, ALL_TO_ALL_LEADER)?;

    let init = (1..=n)
        .map(|v| {
            let own = (v as u64, values[v - 1]);
            if v == ALL_TO_ALL_LEADER {
                UpState { queue: VecDeque::new(), collected: vec![own] }
            } else {
                UpState { queue: VecDeque::from([own]), collected: Vec::new() }
            }
        })
        .collect();
    let (states, _) = sim.run_phase("convergecast", &Upcast { tree: &tree }, init, 2 * n)?;
    let mut gathered = states[ALL_TO_ALL_LEADER - 1].collected.clone();
    if gathered.len() != n {
        return Err(EngineError::Incomplete {
            phase: "convergecast".into(),
            detail: format!("leader gathered {} of {n} values", gathered.len()),
        });
    }
    gathered.sort_unstable();

    let (diss, _) = pipeline_down(sim, "downcast", &tree, &gathered, 2 * n)?;
    let vectors = diss
        .held
        .into_iter()
        .map(|held| {
            let mut vector = vec![0; n];
            for (id, value) in held {
                vector[id as usize - 1] = value;
            }
            vector
        })
        .collect();
    Ok((vectors, sim.compose_since(mark, "all_to_all_broadcast")))
}
