//! Distributed Bellman-Ford: hop-bounded trees and full single-source distances.

use std::cmp::Ordering;

use crate::engine::{EngineError, Envelope, Message, NodeCtx, Outbox, Protocol, RoundReport, Simulator, Tag};
use crate::error::{ConfigError, Error};
use crate::graph::{NodeId, WeightedDigraph};
use crate::scalar::{Distance, Weight};

/// One node's view of a hop-bounded shortest path tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode<W: Weight> {
    pub dist: Distance<W>,
    pub parent: Option<NodeId>,
    pub hops: Option<usize>,
    pub children: Vec<NodeId>,
}

/// An `h`-hop SSSP tree, as held collectively by the nodes after [`hhop_sssp`].
///
/// `dist(v)` is the minimum weight of an `x -> v` path with at most `h`
/// edges, for every `v`. The parent links are what each node knows locally
/// once the final child-notification round has been checked on both ends of
/// every tree edge. A node whose parent improved in the very last relaxation
/// round fails that check: it keeps its exact distance but drops its parent
/// link and hop count. Such a node heads a *detached* fragment; its own
/// descendants still point at it and only
/// learn they are cut off from the root once ancestor ids are relayed down.
/// [`HopTree::is_attached`] gives the global view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopTree<W: Weight> {
    root: NodeId,
    h: usize,
    nodes: Vec<TreeNode<W>>,
}

impl<W: Weight> HopTree<W> {
    pub fn from_nodes(root: NodeId, h: usize, nodes: Vec<TreeNode<W>>) -> Self {
        HopTree { root, h, nodes }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, v: NodeId) -> &TreeNode<W> {
        &self.nodes[v - 1]
    }

    pub fn dist(&self, v: NodeId) -> Distance<W> {
        self.nodes[v - 1].dist
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v - 1].parent
    }

    pub fn hops(&self, v: NodeId) -> Option<usize> {
        self.nodes[v - 1].hops
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v - 1].children
    }

    /// Whether following parent links from `v` reaches the root.
    pub fn is_attached(&self, v: NodeId) -> bool {
        let mut cur = v;
        for _ in 0..=self.nodes.len() {
            if cur == self.root {
                return true;
            }
            match self.parent(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    /// Nodes at hop depth exactly `h` that are attached to the root, ascending.
    pub fn depth_h_leaves(&self) -> Vec<NodeId> {
        (1..=self.nodes.len()).filter(|&v| self.hops(v) == Some(self.h) && self.is_attached(v)).collect()
    }

    /// Tree path from the root to `v` (inclusive), if `v` is attached.
    pub fn path_from_root(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.is_attached(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Every node's distance, indexed by id − 1.
    pub fn distances(&self) -> Vec<Distance<W>> {
        self.nodes.iter().map(|t| t.dist).collect()
    }
}

#[derive(Debug, Clone)]
struct RelaxState<W: Weight> {
    dist: Distance<W>,
    hops: usize,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    detached: bool,
}

/// `h` relaxation rounds then one child-notification round.
struct HopBoundedRelax<'g, W> {
    graph: &'g WeightedDigraph<W>,
    h: usize,
}

impl<W: Weight> HopBoundedRelax<'_, W> {
    fn in_weight(&self, from: NodeId, to: NodeId) -> W {
        let list = self.graph.in_edges(to);
        let i = list.binary_search_by_key(&from, |&(u, _)| u).expect("relaxation arrives over a graph edge");
        list[i].1
    }
}

impl<W: Weight> Protocol for HopBoundedRelax<'_, W> {
    type State = RelaxState<W>;

    fn send(&self, ctx: &NodeCtx<'_>, st: &mut RelaxState<W>, out: &mut Outbox) {
        if st.dist.is_infinite() {
            return;
        }
        let relax = Message::two(Tag::Relax, st.dist.to_word(), st.hops as u64);
        let notify = ctx.round == self.h + 1;
        for &(to, _) in self.graph.out_edges(ctx.id) {
            if !(notify && st.parent == Some(to)) {
                out.send(to, relax);
            }
        }
        if notify {
            if let Some(p) = st.parent {
                out.send(p, Message::two(Tag::Child, st.dist.to_word(), st.hops as u64));
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, st: &mut RelaxState<W>, inbox: &[Envelope]) {
        let v = ctx.id;
        if ctx.round <= self.h {
            for env in inbox.iter().filter(|e| e.msg.tag == Tag::Relax) {
                let u = env.from;
                let cand = Distance::<W>::from_word(env.msg.first()).plus_weight(self.in_weight(u, v));
                let cand_hops = env.msg.second() as usize + 1;
                // Lexicographic on (distance, hops, parent id).
                let better = match cand.cmp(&st.dist) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => (cand_hops, u) < (st.hops, st.parent.unwrap_or(NodeId::MAX)),
                };
                if better && cand.is_finite() {
                    st.dist = cand;
                    st.hops = cand_hops;
                    st.parent = Some(u);
                }
            }
            return;
        }

        // Child-notification round: both ends of each tree edge check it against final values.
        for env in inbox.iter().filter(|e| e.msg.tag == Tag::Child) {
            let w = self.graph.weight(v, env.from).expect("child hangs off an out-edge");
            let consistent = st.dist.plus_weight(w).to_word() == env.msg.first()
                && st.hops as u64 + 1 == env.msg.second();
            if consistent {
                st.children.push(env.from);
            }
        }
        if let Some(p) = st.parent {
            let from_parent = inbox.iter().find(|e| e.from == p && e.msg.tag == Tag::Relax);
            let consistent = from_parent.is_some_and(|e| {
                Distance::<W>::from_word(e.msg.first()).plus_weight(self.in_weight(p, v)) == st.dist
                    && e.msg.second() + 1 == st.hops as u64
            });
            if !consistent {
                st.detached = true;
            }
        }
    }
}

fn check_hop_bound(n: usize, h: usize) -> Result<(), ConfigError> {
    if h == 0 || h + 1 > n {
        return Err(ConfigError::HopBound { h, n, max: n.saturating_sub(1) });
    }
    Ok(())
}

/// Builds the `h`-hop SSSP tree rooted at `root` in exactly `h + 1` rounds.
///
/// Relaxation messages carry `(dist, hops)`. A receiver adopts an offer that
/// is lexicographically smaller in (distance, hops, sender id) than what it
/// holds. The extra round tells each parent its children.
pub fn hhop_sssp<W: Weight>(
    sim: &mut Simulator<'_>,
    graph: &WeightedDigraph<W>,
    root: NodeId,
    h: usize,
) -> Result<(HopTree<W>, RoundReport), Error> {
    let n = graph.node_count();
    check_hop_bound(n, h)?;
    let init = (1..=n)
        .map(|v| RelaxState {
            dist: if v == root { Distance::zero() } else { Distance::infinity() },
            hops: 0,
            parent: None,
            children: Vec::new(),
            detached: false,
        })
        .collect();
    let program = HopBoundedRelax { graph, h };
    let (states, report) = sim.run_phase(&format!("hhop_sssp[{root}]"), &program, init, h + 1)?;
    let nodes = states
        .into_iter()
        .map(|st| {
            let in_tree = st.dist.is_finite() && !st.detached;
            TreeNode {
                dist: st.dist,
                parent: if in_tree { st.parent } else { None },
                hops: if in_tree { Some(st.hops) } else { None },
                children: st.children,
            }
        })
        .collect();
    Ok((HopTree::from_nodes(root, h, nodes), report))
}

struct FullRelax<'g, W> {
    graph: &'g WeightedDigraph<W>,
}

impl<W: Weight> Protocol for FullRelax<'_, W> {
    type State = Distance<W>;

    fn send(&self, ctx: &NodeCtx<'_>, dist: &mut Distance<W>, out: &mut Outbox) {
        if dist.is_finite() {
            let msg = Message::one(Tag::Relax, dist.to_word());
            for &(to, _) in self.graph.out_edges(ctx.id) {
                out.send(to, msg);
            }
        }
    }

    fn receive(&self, ctx: &NodeCtx<'_>, dist: &mut Distance<W>, inbox: &[Envelope]) {
        let ins = self.graph.in_edges(ctx.id);
        for env in inbox {
            let i = ins.binary_search_by_key(&env.from, |&(u, _)| u).expect("relaxation over a graph edge");
            let cand = Distance::<W>::from_word(env.msg.first()).plus_weight(ins[i].1);
            if cand < *dist {
                *dist = cand;
            }
        }
    }
}

/// Exact single-source distances from `root` in `n` relaxation rounds.
pub fn full_sssp<W: Weight>(
    sim: &mut Simulator<'_>,
    graph: &WeightedDigraph<W>,
    root: NodeId,
) -> Result<(Vec<Distance<W>>, RoundReport), EngineError> {
    let n = graph.node_count();
    let init = (1..=n).map(|v| if v == root { Distance::zero() } else { Distance::infinity() }).collect();
    sim.run_phase(&format!("full_sssp[{root}]"), &FullRelax { graph }, init, n)
}
