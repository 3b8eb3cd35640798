//! Lockstep CONGEST round executor.
//!
//! A round has two halves. In the send half every node inspects its own
//! state and queues at most one [`Message`] per incident channel. The engine
//! validates the outboxes, then in the receive half every node consumes the
//! messages addressed to it (sorted by sender id). A message sent in round
//! `r` is therefore visible to its receiver from round `r + 1` onwards, and
//! the receive half of the last budgeted round still runs, so nothing sent
//! within budget is lost.
//!
//! Phases run for a fixed number of rounds; there is no quiescence detection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, Topology};

/// Message kinds used across the protocol suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Ping,
    Relax,
    Child,
    Explore,
    Join,
    Value,
    Score,
    Ancestor,
    AncestorUpdate,
}

/// At most two machine words, the stand-in for an `O(log n)`-bit message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payload {
    Empty,
    One(u64),
    Two(u64, u64),
}

impl Payload {
    pub fn words(&self) -> usize {
        match self {
            Payload::Empty => 0,
            Payload::One(_) => 1,
            Payload::Two(..) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Message {
    pub tag: Tag,
    pub payload: Payload,
}

impl Message {
    pub fn empty(tag: Tag) -> Self {
        Message { tag, payload: Payload::Empty }
    }

    pub fn one(tag: Tag, a: u64) -> Self {
        Message { tag, payload: Payload::One(a) }
    }

    pub fn two(tag: Tag, a: u64, b: u64) -> Self {
        Message { tag, payload: Payload::Two(a, b) }
    }

    /// First payload word, or 0.
    pub fn first(&self) -> u64 {
        match self.payload {
            Payload::Empty => 0,
            Payload::One(a) | Payload::Two(a, _) => a,
        }
    }

    /// Second payload word, or 0.
    pub fn second(&self) -> u64 {
        match self.payload {
            Payload::Two(_, b) => b,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Envelope {
    pub from: NodeId,
    pub msg: Message,
}

/// Directed delivery slot over one undirected link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    pub from: NodeId,
    pub to: NodeId,
}

/// What a node may see about itself in a round.
#[derive(Debug, Clone, Copy)]
pub struct NodeCtx<'a> {
    pub id: NodeId,
    pub round: usize,
    pub neighbors: &'a [NodeId],
}

/// Messages queued by one node during a send half.
#[derive(Debug, Default)]
pub struct Outbox {
    queued: Vec<(NodeId, Message)>,
}

impl Outbox {
    pub fn send(&mut self, to: NodeId, msg: Message) {
        self.queued.push((to, msg));
    }

    pub fn send_all(&mut self, neighbors: &[NodeId], msg: Message) {
        self.queued.extend(neighbors.iter().map(|&to| (to, msg)));
    }
}

/// A per-node program. Both halves may read and write only the node's own state.
pub trait Protocol {
    type State;

    /// If set, the engine aborts when a node's inbox holds more messages than this in one round.
    const MAX_INBOX: Option<usize> = None;

    fn send(&self, ctx: &NodeCtx<'_>, state: &mut Self::State, out: &mut Outbox);

    fn receive(&self, ctx: &NodeCtx<'_>, state: &mut Self::State, inbox: &[Envelope]);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("phase {phase}: bandwidth violation in round {round} on channel {}->{}", channel.from, channel.to)]
    Bandwidth { phase: String, round: usize, channel: Channel },
    #[error("phase {phase}: round {round}: node {from} addressed non-neighbor {to}")]
    NonNeighbor { phase: String, round: usize, from: NodeId, to: NodeId },
    #[error("phase {phase}: round {round}: node {node} received {count} messages (limit {limit})")]
    InboxOverflow { phase: String, round: usize, node: NodeId, count: usize, limit: usize },
    #[error("phase {phase}: expected {expected} initial states, got {got}")]
    StateCount { phase: String, expected: usize, got: usize },
    #[error("phase {phase}: {detail}")]
    Incomplete { phase: String, detail: String },
}

/// Round and message accounting for one phase, or a composition of phases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReport {
    pub phase: String,
    pub rounds: usize,
    pub budget: usize,
    pub messages: u64,
    pub max_load: usize,
    #[serde(skip)]
    pub max_payload_words: usize,
}

impl RoundReport {
    pub fn empty(phase: impl Into<String>) -> Self {
        RoundReport { phase: phase.into(), rounds: 0, budget: 0, messages: 0, max_load: 0, max_payload_words: 0 }
    }

    /// One trace line: `{"phase":..,"rounds":..,"budget":..,"messages":..,"max_load":..}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Sums rounds, budgets and messages; takes the max of the load figures.
pub fn compose_reports<'a>(phase: impl Into<String>, reports: impl IntoIterator<Item = &'a RoundReport>) -> RoundReport {
    reports.into_iter().fold(RoundReport::empty(phase), |mut acc, r| {
        acc.rounds += r.rounds;
        acc.budget += r.budget;
        acc.messages += r.messages;
        acc.max_load = acc.max_load.max(r.max_load);
        acc.max_payload_words = acc.max_payload_words.max(r.max_payload_words);
        acc
    })
}

/// Order in which node halves are evaluated within a round. Results do not depend on it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Ascending,
    /// A permutation of `1..=n`.
    Custom(Vec<NodeId>),
}

/// Runs phases over a fixed topology and keeps a log of every report.
#[derive(Debug)]
pub struct Simulator<'t> {
    topology: &'t Topology,
    schedule: Schedule,
    log: Vec<RoundReport>,
}

impl<'t> Simulator<'t> {
    pub fn new(topology: &'t Topology) -> Self {
        Simulator { topology, schedule: Schedule::Ascending, log: Vec::new() }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        if let Schedule::Custom(order) = &schedule {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert!(sorted.iter().copied().eq(1..=self.topology.node_count()), "schedule must permute 1..=n");
        }
        self.schedule = schedule;
        self
    }

    pub fn topology(&self) -> &'t Topology {
        self.topology
    }

    pub fn node_count(&self) -> usize {
        self.topology.node_count()
    }

    pub fn log(&self) -> &[RoundReport] {
        &self.log
    }

    /// Reports logged since position `mark`, composed under `phase`.
    pub fn compose_since(&self, mark: usize, phase: &str) -> RoundReport {
        compose_reports(phase, &self.log[mark..])
    }

    pub fn into_log(self) -> Vec<RoundReport> {
        self.log
    }

    /// Executes exactly `budget` rounds of `program` from `init` (indexed by node id − 1).
    pub fn run_phase<P: Protocol>(
        &mut self,
        phase: &str,
        program: &P,
        init: Vec<P::State>,
        budget: usize,
    ) -> Result<(Vec<P::State>, RoundReport), EngineError> {
        let (states, report) = run_phase_with(self.topology, &self.schedule, phase, program, init, budget)?;
        self.log.push(report.clone());
        Ok((states, report))
    }
}

/// Runs one phase in ascending-id schedule.
pub fn run_phase<P: Protocol>(
    topology: &Topology,
    phase: &str,
    program: &P,
    init: Vec<P::State>,
    budget: usize,
) -> Result<(Vec<P::State>, RoundReport), EngineError> {
    run_phase_with(topology, &Schedule::Ascending, phase, program, init, budget)
}

fn run_phase_with<P: Protocol>(
    topology: &Topology,
    schedule: &Schedule,
    phase: &str,
    program: &P,
    init: Vec<P::State>,
    budget: usize,
) -> Result<(Vec<P::State>, RoundReport), EngineError> {
    let n = topology.node_count();
    if init.len() != n {
        return Err(EngineError::StateCount { phase: phase.into(), expected: n, got: init.len() });
    }
    let order: Vec<NodeId> = match schedule {
        Schedule::Ascending => (1..=n).collect(),
        Schedule::Custom(order) => order.clone(),
    };
    let mut states = init;
    let mut report = RoundReport { budget, ..RoundReport::empty(phase) };
    let mut outboxes: Vec<Outbox> = (0..n).map(|_| Outbox::default()).collect();
    let mut inboxes: Vec<Vec<Envelope>> = vec![Vec::new(); n];

    for round in 1..=budget {
        for &v in &order {
            let ctx = NodeCtx { id: v, round, neighbors: topology.neighbors(v) };
            program.send(&ctx, &mut states[v - 1], &mut outboxes[v - 1]);
        }

        // Ascending sender order makes every inbox sorted by sender id.
        let mut any = false;
        for from in 1..=n {
            let queued = &mut outboxes[from - 1].queued;
            if queued.is_empty() {
                continue;
            }
            queued.sort_by_key(|&(to, _)| to);
            for pair in queued.windows(2) {
                if pair[0].0 == pair[1].0 {
                    let channel = Channel { from, to: pair[0].0 };
                    return Err(EngineError::Bandwidth { phase: phase.into(), round, channel });
                }
            }
            for (to, msg) in queued.drain(..) {
                if to == 0 || to > n || !topology.is_adjacent(from, to) {
                    return Err(EngineError::NonNeighbor { phase: phase.into(), round, from, to });
                }
                report.messages += 1;
                report.max_payload_words = report.max_payload_words.max(msg.payload.words());
                inboxes[to - 1].push(Envelope { from, msg });
                any = true;
            }
        }
        if any {
            report.max_load = 1;
        }
        if let Some(limit) = P::MAX_INBOX {
            if let Some(i) = inboxes.iter().position(|b| b.len() > limit) {
                return Err(EngineError::InboxOverflow {
                    phase: phase.into(),
                    round,
                    node: i + 1,
                    count: inboxes[i].len(),
                    limit,
                });
            }
        }

        for &v in &order {
            let ctx = NodeCtx { id: v, round, neighbors: topology.neighbors(v) };
            program.receive(&ctx, &mut states[v - 1], &inboxes[v - 1]);
        }
        for inbox in &mut inboxes {
            inbox.clear();
        }
    }
    report.rounds = budget;
    Ok((states, report))
}
