//! Multiple-unicast instances: a DAG plus (source, terminal, rate) sessions,
//! their connectivity levels and the preparation pipeline used before coding.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::graph::{self, Dag, Derivation, Edge, EdgeId, GraphError, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Session {
    pub source: NodeId,
    pub terminal: NodeId,
    pub rate: u32,
}

/// One input of a node's outgoing coding rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Input {
    /// Global message index observed at the node.
    Message(usize),
    Edge(EdgeId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("session {0} has an unknown endpoint")]
    BadSession(usize),
    #[error("session {0} has equal source and terminal")]
    SelfSession(usize),
    #[error("session {0} has zero rate")]
    ZeroRate(usize),
    #[error("classification needs exactly three sessions, found {0}")]
    SessionCount(usize),
    #[error("classification needs unit rates; session {0} has rate {1}")]
    NonUnitRate(usize, u32),
}

/// A DAG with unicast sessions. Session `i` owns the global message indices
/// `message_range(i)`; after expansion over `T` time units its rate already
/// counts all `T` slots and message `r * T + t` is symbol `r` of slot `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnicastInstance {
    dag: Dag,
    sessions: Vec<Session>,
    time_units: usize,
    offsets: Vec<usize>,
    inputs: Vec<Vec<Input>>,
}

impl UnicastInstance {
    pub fn new(dag: Dag, sessions: Vec<Session>) -> Result<Self, InstanceError> {
        Self::with_time_units(dag, sessions, 1)
    }

    pub fn with_time_units(
        dag: Dag,
        sessions: Vec<Session>,
        time_units: usize,
    ) -> Result<Self, InstanceError> {
        for (i, s) in sessions.iter().enumerate() {
            if s.source >= dag.node_count() || s.terminal >= dag.node_count() {
                return Err(InstanceError::BadSession(i));
            }
            if s.source == s.terminal {
                return Err(InstanceError::SelfSession(i));
            }
            if s.rate == 0 {
                return Err(InstanceError::ZeroRate(i));
            }
        }
        let mut offsets = Vec::with_capacity(sessions.len() + 1);
        let mut acc = 0;
        for s in &sessions {
            offsets.push(acc);
            acc += s.rate as usize;
        }
        offsets.push(acc);
        let mut inputs: Vec<Vec<Input>> = vec![Vec::new(); dag.node_count()];
        for (i, s) in sessions.iter().enumerate() {
            inputs[s.source].extend((offsets[i]..offsets[i + 1]).map(Input::Message));
        }
        for (v, list) in inputs.iter_mut().enumerate() {
            list.sort_by_key(|inp| match inp {
                Input::Message(m) => *m,
                Input::Edge(_) => unreachable!(),
            });
            list.extend(dag.in_edges(v).iter().map(|&e| Input::Edge(e)));
        }
        Ok(UnicastInstance {
            dag,
            sessions,
            time_units,
            offsets,
            inputs,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn session(&self, i: usize) -> Session {
        self.sessions[i]
    }

    pub fn time_units(&self) -> usize {
        self.time_units
    }

    pub fn message_count(&self) -> usize {
        *self.offsets.last().expect("offsets has a sentinel")
    }

    pub fn message_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// The session owning global message `m`.
    pub fn message_session(&self, m: usize) -> usize {
        (0..self.sessions.len())
            .find(|&i| self.message_range(i).contains(&m))
            .expect("message index in range")
    }

    /// Inputs of rows for edges leaving `v`: observed messages (ascending),
    /// then in-edges (ascending id).
    pub fn inputs(&self, v: NodeId) -> &[Input] {
        &self.inputs[v]
    }

    pub fn row_len(&self, e: EdgeId) -> usize {
        self.inputs[self.dag.tail(e)].len()
    }

    pub fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.sessions
            .iter()
            .map(|s| (s.source, s.terminal))
            .collect()
    }

    pub fn connectivity(&self) -> Vec<u32> {
        graph::connectivity_of(&self.dag, &self.pairs())
    }

    pub fn with_dag(&self, dag: Dag) -> UnicastInstance {
        Self::with_time_units(dag, self.sessions.clone(), self.time_units).expect("same node set")
    }

    pub fn with_sessions(&self, sessions: Vec<Session>) -> Result<UnicastInstance, InstanceError> {
        Self::with_time_units(self.dag.clone(), sessions, self.time_units)
    }

    /// Each edge becomes `t` parallel copies (copy `k` of edge `e` has id
    /// `e * t + k`) and every rate is multiplied by `t`.
    pub fn time_expand(&self, t: usize) -> UnicastInstance {
        let sessions = self
            .sessions
            .iter()
            .map(|s| Session {
                rate: s.rate * t as u32,
                ..*s
            })
            .collect();
        Self::with_time_units(self.dag.time_expand(t), sessions, self.time_units * t)
            .expect("expansion is valid")
    }

    /// Integer capacities replaced by parallel unit edges; returns the origin
    /// of every new edge.
    pub fn unit_split(&self) -> (UnicastInstance, Vec<EdgeId>) {
        let (dag, origin) = self.dag.unit_split();
        (self.with_dag(dag), origin)
    }

    /// Gives every session a private artificial source and terminal. The
    /// artificial source feeds the original source through as many unit edges
    /// as the source's total out-capacity (terminals symmetrically), so no
    /// max-flow changes. Expects a unit-capacity instance.
    pub fn wrap(&self) -> (UnicastInstance, Derivation) {
        let g = &self.dag;
        let mut names = g.names().to_vec();
        let mut node_parent: Vec<NodeId> = (0..g.node_count()).collect();
        let mut edges = g.edges().to_vec();
        let mut sessions = Vec::with_capacity(self.sessions.len());
        for (i, s) in self.sessions.iter().enumerate() {
            let src = names.len();
            names.push(format!("{}#s{i}", g.name(s.source)));
            node_parent.push(s.source);
            let term = names.len();
            names.push(format!("{}#t{i}", g.name(s.terminal)));
            node_parent.push(s.terminal);
            let out_cap: u32 = g.out_edges(s.source).iter().map(|&e| g.capacity(e)).sum();
            let in_cap: u32 = g.in_edges(s.terminal).iter().map(|&e| g.capacity(e)).sum();
            for _ in 0..out_cap {
                edges.push(Edge {
                    tail: src,
                    head: s.source,
                    capacity: 1,
                });
            }
            for _ in 0..in_cap {
                edges.push(Edge {
                    tail: s.terminal,
                    head: term,
                    capacity: 1,
                });
            }
            sessions.push(Session {
                source: src,
                terminal: term,
                rate: s.rate,
            });
        }
        let mut edge_parent: Vec<Option<EdgeId>> = (0..g.edge_count()).map(Some).collect();
        edge_parent.resize(edges.len(), None);
        let derivation = Derivation {
            node_parent,
            edge_parent,
            parent_nodes: g.node_count(),
            parent_edges: g.edge_count(),
        };
        let dag = Dag::new(names, edges).expect("wrapping keeps the graph acyclic");
        let inst = Self::with_time_units(dag, sessions, self.time_units)
            .expect("wrapped sessions are valid");
        (inst, derivation)
    }

    /// Restricts to the edges flagged in `keep`.
    pub fn subinstance(&self, keep: &[bool]) -> (UnicastInstance, Derivation) {
        let (dag, kept) = self.dag.subgraph(keep);
        (self.with_dag(dag), Derivation::subgraph(&self.dag, &kept))
    }

    /// Minimal subgraph in which session `i` keeps flow at least `target[i]`.
    pub fn minimize_to(&self, target: &[u32]) -> (UnicastInstance, Derivation) {
        let (dag, d) = graph::minimize_to(&self.dag, &self.pairs(), target);
        (self.with_dag(dag), d)
    }

    pub fn minimize(&self) -> (UnicastInstance, Derivation) {
        self.minimize_to(&self.connectivity())
    }

    /// Degree-three structuring with all session endpoints exempt.
    pub fn structure(&self) -> (UnicastInstance, Derivation) {
        let exempt: Vec<NodeId> = self
            .sessions
            .iter()
            .flat_map(|s| [s.source, s.terminal])
            .collect();
        let s = graph::structure(&self.dag, &exempt);
        (self.with_dag(s.dag), s.derivation)
    }

    /// Connectivity vector sorted ascending with the session permutation
    /// and the verdict for its class.
    pub fn classify(&self) -> Result<Classification, InstanceError> {
        if self.sessions.len() != 3 {
            return Err(InstanceError::SessionCount(self.sessions.len()));
        }
        if let Some((i, s)) = self.sessions.iter().enumerate().find(|(_, s)| s.rate != 1) {
            return Err(InstanceError::NonUnitRate(i, s.rate));
        }
        Ok(Classification::from_connectivity(self.connectivity()))
    }

    /// The unit-split input, then wrapped, structured and minimized to
    /// `target`; the derivation maps the prepared instance onto the split.
    pub fn prepare(&self, target: &[u32]) -> Prepared {
        let (base, _) = self.unit_split();
        let (wrapped, d_wrap) = base.wrap();
        let (structured, d_struct) = wrapped.structure();
        let (instance, d_min) = structured.minimize_to(target);
        let derivation = d_min.then(&d_struct).then(&d_wrap);
        Prepared {
            base,
            instance,
            derivation,
        }
    }

    pub fn to_text(&self) -> String {
        write_instance(self)
    }

    pub fn from_text(text: &str) -> Result<UnicastInstance, InstanceError> {
        parse_instance(text)
    }
}

/// A coding-ready instance together with its relation to the input.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Unit-capacity split of the input; lifted codes live here.
    pub base: UnicastInstance,
    pub instance: UnicastInstance,
    pub derivation: Derivation,
}

impl Prepared {
    pub fn time_expand(&self, t: usize) -> Prepared {
        Prepared {
            base: self.base.time_expand(t),
            instance: self.instance.time_expand(t),
            derivation: self.derivation.time_expand(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    FeasibleRouting,
    Feasible133,
    Feasible224,
    Feasible125,
    /// The class contains infeasible instances; this one may still be
    /// feasible.
    KnownInfeasibleClass,
    Unknown124,
    Undetermined,
}

impl Verdict {
    pub fn is_feasible(self) -> bool {
        matches!(
            self,
            Verdict::FeasibleRouting
                | Verdict::Feasible133
                | Verdict::Feasible224
                | Verdict::Feasible125
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::FeasibleRouting => "FeasibleRouting",
            Verdict::Feasible133 => "Feasible133",
            Verdict::Feasible224 => "Feasible224",
            Verdict::Feasible125 => "Feasible125",
            Verdict::KnownInfeasibleClass => "KnownInfeasibleClass",
            Verdict::Unknown124 => "Unknown124",
            Verdict::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub connectivity: Vec<u32>,
    /// Session indices by ascending connectivity (stable on ties).
    pub order: [usize; 3],
    pub sorted: [u32; 3],
    pub verdict: Verdict,
}

fn dominates(v: [u32; 3], base: [u32; 3]) -> bool {
    v.iter().zip(&base).all(|(a, b)| a >= b)
}

impl Classification {
    pub fn from_connectivity(connectivity: Vec<u32>) -> Classification {
        assert_eq!(connectivity.len(), 3);
        let mut order = [0, 1, 2];
        order.sort_by_key(|&i| connectivity[i]);
        let sorted = order.map(|i| connectivity[i]);
        let [a, b, _] = sorted;
        let verdict = if a >= 3 {
            Verdict::FeasibleRouting
        } else if dominates(sorted, [1, 3, 3]) {
            Verdict::Feasible133
        } else if dominates(sorted, [2, 2, 4]) {
            Verdict::Feasible224
        } else if dominates(sorted, [1, 2, 5]) {
            Verdict::Feasible125
        } else if sorted == [1, 2, 4] {
            Verdict::Unknown124
        } else if a == 0 || b <= 1 || dominates([2, 2, 3], sorted) {
            Verdict::KnownInfeasibleClass
        } else {
            Verdict::Undetermined
        };
        Classification {
            connectivity,
            order,
            sorted,
            verdict,
        }
    }
}

fn write_instance(inst: &UnicastInstance) -> String {
    let g = inst.dag();
    let mut out = String::new();
    out.push_str("nodes");
    for n in g.names() {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
    for e in g.edges() {
        out.push_str(&format!(
            "edge {} {} {}\n",
            g.name(e.tail),
            g.name(e.head),
            e.capacity
        ));
    }
    for s in inst.sessions() {
        out.push_str(&format!(
            "session {} {} {}\n",
            g.name(s.source),
            g.name(s.terminal),
            s.rate
        ));
    }
    out
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    col: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            col: s + 1,
        });
    }
    out
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// # comment
/// nodes s1 s2 v t1 t2
/// edge s1 v 1
/// session s1 t1 1
/// ```
///
/// `nodes` lines may repeat; edges and sessions may only use declared nodes.
pub fn parse_instance(text: &str) -> Result<UnicastInstance, InstanceError> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_pos: Vec<(usize, usize)> = Vec::new();
    let mut sessions: Vec<Session> = Vec::new();
    let mut session_pos: Vec<(usize, usize)> = Vec::new();
    let lookup = |names: &[String], tok: &Token, line: usize| -> Result<NodeId, InstanceError> {
        names
            .iter()
            .position(|n| n == tok.text)
            .ok_or_else(|| perr(line, tok.col, format!("unknown node `{}`", tok.text)))
    };
    let number = |tok: &Token, line: usize, what: &str| -> Result<u32, InstanceError> {
        tok.text.parse::<u32>().map_err(|_| {
            perr(
                line,
                tok.col,
                format!("expected {what}, found `{}`", tok.text),
            )
        })
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw);
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        let want = |n: usize| -> Result<(), InstanceError> {
            if toks.len() != n {
                let col = toks.get(n).map_or(content.len() + 1, |t| t.col);
                return Err(perr(
                    line,
                    col,
                    format!(
                        "`{}` takes {} fields, found {}",
                        head.text,
                        n - 1,
                        toks.len() - 1
                    ),
                ));
            }
            Ok(())
        };
        match head.text {
            "nodes" => {
                for t in &toks[1..] {
                    if names.iter().any(|n| n == t.text) {
                        return Err(perr(line, t.col, format!("duplicate node `{}`", t.text)));
                    }
                    names.push(t.text.to_string());
                }
            }
            "edge" => {
                want(4)?;
                let tail = lookup(&names, &toks[1], line)?;
                let head_node = lookup(&names, &toks[2], line)?;
                let capacity = number(&toks[3], line, "a capacity")?;
                if capacity == 0 {
                    return Err(perr(line, toks[3].col, "capacity must be positive"));
                }
                if tail == head_node {
                    return Err(perr(line, toks[1].col, "self-loop"));
                }
                edges.push(Edge {
                    tail,
                    head: head_node,
                    capacity,
                });
                edge_pos.push((line, head.col));
            }
            "session" => {
                want(4)?;
                let source = lookup(&names, &toks[1], line)?;
                let terminal = lookup(&names, &toks[2], line)?;
                let rate = number(&toks[3], line, "a rate")?;
                if rate == 0 {
                    return Err(perr(line, toks[3].col, "rate must be positive"));
                }
                if source == terminal {
                    return Err(perr(line, toks[1].col, "source equals terminal"));
                }
                sessions.push(Session {
                    source,
                    terminal,
                    rate,
                });
                session_pos.push((line, head.col));
            }
            other => return Err(perr(line, head.col, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(e) = cycle_edge(names.len(), &edges) {
        let (line, col) = edge_pos[e];
        return Err(perr(line, col, "edge closes a directed cycle"));
    }
    let dag = Dag::new(names, edges)?;
    UnicastInstance::new(dag, sessions)
}

/// A comment starts at a `#` that begins a token, so node names like
/// `v#s0` survive.
fn strip_comment(raw: &str) -> &str {
    let bytes = raw.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &raw[..i];
        }
    }
    raw
}

/// Some edge lying on a directed cycle, if any.
fn cycle_edge(n: usize, edges: &[Edge]) -> Option<usize> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        out[e.tail].push(i);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&e) = out[v].get(*next) {
                *next += 1;
                let h = edges[e].head;
                match state[h] {
                    0 => {
                        state[h] = 1;
                        stack.push((h, 0));
                    }
                    1 => return Some(e),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}
