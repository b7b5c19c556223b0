//! Serre graphs: arcs with endpoints and an involutive reversal.
//!
//! Edges are arc pairs `{a, r(a)}`. A loop with `a == r(a)` is
//! non-orientable; a loop pair with `a != r(a)` is orientable.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arc `{0}`")]
    DuplicateArc(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("graph is not a cycle graph")]
    NotACycleGraph,
    #[error("graph is not a tree")]
    NotATree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub origin: usize,
    pub terminus: usize,
    pub reverse: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `r(r(a)) != a`.
    ReverseNotInvolutive { arc: String },
    /// `o(r(a)) != t(a)`.
    ReverseMismatch { arc: String },
    Disconnected { components: Vec<Vec<String>> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ReverseNotInvolutive { arc } => write!(f, "arc {arc}: r(r(a)) != a"),
            Violation::ReverseMismatch { arc } => write!(f, "arc {arc}: o(r(a)) != t(a)"),
            Violation::Disconnected { components } => {
                let parts: Vec<String> = components.iter().map(|c| c.join(",")).collect();
                write!(f, "graph is disconnected: {{{}}}", parts.join("} {"))
            }
        }
    }
}

/// A finite Serre graph. Declaration order fixes iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SerreGraph {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
    vertex_index: HashMap<String, usize>,
    arc_index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
}

impl SerreGraph {
    /// Builds a graph from `(id, origin, terminus, reverse)` arc records.
    /// Ids must resolve; structural invariants are checked by [`validate`].
    ///
    /// [`validate`]: SerreGraph::validate
    pub fn new<V, A>(vertices: V, arcs: A) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let records: Vec<_> = arcs.into_iter().collect();
        let mut arc_index = HashMap::new();
        for (i, (id, ..)) in records.iter().enumerate() {
            if arc_index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateArc(id.clone()));
            }
        }
        let vertex = |name: &str| {
            vertex_index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let mut arcs = Vec::with_capacity(records.len());
        for (id, o, t, r) in &records {
            let reverse = *arc_index
                .get(r)
                .ok_or_else(|| GraphError::UnknownArc(r.clone()))?;
            arcs.push(Arc {
                id: id.clone(),
                origin: vertex(o)?,
                terminus: vertex(t)?,
                reverse,
            });
        }
        let mut out = vec![Vec::new(); vertices.len()];
        for (i, a) in arcs.iter().enumerate() {
            out[a.origin].push(i);
        }
        Ok(SerreGraph {
            vertices,
            arcs,
            vertex_index,
            arc_index,
            out,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_strs(vertices: &[&str], arcs: &[(&str, &str, &str, &str)]) -> Result<Self, GraphError> {
        SerreGraph::new(
            vertices.iter().map(|s| s.to_string()),
            arcs.iter()
                .map(|(a, o, t, r)| (a.to_string(), o.to_string(), t.to_string(), r.to_string())),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> &Arc {
        &self.arcs[a]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn arc_name(&self, a: usize) -> &str {
        &self.arcs[a].id
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn arc_id(&self, name: &str) -> Option<usize> {
        self.arc_index.get(name).copied()
    }

    pub fn origin(&self, a: usize) -> usize {
        self.arcs[a].origin
    }

    pub fn terminus(&self, a: usize) -> usize {
        self.arcs[a].terminus
    }

    pub fn reverse(&self, a: usize) -> usize {
        self.arcs[a].reverse
    }

    /// `o⁻¹(v)` in declaration order.
    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn is_loop(&self, a: usize) -> bool {
        self.origin(a) == self.terminus(a)
    }

    pub fn is_non_orientable_loop(&self, a: usize) -> bool {
        self.reverse(a) == a
    }

    /// One representative arc per edge: the earlier-declared arc of each pair.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.arcs.len())
            .filter(|&a| a <= self.reverse(a))
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        for (i, a) in self.arcs.iter().enumerate() {
            if self.arcs[a.reverse].reverse != i {
                violations.push(Violation::ReverseNotInvolutive { arc: a.id.clone() });
            } else if self.arcs[a.reverse].origin != a.terminus {
                violations.push(Violation::ReverseMismatch { arc: a.id.clone() });
            }
        }
        let components = self.components();
        if components.len() > 1 {
            violations.push(Violation::Disconnected {
                components: components
                    .into_iter()
                    .map(|c| c.into_iter().map(|v| self.vertices[v].clone()).collect())
                    .collect(),
            });
        }
        violations
    }

    /// Connected components, ignoring arc direction.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut head = 0;
            while head < members.len() {
                let v = members[head];
                head += 1;
                for &a in &self.out[v] {
                    for w in [self.terminus(a), self.origin(self.reverse(a))] {
                        if w < comp.len() && comp[w] == usize::MAX {
                            comp[w] = id;
                            members.push(w);
                        }
                    }
                }
                // incoming arcs whose reversal may be broken
                for a in &self.arcs {
                    if a.terminus == v && comp[a.origin] == usize::MAX {
                        comp[a.origin] = id;
                        members.push(a.origin);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.vertices.len() <= 1 || self.components().len() == 1
    }

    /// Simple (no loops, no parallel edges), connected and acyclic.
    pub fn is_tree(&self) -> bool {
        if self.vertices.is_empty() || !self.is_connected() {
            return false;
        }
        if self.arcs.iter().enumerate().any(|(i, a)| a.origin == a.terminus || a.reverse == i) {
            return false;
        }
        // connected with |E| = |V| - 1 and no loops; parallel edges would
        // force |E| >= |V| on a connected graph, so the count settles it.
        self.edges().len() + 1 == self.vertices.len()
    }

    /// Returns the order `n` if the graph is a cycle graph.
    pub fn cycle_graph_order(&self) -> Option<usize> {
        let n = self.vertices.len();
        if n == 0 || !self.is_connected() {
            return None;
        }
        if self.arcs.iter().enumerate().any(|(i, a)| a.reverse == i) {
            return None;
        }
        match n {
            // one vertex carrying a single orientable loop pair
            1 => (self.arcs.len() == 2).then_some(1),
            // two vertices joined by exactly two edges
            2 => {
                let ok = self.arcs.len() == 4 && self.arcs.iter().all(|a| a.origin != a.terminus);
                ok.then_some(2)
            }
            _ => {
                let ok = (0..n).all(|v| self.degree(v) == 2)
                    && self.arcs.iter().all(|a| a.origin != a.terminus);
                ok.then_some(n)
            }
        }
    }

    /// The two cyclic orientations; the second is the reversal of the first.
    pub fn cyclic_orientations(&self) -> Result<(Vec<usize>, Vec<usize>), GraphError> {
        let n = self.cycle_graph_order().ok_or(GraphError::NotACycleGraph)?;
        let start = self.out[0][0];
        let mut first = vec![start];
        let mut a = start;
        for _ in 1..n {
            let v = self.terminus(a);
            let back = self.reverse(a);
            a = *self.out[v]
                .iter()
                .find(|&&b| b != back)
                .ok_or(GraphError::NotACycleGraph)?;
            first.push(a);
        }
        let mut second: Vec<usize> = first.iter().map(|&a| self.reverse(a)).collect();
        first.sort_unstable();
        second.sort_unstable();
        Ok((first, second))
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &a in &self.out[v] {
                let w = self.terminus(a);
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices strictly closer to `t(a)` than to `o(a)`.
    pub fn half_tree(&self, a: usize) -> Result<Vec<usize>, GraphError> {
        if !self.is_tree() {
            return Err(GraphError::NotATree);
        }
        let from_t = self.distances(self.terminus(a));
        let from_o = self.distances(self.origin(a));
        Ok((0..self.vertices.len())
            .filter(|&v| from_t[v] < from_o[v])
            .collect())
    }

    /// DOT rendering: one directed edge per arc pair, labelled `a / r(a)`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", escape(name));
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{}\";", escape(v));
        }
        for a in self.edges() {
            let arc = &self.arcs[a];
            let o = escape(&self.vertices[arc.origin]);
            let t = escape(&self.vertices[arc.terminus]);
            if arc.reverse == a {
                let _ = writeln!(
                    s,
                    "  \"{o}\" -> \"{t}\" [id=\"{}\", label=\"self-reverse\", dir=none];",
                    escape(&arc.id)
                );
            } else {
                let _ = writeln!(
                    s,
                    "  \"{o}\" -> \"{t}\" [label=\"{} / {}\"];",
                    escape(&arc.id),
                    escape(&self.arcs[arc.reverse].id)
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
