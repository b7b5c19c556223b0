//! Strongly confluent partial orientations (scopos) and their attractors,
//! used to find cotrees and classify the action type.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::diagram::{ArcRef, Diagram, RayDir};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopoError {
    #[error("the diagram has no vertices")]
    EmptyDiagram,
    #[error("the core graph is not a tree")]
    NotATree,
    #[error("exhaustive enumeration needs a finite diagram without rays")]
    HasRays,
    #[error("exhaustive enumeration is limited to {limit} edges, found {edges}")]
    TooManyEdges { edges: usize, limit: usize },
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
}

/// Edge limit for [`enumerate_scopos`].
pub const ENUMERATION_EDGE_LIMIT: usize = 16;

/// A set of arcs containing no arc together with its reversal. Ray arcs at
/// periodic positions stand for all their repetitions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialOrientation {
    arcs: BTreeSet<ArcRef>,
}

impl PartialOrientation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_arcs<I: IntoIterator<Item = ArcRef>>(arcs: I) -> Self {
        PartialOrientation {
            arcs: arcs.into_iter().collect(),
        }
    }

    pub fn from_core<I: IntoIterator<Item = usize>>(arcs: I) -> Self {
        Self::from_arcs(arcs.into_iter().map(ArcRef::Core))
    }

    /// Parses a comma separated list of core arc ids.
    pub fn parse(d: &Diagram, text: &str) -> Result<Self, ScopoError> {
        let mut arcs = BTreeSet::new();
        for id in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let a = d
                .graph()
                .arc_id(id)
                .ok_or_else(|| ScopoError::UnknownArc(id.to_string()))?;
            arcs.insert(ArcRef::Core(a));
        }
        Ok(PartialOrientation { arcs })
    }

    pub fn insert(&mut self, arc: ArcRef) {
        self.arcs.insert(arc);
    }

    pub fn contains(&self, arc: ArcRef) -> bool {
        self.arcs.contains(&arc)
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcRef> + '_ {
        self.arcs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn core_arcs(&self) -> Vec<usize> {
        self.arcs
            .iter()
            .filter_map(|a| match a {
                ArcRef::Core(i) => Some(*i),
                ArcRef::Ray { .. } => None,
            })
            .collect()
    }

    pub fn display<'a>(&'a self, d: &'a Diagram) -> impl fmt::Display + 'a {
        OrientationDisplay { o: self, d }
    }
}

struct OrientationDisplay<'a> {
    o: &'a PartialOrientation,
    d: &'a Diagram,
}

impl fmt::Display for OrientationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.o.arcs().map(|a| self.d.arc_label(a)).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

pub fn reverse_arc(d: &Diagram, arc: ArcRef) -> ArcRef {
    match arc {
        ArcRef::Core(a) => ArcRef::Core(d.graph().reverse(a)),
        ArcRef::Ray { ray, pos, dir } => ArcRef::Ray {
            ray,
            pos,
            dir: match dir {
                RayDir::Out => RayDir::In,
                RayDir::In => RayDir::Out,
            },
        },
    }
}

/// A vertex of the whole diagram: a core vertex or ray vertex `k` of a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Core(usize),
    Ray(usize, usize),
}

fn out_arcs(d: &Diagram, node: Node) -> Vec<(ArcRef, Node)> {
    match node {
        Node::Core(v) => d
            .out_arcs(v)
            .into_iter()
            .map(|a| match a {
                ArcRef::Core(i) => (a, Node::Core(d.graph().terminus(i))),
                ArcRef::Ray { ray, .. } => (a, Node::Ray(ray, 0)),
            })
            .collect(),
        Node::Ray(r, k) => {
            let ray = d.ray(r);
            let pos = ray.position(k);
            let back = if k == 0 {
                Node::Core(ray.attach)
            } else {
                Node::Ray(r, k - 1)
            };
            vec![
                (ArcRef::Ray { ray: r, pos, dir: RayDir::In }, back),
                (
                    ArcRef::Ray {
                        ray: r,
                        pos: ray.next_position(pos),
                        dir: RayDir::Out,
                    },
                    Node::Ray(r, k + 1),
                ),
            ]
        }
    }
}

/// Representative nodes: every core vertex and one ray vertex per pattern
/// position. Conditions local to a vertex only need checking on these.
fn representatives(d: &Diagram) -> Vec<Node> {
    let mut nodes: Vec<Node> = (0..d.vertex_count()).map(Node::Core).collect();
    for (r, ray) in d.rays().iter().enumerate() {
        nodes.extend((0..ray.segments.len()).map(|k| Node::Ray(r, k)));
    }
    nodes
}

/// Checks that `o` is strongly confluent with single colours on its arcs.
pub fn is_scopo(d: &Diagram, o: &PartialOrientation) -> bool {
    for arc in o.arcs() {
        if o.contains(reverse_arc(d, arc)) || !d.is_singleton(arc) {
            return false;
        }
    }
    for node in representatives(d) {
        let outs = out_arcs(d, node);
        let chosen: Vec<ArcRef> = outs
            .iter()
            .map(|(a, _)| *a)
            .filter(|a| o.contains(*a))
            .collect();
        match chosen.len() {
            0 => {}
            1 => {
                for (b, _) in &outs {
                    if *b != chosen[0] && !o.contains(reverse_arc(d, *b)) {
                        return false;
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Vertices of a ray that belong to a set: some initial indices below the
/// ray's lead and optionally every vertex from the lead on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RayPart {
    pub head: Vec<usize>,
    pub tail: bool,
}

impl RayPart {
    pub fn is_empty(&self) -> bool {
        self.head.is_empty() && !self.tail
    }

    pub fn contains(&self, lead: usize, k: usize) -> bool {
        if k >= lead {
            self.tail
        } else {
            self.head.contains(&k)
        }
    }
}

/// A set of vertices of the whole diagram.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct VertexSet {
    pub core: Vec<usize>,
    pub rays: Vec<RayPart>,
}

impl VertexSet {
    pub fn contains(&self, d: &Diagram, node: Node) -> bool {
        match node {
            Node::Core(v) => self.core.binary_search(&v).is_ok(),
            Node::Ray(r, k) => self.rays[r].contains(d.ray(r).lead, k),
        }
    }

    pub fn has_ray_vertices(&self) -> bool {
        self.rays.iter().any(|p| !p.is_empty())
    }

    pub fn display<'a>(&'a self, d: &'a Diagram) -> impl fmt::Display + 'a {
        VertexSetDisplay { s: self, d }
    }
}

struct VertexSetDisplay<'a> {
    s: &'a VertexSet,
    d: &'a Diagram,
}

impl fmt::Display for VertexSetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .s
            .core
            .iter()
            .map(|&v| self.d.graph().vertex_name(v).to_string())
            .collect();
        for (r, part) in self.s.rays.iter().enumerate() {
            let ray = self.d.ray(r);
            let full_head = part.head.len() == ray.lead;
            if part.tail && full_head {
                parts.push(ray.id.clone());
            } else {
                for &k in &part.head {
                    parts.push(crate::diagram::ray_vertex_name(&ray.id, k));
                }
                if part.tail {
                    parts.push(format!("{}#{}..", ray.id, ray.lead));
                }
            }
        }
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    SingleVertex,
    /// One vertex carrying one non-orientable loop and nothing else.
    NonOrientableLoop,
    Cycle(usize),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cotree {
    pub vertices: VertexSet,
    pub shape: Shape,
}

impl Cotree {
    fn from_set(d: &Diagram, vertices: VertexSet) -> Self {
        let shape = shape_of(d, &vertices);
        Cotree { vertices, shape }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self.shape, Shape::Cycle(_))
    }

    /// Core arcs with both ends in the cotree.
    pub fn core_arcs(&self, d: &Diagram) -> Vec<usize> {
        inner_arcs(d, &self.vertices.core)
    }
}

fn inner_arcs(d: &Diagram, core: &[usize]) -> Vec<usize> {
    let g = d.graph();
    (0..g.arc_count())
        .filter(|&a| {
            core.binary_search(&g.origin(a)).is_ok() && core.binary_search(&g.terminus(a)).is_ok()
        })
        .collect()
}

fn shape_of(d: &Diagram, set: &VertexSet) -> Shape {
    if set.has_ray_vertices() || set.core.is_empty() {
        return Shape::Other;
    }
    let g = d.graph();
    let arcs = inner_arcs(d, &set.core);
    if set.core.len() == 1 {
        if arcs.is_empty() {
            return Shape::SingleVertex;
        }
        if arcs.len() == 1 && g.is_non_orientable_loop(arcs[0]) {
            return Shape::NonOrientableLoop;
        }
    }
    if arcs.iter().any(|&a| g.is_non_orientable_loop(a)) {
        return Shape::Other;
    }
    let mut degree = vec![0usize; g.vertex_count()];
    for &a in &arcs {
        degree[g.origin(a)] += 1;
    }
    if set.core.iter().all(|&v| degree[v] == 2) {
        Shape::Cycle(set.core.len())
    } else {
        Shape::Other
    }
}

/// The two cyclic orientations of a cycle-shaped vertex set, each a list of
/// core arcs in traversal order. The second is the reversal of the first.
pub fn cyclic_orientations(d: &Diagram, cotree: &Cotree) -> Option<[Vec<usize>; 2]> {
    if !cotree.is_cyclic() {
        return None;
    }
    let g = d.graph();
    let arcs = cotree.core_arcs(d);
    let first = *arcs.first()?;
    let mut walk = vec![first];
    let mut current = first;
    loop {
        let v = g.terminus(current);
        let back = g.reverse(current);
        let next = arcs
            .iter()
            .copied()
            .find(|&b| g.origin(b) == v && b != back)
            .unwrap_or(back);
        if next == first {
            break;
        }
        walk.push(next);
        current = next;
        if walk.len() > arcs.len() {
            return None;
        }
    }
    let reversed: Vec<usize> = walk.iter().rev().map(|&a| g.reverse(a)).collect();
    Some([walk, reversed])
}

/// The orientation `O_{Γ'}`: every arc lying on a projecting path to the
/// cotree, oriented towards it.
pub fn cotree_orientation(d: &Diagram, set: &VertexSet) -> PartialOrientation {
    let g = d.graph();
    let mut o = PartialOrientation::new();
    let mut dist: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &v in &set.core {
        dist[v] = Some(0);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &a in g.out_arcs(v) {
            let w = g.terminus(a);
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                o.insert(ArcRef::Core(g.reverse(a)));
                queue.push_back(w);
            }
        }
    }
    for (r, ray) in d.rays().iter().enumerate() {
        let part = set.rays.get(r).cloned().unwrap_or_default();
        for pos in 0..ray.segments.len() {
            let inside = if pos >= ray.lead { part.tail } else { part.head.contains(&pos) };
            if !inside {
                o.insert(ArcRef::Ray { ray: r, pos, dir: RayDir::In });
            }
        }
    }
    o
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Attractor {
    Periodic(VertexSet),
    End(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScopoType {
    /// The attractor is a cotree and `O` is its projecting orientation.
    Cotree,
    /// The attractor is a cyclic cotree carrying a cyclic orientation.
    Cyclic,
    /// Every arc is oriented towards an end.
    End,
}

impl ScopoType {
    pub fn letter(self) -> char {
        match self {
            ScopoType::Cotree => 'a',
            ScopoType::Cyclic => 'b',
            ScopoType::End => 'c',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractorResult {
    pub attractor: Attractor,
    pub kind: ScopoType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TailMode {
    Outward,
    Inward,
    Free,
}

fn tail_mode(d: &Diagram, o: &PartialOrientation, r: usize) -> TailMode {
    let ray = d.ray(r);
    let periodic = ray.periodic_positions();
    let has = |pos, dir| o.contains(ArcRef::Ray { ray: r, pos, dir });
    if periodic.clone().all(|p| has(p, RayDir::Out)) {
        TailMode::Outward
    } else if periodic.clone().all(|p| has(p, RayDir::In)) {
        TailMode::Inward
    } else {
        TailMode::Free
    }
}

fn step(d: &Diagram, o: &PartialOrientation, node: Node) -> Node {
    out_arcs(d, node)
        .into_iter()
        .find(|(a, _)| o.contains(*a))
        .map_or(node, |(_, w)| w)
}

/// Iterates `v ↦ t(a)` for the unique `a ∈ o⁻¹(v) ∩ O` and reports where the
/// dynamics settles. `o` must be a scopo.
pub fn attractor(d: &Diagram, o: &PartialOrientation) -> AttractorResult {
    for r in 0..d.rays().len() {
        if tail_mode(d, o, r) == TailMode::Outward {
            return AttractorResult {
                attractor: Attractor::End(r),
                kind: ScopoType::End,
            };
        }
    }
    let mut nodes: Vec<Node> = (0..d.vertex_count()).map(Node::Core).collect();
    for (r, ray) in d.rays().iter().enumerate() {
        nodes.extend((0..ray.segments.len()).map(|k| Node::Ray(r, k)));
    }
    let bound = nodes.len() + 1;
    let periodic = |start: Node| {
        let mut x = start;
        for _ in 0..bound {
            x = step(d, o, x);
            if x == start {
                return true;
            }
        }
        false
    };

    let mut set = VertexSet {
        core: Vec::new(),
        rays: vec![RayPart::default(); d.rays().len()],
    };
    for &node in &nodes {
        if !periodic(node) {
            continue;
        }
        match node {
            Node::Core(v) => set.core.push(v),
            Node::Ray(r, k) => {
                if k < d.ray(r).lead {
                    set.rays[r].head.push(k);
                }
            }
        }
    }
    for r in 0..d.rays().len() {
        set.rays[r].tail = tail_mode(d, o, r) == TailMode::Free;
    }
    let cyclic = o.core_arcs().into_iter().any(|a| {
        let g = d.graph();
        set.core.binary_search(&g.origin(a)).is_ok() && set.core.binary_search(&g.terminus(a)).is_ok()
    });
    AttractorResult {
        attractor: Attractor::Periodic(set),
        kind: if cyclic { ScopoType::Cyclic } else { ScopoType::Cotree },
    }
}

/// Every scopo of a finite diagram, by exhaustive filtering of the
/// `3^edges` partial orientations.
pub fn enumerate_scopos(d: &Diagram) -> Result<Vec<PartialOrientation>, ScopoError> {
    if d.has_rays() {
        return Err(ScopoError::HasRays);
    }
    let g = d.graph();
    let edges = g.edges();
    if edges.len() > ENUMERATION_EDGE_LIMIT {
        return Err(ScopoError::TooManyEdges {
            edges: edges.len(),
            limit: ENUMERATION_EDGE_LIMIT,
        });
    }
    let mut choice = vec![0u8; edges.len()];
    let mut out = Vec::new();
    loop {
        let o = PartialOrientation::from_core(edges.iter().zip(&choice).filter_map(|(&a, &c)| {
            match c {
                1 => Some(a),
                2 => Some(g.reverse(a)),
                _ => None,
            }
        }));
        if is_scopo(d, &o) {
            out.push(o);
        }
        let mut i = 0;
        loop {
            if i == edges.len() {
                return Ok(out);
            }
            let limit = if g.is_non_orientable_loop(edges[i]) { 1 } else { 3 };
            choice[i] += 1;
            if choice[i] < limit {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn ray_prunable_part(d: &Diagram, r: usize) -> RayPart {
    let ray = d.ray(r);
    let singleton = |pos| d.is_singleton(ArcRef::Ray { ray: r, pos, dir: RayDir::In });
    if !ray.periodic_positions().all(singleton) {
        return RayPart {
            head: (0..ray.lead).collect(),
            tail: true,
        };
    }
    let mut keep = ray.lead;
    while keep > 0 && singleton(keep - 1) {
        keep -= 1;
    }
    RayPart {
        head: (0..keep).collect(),
        tail: false,
    }
}

/// Core vertices that pruning may delete next. Such a vertex has no loop or
/// attached ray, and its only edge into the rest has a single colour on the
/// inward arc.
fn prunable_leaves(d: &Diagram, alive: &[bool], rays: &[RayPart]) -> Vec<usize> {
    let g = d.graph();
    if alive.iter().filter(|&&x| x).count() <= 1 {
        return Vec::new();
    }
    (0..g.vertex_count())
        .filter(|&v| alive[v])
        .filter(|&v| d.rays_at(v).all(|r| rays[r].is_empty()))
        .filter(|&v| {
            let arcs: Vec<usize> = g
                .out_arcs(v)
                .iter()
                .copied()
                .filter(|&a| alive[g.terminus(a)])
                .collect();
            arcs.len() == 1 && !g.is_loop(arcs[0]) && d.colour_set(arcs[0]).is_singleton()
        })
        .collect()
}

/// Prunes leaves in the order picked by `choose` (given the current
/// candidates, returns an index into them). Without canonicalisation.
pub fn prune_with<F>(d: &Diagram, mut choose: F) -> Result<VertexSet, ScopoError>
where
    F: FnMut(&[usize]) -> usize,
{
    if d.vertex_count() == 0 {
        return Err(ScopoError::EmptyDiagram);
    }
    let rays: Vec<RayPart> = (0..d.rays().len()).map(|r| ray_prunable_part(d, r)).collect();
    let mut alive = vec![true; d.vertex_count()];
    loop {
        let leaves = prunable_leaves(d, &alive, &rays);
        if leaves.is_empty() {
            break;
        }
        let pick = choose(&leaves).min(leaves.len() - 1);
        alive[leaves[pick]] = false;
    }
    Ok(VertexSet {
        core: (0..d.vertex_count()).filter(|&v| alive[v]).collect(),
        rays,
    })
}

/// The smallest cotree, by pruning singleton leaves. When several single
/// vertex cotrees exist the first of them is returned.
pub fn minimal_cotree(d: &Diagram) -> Result<Cotree, ScopoError> {
    let set = prune_with(d, |_| 0)?;
    let cotree = Cotree::from_set(d, set);
    if cotree.shape == Shape::SingleVertex {
        if let Ok(vs) = single_vertex_cotrees(d) {
            if let Some(&v) = vs.first() {
                return Ok(Cotree::from_set(
                    d,
                    VertexSet {
                        core: vec![v],
                        rays: cotree.vertices.rays.clone(),
                    },
                ));
            }
        }
    }
    Ok(cotree)
}

fn rays_prunable(d: &Diagram) -> bool {
    (0..d.rays().len()).all(|r| ray_prunable_part(d, r).is_empty())
}

/// Vertices `v` such that `{v}` is a cotree: the core is a tree, every ray
/// prunes away completely and every arc pointing towards `v` carries a
/// single colour.
pub fn single_vertex_cotrees(d: &Diagram) -> Result<Vec<usize>, ScopoError> {
    let g = d.graph();
    if g.vertex_count() == 0 {
        return Err(ScopoError::EmptyDiagram);
    }
    if !g.is_tree() || !rays_prunable(d) {
        return Ok(Vec::new());
    }
    Ok((0..g.vertex_count())
        .filter(|&v| arcs_towards(d, v).iter().all(|&a| d.colour_set(a).is_singleton()))
        .collect())
}

/// In a tree core, every arc pointing towards `v`.
fn arcs_towards(d: &Diagram, v: usize) -> Vec<usize> {
    let g = d.graph();
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    let mut queue = VecDeque::from([v]);
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        for &a in g.out_arcs(x) {
            let y = g.terminus(a);
            if !seen[y] {
                seen[y] = true;
                out.push(g.reverse(a));
                queue.push_back(y);
            }
        }
    }
    out
}

/// Rays whose end every arc of the whole diagram oriented towards it carries
/// a single colour.
pub fn horocyclic_ends(d: &Diagram) -> Result<Vec<usize>, ScopoError> {
    if !d.graph().is_tree() {
        return Err(ScopoError::NotATree);
    }
    let mut out = Vec::new();
    for (r, ray) in d.rays().iter().enumerate() {
        let along = (0..ray.segments.len())
            .all(|pos| d.is_singleton(ArcRef::Ray { ray: r, pos, dir: RayDir::Out }));
        let core = arcs_towards(d, ray.attach)
            .iter()
            .all(|&a| d.colour_set(a).is_singleton());
        let others = d.rays().iter().enumerate().filter(|(s, _)| *s != r).all(|(s, other)| {
            (0..other.segments.len())
                .all(|pos| d.is_singleton(ArcRef::Ray { ray: s, pos, dir: RayDir::In }))
        });
        if along && core && others {
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionType {
    FixedVertex { witnesses: Vec<usize> },
    Inversion { vertex: usize, arc: usize },
    Lineal { cotree: Cotree },
    Focal { cotree: Cotree, orientation: Vec<usize> },
    Horocyclic { ray: usize },
    General { cotree: Cotree },
}

impl ActionType {
    pub fn label(&self) -> &'static str {
        match self {
            ActionType::FixedVertex { .. } => "FixedVertex",
            ActionType::Inversion { .. } => "Inversion",
            ActionType::Lineal { .. } => "Lineal",
            ActionType::Focal { .. } => "Focal",
            ActionType::Horocyclic { .. } => "Horocyclic",
            ActionType::General { .. } => "General",
        }
    }

    /// The `type=<label> witness=<...>` record.
    pub fn record(&self, d: &Diagram) -> String {
        let g = d.graph();
        let names = |vs: &[usize]| {
            vs.iter()
                .map(|&v| g.vertex_name(v).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let arcs = |arcs: &[usize]| {
            arcs.iter()
                .map(|&a| g.arc_name(a).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let witness = match self {
            ActionType::FixedVertex { witnesses } => names(witnesses),
            ActionType::Inversion { vertex, arc } => {
                format!("{}:{}", g.vertex_name(*vertex), g.arc_name(*arc))
            }
            ActionType::Lineal { cotree } | ActionType::General { cotree } => {
                cotree.vertices.display(d).to_string()
            }
            ActionType::Focal { cotree, orientation } => format!(
                "{} orientation={}",
                cotree.vertices.display(d),
                arcs(orientation)
            ),
            ActionType::Horocyclic { ray } => d.ray(*ray).id.clone(),
        };
        format!("type={} witness={}", self.label(), witness)
    }
}

/// Decides which of the six action types the group of `d` has, probing the
/// shapes in the order fixed vertex, inversion, lineal, focal, horocyclic.
pub fn classify(d: &Diagram) -> Result<ActionType, ScopoError> {
    let witnesses = single_vertex_cotrees(d)?;
    if !witnesses.is_empty() {
        return Ok(ActionType::FixedVertex { witnesses });
    }
    let cotree = minimal_cotree(d)?;
    let g = d.graph();
    match cotree.shape {
        Shape::NonOrientableLoop => {
            let v = cotree.vertices.core[0];
            let arc = g.out_arcs(v)[0];
            if d.colour_set(arc).is_singleton() {
                return Ok(ActionType::Inversion { vertex: v, arc });
            }
        }
        Shape::Cycle(_) => {
            let arcs = cotree.core_arcs(d);
            if arcs.iter().all(|&a| d.colour_set(a).is_singleton()) {
                return Ok(ActionType::Lineal { cotree });
            }
            let orientations = cyclic_orientations(d, &cotree).expect("cycle shape");
            let good: Vec<&Vec<usize>> = orientations
                .iter()
                .filter(|o| o.iter().all(|&a| d.colour_set(a).is_singleton()))
                .collect();
            if good.len() == 1 {
                let orientation = good[0].clone();
                return Ok(ActionType::Focal { cotree, orientation });
            }
        }
        _ => {}
    }
    if g.is_tree() {
        let ends = horocyclic_ends(d)?;
        if ends.len() == 1 {
            return Ok(ActionType::Horocyclic { ray: ends[0] });
        }
    }
    Ok(ActionType::General { cotree })
}
