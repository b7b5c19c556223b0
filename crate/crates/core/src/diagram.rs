//! Local action diagrams: a finite core Serre graph with colour sets on its
//! arcs and a local action at each vertex, plus optional eventually periodic
//! one-sided rays.
//!
//! A ray gadget hangs off a core vertex and repeats a pattern of segments
//! forever. Ray vertex `k` is joined to its predecessor (the attachment vertex
//! when `k == 0`) by an outward arc `k+` and its reversal `k-`. Segment
//! positions `0..lead` are used once; positions `lead..lead + period` repeat.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::perm::{PermError, PermGroup, DEFAULT_CAP};
use crate::sgraph::{GraphError, SerreGraph, Violation as GraphViolation};

pub mod format;

pub use format::{load, save};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex `{vertex}`: {source}")]
    Action { vertex: String, source: PermError },
    #[error("ray `{ray}` segment {segment}: {source}")]
    Segment {
        ray: String,
        segment: usize,
        source: PermError,
    },
    #[error("unknown colour `{0}`")]
    UnknownColour(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("diagram is invalid: {0}")]
    Invalid(String),
}

/// Colours carried by one arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColourSet {
    Finite(Vec<String>),
    /// An infinite colour set known only by name.
    Infinite(String),
}

impl ColourSet {
    pub fn finite<I, S>(colours: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ColourSet::Finite(colours.into_iter().map(Into::into).collect())
    }

    /// `None` for infinite sets.
    pub fn len(&self) -> Option<usize> {
        match self {
            ColourSet::Finite(c) => Some(c.len()),
            ColourSet::Infinite(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == Some(1)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ColourSet::Infinite(_))
    }

    pub fn colours(&self) -> &[String] {
        match self {
            ColourSet::Finite(c) => c,
            ColourSet::Infinite(_) => &[],
        }
    }
}

/// Flags describing a local action that cannot be given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicAction {
    pub trivial: bool,
    pub semiregular: bool,
    pub finite_base: bool,
    /// Arc ids (or ray ids, for attachment arcs) whose colour sets are the
    /// declared orbits.
    pub orbits: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalAction {
    Explicit(PermGroup),
    Symbolic(SymbolicAction),
}

impl LocalAction {
    pub fn is_trivial(&self) -> bool {
        match self {
            LocalAction::Explicit(g) => g.is_trivial(),
            LocalAction::Symbolic(s) => s.trivial,
        }
    }

    pub fn is_semiregular(&self) -> Result<bool, PermError> {
        match self {
            LocalAction::Explicit(g) => g.is_semiregular(DEFAULT_CAP),
            LocalAction::Symbolic(s) => Ok(s.semiregular || s.trivial),
        }
    }

    pub fn explicit(&self) -> Option<&PermGroup> {
        match self {
            LocalAction::Explicit(g) => Some(g),
            LocalAction::Symbolic(_) => None,
        }
    }
}

/// One pattern position of a ray: the arc arriving at the new vertex and the
/// local action there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Colours of the outward arc (away from the core).
    pub out: Vec<String>,
    /// Colours of the inward arc (toward the core).
    pub inward: Vec<String>,
    /// Acts on `inward` followed by the next position's `out`.
    pub action: PermGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayGadget {
    pub id: String,
    pub attach: usize,
    pub lead: usize,
    pub segments: Vec<Segment>,
}

impl RayGadget {
    pub fn period(&self) -> usize {
        self.segments.len().saturating_sub(self.lead)
    }

    /// Pattern position of ray vertex (and arriving arc) `k`.
    pub fn position(&self, k: usize) -> usize {
        if k < self.lead {
            k
        } else {
            self.lead + (k - self.lead) % self.period().max(1)
        }
    }

    /// Position following `pos` along the ray.
    pub fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.segments.len() {
            pos + 1
        } else {
            self.lead
        }
    }

    /// Positions that repeat forever.
    pub fn periodic_positions(&self) -> std::ops::Range<usize> {
        self.lead..self.segments.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RayDir {
    Out,
    In,
}

/// An arc of the whole diagram: a core arc or a pattern arc of a ray.
/// A ray arc at a periodic position stands for every repetition of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcRef {
    Core(usize),
    Ray { ray: usize, pos: usize, dir: RayDir },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramViolation {
    Graph(GraphViolation),
    EmptyColourSet { arc: String },
    DuplicateColour { colour: String },
    OrbitMismatch { vertex: String, orbits: Vec<Vec<String>> },
    MissingAction { vertex: String },
    ExplicitOnInfinite { vertex: String },
    SymbolicOnFinite { vertex: String },
    SymbolicInconsistent { vertex: String, reason: String },
    BadRay { ray: String, reason: String },
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DiagramViolation::*;
        match self {
            Graph(v) => write!(f, "{v}"),
            EmptyColourSet { arc } => write!(f, "arc {arc}: empty colour set"),
            DuplicateColour { colour } => write!(f, "colour {colour} declared more than once"),
            OrbitMismatch { vertex, orbits } => {
                let parts: Vec<String> = orbits.iter().map(|o| o.join(" ")).collect();
                write!(
                    f,
                    "vertex {vertex}: orbits {{{}}} differ from the colour sets",
                    parts.join("} {")
                )
            }
            MissingAction { vertex } => write!(f, "vertex {vertex}: no local action"),
            ExplicitOnInfinite { vertex } => {
                write!(f, "vertex {vertex}: generators given on an infinite colour set")
            }
            SymbolicOnFinite { vertex } => {
                write!(f, "vertex {vertex}: symbolic action on finite colour sets")
            }
            SymbolicInconsistent { vertex, reason } => write!(f, "vertex {vertex}: {reason}"),
            BadRay { ray, reason } => write!(f, "ray {ray}: {reason}"),
        }
    }
}

/// A local action diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub(crate) graph: SerreGraph,
    pub(crate) colours: Vec<ColourSet>,
    pub(crate) actions: Vec<Option<LocalAction>>,
    pub(crate) rays: Vec<RayGadget>,
    pub(crate) frontier: Vec<bool>,
}

impl Diagram {
    pub fn graph(&self) -> &SerreGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn colour_set(&self, a: usize) -> &ColourSet {
        &self.colours[a]
    }

    /// Local action at a core vertex. Vertices left without an action line
    /// carry the trivial group when their colour sets are finite.
    pub fn action(&self, v: usize) -> Option<&LocalAction> {
        self.actions[v].as_ref()
    }

    pub fn rays(&self) -> &[RayGadget] {
        &self.rays
    }

    pub fn ray(&self, r: usize) -> &RayGadget {
        &self.rays[r]
    }

    pub fn has_rays(&self) -> bool {
        !self.rays.is_empty()
    }

    pub fn rays_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rays
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.attach == v)
            .map(|(i, _)| i)
    }

    pub fn is_frontier(&self, v: usize) -> bool {
        self.frontier[v]
    }

    pub fn vertex_id(&self, name: &str) -> Result<usize, DiagramError> {
        self.graph
            .vertex_id(name)
            .ok_or_else(|| DiagramError::UnknownVertex(name.to_string()))
    }

    pub fn ray_id(&self, name: &str) -> Option<usize> {
        self.rays.iter().position(|r| r.id == name)
    }

    /// Colour set of any arc of the diagram.
    pub fn colours_of(&self, arc: ArcRef) -> ColourSet {
        match arc {
            ArcRef::Core(a) => self.colours[a].clone(),
            ArcRef::Ray { ray, pos, dir } => {
                let seg = &self.rays[ray].segments[pos];
                ColourSet::Finite(match dir {
                    RayDir::Out => seg.out.clone(),
                    RayDir::In => seg.inward.clone(),
                })
            }
        }
    }

    pub fn is_singleton(&self, arc: ArcRef) -> bool {
        match arc {
            ArcRef::Core(a) => self.colours[a].is_singleton(),
            ArcRef::Ray { ray, pos, dir } => {
                let seg = &self.rays[ray].segments[pos];
                match dir {
                    RayDir::Out => seg.out.len() == 1,
                    RayDir::In => seg.inward.len() == 1,
                }
            }
        }
    }

    pub fn arc_label(&self, arc: ArcRef) -> String {
        match arc {
            ArcRef::Core(a) => self.graph.arc_name(a).to_string(),
            ArcRef::Ray { ray, pos, dir } => format!(
                "{}[{}]{}",
                self.rays[ray].id,
                pos,
                if dir == RayDir::Out { "+" } else { "-" }
            ),
        }
    }

    /// The arc whose colour set contains `colour`. Names of infinite colour
    /// sets resolve to their arc.
    pub fn colour_type(&self, colour: &str) -> Result<ArcRef, DiagramError> {
        for (a, set) in self.colours.iter().enumerate() {
            let hit = match set {
                ColourSet::Finite(c) => c.iter().any(|x| x == colour),
                ColourSet::Infinite(name) => name == colour,
            };
            if hit {
                return Ok(ArcRef::Core(a));
            }
        }
        for (r, ray) in self.rays.iter().enumerate() {
            for (pos, seg) in ray.segments.iter().enumerate() {
                if seg.out.iter().any(|x| x == colour) {
                    return Ok(ArcRef::Ray { ray: r, pos, dir: RayDir::Out });
                }
                if seg.inward.iter().any(|x| x == colour) {
                    return Ok(ArcRef::Ray { ray: r, pos, dir: RayDir::In });
                }
            }
        }
        Err(DiagramError::UnknownColour(colour.to_string()))
    }

    /// `o⁻¹(v)` over the whole diagram: core arcs, then attachment arcs.
    pub fn out_arcs(&self, v: usize) -> Vec<ArcRef> {
        let mut out: Vec<ArcRef> = self.graph.out_arcs(v).iter().map(|&a| ArcRef::Core(a)).collect();
        out.extend(self.rays_at(v).map(|r| ArcRef::Ray {
            ray: r,
            pos: 0,
            dir: RayDir::Out,
        }));
        out
    }

    /// `X_v` in canonical order, or `None` if some colour set at `v` is infinite.
    pub fn vertex_colours(&self, v: usize) -> Option<Vec<String>> {
        let mut all = Vec::new();
        for arc in self.out_arcs(v) {
            match self.colours_of(arc) {
                ColourSet::Finite(c) => all.extend(c),
                ColourSet::Infinite(_) => return None,
            }
        }
        Some(all)
    }

    /// Colours moved by the action at a frontier vertex that belong to no arc
    /// of this diagram.
    pub fn dangling_colours(&self, v: usize) -> Vec<String> {
        let present = self.vertex_colours(v).unwrap_or_default();
        match self.action(v).and_then(LocalAction::explicit) {
            Some(g) => g.universe()[present.len().min(g.degree())..].to_vec(),
            None => Vec::new(),
        }
    }

    pub fn has_infinite_colours(&self, v: usize) -> bool {
        self.graph
            .out_arcs(v)
            .iter()
            .any(|&a| self.colours[a].is_infinite())
    }

    /// True when every action on core vertices and ray segments is trivial.
    pub fn all_actions_trivial(&self) -> bool {
        self.actions
            .iter()
            .all(|a| a.as_ref().is_none_or(LocalAction::is_trivial))
            && self
                .rays
                .iter()
                .all(|r| r.segments.iter().all(|s| s.action.is_trivial()))
    }

    /// Core edge count (arc pairs, non-orientable loops counted once).
    pub fn edge_count(&self) -> usize {
        self.graph.edges().len()
    }

    pub fn validate(&self) -> Vec<DiagramViolation> {
        let mut out: Vec<DiagramViolation> = self
            .graph
            .validate()
            .into_iter()
            .map(DiagramViolation::Graph)
            .collect();

        for (a, set) in self.colours.iter().enumerate() {
            if set.is_empty() {
                out.push(DiagramViolation::EmptyColourSet {
                    arc: self.graph.arc_name(a).to_string(),
                });
            }
        }
        for ray in &self.rays {
            for (k, seg) in ray.segments.iter().enumerate() {
                if seg.out.is_empty() || seg.inward.is_empty() {
                    out.push(DiagramViolation::EmptyColourSet {
                        arc: format!("{}[{k}]", ray.id),
                    });
                }
            }
        }

        let mut seen = HashSet::new();
        let mut all_names: Vec<&str> = Vec::new();
        for set in &self.colours {
            match set {
                ColourSet::Finite(c) => all_names.extend(c.iter().map(String::as_str)),
                ColourSet::Infinite(n) => all_names.push(n),
            }
        }
        for ray in &self.rays {
            for seg in &ray.segments {
                all_names.extend(seg.out.iter().map(String::as_str));
                all_names.extend(seg.inward.iter().map(String::as_str));
            }
        }
        let mut reported = HashSet::new();
        for name in all_names {
            if !seen.insert(name) && reported.insert(name) {
                out.push(DiagramViolation::DuplicateColour {
                    colour: name.to_string(),
                });
            }
        }

        for v in 0..self.vertex_count() {
            self.validate_vertex(v, &mut out);
        }

        for ray in &self.rays {
            if ray.period() == 0 {
                out.push(DiagramViolation::BadRay {
                    ray: ray.id.clone(),
                    reason: "period must be at least 1".into(),
                });
                continue;
            }
            for (k, seg) in ray.segments.iter().enumerate() {
                let next = &ray.segments[ray.next_position(k)];
                let expected = partition_of(&[&seg.inward, &next.out]);
                let got = normalise(seg.action.orbit_names());
                if got != expected {
                    out.push(DiagramViolation::BadRay {
                        ray: ray.id.clone(),
                        reason: format!(
                            "segment {k}: orbits {} differ from the colour sets",
                            got.iter()
                                .map(|o| format!("{{{}}}", o.join(" ")))
                                .collect::<Vec<_>>()
                                .join(" ")
                        ),
                    });
                }
            }
        }
        out
    }

    fn validate_vertex(&self, v: usize, out: &mut Vec<DiagramViolation>) {
        let vertex = self.graph.vertex_name(v).to_string();
        let infinite = self.has_infinite_colours(v);
        match &self.actions[v] {
            None if infinite => out.push(DiagramViolation::MissingAction { vertex }),
            None => {
                // implicit trivial action: every colour set must be a singleton
                if self.out_arcs(v).iter().any(|&a| !self.is_singleton(a)) && !self.frontier[v] {
                    let orbits = self
                        .vertex_colours(v)
                        .unwrap_or_default()
                        .into_iter()
                        .map(|c| vec![c])
                        .collect();
                    out.push(DiagramViolation::OrbitMismatch { vertex, orbits });
                }
            }
            Some(LocalAction::Explicit(g)) => {
                if infinite {
                    out.push(DiagramViolation::ExplicitOnInfinite { vertex });
                    return;
                }
                if self.frontier[v] {
                    return;
                }
                let sets: Vec<Vec<String>> = self
                    .out_arcs(v)
                    .into_iter()
                    .map(|a| self.colours_of(a).colours().to_vec())
                    .collect();
                let refs: Vec<&Vec<String>> = sets.iter().collect();
                let expected = partition_of(&refs);
                let got = normalise(g.orbit_names());
                if got != expected {
                    out.push(DiagramViolation::OrbitMismatch { vertex, orbits: got });
                }
            }
            Some(LocalAction::Symbolic(s)) => {
                if !infinite {
                    out.push(DiagramViolation::SymbolicOnFinite { vertex });
                    return;
                }
                let mut reasons = Vec::new();
                if s.trivial && !(s.semiregular && s.finite_base) {
                    reasons.push("trivial=true requires semiregular=true and finite_base=true");
                }
                if s.trivial {
                    reasons.push("a trivial action cannot have an infinite orbit");
                }
                let mut declared: Vec<&str> = s.orbits.iter().map(String::as_str).collect();
                declared.sort_unstable();
                let mut actual: Vec<String> = self
                    .graph
                    .out_arcs(v)
                    .iter()
                    .map(|&a| self.graph.arc_name(a).to_string())
                    .collect();
                actual.extend(self.rays_at(v).map(|r| self.rays[r].id.clone()));
                actual.sort_unstable();
                if declared != actual.iter().map(String::as_str).collect::<Vec<_>>() {
                    reasons.push("declared orbits differ from the arcs at the vertex");
                }
                for reason in reasons {
                    out.push(DiagramViolation::SymbolicInconsistent {
                        vertex: vertex.clone(),
                        reason: reason.to_string(),
                    });
                }
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Replaces every ray by `depth` explicit vertices. The last vertex of each
    /// ray (or the attachment vertex when `depth == 0`) is flagged frontier:
    /// its action still acts on the colours of the missing onward arc.
    pub fn truncate_rays(&self, depth: usize) -> Diagram {
        if self.rays.is_empty() {
            return self.clone();
        }
        let mut vertices: Vec<String> = self.graph.vertices().to_vec();
        let mut arcs: Vec<(String, String, String, String)> = self
            .graph
            .arcs()
            .iter()
            .map(|a| {
                (
                    a.id.clone(),
                    self.graph.vertex_name(a.origin).to_string(),
                    self.graph.vertex_name(a.terminus).to_string(),
                    self.graph.arc_name(a.reverse).to_string(),
                )
            })
            .collect();
        let mut colours = self.colours.clone();
        let mut actions = self.actions.clone();
        let mut frontier = self.frontier.clone();

        for ray in &self.rays {
            if depth == 0 {
                frontier[ray.attach] = true;
                continue;
            }
            let mut prev = self.graph.vertex_name(ray.attach).to_string();
            for k in 0..depth {
                let pos = ray.position(k);
                let seg = &ray.segments[pos];
                let here = ray_vertex_name(&ray.id, k);
                let (plus, minus) = ray_arc_names(&ray.id, k);
                vertices.push(here.clone());
                arcs.push((plus.clone(), prev.clone(), here.clone(), minus.clone()));
                colours.push(ColourSet::Finite(
                    seg.out.iter().map(|c| ray_colour_name(c, k)).collect(),
                ));
                arcs.push((minus, here.clone(), prev, plus));
                colours.push(ColourSet::Finite(
                    seg.inward.iter().map(|c| ray_colour_name(c, k)).collect(),
                ));
                let next_out = &ray.segments[ray.next_position(pos)].out;
                let universe: Vec<String> = seg
                    .inward
                    .iter()
                    .map(|c| ray_colour_name(c, k))
                    .chain(next_out.iter().map(|c| ray_colour_name(c, k + 1)))
                    .collect();
                let group = PermGroup::new(universe, seg.action.generators().to_vec())
                    .expect("renaming preserves the universe");
                actions.push(Some(LocalAction::Explicit(group)));
                frontier.push(k + 1 == depth);
                prev = here;
            }
        }
        let graph = SerreGraph::new(vertices, arcs).expect("materialised ids resolve");
        Diagram {
            graph,
            colours,
            actions,
            rays: Vec::new(),
            frontier,
        }
    }
}

pub fn ray_vertex_name(ray: &str, k: usize) -> String {
    format!("{ray}#{k}")
}

pub fn ray_arc_names(ray: &str, k: usize) -> (String, String) {
    (format!("{ray}#{k}+"), format!("{ray}#{k}-"))
}

/// Name of a pattern colour at ray index `k`; index 0 keeps the declared name.
pub fn ray_colour_name(colour: &str, k: usize) -> String {
    if k == 0 {
        colour.to_string()
    } else {
        format!("{colour}#{k}")
    }
}

fn normalise(mut blocks: Vec<Vec<String>>) -> Vec<Vec<String>> {
    for b in &mut blocks {
        b.sort();
    }
    blocks.sort();
    blocks
}

fn partition_of(sets: &[&Vec<String>]) -> Vec<Vec<String>> {
    normalise(sets.iter().map(|s| (*s).clone()).collect())
}

/// Programmatic construction of diagrams; the `.lad` loader goes through it.
#[derive(Debug, Default, Clone)]
pub struct DiagramBuilder {
    vertices: Vec<String>,
    arcs: Vec<(String, String, String, String, ColourSet)>,
    actions: HashMap<String, ActionSpec>,
    rays: Vec<RaySpec>,
    frontier: Vec<String>,
    dangling: HashMap<String, Vec<String>>,
}

#[derive(Debug, Clone)]
pub enum ActionSpec {
    Generators(Vec<String>),
    Symbolic(SymbolicAction),
}

#[derive(Debug, Clone)]
pub struct SegmentSpec {
    pub generators: Vec<String>,
    pub out: Vec<String>,
    pub inward: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RaySpec {
    pub id: String,
    pub attach: String,
    pub lead: usize,
    pub segments: Vec<SegmentSpec>,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.vertices.push(id.into());
        self
    }

    /// Declares one arc; its reversal is declared separately.
    pub fn arc(
        &mut self,
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        reverse: impl Into<String>,
        colours: ColourSet,
    ) -> &mut Self {
        self.arcs
            .push((id.into(), from.into(), to.into(), reverse.into(), colours));
        self
    }

    /// Declares an edge `a: u → w` with reversal `b: w → u`.
    pub fn edge(
        &mut self,
        a: &str,
        u: &str,
        w: &str,
        b: &str,
        forward: ColourSet,
        backward: ColourSet,
    ) -> &mut Self {
        self.arc(a, u, w, b, forward).arc(b, w, u, a, backward)
    }

    pub fn non_orientable_loop(&mut self, id: &str, at: &str, colours: ColourSet) -> &mut Self {
        self.arc(id, at, at, id, colours)
    }

    pub fn generators<I, S>(&mut self, vertex: &str, gens: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.actions.insert(
            vertex.to_string(),
            ActionSpec::Generators(gens.into_iter().map(Into::into).collect()),
        );
        self
    }

    pub fn symbolic(&mut self, vertex: &str, action: SymbolicAction) -> &mut Self {
        self.actions
            .insert(vertex.to_string(), ActionSpec::Symbolic(action));
        self
    }

    pub fn ray(&mut self, spec: RaySpec) -> &mut Self {
        self.rays.push(spec);
        self
    }

    /// Marks a frontier vertex whose action also moves the `dangling`
    /// colours of an arc that was cut off.
    pub fn frontier(&mut self, vertex: &str, dangling: Vec<String>) -> &mut Self {
        self.frontier.push(vertex.to_string());
        if !dangling.is_empty() {
            self.dangling.insert(vertex.to_string(), dangling);
        }
        self
    }

    /// Resolves ids and parses generators. Structural invariants (orbits,
    /// reversal, connectivity) are left to [`Diagram::validate`].
    pub fn build(&self) -> Result<Diagram, DiagramError> {
        let graph = SerreGraph::new(
            self.vertices.iter().cloned(),
            self.arcs
                .iter()
                .map(|(a, o, t, r, _)| (a.clone(), o.clone(), t.clone(), r.clone())),
        )?;
        let colours: Vec<ColourSet> = self.arcs.iter().map(|(.., c)| c.clone()).collect();

        let mut rays = Vec::new();
        for spec in &self.rays {
            let attach = graph
                .vertex_id(&spec.attach)
                .ok_or_else(|| DiagramError::UnknownVertex(spec.attach.clone()))?;
            let n = spec.segments.len();
            let mut segments = Vec::with_capacity(n);
            for (k, seg) in spec.segments.iter().enumerate() {
                let next = if k + 1 < n { k + 1 } else { spec.lead.min(n.saturating_sub(1)) };
                let universe: Vec<String> = seg
                    .inward
                    .iter()
                    .chain(spec.segments[next].out.iter())
                    .cloned()
                    .collect();
                let action = build_group(universe, &seg.generators).map_err(|source| {
                    DiagramError::Segment {
                        ray: spec.id.clone(),
                        segment: k,
                        source,
                    }
                })?;
                segments.push(Segment {
                    out: seg.out.clone(),
                    inward: seg.inward.clone(),
                    action,
                });
            }
            rays.push(RayGadget {
                id: spec.id.clone(),
                attach,
                lead: spec.lead,
                segments,
            });
        }

        let mut frontier = vec![false; graph.vertex_count()];
        for f in &self.frontier {
            let v = graph
                .vertex_id(f)
                .ok_or_else(|| DiagramError::UnknownVertex(f.clone()))?;
            frontier[v] = true;
        }

        for name in self.actions.keys().chain(self.dangling.keys()) {
            if graph.vertex_id(name).is_none() {
                return Err(DiagramError::UnknownVertex(name.clone()));
            }
        }

        let mut diagram = Diagram {
            graph,
            colours,
            actions: Vec::new(),
            rays,
            frontier,
        };
        let mut actions = Vec::with_capacity(diagram.vertex_count());
        for v in 0..diagram.vertex_count() {
            let name = diagram.graph.vertex_name(v).to_string();
            let action = match self.actions.get(&name) {
                Some(ActionSpec::Symbolic(s)) => Some(LocalAction::Symbolic(s.clone())),
                Some(ActionSpec::Generators(gens)) => match diagram.vertex_colours(v) {
                    Some(universe) => Some(LocalAction::Explicit(
                        build_group(
                            universe
                                .into_iter()
                                .chain(self.dangling.get(&name).into_iter().flatten().cloned())
                                .collect(),
                            gens,
                        )
                            .map_err(|source| DiagramError::Action {
                                vertex: name.clone(),
                                source,
                            })?,
                    )),
                    // generators over an infinite colour set: kept as an
                    // empty placeholder so validation can report it
                    None => Some(LocalAction::Explicit(PermGroup::trivial(Vec::new()).unwrap())),
                },
                None => diagram.vertex_colours(v).map(|u| {
                    LocalAction::Explicit(
                        PermGroup::trivial(u).expect("duplicate colours are reported by validation"),
                    )
                }),
            };
            actions.push(action);
        }
        diagram.actions = actions;
        Ok(diagram)
    }
}

fn build_group(universe: Vec<String>, gens: &[String]) -> Result<PermGroup, PermError> {
    let group = PermGroup::from_cycles(universe, gens)?;
    let kept: Vec<_> = group
        .generators()
        .iter()
        .filter(|g| !g.is_identity())
        .cloned()
        .collect();
    PermGroup::new(group.universe().to_vec(), kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn example_diagram_validates() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        assert!(d.validate().is_empty(), "{:?}", d.validate());
    }

    #[test]
    fn orbit_mismatch_is_reported() {
        let mut b = DiagramBuilder::new();
        b.vertex("v")
            .vertex("w")
            .vertex("x")
            .edge("a", "v", "w", "a'", ColourSet::finite(["1", "2"]), ColourSet::finite(["p"]))
            .edge("b", "v", "x", "b'", ColourSet::finite(["3"]), ColourSet::finite(["q"]))
            .generators("v", ["(1 2 3)"]);
        let d = b.build().unwrap();
        let violations = d.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, DiagramViolation::OrbitMismatch { vertex, .. } if vertex == "v")));
    }

    #[test]
    fn empty_colour_set_is_reported() {
        let mut b = DiagramBuilder::new();
        b.vertex("v").non_orientable_loop("l", "v", ColourSet::Finite(vec![]));
        let d = b.build().unwrap();
        assert!(d
            .validate()
            .contains(&DiagramViolation::EmptyColourSet { arc: "l".into() }));
    }

    #[test]
    fn colour_type_examples() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        let forward = d.graph().arc_id("a").unwrap();
        let backward = d.graph().arc_id("b").unwrap();
        assert_eq!(d.colour_type("2").unwrap(), ArcRef::Core(forward));
        assert_eq!(d.colour_type("1'").unwrap(), ArcRef::Core(backward));
        assert_eq!(
            d.colour_type("z").unwrap_err(),
            DiagramError::UnknownColour("z".into())
        );
    }

    #[test]
    fn truncation_without_rays_is_identity() {
        let d = corpus::load_builtin("general-autT3").unwrap();
        assert_eq!(d.truncate_rays(3), d);
    }

    #[test]
    fn truncation_of_fixed_vertex_ray() {
        let d = corpus::load_builtin("fixed-vertex-T3").unwrap();
        let t = d.truncate_rays(2);
        assert_eq!(t.vertex_count(), 3);
        assert!(t.graph().is_tree());
        let orders: Vec<usize> = (0..3)
            .map(|v| t.action(v).unwrap().explicit().unwrap().order(DEFAULT_CAP).unwrap())
            .collect();
        assert_eq!(orders, vec![6, 2, 2]);
        assert_eq!(
            (0..3).map(|v| t.is_frontier(v)).collect::<Vec<_>>(),
            vec![false, false, true]
        );
        assert!(t.validate().is_empty(), "{:?}", t.validate());
    }

    #[test]
    fn truncation_at_depth_zero_flags_attachment() {
        let d = corpus::load_builtin("fixed-vertex-T3").unwrap();
        let t = d.truncate_rays(0);
        assert_eq!(t.vertex_count(), 1);
        assert!(t.is_frontier(0));
        assert!(t.validate().is_empty());
    }

    #[test]
    fn truncations_are_nested() {
        for entry in corpus::all() {
            let d = entry.diagram();
            for k in 0..4 {
                let small = d.truncate_rays(k);
                let big = d.truncate_rays(k + 1);
                for v in 0..small.vertex_count() {
                    let name = small.graph().vertex_name(v);
                    let w = big.vertex_id(name).unwrap();
                    assert_eq!(small.action(v), big.action(w));
                }
                for a in 0..small.graph().arc_count() {
                    let name = small.graph().arc_name(a);
                    let b = big.graph().arc_id(name).unwrap();
                    assert_eq!(small.colour_set(a), big.colour_set(b));
                }
            }
        }
    }
}
