//! Δ-trees truncated at a finite radius.
//!
//! A vertex of the Δ-tree is a coloured path `(c₁, …, cₙ)` from the base
//! vertex: each colour belongs to an arc leaving the projection of the
//! previous prefix. Every vertex also records a reverse path `(d₁, …, dₙ)`,
//! where `dᵢ` is the first colour of the reversal of `cᵢ`'s arc. The parent of a
//! vertex is reached through its last reverse colour, every other colour leads
//! to a child.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::diagram::{ColourSet, Diagram};
use crate::sgraph::escape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtreeError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown colour `{0}`")]
    UnknownColour(String),
    #[error("cannot build radius {radius}: {reason}")]
    UnbuildableRadius { radius: usize, reason: String },
    #[error("no tree element `{0}`")]
    UnknownElement(String),
}

pub type ColourId = u32;
pub type Path = Vec<ColourId>;

/// Colours of a finite diagram view, indexed for fast path navigation.
#[derive(Debug, Clone)]
pub struct ColourTable {
    names: Vec<String>,
    arc_of: Vec<usize>,
    by_name: HashMap<String, ColourId>,
    /// `X_v` in canonical order, `None` when some colour set at `v` is infinite.
    vertex_colours: Vec<Option<Vec<ColourId>>>,
    /// First colour of each arc's colour set.
    first: Vec<Option<ColourId>>,
}

impl ColourTable {
    pub fn new(d: &Diagram) -> Self {
        let g = d.graph();
        let mut names = Vec::new();
        let mut arc_of = Vec::new();
        let mut by_name = HashMap::new();
        let mut first = vec![None; g.arc_count()];
        let mut ids_of_arc: Vec<Vec<ColourId>> = vec![Vec::new(); g.arc_count()];
        for a in 0..g.arc_count() {
            for c in d.colour_set(a).colours() {
                let id = names.len() as ColourId;
                names.push(c.clone());
                arc_of.push(a);
                by_name.insert(c.clone(), id);
                ids_of_arc[a].push(id);
            }
            first[a] = ids_of_arc[a].first().copied();
        }
        let vertex_colours = (0..g.vertex_count())
            .map(|v| {
                let mut all = Vec::new();
                for &a in g.out_arcs(v) {
                    if d.colour_set(a).is_infinite() {
                        return None;
                    }
                    all.extend(&ids_of_arc[a]);
                }
                Some(all)
            })
            .collect();
        ColourTable {
            names,
            arc_of,
            by_name,
            vertex_colours,
            first,
        }
    }

    pub fn name(&self, c: ColourId) -> &str {
        &self.names[c as usize]
    }

    pub fn id(&self, name: &str) -> Option<ColourId> {
        self.by_name.get(name).copied()
    }

    pub fn arc(&self, c: ColourId) -> usize {
        self.arc_of[c as usize]
    }

    pub fn vertex_colours(&self, v: usize) -> Option<&[ColourId]> {
        self.vertex_colours[v].as_deref()
    }
}

/// Path arithmetic on the (infinite) Δ-tree of a finite diagram view.
#[derive(Debug, Clone)]
pub struct Navigator {
    view: Diagram,
    colours: ColourTable,
    base: usize,
}

impl Navigator {
    pub fn new(view: Diagram, base: usize) -> Self {
        let colours = ColourTable::new(&view);
        Navigator { view, colours, base }
    }

    pub fn view(&self) -> &Diagram {
        &self.view
    }

    pub fn colours(&self) -> &ColourTable {
        &self.colours
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// `π` of a path: the terminus of its last colour's arc.
    pub fn projection(&self, path: &[ColourId]) -> usize {
        match path.last() {
            Some(&c) => self.view.graph().terminus(self.colours.arc(c)),
            None => self.base,
        }
    }

    /// The colour leading back to the parent, if any.
    pub fn back_colour(&self, path: &[ColourId]) -> Result<Option<ColourId>, String> {
        let Some(&c) = path.last() else { return Ok(None) };
        let g = self.view.graph();
        let rev = g.reverse(self.colours.arc(c));
        match self.colours.first[rev] {
            Some(d) => Ok(Some(d)),
            None => Err(format!("colour set of arc {} is not finite", g.arc_name(rev))),
        }
    }

    /// Colours at the projection of `path`, in canonical order.
    pub fn colours_at(&self, path: &[ColourId]) -> Result<&[ColourId], String> {
        let v = self.projection(path);
        if self.view.is_frontier(v) {
            return Err(format!("vertex {} lies beyond the materialised rays", self.view.graph().vertex_name(v)));
        }
        self.colours
            .vertex_colours(v)
            .ok_or_else(|| format!("vertex {} has an infinite colour set", self.view.graph().vertex_name(v)))
    }

    /// The neighbour of `path` along colour `c`.
    pub fn neighbour(&self, path: &[ColourId], c: ColourId) -> Result<Path, String> {
        if self.back_colour(path)? == Some(c) {
            return Ok(path[..path.len() - 1].to_vec());
        }
        if !self.colours_at(path)?.contains(&c) {
            return Err(format!("colour {} does not leave this vertex", self.colours.name(c)));
        }
        let mut next = path.to_vec();
        next.push(c);
        Ok(next)
    }

    /// `L(v, w)` for adjacent paths.
    pub fn label(&self, from: &[ColourId], to: &[ColourId]) -> Option<ColourId> {
        if to.len() == from.len() + 1 && to.starts_with(from) {
            to.last().copied()
        } else if from.len() == to.len() + 1 && from.starts_with(to) {
            self.back_colour(from).ok().flatten()
        } else {
            None
        }
    }

    /// The full reverse path `(d₁, …, dₙ)`.
    pub fn reverse_path(&self, path: &[ColourId]) -> Result<Path, String> {
        (1..=path.len())
            .map(|i| self.back_colour(&path[..i]).map(|d| d.expect("non-empty prefix")))
            .collect()
    }

    pub fn path_string(&self, path: &[ColourId]) -> String {
        let names: Vec<&str> = path.iter().map(|&c| self.colours.name(c)).collect();
        format!("({})", names.join(" "))
    }

    pub fn parse_path(&self, text: &str) -> Result<Path, DtreeError> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split_whitespace()
            .map(|name| {
                self.colours
                    .id(name)
                    .ok_or_else(|| DtreeError::UnknownColour(name.to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    pub path: Path,
    pub reverse: Path,
    pub projection: usize,
    pub parent: Option<usize>,
    /// Children with the colour leading to them, in canonical colour order.
    pub children: Vec<(ColourId, usize)>,
}

impl TreeVertex {
    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouringViolation {
    pub vertex: String,
    pub message: String,
}

/// The ball of radius `radius` around the base vertex of a Δ-tree.
#[derive(Debug, Clone)]
pub struct DeltaTree {
    nav: Navigator,
    radius: usize,
    vertices: Vec<TreeVertex>,
    index: HashMap<Path, usize>,
}

/// How deep rays must be materialised so that paths of length `len` from
/// `base` never reach a frontier vertex.
fn view_depth(base: &str, len: usize) -> usize {
    let offset = base
        .rsplit_once('#')
        .and_then(|(_, k)| k.parse::<usize>().ok())
        .map_or(0, |k| k + 1);
    len + offset + 2
}

impl DeltaTree {
    /// Builds all admissible coloured paths of length at most `radius` from
    /// the vertex named `base`. Rays are materialised deep enough to also
    /// navigate paths of length `2 * radius`.
    pub fn build(d: &Diagram, base: &str, radius: usize) -> Result<DeltaTree, DtreeError> {
        let view = d.truncate_rays(view_depth(base, 2 * radius));
        let v0 = view
            .graph()
            .vertex_id(base)
            .ok_or_else(|| DtreeError::UnknownVertex(base.to_string()))?;
        let nav = Navigator::new(view, v0);
        let unbuildable = |reason: String| DtreeError::UnbuildableRadius { radius, reason };

        let mut vertices = vec![TreeVertex {
            path: Vec::new(),
            reverse: Vec::new(),
            projection: v0,
            parent: None,
            children: Vec::new(),
        }];
        let mut index = HashMap::from([(Vec::new(), 0usize)]);
        let mut frontier = vec![0usize];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &i in &frontier {
                let path = vertices[i].path.clone();
                let back = nav.back_colour(&path).map_err(unbuildable)?;
                let colours = nav.colours_at(&path).map_err(unbuildable)?.to_vec();
                for c in colours {
                    if Some(c) == back {
                        continue;
                    }
                    let mut child = path.clone();
                    child.push(c);
                    let mut reverse = vertices[i].reverse.clone();
                    reverse.push(nav.back_colour(&child).map_err(unbuildable)?.expect("non-empty"));
                    let j = vertices.len();
                    vertices.push(TreeVertex {
                        projection: nav.projection(&child),
                        path: child.clone(),
                        reverse,
                        parent: Some(i),
                        children: Vec::new(),
                    });
                    vertices[i].children.push((c, j));
                    index.insert(child, j);
                    next.push(j);
                }
            }
            frontier = next;
        }
        Ok(DeltaTree {
            nav,
            radius,
            vertices,
            index,
        })
    }

    pub fn navigator(&self) -> &Navigator {
        &self.nav
    }

    pub fn view(&self) -> &Diagram {
        self.nav.view()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn vertex(&self, i: usize) -> &TreeVertex {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn depth(&self, i: usize) -> usize {
        self.vertices[i].depth()
    }

    pub fn find(&self, path: &[ColourId]) -> Option<usize> {
        self.index.get(path).copied()
    }

    pub fn find_str(&self, text: &str) -> Result<usize, DtreeError> {
        let path = self.nav.parse_path(text)?;
        self.find(&path)
            .ok_or_else(|| DtreeError::UnknownElement(text.to_string()))
    }

    pub fn path_string(&self, i: usize) -> String {
        self.nav.path_string(&self.vertices[i].path)
    }

    /// `π(v)` as a vertex name of the view.
    pub fn project(&self, i: usize) -> &str {
        self.view().graph().vertex_name(self.vertices[i].projection)
    }

    /// `π` of the arc from `i` to the adjacent vertex `j`: `p(L(i, j))`.
    pub fn project_arc(&self, i: usize, j: usize) -> Result<&str, DtreeError> {
        let c = self
            .nav
            .label(&self.vertices[i].path, &self.vertices[j].path)
            .ok_or_else(|| {
                DtreeError::UnknownElement(format!("{} -> {}", self.path_string(i), self.path_string(j)))
            })?;
        Ok(self.view().graph().arc_name(self.nav.colours().arc(c)))
    }

    /// Neighbours of `i` within the ball, as `(L(i, j), j)` pairs.
    pub fn neighbours(&self, i: usize) -> Vec<(ColourId, usize)> {
        let v = &self.vertices[i];
        let mut out = Vec::with_capacity(v.children.len() + 1);
        if let Some(p) = v.parent {
            out.push((*v.reverse.last().expect("non-root"), p));
        }
        out.extend(v.children.iter().copied());
        out
    }

    /// Vertices of depth at most `r`.
    pub fn ball(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.depth(i) <= r).collect()
    }

    /// Checks that at every vertex of depth below the radius the labels of
    /// its arcs form a bijection onto `X_{π(v)}` respecting the projection.
    pub fn check_colouring(&self) -> Vec<ColouringViolation> {
        let g = self.view().graph();
        let mut out = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.depth() >= self.radius {
                continue;
            }
            let mut report = |message: String| {
                out.push(ColouringViolation {
                    vertex: self.path_string(i),
                    message,
                })
            };
            let expected = match self.nav.colours().vertex_colours(v.projection) {
                Some(x) => x,
                None => {
                    report("infinite colour set at an internal vertex".into());
                    continue;
                }
            };
            let mut labels: Vec<ColourId> = Vec::new();
            for (c, j) in self.neighbours(i) {
                let a = self.nav.colours().arc(c);
                if g.origin(a) != v.projection || g.terminus(a) != self.vertices[j].projection {
                    report(format!(
                        "label {} does not lie over an arc from {} to {}",
                        self.nav.colours().name(c),
                        g.vertex_name(v.projection),
                        g.vertex_name(self.vertices[j].projection)
                    ));
                }
                labels.push(c);
            }
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            let mut want = expected.to_vec();
            want.sort_unstable();
            if sorted != want {
                let names: Vec<&str> = labels.iter().map(|&c| self.nav.colours().name(c)).collect();
                report(format!("labels [{}] are not a bijection onto the colours", names.join(" ")));
            }
        }
        out
    }

    /// DOT rendering: vertices labelled by their paths and coloured by their
    /// projection, edges labelled `L(v,w) / L(w,v)`.
    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 8] = [
            "blue", "red", "darkgreen", "orange", "purple", "brown", "cyan4", "gray40",
        ];
        let mut s = String::from("graph delta_tree {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(
                s,
                "  n{i} [label=\"{}\", color={}, projection=\"{}\"];",
                escape(&self.path_string(i)),
                PALETTE[v.projection % PALETTE.len()],
                escape(self.project(i))
            );
        }
        for (i, v) in self.vertices.iter().enumerate() {
            for &(c, j) in &v.children {
                let back = self.vertices[j].reverse.last().copied().expect("child");
                let _ = writeln!(
                    s,
                    "  n{i} -- n{j} [label=\"{} / {}\"];",
                    escape(self.nav.colours().name(c)),
                    escape(self.nav.colours().name(back))
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Closed-form count of vertices of a ball: a vertex of depth below the
/// radius with projection `v` has `|X_v|` neighbours, one of which is its
/// parent unless it is the root.
pub fn predicted_size(d: &Diagram, base: &str, radius: usize) -> Result<usize, DtreeError> {
    let view = d.truncate_rays(view_depth(base, 2 * radius));
    let v0 = view
        .graph()
        .vertex_id(base)
        .ok_or_else(|| DtreeError::UnknownVertex(base.to_string()))?;
    let g = view.graph();
    // level counts per (projection, arrival arc)
    let mut level: HashMap<(usize, Option<usize>), usize> = HashMap::from([((v0, None), 1)]);
    let mut total = 1;
    for _ in 0..radius {
        let mut next: HashMap<(usize, Option<usize>), usize> = HashMap::new();
        for (&(v, arrived), &count) in &level {
            let back_arc = arrived.map(|a| g.reverse(a));
            for &b in g.out_arcs(v) {
                let mut n = match view.colour_set(b) {
                    ColourSet::Finite(c) => c.len(),
                    ColourSet::Infinite(_) => {
                        return Err(DtreeError::UnbuildableRadius {
                            radius,
                            reason: "infinite colour set".into(),
                        })
                    }
                };
                if Some(b) == back_arc {
                    n -= 1;
                }
                if n > 0 {
                    *next.entry((g.terminus(b), Some(b))).or_default() += count * n;
                    total += count * n;
                }
            }
        }
        level = next;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::diagram::DiagramBuilder;

    #[test]
    fn two_three_tree_counts() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        let t1 = DeltaTree::build(&d, "u", 1).unwrap();
        assert_eq!(t1.len(), 3);
        assert_eq!(t1.vertex(0).children.len(), 2);
        let t2 = DeltaTree::build(&d, "u", 2).unwrap();
        assert_eq!(t2.len(), 7);
        assert!(t2.check_colouring().is_empty());
    }

    #[test]
    fn projection_examples() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        let t = DeltaTree::build(&d, "u", 2).unwrap();
        assert_eq!(t.project(t.root()), "u");
        let one = t.find_str("(1)").unwrap();
        assert_eq!(t.project(one), "w");
        assert_eq!(t.project_arc(t.root(), one).unwrap(), "a");
        assert_eq!(t.project_arc(one, t.root()).unwrap(), "b");
    }

    #[test]
    fn lone_vertex_gives_single_vertex_tree() {
        let mut b = DiagramBuilder::new();
        b.vertex("v");
        let d = b.build().unwrap();
        for r in 0..4 {
            assert_eq!(DeltaTree::build(&d, "v", r).unwrap().len(), 1);
        }
    }

    #[test]
    fn radius_zero_is_vacuously_coloured() {
        let d = corpus::load_builtin("general-autT3").unwrap();
        let t = DeltaTree::build(&d, "v", 0).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.check_colouring().is_empty());
    }

    #[test]
    fn duplicated_child_is_reported() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        let mut t = DeltaTree::build(&d, "u", 2).unwrap();
        let first = t.vertices[0].children[0];
        t.vertices[0].children.push(first);
        let violations = t.check_colouring();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].vertex, "()");
    }

    #[test]
    fn infinite_colours_are_unbuildable() {
        let text = "\
vertex v
arc big from v to v reverse big' colours infinite N
arc big' from v to v reverse big colours infinite M
action v symbolic trivial=false semiregular=true finite_base=true orbits big:big'
";
        let d = crate::diagram::load(text).unwrap();
        assert!(DeltaTree::build(&d, "v", 0).is_ok());
        assert!(matches!(
            DeltaTree::build(&d, "v", 1),
            Err(DtreeError::UnbuildableRadius { .. })
        ));
    }

    #[test]
    fn unknown_base_is_reported() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        assert_eq!(
            DeltaTree::build(&d, "zz", 1).unwrap_err(),
            DtreeError::UnknownVertex("zz".into())
        );
    }

    #[test]
    fn dot_is_deterministic() {
        let d = corpus::load_builtin("u-s2-a3").unwrap();
        let a = DeltaTree::build(&d, "u", 2).unwrap().to_dot();
        let b = DeltaTree::build(&d, "u", 2).unwrap().to_dot();
        assert_eq!(a, b);
        assert_eq!(a.matches(" -- ").count(), 6);
    }

    #[test]
    fn rays_are_materialised() {
        let d = corpus::load_builtin("fixed-vertex-T3").unwrap();
        let t = DeltaTree::build(&d, "v0", 3).unwrap();
        // 1 + 3 + 3*2 + 3*2*2
        assert_eq!(t.len(), 22);
        assert!(t.check_colouring().is_empty());
        assert_eq!(predicted_size(&d, "v0", 3).unwrap(), 22);
    }
}
