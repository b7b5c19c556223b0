//! Elements of the universal group restricted to a ball of a Δ-tree.
//!
//! An element is stored as the image path of every ball vertex where it is
//! defined. Images may leave the ball when the element does not fix the
//! root; they are still valid paths of the infinite Δ-tree.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::diagram::{Diagram, LocalAction};
use crate::discrete::DiscretenessVerdict;
use crate::dtree::{ColourId, DeltaTree, DtreeError, Path};
use crate::perm::{PermError, PermGroup, Permutation, DEFAULT_CAP};
use crate::scopo::ActionType;

/// Default bound on search nodes expanded by [`stabiliser_search`].
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UgroupError {
    #[error("vertex {0} lies on the boundary of the ball")]
    BoundaryVertex(String),
    #[error("the permutation is not in the local action at {0}")]
    NotInLocalGroup(String),
    #[error("the permutation moves the colour of the arc to keep fixed")]
    ColourNotFixed,
    #[error("vertex {0} is not adjacent to the extension vertex")]
    NotAdjacent(String),
    #[error("the local action at {0} is symbolic")]
    SymbolicAction(String),
    #[error("the element is undefined at {0}")]
    Undefined(String),
    #[error("navigation failed: {0}")]
    Navigation(String),
    #[error("ball radius {ball} must be at least fix radius {fix} plus two")]
    InvalidRadii { fix: usize, ball: usize },
    #[error("the witness vertex {0} lies too deep for the ball")]
    RadiusTooSmall(String),
    #[error("the diagram has an infinite colour set")]
    InfiniteColours,
    #[error(transparent)]
    Dtree(#[from] DtreeError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A map on (part of) a Δ-tree ball preserving adjacency and projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallAutomorphism {
    images: Vec<Option<Path>>,
}

impl BallAutomorphism {
    pub fn identity(t: &DeltaTree) -> Self {
        BallAutomorphism {
            images: t.vertices().iter().map(|v| Some(v.path.clone())).collect(),
        }
    }

    pub fn image(&self, i: usize) -> Option<&Path> {
        self.images[i].as_ref()
    }

    pub fn fixes(&self, t: &DeltaTree, i: usize) -> bool {
        self.images[i].as_ref() == Some(&t.vertex(i).path)
    }

    /// Ball vertices with a defined image different from themselves.
    pub fn moved(&self, t: &DeltaTree) -> Vec<usize> {
        (0..t.len())
            .filter(|&i| matches!(&self.images[i], Some(p) if *p != t.vertex(i).path))
            .collect()
    }

    /// `move <path> -> <path>` lines for moved vertices, then
    /// `sigma <path> = <cycles>` lines for non-trivial local actions.
    pub fn describe(&self, t: &DeltaTree) -> Vec<String> {
        let nav = t.navigator();
        let mut out: Vec<String> = self
            .moved(t)
            .into_iter()
            .map(|i| {
                format!(
                    "move {} -> {}",
                    t.path_string(i),
                    nav.path_string(self.images[i].as_ref().expect("moved"))
                )
            })
            .collect();
        for i in 0..t.len() {
            if let Ok(sigma) = local_action(t, self, i) {
                if !sigma.is_identity() {
                    let names: Vec<String> = universe_names(t, i);
                    out.push(format!("sigma {} = {}", t.path_string(i), sigma.to_cycles(&names)));
                }
            }
        }
        out
    }
}

fn universe_names(t: &DeltaTree, i: usize) -> Vec<String> {
    let nav = t.navigator();
    nav.colours()
        .vertex_colours(t.vertex(i).projection)
        .unwrap_or_default()
        .iter()
        .map(|&c| nav.colours().name(c).to_string())
        .collect()
}

fn explicit_group(t: &DeltaTree, v: usize) -> Result<&PermGroup, UgroupError> {
    let view = t.view();
    match view.action(v) {
        Some(LocalAction::Explicit(g)) => Ok(g),
        _ => Err(UgroupError::SymbolicAction(view.graph().vertex_name(v).to_string())),
    }
}

fn colour_index(t: &DeltaTree, projection: usize, c: ColourId) -> Option<usize> {
    t.navigator()
        .colours()
        .vertex_colours(projection)?
        .iter()
        .position(|&x| x == c)
}

/// `σ_{L,v}(g) = L ∘ g ∘ L⁻¹` as a permutation of `X_{π(v)}` in canonical
/// order.
pub fn local_action(t: &DeltaTree, g: &BallAutomorphism, v: usize) -> Result<Permutation, UgroupError> {
    if t.depth(v) >= t.radius() {
        return Err(UgroupError::BoundaryVertex(t.path_string(v)));
    }
    let nav = t.navigator();
    let gv = g
        .image(v)
        .ok_or_else(|| UgroupError::Undefined(t.path_string(v)))?;
    let projection = t.vertex(v).projection;
    let colours = nav
        .colours()
        .vertex_colours(projection)
        .ok_or(UgroupError::InfiniteColours)?;
    let mut images = vec![usize::MAX; colours.len()];
    for (c, w) in t.neighbours(v) {
        let gw = g
            .image(w)
            .ok_or_else(|| UgroupError::Undefined(t.path_string(w)))?;
        let label = nav
            .label(gv, gw)
            .ok_or_else(|| UgroupError::Navigation("images are not adjacent".into()))?;
        let from = colour_index(t, projection, c).expect("tree labels lie in X");
        let to = colour_index(t, nav.projection(gv), label)
            .ok_or_else(|| UgroupError::Navigation("image does not preserve the projection".into()))?;
        images[from] = to;
    }
    Permutation::from_images(images)
        .ok_or_else(|| UgroupError::Navigation("local action is not a bijection".into()))
}

/// Checks that `g` is injective and preserves adjacency and projection where
/// defined, with every computable local action inside its local group.
pub fn is_member(t: &DeltaTree, g: &BallAutomorphism) -> Result<bool, UgroupError> {
    let nav = t.navigator();
    let mut seen = HashSet::new();
    for i in 0..t.len() {
        let Some(gi) = g.image(i) else { continue };
        if nav.projection(gi) != t.vertex(i).projection || !seen.insert(gi.clone()) {
            return Ok(false);
        }
        for &(_, j) in &t.vertex(i).children {
            if let Some(gj) = g.image(j) {
                if nav.label(gi, gj).is_none() {
                    return Ok(false);
                }
            }
        }
    }
    for i in 0..t.len() {
        if t.depth(i) >= t.radius() || t.neighbours(i).iter().any(|&(_, j)| g.image(j).is_none()) {
            continue;
        }
        if g.image(i).is_none() {
            continue;
        }
        let sigma = match local_action(t, g, i) {
            Ok(s) => s,
            Err(UgroupError::Navigation(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        let group = explicit_group(t, t.vertex(i).projection)?;
        if !group.contains(&sigma, DEFAULT_CAP)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The element fixing `w` with local action `sigma` at `w`, extended outward
/// with trivial local actions wherever that is consistent. When `fix` names
/// a neighbour of `w` whose colour `sigma` fixes, the half-tree through it is
/// fixed pointwise.
pub fn extend(
    t: &DeltaTree,
    w: usize,
    sigma: &Permutation,
    fix: Option<usize>,
) -> Result<BallAutomorphism, UgroupError> {
    let nav = t.navigator();
    let group = explicit_group(t, t.vertex(w).projection)?;
    if sigma.degree() != group.degree() || !group.contains(sigma, DEFAULT_CAP)? {
        return Err(UgroupError::NotInLocalGroup(t.path_string(w)));
    }
    if let Some(b) = fix {
        let (c, _) = t
            .neighbours(w)
            .into_iter()
            .find(|&(_, j)| j == b)
            .ok_or_else(|| UgroupError::NotAdjacent(t.path_string(b)))?;
        let idx = colour_index(t, t.vertex(w).projection, c).expect("label in X");
        if !sigma.fixes(idx) {
            return Err(UgroupError::ColourNotFixed);
        }
    }

    let mut images: Vec<Option<Path>> = vec![None; t.len()];
    images[w] = Some(t.vertex(w).path.clone());
    let mut queue = VecDeque::from([(w, None::<usize>)]);
    while let Some((x, prev)) = queue.pop_front() {
        let projection = t.vertex(x).projection;
        let gx = images[x].clone().expect("assigned before queued");
        let tau = match prev {
            None => sigma.clone(),
            Some(p) => {
                let c_in = nav
                    .label(&t.vertex(x).path, &t.vertex(p).path)
                    .expect("tree neighbours");
                let gp = images[p].as_ref().expect("assigned");
                let c_out = nav
                    .label(&gx, gp)
                    .ok_or_else(|| UgroupError::Navigation("images are not adjacent".into()))?;
                let group = explicit_group(t, projection)?;
                let from = colour_index(t, projection, c_in).expect("label in X");
                let to = colour_index(t, projection, c_out).expect("projection preserved");
                if from == to {
                    Permutation::identity(group.degree())
                } else {
                    group
                        .transporters(from, to, DEFAULT_CAP)?
                        .into_iter()
                        .next()
                        .ok_or_else(|| UgroupError::NotInLocalGroup(t.path_string(x)))?
                }
            }
        };
        for (c, y) in t.neighbours(x) {
            if Some(y) == prev {
                continue;
            }
            let idx = colour_index(t, projection, c).expect("label in X");
            let target = nav
                .colours()
                .vertex_colours(projection)
                .expect("finite")[tau.apply(idx)];
            let gy = nav.neighbour(&gx, target).map_err(UgroupError::Navigation)?;
            images[y] = Some(gy);
            queue.push_back((y, Some(x)));
        }
    }
    Ok(BallAutomorphism { images })
}

/// Ball vertices on the far side of `b` as seen from its neighbour `w`.
pub fn half_tree(t: &DeltaTree, w: usize, b: usize) -> Vec<usize> {
    let mut seen = HashSet::from([w, b]);
    let mut out = vec![b];
    let mut queue = VecDeque::from([b]);
    while let Some(x) = queue.pop_front() {
        for (_, y) in t.neighbours(x) {
            if seen.insert(y) {
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(BallAutomorphism),
    NoneFound,
    /// The node cap was reached before the search finished.
    Exhausted,
}

impl SearchOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "mover",
            SearchOutcome::NoneFound => "none",
            SearchOutcome::Exhausted => "exhausted",
        }
    }
}

struct Search<'a> {
    t: &'a DeltaTree,
    order: Vec<usize>,
    fixed: Vec<bool>,
    inner: usize,
    elements: HashMap<usize, Vec<Permutation>>,
    images: Vec<Option<usize>>,
    nodes: usize,
    cap: usize,
}

impl Search<'_> {
    fn label_index(&self, from: usize, to: usize) -> usize {
        let nav = self.t.navigator();
        let c = nav
            .label(&self.t.vertex(from).path, &self.t.vertex(to).path)
            .expect("adjacent");
        colour_index(self.t, self.t.vertex(from).projection, c).expect("label in X")
    }

    fn moves(&self) -> bool {
        (0..self.t.len()).any(|i| {
            self.t.depth(i) <= self.inner && matches!(self.images[i], Some(j) if j != i)
        })
    }

    /// Returns `Some(true)` on success, `Some(false)` when this branch has
    /// no solution, `None` when the cap is hit.
    fn run(&mut self, k: usize) -> Option<bool> {
        if k == self.order.len() {
            return Some(self.moves());
        }
        let x = self.order[k];
        let y = self.images[x].expect("ordered by depth");
        let projection = self.t.vertex(x).projection;
        let constraint = self
            .t
            .vertex(x)
            .parent
            .map(|p| (self.label_index(x, p), self.label_index(y, self.images[p].expect("parent first"))));
        let children: Vec<(ColourId, usize)> = self.t.vertex(x).children.clone();
        let candidates = self.elements[&projection].clone();
        let colours = self
            .t
            .navigator()
            .colours()
            .vertex_colours(projection)
            .expect("finite")
            .to_vec();
        for tau in &candidates {
            if let Some((from, to)) = constraint {
                if tau.apply(from) != to {
                    continue;
                }
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                return None;
            }
            let mut ok = true;
            for &(c, child) in &children {
                let idx = colours.iter().position(|&z| z == c).expect("label in X");
                let target = colours[tau.apply(idx)];
                let image = self
                    .t
                    .vertex(y)
                    .children
                    .iter()
                    .find(|&&(z, _)| z == target)
                    .map(|&(_, j)| j)
                    .expect("root is fixed so depth is preserved");
                if self.fixed[child] && image != child {
                    ok = false;
                    break;
                }
                self.images[child] = Some(image);
            }
            if ok {
                match self.run(k + 1) {
                    Some(true) => return Some(true),
                    Some(false) => {}
                    None => return None,
                }
            }
            for &(_, child) in &children {
                self.images[child] = None;
            }
        }
        Some(false)
    }
}

/// Looks for an element fixing the root and every vertex of `fixed`, whose
/// local actions at vertices of depth below `radius - 1` lie in the local
/// groups, and which moves some vertex of depth at most `inner`.
pub fn stabiliser_search(
    t: &DeltaTree,
    fixed: &[usize],
    inner: usize,
    cap: usize,
) -> Result<SearchOutcome, UgroupError> {
    let radius = t.radius();
    let mut fixed_mask = vec![false; t.len()];
    fixed_mask[t.root()] = true;
    for &f in fixed {
        fixed_mask[f] = true;
    }
    let order: Vec<usize> = (0..t.len())
        .filter(|&i| t.depth(i) + 2 <= radius)
        .collect();
    let mut elements = HashMap::new();
    for &x in &order {
        let projection = t.vertex(x).projection;
        if let std::collections::hash_map::Entry::Vacant(e) = elements.entry(projection) {
            e.insert(explicit_group(t, projection)?.enumerate(DEFAULT_CAP)?);
        }
    }
    let mut images = vec![None; t.len()];
    images[t.root()] = Some(t.root());
    let mut search = Search {
        t,
        order,
        fixed: fixed_mask,
        inner,
        elements,
        images,
        nodes: 0,
        cap,
    };
    Ok(match search.run(0) {
        Some(true) => SearchOutcome::Found(BallAutomorphism {
            images: search
                .images
                .iter()
                .map(|i| i.map(|j| t.vertex(j).path.clone()))
                .collect(),
        }),
        Some(false) => SearchOutcome::NoneFound,
        None => SearchOutcome::Exhausted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCheck {
    pub fixed: String,
    pub expect_mover: bool,
    pub outcome: SearchOutcome,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        match self.outcome {
            SearchOutcome::Found(_) => self.expect_mover,
            SearchOutcome::NoneFound => !self.expect_mover,
            SearchOutcome::Exhausted => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub base: String,
    pub discrete: bool,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(OracleCheck::passed)
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "check fix={} expect={} result={} pass={}",
                c.fixed,
                if c.expect_mover { "mover" } else { "none" },
                c.outcome.label(),
                c.passed()
            )?;
        }
        write!(
            f,
            "oracle={} base={} discrete={}",
            if self.consistent() { "Consistent" } else { "Inconsistent" },
            self.base,
            if self.discrete { "yes" } else { "no" }
        )
    }
}

/// Tree base used to test a verdict: the discreteness witness base, else the
/// vertex the classification singles out.
pub fn oracle_base(d: &Diagram, action: &ActionType, verdict: &DiscretenessVerdict) -> String {
    if let Some(w) = &verdict.witness {
        return w.base.clone();
    }
    let g = d.graph();
    let v = match action {
        ActionType::FixedVertex { witnesses } => witnesses[0],
        ActionType::Inversion { vertex, .. } => *vertex,
        ActionType::Lineal { cotree } | ActionType::General { cotree } | ActionType::Focal { cotree, .. } => {
            cotree.vertices.core[0]
        }
        ActionType::Horocyclic { ray } => d.ray(*ray).attach,
    };
    g.vertex_name(v).to_string()
}

/// Tests a discreteness verdict on the ball of radius `ball` around the
/// oracle base. A discrete verdict needs no non-trivial element fixing the
/// witness and the `fix`-ball; a non-discrete one needs such an element
/// fixing the `r`-ball for every `r ≤ fix`. Movers may lie at any depth
/// below the ball radius.
pub fn oracle_consistency(
    d: &Diagram,
    action: &ActionType,
    verdict: &DiscretenessVerdict,
    fix: usize,
    ball: usize,
) -> Result<OracleReport, UgroupError> {
    if ball < fix + 2 {
        return Err(UgroupError::InvalidRadii { fix, ball });
    }
    let g = d.graph();
    if (0..g.arc_count()).any(|a| d.colour_set(a).is_infinite()) {
        return Err(UgroupError::InfiniteColours);
    }
    let base = oracle_base(d, action, verdict);
    let t = DeltaTree::build(d, &base, ball)?;
    let inner = ball - 1;
    let mut checks = Vec::new();
    if verdict.discrete {
        let witness = verdict.witness.as_ref().expect("discrete verdicts carry a witness");
        let mut set: Vec<usize> = t.ball(fix);
        for p in &witness.paths {
            let path: Path = p
                .iter()
                .map(|c| {
                    t.navigator()
                        .colours()
                        .id(c)
                        .ok_or_else(|| UgroupError::RadiusTooSmall(format!("({})", p.join(" "))))
                })
                .collect::<Result<_, _>>()?;
            let i = t
                .find(&path)
                .filter(|&i| t.depth(i) + 2 <= ball)
                .ok_or_else(|| UgroupError::RadiusTooSmall(format!("({})", p.join(" "))))?;
            set.push(i);
        }
        set.sort_unstable();
        set.dedup();
        checks.push(OracleCheck {
            fixed: format!("witness+B{fix}"),
            expect_mover: false,
            outcome: stabiliser_search(&t, &set, inner, DEFAULT_NODE_CAP)?,
        });
    } else {
        for r in 0..=fix {
            checks.push(OracleCheck {
                fixed: format!("B{r}"),
                expect_mover: true,
                outcome: stabiliser_search(&t, &t.ball(r), inner, DEFAULT_NODE_CAP)?,
            });
        }
    }
    Ok(OracleReport {
        base,
        discrete: verdict.discrete,
        checks,
    })
}
