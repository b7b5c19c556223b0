//! Discreteness of the universal group, decided from the action type and the
//! local actions, with an explicit finite set of tree vertices whose
//! pointwise stabiliser is trivial when the group is discrete.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::diagram::{ColourSet, Diagram, LocalAction};
use crate::perm::{PermError, DEFAULT_CAP};
use crate::scopo::{ActionType, Cotree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscreteError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("the group is not discrete")]
    NotDiscrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    FixedVertex,
    Inversion,
    LinealTrivial,
    Horocyclic,
    Focal,
    GeneralSemiregular,
}

impl Clause {
    pub fn id(self) -> &'static str {
        match self {
            Clause::FixedVertex => "fixed-vertex",
            Clause::Inversion => "inversion",
            Clause::LinealTrivial => "lineal-trivial",
            Clause::Horocyclic => "horocyclic",
            Clause::Focal => "focal",
            Clause::GeneralSemiregular => "general-semiregular",
        }
    }
}

/// A finite set of Δ-tree vertices, as coloured paths from a base vertex.
/// Entries of the form `<...>` stand for colours of a finite base of a
/// symbolic action, which the file format cannot enumerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub base: String,
    pub paths: Vec<Vec<String>>,
}

impl Witness {
    pub fn is_symbolic(&self) -> bool {
        self.paths.iter().flatten().any(|c| c.starts_with('<'))
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paths: Vec<String> = self
            .paths
            .iter()
            .map(|p| format!("({})", p.join(" ")))
            .collect();
        write!(f, "{}:{}", self.base, paths.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretenessVerdict {
    pub discrete: bool,
    pub clause: Clause,
    /// For non-discrete verdicts, the condition that failed.
    pub violation: Option<String>,
    /// Symbolic flags the decision relied on, as `vertex.flag=value`.
    pub flags: Vec<String>,
    pub witness: Option<Witness>,
}

impl DiscretenessVerdict {
    fn yes(clause: Clause, flags: Vec<String>) -> Self {
        DiscretenessVerdict {
            discrete: true,
            clause,
            violation: None,
            flags,
            witness: None,
        }
    }

    fn no(clause: Clause, violation: String, flags: Vec<String>) -> Self {
        DiscretenessVerdict {
            discrete: false,
            clause,
            violation: Some(violation),
            flags,
            witness: None,
        }
    }

    /// The `discrete=<yes|no> clause=<id> witness=<...>` record.
    pub fn record(&self) -> String {
        let witness = match (&self.witness, &self.violation) {
            (Some(w), _) => w.to_string(),
            (None, Some(v)) => v.clone(),
            (None, None) => String::new(),
        };
        let mut line = format!(
            "discrete={} clause={} witness={}",
            if self.discrete { "yes" } else { "no" },
            self.clause.id(),
            witness
        );
        if !self.flags.is_empty() {
            line.push_str(" flags=");
            line.push_str(&self.flags.join(","));
        }
        line
    }
}

fn vertex_name(d: &Diagram, v: usize) -> &str {
    d.graph().vertex_name(v)
}

/// First non-trivial periodic segment of any ray.
fn nontrivial_periodic(d: &Diagram) -> Option<String> {
    for ray in d.rays() {
        for pos in ray.periodic_positions() {
            if !ray.segments[pos].action.is_trivial() {
                return Some(format!("nontrivial-ray-action:{}[{pos}]", ray.id));
            }
        }
    }
    None
}

/// Conditions on vertices with infinitely many colours.
fn infinite_conditions(d: &Diagram, flags: &mut Vec<String>) -> Option<String> {
    let g = d.graph();
    for v in 0..d.vertex_count() {
        if !d.has_infinite_colours(v) {
            continue;
        }
        if let Some(LocalAction::Symbolic(s)) = d.action(v) {
            flags.push(format!("{}.finite_base={}", vertex_name(d, v), s.finite_base));
            if !s.finite_base {
                return Some(format!("no-finite-base:{}", vertex_name(d, v)));
            }
        }
        for &a in g.out_arcs(v) {
            if !d.colour_set(a).is_infinite() {
                continue;
            }
            let u = g.terminus(a);
            if let Some(LocalAction::Symbolic(s)) = d.action(u) {
                flags.push(format!("{}.trivial={}", vertex_name(d, u), s.trivial));
            }
            if !d.action(u).is_none_or(LocalAction::is_trivial) {
                return Some(format!("nontrivial-beyond-infinite:{}", g.arc_name(a)));
            }
        }
    }
    None
}

fn is_semiregular(action: Option<&LocalAction>, name: &str, flags: &mut Vec<String>) -> Result<bool, PermError> {
    match action {
        None => Ok(true),
        Some(LocalAction::Symbolic(s)) => {
            flags.push(format!("{name}.semiregular={}", s.semiregular));
            Ok(s.semiregular || s.trivial)
        }
        Some(a) => a.is_semiregular(),
    }
}

fn general_clause(d: &Diagram, cotree: &Cotree, flags: &mut Vec<String>) -> Result<Option<String>, PermError> {
    for v in 0..d.vertex_count() {
        let name = vertex_name(d, v);
        let inside = cotree.vertices.core.binary_search(&v).is_ok();
        let action = d.action(v);
        if inside {
            if !is_semiregular(action, name, flags)? {
                return Ok(Some(format!("not-semiregular:{name}")));
            }
        } else {
            if let Some(LocalAction::Symbolic(s)) = action {
                flags.push(format!("{name}.trivial={}", s.trivial));
            }
            if !action.is_none_or(LocalAction::is_trivial) {
                return Ok(Some(format!("nontrivial-outside-cotree:{name}")));
            }
        }
    }
    for (r, ray) in d.rays().iter().enumerate() {
        let part = &cotree.vertices.rays[r];
        for (pos, seg) in ray.segments.iter().enumerate() {
            let inside = part.contains(ray.lead, pos);
            let label = format!("{}[{pos}]", ray.id);
            if inside {
                if !seg.action.is_semiregular(DEFAULT_CAP)? {
                    return Ok(Some(format!("not-semiregular:{label}")));
                }
            } else if !seg.action.is_trivial() {
                return Ok(Some(format!("nontrivial-outside-cotree:{label}")));
            }
        }
    }
    Ok(None)
}

/// Applies the discreteness criterion for the given action type.
pub fn decide(d: &Diagram, verdict: &ActionType) -> Result<DiscretenessVerdict, DiscreteError> {
    let mut flags = Vec::new();
    let mut result = match verdict {
        ActionType::FixedVertex { .. } | ActionType::Inversion { .. } => {
            let clause = if matches!(verdict, ActionType::FixedVertex { .. }) {
                Clause::FixedVertex
            } else {
                Clause::Inversion
            };
            match nontrivial_periodic(d).or_else(|| infinite_conditions(d, &mut flags)) {
                Some(v) => DiscretenessVerdict::no(clause, v, flags),
                None => DiscretenessVerdict::yes(clause, flags),
            }
        }
        ActionType::Lineal { .. } => {
            if d.all_actions_trivial() {
                DiscretenessVerdict::yes(Clause::LinealTrivial, flags)
            } else {
                DiscretenessVerdict::no(Clause::LinealTrivial, "nontrivial-action".into(), flags)
            }
        }
        ActionType::Horocyclic { .. } => {
            DiscretenessVerdict::no(Clause::Horocyclic, "unconditional".into(), flags)
        }
        ActionType::Focal { .. } => {
            DiscretenessVerdict::no(Clause::Focal, "unconditional".into(), flags)
        }
        ActionType::General { cotree } => match general_clause(d, cotree, &mut flags)? {
            Some(v) => DiscretenessVerdict::no(Clause::GeneralSemiregular, v, flags),
            None => DiscretenessVerdict::yes(Clause::GeneralSemiregular, flags),
        },
    };
    if result.discrete {
        result.witness = Some(discreteness_witness(d, verdict)?);
    }
    Ok(result)
}

/// A finite vertex set with trivial pointwise stabiliser. For a fixed vertex
/// or an inverted edge this follows the iterated base construction outward
/// from the witness vertex; otherwise a vertex or an arc suffices.
pub fn discreteness_witness(d: &Diagram, verdict: &ActionType) -> Result<Witness, DiscreteError> {
    match verdict {
        ActionType::FixedVertex { witnesses } => iterated_base(d, witnesses[0], None),
        ActionType::Inversion { vertex, arc } => iterated_base(d, *vertex, Some(*arc)),
        ActionType::Lineal { cotree } => Ok(Witness {
            base: vertex_name(d, cotree.vertices.core[0]).to_string(),
            paths: vec![Vec::new()],
        }),
        ActionType::General { cotree } => {
            let v = cotree.vertices.core[0];
            let first = d
                .out_arcs(v)
                .into_iter()
                .find_map(|a| match d.colours_of(a) {
                    ColourSet::Finite(c) => c.first().cloned(),
                    ColourSet::Infinite(name) => Some(format!("<{name}>")),
                });
            let mut paths = vec![Vec::new()];
            paths.extend(first.map(|c| vec![c]));
            Ok(Witness {
                base: vertex_name(d, v).to_string(),
                paths,
            })
        }
        ActionType::Horocyclic { .. } | ActionType::Focal { .. } => Err(DiscreteError::NotDiscrete),
    }
}

fn iterated_base(d: &Diagram, root: usize, inverted: Option<usize>) -> Result<Witness, DiscreteError> {
    let depth = d.rays().iter().map(|r| r.lead).max().map_or(0, |m| m + 1);
    let t = d.truncate_rays(depth);
    let g = t.graph();

    // whether some vertex beyond each arc carries a non-trivial action
    let nontrivial: Vec<bool> = (0..g.arc_count())
        .map(|a| {
            if g.is_loop(a) {
                return (0..t.vertex_count()).any(|v| !t.action(v).is_none_or(LocalAction::is_trivial));
            }
            let mut seen = vec![false; t.vertex_count()];
            let start = g.terminus(a);
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut found = false;
            while let Some(v) = queue.pop_front() {
                if !t.action(v).is_none_or(LocalAction::is_trivial) {
                    found = true;
                    break;
                }
                for &b in g.out_arcs(v) {
                    if b == g.reverse(a) {
                        continue;
                    }
                    let w = g.terminus(b);
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            found
        })
        .collect();

    let mut paths = Vec::new();
    let mut stack: Vec<(usize, Option<String>, Vec<String>)> = vec![(root, None, Vec::new())];
    let guard = 4 * (t.vertex_count() + 2);
    while let Some((u, parent, path)) = stack.pop() {
        if path.len() > guard {
            break;
        }
        let base: Vec<String> = match t.action(u) {
            Some(LocalAction::Explicit(group)) => group
                .find_base(DEFAULT_CAP)?
                .into_iter()
                .map(|p| group.name(p).to_string())
                .filter(|c| Some(c) != parent.as_ref())
                .collect(),
            Some(LocalAction::Symbolic(_)) => vec![format!("<base {}>", g.vertex_name(u))],
            None => Vec::new(),
        };
        let mut base = base;
        if path.is_empty() {
            if let Some(e) = inverted {
                for c in t.colour_set(e).colours() {
                    if !base.contains(c) {
                        base.push(c.clone());
                    }
                }
            }
        }
        let mut children = Vec::new();
        for &b in g.out_arcs(u) {
            match t.colour_set(b) {
                ColourSet::Infinite(name) => {
                    if nontrivial[b] || base.iter().any(|c| c.starts_with('<')) {
                        let mut p = path.clone();
                        p.push(format!("<base {} in {name}>", g.vertex_name(u)));
                        paths.push(p);
                    }
                }
                ColourSet::Finite(colours) => {
                    let meets_base = colours.iter().any(|c| base.contains(c));
                    if !(meets_base || nontrivial[b]) {
                        continue;
                    }
                    let back = t.colour_set(g.reverse(b)).colours().first().cloned();
                    for c in colours {
                        if Some(c) == parent.as_ref() {
                            continue;
                        }
                        let mut p = path.clone();
                        p.push(c.clone());
                        children.push((g.terminus(b), back.clone(), p));
                    }
                }
            }
        }
        paths.push(path);
        stack.extend(children.into_iter().rev());
    }
    paths.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    paths.dedup();
    Ok(Witness {
        base: g.vertex_name(root).to_string(),
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::diagram::{load, DiagramBuilder};
    use crate::scopo::classify;

    fn verdict(name: &str) -> DiscretenessVerdict {
        let d = corpus::load_builtin(name).unwrap();
        decide(&d, &classify(&d).unwrap()).unwrap()
    }

    #[test]
    fn corpus_verdicts() {
        for (name, discrete, clause) in [
            ("fixed-vertex-T3", false, "fixed-vertex"),
            ("inversion-T3", false, "inversion"),
            ("lineal-T3", false, "lineal-trivial"),
            ("horocyclic-T3", false, "horocyclic"),
            ("focal-T3", false, "focal"),
            ("general-autT3", false, "general-semiregular"),
            ("u-s2-a3", true, "general-semiregular"),
            ("lineal-Z", true, "lineal-trivial"),
            ("single-edge-inversion", true, "inversion"),
        ] {
            let v = verdict(name);
            assert_eq!(v.discrete, discrete, "{name}");
            assert_eq!(v.clause.id(), clause, "{name}");
        }
    }

    #[test]
    fn fixed_vertex_reason() {
        let v = verdict("fixed-vertex-T3");
        assert_eq!(v.violation.as_deref(), Some("nontrivial-ray-action:R[1]"));
    }

    #[test]
    fn witnesses() {
        assert_eq!(verdict("u-s2-a3").witness.unwrap().to_string(), "u:(),(1)");
        assert_eq!(verdict("lineal-Z").witness.unwrap().to_string(), "v:()");
        assert_eq!(
            verdict("single-edge-inversion").witness.unwrap().to_string(),
            "v:(),(1)"
        );
        assert_eq!(
            verdict("u-s2-a3").record(),
            "discrete=yes clause=general-semiregular witness=u:(),(1)"
        );
    }

    #[test]
    fn focal_ignores_actions() {
        let d = corpus::load_builtin("focal-T3").unwrap();
        let text = crate::diagram::save(&d).replace("action v gens (2 3)", "action v gens (2 3); (2 3)");
        let d2 = load(&text).unwrap();
        let v = decide(&d2, &classify(&d2).unwrap()).unwrap();
        assert!(!v.discrete);
    }

    #[test]
    fn fixed_vertex_with_trivial_ray_is_discrete() {
        let text = "\
vertex v0
action v0 gens (1 2 3); (1 2)
ray R at v0 period 1 lead 2
segment 0 action (b c) out 1 2 3 in a
segment 1 action trivial out b c in e
segment 2 action trivial out d in f
";
        let d = load(text).unwrap();
        assert!(d.is_valid(), "{:?}", d.validate());
        let t = classify(&d).unwrap();
        assert_eq!(t.label(), "FixedVertex");
        let v = decide(&d, &t).unwrap();
        assert!(v.discrete);
        let w = v.witness.unwrap();
        assert_eq!(w.base, "v0");
        assert!(w.paths.contains(&vec!["1".to_string()]));
        assert!(w.paths.contains(&vec!["1".to_string(), "b#1".to_string()]));
        assert_eq!(w.paths.len(), 10);
    }

    #[test]
    fn symbolic_flags_are_consumed() {
        let text = "\
vertex v w
arc big from v to w reverse back colours infinite N
arc back from w to v reverse big colours 1
action v symbolic trivial=false semiregular=false finite_base=true orbits big
action w trivial
";
        let d = load(text).unwrap();
        assert!(d.is_valid(), "{:?}", d.validate());
        let t = classify(&d).unwrap();
        assert_eq!(t.label(), "FixedVertex");
        let v = decide(&d, &t).unwrap();
        assert!(v.discrete);
        assert!(v.flags.contains(&"v.finite_base=true".to_string()));
        assert!(v.witness.unwrap().is_symbolic());

        let no_base = text.replace("finite_base=true", "finite_base=false");
        let d = load(&no_base).unwrap();
        let v = decide(&d, &classify(&d).unwrap()).unwrap();
        assert!(!v.discrete);
        assert_eq!(v.violation.as_deref(), Some("no-finite-base:v"));
    }

    #[test]
    fn trivial_actions_are_discrete_for_four_types() {
        let mut b = DiagramBuilder::new();
        b.vertex("u")
            .vertex("w")
            .edge(
                "a",
                "u",
                "w",
                "a'",
                crate::diagram::ColourSet::finite(["1"]),
                crate::diagram::ColourSet::finite(["2"]),
            );
        let d = b.build().unwrap();
        let t = classify(&d).unwrap();
        assert!(decide(&d, &t).unwrap().discrete);
    }
}
