//! Finite permutation groups on explicit, ordered point sets.
//!
//! Points are colour names; internally every permutation acts on the
//! positions `0..n` of the group's universe. Nothing here goes beyond bounded
//! enumeration: orders of the local actions met in practice are small, and
//! every enumerating operation is guarded by a cap.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Default bound on the number of group elements any operation enumerates.
pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point `{0}` occurs twice in one generator")]
    RepeatedPoint(String),
    #[error("duplicate point `{0}` in universe")]
    DuplicatePoint(String),
    #[error("malformed cycle notation `{0}`")]
    Malformed(String),
    #[error("permutation of degree {got} on a universe of {expected} points")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("enumeration exceeded cap {cap} ({partial} elements found)")]
    CapExceeded { cap: usize, partial: usize },
}

pub type Result<T> = std::result::Result<T, PermError>;

/// A bijection of `0..n`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree).collect())
    }

    /// Returns `None` unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.0[point]
    }

    /// `self` followed by `other`: `x ↦ other(self(x))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixes(&self, point: usize) -> bool {
        self.0[point] == point
    }

    pub fn has_fixed_point(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &j)| i == j)
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)` against a point index.
    /// The empty string is the identity.
    pub fn parse_cycles(text: &str, index: &HashMap<String, usize>) -> Result<Self> {
        let n = index.len();
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| PermError::Malformed(text.to_string()))?;
            let close = open
                .find(')')
                .ok_or_else(|| PermError::Malformed(text.to_string()))?;
            let body = &open[..close];
            if body.contains('(') {
                return Err(PermError::Malformed(text.to_string()));
            }
            let points = body
                .split_whitespace()
                .map(|name| {
                    index
                        .get(name)
                        .copied()
                        .ok_or_else(|| PermError::UnknownPoint(name.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            for (k, &p) in points.iter().enumerate() {
                if touched[p] {
                    let name = index
                        .iter()
                        .find(|(_, &v)| v == p)
                        .map(|(k, _)| k.clone())
                        .unwrap_or_default();
                    return Err(PermError::RepeatedPoint(name));
                }
                touched[p] = true;
                images[p] = points[(k + 1) % points.len()];
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Permutation(images))
    }

    /// Cycle notation with fixed points omitted; the identity prints as `()`.
    pub fn to_cycles(&self, universe: &[String]) -> String {
        let mut seen = vec![false; self.0.len()];
        let mut out = String::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(universe[i].as_str());
                i = self.0[i];
            }
            out.push('(');
            out.push_str(&cycle.join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.0)
    }
}

/// A permutation group given by generators on an ordered universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    universe: Vec<String>,
    index: HashMap<String, usize>,
    generators: Vec<Permutation>,
}

impl PermGroup {
    pub fn new(universe: Vec<String>, generators: Vec<Permutation>) -> Result<Self> {
        let index = build_index(&universe)?;
        for g in &generators {
            if g.degree() != universe.len() {
                return Err(PermError::DegreeMismatch {
                    expected: universe.len(),
                    got: g.degree(),
                });
            }
        }
        Ok(PermGroup {
            universe,
            index,
            generators,
        })
    }

    pub fn trivial(universe: Vec<String>) -> Result<Self> {
        PermGroup::new(universe, Vec::new())
    }

    /// Builds a group from generators in cycle notation.
    pub fn from_cycles<S: AsRef<str>>(universe: Vec<String>, generators: &[S]) -> Result<Self> {
        let index = build_index(&universe)?;
        let generators = generators
            .iter()
            .map(|g| Permutation::parse_cycles(g.as_ref(), &index))
            .collect::<Result<Vec<_>>>()?;
        Ok(PermGroup {
            universe,
            index,
            generators,
        })
    }

    /// Parses a `;`-separated generator list, e.g. `(1 2 3); (1 2)`.
    pub fn parse(universe: Vec<String>, text: &str) -> Result<Self> {
        let gens: Vec<&str> = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split(';').map(str::trim).collect()
        };
        PermGroup::from_cycles(universe, &gens)
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn degree(&self) -> usize {
        self.universe.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn point(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| PermError::UnknownPoint(name.to_string()))
    }

    pub fn name(&self, point: usize) -> &str {
        &self.universe[point]
    }

    /// Generators in cycle notation, `;`-separated (empty for the trivial group).
    pub fn generators_to_string(&self) -> String {
        self.generators
            .iter()
            .filter(|g| !g.is_identity())
            .map(|g| g.to_cycles(&self.universe))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Orbit of `name`, in BFS order over the generator list.
    pub fn orbit(&self, name: &str) -> Result<Vec<&str>> {
        let p = self.point(name)?;
        Ok(self
            .orbit_of(p)
            .into_iter()
            .map(|i| self.universe[i].as_str())
            .collect())
    }

    pub fn orbit_of(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut order = vec![point];
        seen[point] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
        order
    }

    /// Orbit partition; blocks appear in order of their first point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.degree()];
        let mut blocks = Vec::new();
        for p in 0..self.degree() {
            if assigned[p] {
                continue;
            }
            let block = self.orbit_of(p);
            for &q in &block {
                assigned[q] = true;
            }
            blocks.push(block);
        }
        blocks
    }

    pub fn orbit_names(&self) -> Vec<Vec<String>> {
        self.orbits()
            .into_iter()
            .map(|b| b.into_iter().map(|i| self.universe[i].clone()).collect())
            .collect()
    }

    /// All elements, breadth-first over generator words, identity first.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Permutation>> {
        let id = Permutation::identity(self.degree());
        let mut seen: HashSet<Permutation> = HashSet::new();
        seen.insert(id.clone());
        let mut elements = vec![id];
        let mut queue = VecDeque::from([0usize]);
        if cap == 0 {
            return Err(PermError::CapExceeded { cap, partial: 1 });
        }
        while let Some(i) = queue.pop_front() {
            for g in &self.generators {
                let next = elements[i].then(g);
                if seen.insert(next.clone()) {
                    elements.push(next);
                    if elements.len() > cap {
                        return Err(PermError::CapExceeded {
                            cap,
                            partial: elements.len(),
                        });
                    }
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        Ok(elements)
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        self.enumerate(cap).map(|e| e.len())
    }

    pub fn contains(&self, perm: &Permutation, cap: usize) -> Result<bool> {
        if perm.degree() != self.degree() {
            return Ok(false);
        }
        if perm.is_identity() || self.generators.contains(perm) {
            return Ok(true);
        }
        Ok(self.enumerate(cap)?.contains(perm))
    }

    /// True iff every generator is the identity.
    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    /// True iff no non-identity element fixes a point.
    pub fn is_semiregular(&self, cap: usize) -> Result<bool> {
        if self.is_trivial() {
            return Ok(true);
        }
        Ok(self
            .enumerate(cap)?
            .iter()
            .all(|g| g.is_identity() || !g.has_fixed_point()))
    }

    /// Subgroup fixing every point of `points`. Generators are the surviving
    /// elements that are not already generated by earlier ones.
    pub fn pointwise_stabiliser(&self, points: &[usize], cap: usize) -> Result<PermGroup> {
        let mut generators: Vec<Permutation> = Vec::new();
        if !self.is_trivial() {
            let mut span: HashSet<Permutation> = HashSet::from([Permutation::identity(self.degree())]);
            for g in self.enumerate(cap)? {
                if points.iter().all(|&p| g.fixes(p)) && !span.contains(&g) {
                    generators.push(g);
                    span = closure(&span, &generators);
                }
            }
        }
        Ok(PermGroup {
            universe: self.universe.clone(),
            index: self.index.clone(),
            generators,
        })
    }

    /// Greedy base: repeatedly stabilise the first point moved by the
    /// current stabiliser.
    pub fn find_base(&self, cap: usize) -> Result<Vec<usize>> {
        let mut base = Vec::new();
        let mut current = self.pointwise_stabiliser(&[], cap)?;
        while !current.is_trivial() {
            let moved = (0..self.degree())
                .find(|&p| current.generators.iter().any(|g| !g.fixes(p)))
                .expect("non-trivial group moves a point");
            base.push(moved);
            current = current.pointwise_stabiliser(&[moved], cap)?;
        }
        Ok(base)
    }

    /// Elements mapping `from` to `to`, in enumeration order.
    pub fn transporters(&self, from: usize, to: usize, cap: usize) -> Result<Vec<Permutation>> {
        if self.is_trivial() {
            let id = Permutation::identity(self.degree());
            return Ok(if from == to { vec![id] } else { Vec::new() });
        }
        Ok(self
            .enumerate(cap)?
            .into_iter()
            .filter(|g| g.apply(from) == to)
            .collect())
    }
}

/// The group generated by `gens`, grown from a subgroup `start` of it.
fn closure(start: &HashSet<Permutation>, gens: &[Permutation]) -> HashSet<Permutation> {
    let mut seen = start.clone();
    let mut queue: VecDeque<Permutation> = start.iter().cloned().collect();
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let next = x.then(g);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

fn build_index(universe: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(universe.len());
    for (i, name) in universe.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(PermError::DuplicatePoint(name.clone()));
        }
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn s3() -> PermGroup {
        PermGroup::from_cycles(names(&["1", "2", "3"]), &["(1 2 3)", "(1 2)"]).unwrap()
    }

    fn a3() -> PermGroup {
        PermGroup::from_cycles(names(&["1'", "2'", "3'"]), &["(1' 2' 3')"]).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let g = PermGroup::from_cycles(names(&["1", "2", "3"]), &["(1 2)"]).unwrap();
        assert_eq!(g.orbit("1").unwrap(), vec!["1", "2"]);
        let t = PermGroup::trivial(names(&["a"])).unwrap();
        assert_eq!(t.orbit("a").unwrap(), vec!["a"]);
        // BFS from 3: (1 2 3) sends 3 to 1, (1 2) fixes 3; then 1 -> 2.
        assert_eq!(s3().orbit("3").unwrap(), vec!["3", "1", "2"]);
        assert_eq!(
            g.orbit("9").unwrap_err(),
            PermError::UnknownPoint("9".into())
        );
    }

    #[test]
    fn orbits_examples() {
        let g = PermGroup::from_cycles(names(&["1", "2", "3"]), &["(1 2)"]).unwrap();
        assert_eq!(g.orbit_names(), vec![names(&["1", "2"]), names(&["3"])]);
        let t = PermGroup::trivial(names(&["x", "y"])).unwrap();
        assert_eq!(t.orbit_names(), vec![names(&["x"]), names(&["y"])]);
        assert_eq!(a3().orbits().len(), 1);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(s3().enumerate(10).unwrap().len(), 6);
        let t = PermGroup::trivial(names(&["a"])).unwrap();
        assert_eq!(t.enumerate(1).unwrap(), vec![Permutation::identity(1)]);
        let c3 = PermGroup::from_cycles(names(&["1", "2", "3"]), &["(1 2 3)"]).unwrap();
        match c3.enumerate(2) {
            Err(PermError::CapExceeded { cap: 2, partial }) => assert!(partial >= 2),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn semiregular_examples() {
        assert!(!s3().is_semiregular(DEFAULT_CAP).unwrap());
        assert!(a3().is_semiregular(DEFAULT_CAP).unwrap());
        let t = PermGroup::trivial(names(&["a", "b", "c"])).unwrap();
        assert!(t.is_semiregular(DEFAULT_CAP).unwrap());
    }

    #[test]
    fn trivial_examples() {
        assert!(PermGroup::trivial(names(&["a"])).unwrap().is_trivial());
        let ids = PermGroup::from_cycles(names(&["1", "2"]), &["", "()"]);
        // `()` is an empty cycle; both generators are the identity.
        assert!(ids.unwrap().is_trivial());
        let g = PermGroup::from_cycles(names(&["1", "2"]), &["(1 2)"]).unwrap();
        assert!(!g.is_trivial());
    }

    #[test]
    fn stabiliser_examples() {
        let g = s3();
        let stab = g.pointwise_stabiliser(&[0], DEFAULT_CAP).unwrap();
        assert_eq!(stab.order(DEFAULT_CAP).unwrap(), 2);
        assert_eq!(stab.generators_to_string(), "(2 3)");
        let base = g.find_base(DEFAULT_CAP).unwrap();
        assert!(g.pointwise_stabiliser(&base, DEFAULT_CAP).unwrap().is_trivial());
        let t = PermGroup::trivial(names(&["a"])).unwrap();
        assert!(t.pointwise_stabiliser(&[], DEFAULT_CAP).unwrap().is_trivial());
    }

    #[test]
    fn base_examples() {
        let t = PermGroup::trivial(names(&["a", "b"])).unwrap();
        assert!(t.find_base(DEFAULT_CAP).unwrap().is_empty());
        assert_eq!(s3().find_base(DEFAULT_CAP).unwrap(), vec![0, 1]);
        assert_eq!(a3().find_base(DEFAULT_CAP).unwrap(), vec![0]);
    }

    #[test]
    fn parse_errors() {
        let u = names(&["1", "2", "3"]);
        assert!(matches!(
            PermGroup::from_cycles(u.clone(), &["(1 2"]),
            Err(PermError::Malformed(_))
        ));
        assert!(matches!(
            PermGroup::from_cycles(u.clone(), &["(1 4)"]),
            Err(PermError::UnknownPoint(_))
        ));
        assert!(matches!(
            PermGroup::from_cycles(u.clone(), &["(1 2)(2 3)"]),
            Err(PermError::RepeatedPoint(_))
        ));
        assert!(matches!(
            PermGroup::trivial(names(&["1", "1"])),
            Err(PermError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn cycle_notation_round_trip() {
        let u = names(&["a", "b", "c", "d", "e"]);
        let g = PermGroup::from_cycles(u.clone(), &["(a b c)(d e)"]).unwrap();
        let text = g.generators()[0].to_cycles(&u);
        assert_eq!(text, "(a b c)(d e)");
        assert_eq!(Permutation::identity(3).to_cycles(&u), "()");
    }

    prop_compose! {
        fn small_group()(n in 1usize..=8)
            (images in proptest::collection::vec(Just((0..n).collect::<Vec<_>>()).prop_shuffle(), 0..=3), n in Just(n))
            -> PermGroup {
            let universe = (0..n).map(|i| format!("p{i}")).collect();
            let gens = images.into_iter().map(|v| Permutation::from_images(v).unwrap()).collect();
            PermGroup::new(universe, gens).unwrap()
        }
    }

    proptest! {
        #[test]
        fn enumeration_is_deterministic(g in small_group()) {
            let a = g.enumerate(DEFAULT_CAP);
            let b = g.enumerate(DEFAULT_CAP);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn inverse_composes_to_identity(g in small_group()) {
            for p in g.generators() {
                prop_assert!(p.then(&p.inverse()).is_identity());
            }
        }
    }
}
