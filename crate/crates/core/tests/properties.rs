use std::collections::HashSet;

use lad_core::diagram::{load, save};
use lad_core::dtree::{predicted_size, DeltaTree};
use lad_core::perm::DEFAULT_CAP;
use lad_core::random::{random_diagram, random_group, rng, RandomDiagramConfig};
use lad_core::scopo::{classify, minimal_cotree, prune_with, single_vertex_cotrees, ActionType};
use lad_core::universal::{extend, is_member, local_action};
use lad_core::{Diagram, LocalAction};
use proptest::prelude::*;
use rand::Rng;

fn diagram(seed: u64) -> Diagram {
    random_diagram(&mut rng(seed), &RandomDiagramConfig::default())
}

/// Arcs pointing towards `v` in a tree, found by walking away from it.
fn arcs_towards(d: &Diagram, v: usize) -> Vec<usize> {
    let g = d.graph();
    let mut seen = vec![false; g.vertex_count()];
    seen[v] = true;
    let mut stack = vec![v];
    let mut out = Vec::new();
    while let Some(x) = stack.pop() {
        for &a in g.out_arcs(x) {
            let y = g.terminus(a);
            if !seen[y] {
                seen[y] = true;
                out.push(g.reverse(a));
                stack.push(y);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let d = diagram(seed);
        let text = save(&d);
        let back = load(&text).unwrap();
        prop_assert_eq!(save(&back), text);
        prop_assert!(back.validate().is_empty());
    }

    #[test]
    fn pruning_order_is_irrelevant(seed in any::<u64>(), order in any::<u64>()) {
        let d = diagram(seed);
        let minimal = minimal_cotree(&d).unwrap();
        let singles = single_vertex_cotrees(&d).unwrap();
        let mut r = rng(order);
        let set = prune_with(&d, |leaves| r.gen_range(0..leaves.len())).unwrap();
        if singles.is_empty() {
            prop_assert_eq!(set, minimal.vertices);
        } else {
            prop_assert_eq!(set.core.len(), 1);
            prop_assert!(singles.contains(&set.core[0]));
        }
    }

    #[test]
    fn fixed_vertex_iff_tree_with_singleton_arcs_towards_a_vertex(seed in any::<u64>()) {
        let d = diagram(seed);
        let g = d.graph();
        let expected = g.is_tree()
            && (0..g.vertex_count()).any(|v| {
                arcs_towards(&d, v).iter().all(|&a| d.colour_set(a).len() == Some(1))
            });
        let got = matches!(classify(&d).unwrap(), ActionType::FixedVertex { .. });
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn classification_never_reports_rays_on_finite_diagrams(seed in any::<u64>()) {
        let d = diagram(seed);
        let horocyclic = matches!(classify(&d).unwrap(), ActionType::Horocyclic { .. });
        prop_assert!(!horocyclic);
    }

    #[test]
    fn delta_trees_are_coloured_and_sized(seed in any::<u64>(), radius in 0usize..4) {
        let d = diagram(seed);
        let base = d.graph().vertex_name(0).to_string();
        let t = DeltaTree::build(&d, &base, radius).unwrap();
        prop_assert!(t.check_colouring().is_empty());
        prop_assert_eq!(t.len(), predicted_size(&d, &base, radius).unwrap());
        let paths: HashSet<_> = t.vertices().iter().map(|v| v.path.clone()).collect();
        prop_assert_eq!(paths.len(), t.len());
    }

    #[test]
    fn smaller_balls_are_restrictions(seed in any::<u64>(), radius in 1usize..4) {
        let d = diagram(seed);
        let base = d.graph().vertex_name(0).to_string();
        let big = DeltaTree::build(&d, &base, radius).unwrap();
        let small = DeltaTree::build(&d, &base, radius - 1).unwrap();
        let inner: Vec<_> = big.ball(radius - 1).into_iter().map(|i| big.vertex(i).path.clone()).collect();
        let small_paths: Vec<_> = small.vertices().iter().map(|v| v.path.clone()).collect();
        prop_assert_eq!(inner, small_paths);
    }

    #[test]
    fn extension_at_the_root_is_a_member(seed in any::<u64>(), pick in any::<u64>()) {
        let d = diagram(seed);
        let base = d.graph().vertex_name(0).to_string();
        let t = DeltaTree::build(&d, &base, 3).unwrap();
        let Some(LocalAction::Explicit(group)) = d.action(0) else { unreachable!() };
        let elements = group.enumerate(DEFAULT_CAP);
        prop_assume!(elements.is_ok());
        let elements = elements.unwrap();
        let sigma = &elements[(pick % elements.len() as u64) as usize];
        let g = extend(&t, 0, sigma, None).unwrap();
        prop_assert!(g.fixes(&t, 0));
        prop_assert_eq!(&local_action(&t, &g, 0).unwrap(), sigma);
        prop_assert!(is_member(&t, &g).unwrap());

        let small = DeltaTree::build(&d, &base, 2).unwrap();
        let h = extend(&small, 0, sigma, None).unwrap();
        for i in 0..small.len() {
            let j = t.find(&small.vertex(i).path).unwrap();
            prop_assert_eq!(h.image(i), g.image(j));
        }
    }

    #[test]
    fn orbits_partition_and_are_invariant(seed in any::<u64>(), degree in 1usize..=8) {
        let g = random_group(&mut rng(seed), degree, 3);
        let orbits = g.orbits();
        let mut all: Vec<usize> = orbits.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..degree).collect::<Vec<_>>());
        for orbit in &orbits {
            for s in g.generators() {
                for &p in orbit {
                    prop_assert!(orbit.contains(&s.apply(p)));
                }
            }
        }
    }

    #[test]
    fn permutation_laws(seed in any::<u64>(), degree in 1usize..=8) {
        let g = random_group(&mut rng(seed), degree, 3);
        for s in g.generators() {
            prop_assert!(s.then(&s.inverse()).is_identity());
            prop_assert!(s.inverse().then(s).is_identity());
        }
    }
}
