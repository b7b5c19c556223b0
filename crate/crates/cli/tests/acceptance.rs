use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lad_core::discrete::decide;
use lad_core::dtree::DeltaTree;
use lad_core::perm::DEFAULT_CAP;
use lad_core::random::{random_diagram, random_group, rng, RandomDiagramConfig};
use lad_core::scopo::{
    attractor, classify, enumerate_scopos, minimal_cotree, prune_with, single_vertex_cotrees, Attractor,
    ScopoType,
};
use lad_core::universal::{extend, half_tree, is_member, local_action};
use lad_core::{corpus, Diagram};
use rand::seq::SliceRandom;
use rand::Rng;

type Check = Result<String, String>;

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    match result {
        Ok(detail) if elapsed <= limit => Ok(format!("{detail}, {:.2}s", elapsed.as_secs_f64())),
        Ok(_) => Err(format!("took {:.2}s, limit {}s", elapsed.as_secs_f64(), limit.as_secs())),
        Err(e) => Err(e),
    }
}

fn golden_classification() -> Check {
    let expected = [
        ("fixed-vertex-T3", "FixedVertex"),
        ("inversion-T3", "Inversion"),
        ("lineal-T3", "Lineal"),
        ("horocyclic-T3", "Horocyclic"),
        ("focal-T3", "Focal"),
        ("general-autT3", "General"),
        ("u-s2-a3", "General"),
    ];
    for (name, label) in expected {
        let d = corpus::load_builtin(name).map_err(|e| e.to_string())?;
        let got = classify(&d).map_err(|e| e.to_string())?;
        if got.label() != label {
            return Err(format!("{name}: expected {label}, got {}", got.label()));
        }
    }
    Ok(format!("{} diagrams", expected.len()))
}

fn discreteness_verdicts() -> Check {
    let expected = [
        ("fixed-vertex-T3", false),
        ("inversion-T3", false),
        ("lineal-T3", false),
        ("horocyclic-T3", false),
        ("focal-T3", false),
        ("general-autT3", false),
        ("u-s2-a3", true),
        ("lineal-Z", true),
        ("single-edge-inversion", true),
    ];
    for (name, discrete) in expected {
        let d = corpus::load_builtin(name).map_err(|e| e.to_string())?;
        let action = classify(&d).map_err(|e| e.to_string())?;
        let verdict = decide(&d, &action).map_err(|e| e.to_string())?;
        if verdict.discrete != discrete {
            return Err(format!("{name}: got {}", verdict.record()));
        }
    }
    Ok(format!("{} diagrams", expected.len()))
}

fn oracle_cross_validation() -> Check {
    let mut slowest = Duration::ZERO;
    for entry in corpus::all() {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_lad"))
            .args(["oracle", &format!("builtin:{}", entry.name), "--fix-radius", "2", "--ball-radius", "4"])
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        let stdout = String::from_utf8_lossy(&out.stdout);
        if !out.status.success() || !stdout.contains("oracle=Consistent") {
            return Err(format!("{}: {stdout}", entry.name));
        }
        if elapsed > Duration::from_secs(60) {
            return Err(format!("{} took {:.1}s", entry.name, elapsed.as_secs_f64()));
        }
    }
    Ok(format!(
        "{} diagrams, slowest {:.2}s",
        corpus::all().len(),
        slowest.as_secs_f64()
    ))
}

fn random_population() -> Vec<Diagram> {
    let mut r = rng(20_261_019);
    let cfg = RandomDiagramConfig::default();
    (0..200).map(|_| random_diagram(&mut r, &cfg)).collect()
}

/// Every partial orientation, as sets of core arcs.
fn all_partial_orientations(d: &Diagram) -> Vec<BTreeSet<usize>> {
    let g = d.graph();
    let mut out = vec![BTreeSet::new()];
    for e in g.edges() {
        let r = g.reverse(e);
        let mut next = Vec::new();
        for o in &out {
            next.push(o.clone());
            if r != e {
                for a in [e, r] {
                    let mut with = o.clone();
                    with.insert(a);
                    next.push(with);
                }
            }
        }
        out = next;
    }
    out
}

fn naive_scopo(d: &Diagram, o: &BTreeSet<usize>) -> bool {
    let g = d.graph();
    if o.iter().any(|&a| o.contains(&g.reverse(a)) || d.colour_set(a).len() != Some(1)) {
        return false;
    }
    (0..g.vertex_count()).all(|v| {
        let chosen: Vec<usize> = g.out_arcs(v).iter().copied().filter(|a| o.contains(a)).collect();
        match chosen.as_slice() {
            [] => true,
            [a] => g
                .out_arcs(v)
                .iter()
                .all(|&b| b == *a || o.contains(&g.reverse(b))),
            _ => false,
        }
    })
}

/// Vertices on cycles of the step map `v ↦ t(a)`, `a` the chosen arc at `v`.
fn periodic_points(d: &Diagram, o: &BTreeSet<usize>) -> BTreeSet<usize> {
    let g = d.graph();
    let n = g.vertex_count();
    let step = |v: usize| {
        g.out_arcs(v)
            .iter()
            .find(|a| o.contains(a))
            .map_or(v, |&a| g.terminus(a))
    };
    let mut out = BTreeSet::new();
    for v in 0..n {
        let mut x = v;
        for _ in 0..n {
            x = step(x);
        }
        let start = x;
        loop {
            out.insert(x);
            x = step(x);
            if x == start {
                break;
            }
        }
    }
    out
}

/// When `k` induces a cotree, the arcs of the projecting paths pointing
/// towards it.
fn cotree_arcs(d: &Diagram, k: &BTreeSet<usize>) -> Option<BTreeSet<usize>> {
    let g = d.graph();
    let inside = |a: usize| k.contains(&g.origin(a)) && k.contains(&g.terminus(a));
    let first = *k.iter().next()?;
    let mut seen = HashSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(x) = queue.pop_front() {
        for &a in g.out_arcs(x) {
            if inside(a) && seen.insert(g.terminus(a)) {
                queue.push_back(g.terminus(a));
            }
        }
    }
    if seen.len() != k.len() {
        return None;
    }
    let mut towards = BTreeSet::new();
    let mut reached: HashSet<usize> = k.iter().copied().collect();
    let mut queue: VecDeque<usize> = k.iter().copied().collect();
    let mut used_edges = 0;
    while let Some(x) = queue.pop_front() {
        for &a in g.out_arcs(x) {
            let y = g.terminus(a);
            if k.contains(&y) || towards.contains(&a) {
                continue;
            }
            if !reached.insert(y) {
                return None;
            }
            used_edges += 1;
            towards.insert(g.reverse(a));
            queue.push_back(y);
        }
    }
    let edges_outside = g.edges().iter().filter(|&&e| !inside(e)).count();
    if used_edges != edges_outside || reached.len() != g.vertex_count() {
        return None;
    }
    if towards.iter().any(|&a| d.colour_set(a).len() != Some(1)) {
        return None;
    }
    Some(towards)
}

fn is_cyclic_orientation(d: &Diagram, k: &BTreeSet<usize>, c: &BTreeSet<usize>) -> bool {
    let g = d.graph();
    let internal: Vec<usize> = (0..g.arc_count())
        .filter(|&a| k.contains(&g.origin(a)) && k.contains(&g.terminus(a)))
        .collect();
    let degree_two = k.iter().all(|&v| internal.iter().filter(|&&a| g.origin(a) == v).count() == 2);
    let one_out = k.iter().all(|&v| c.iter().filter(|&&a| g.origin(a) == v).count() == 1);
    let covers = internal.iter().all(|&a| c.contains(&a) != c.contains(&g.reverse(a)));
    degree_two && one_out && covers && c.iter().all(|a| internal.contains(a))
}

fn attractor_suite(population: &[Diagram]) -> Check {
    let mut scopos = 0usize;
    let mut kinds = [0usize; 2];
    for (i, d) in population.iter().enumerate() {
        let found: BTreeSet<BTreeSet<usize>> = enumerate_scopos(d)
            .map_err(|e| format!("diagram {i}: {e}"))?
            .iter()
            .map(|o| o.core_arcs().into_iter().collect())
            .collect();
        let naive: BTreeSet<BTreeSet<usize>> = all_partial_orientations(d)
            .into_iter()
            .filter(|o| naive_scopo(d, o))
            .collect();
        if found != naive {
            return Err(format!("diagram {i}: enumeration disagrees with the definition"));
        }
        for o in &naive {
            scopos += 1;
            let po = lad_core::scopo::PartialOrientation::from_core(o.iter().copied());
            let result = attractor(d, &po);
            let k = periodic_points(d, o);
            let reported = match &result.attractor {
                Attractor::Periodic(set) => set.core.iter().copied().collect::<BTreeSet<_>>(),
                Attractor::End(_) => return Err(format!("diagram {i}: an end on a finite diagram")),
            };
            if reported != k {
                return Err(format!("diagram {i}: attractor {reported:?}, periodic points {k:?}"));
            }
            let projecting = cotree_arcs(d, &k);
            let clause_a = projecting.as_ref() == Some(o);
            let clause_b = projecting.as_ref().is_some_and(|p| {
                p.is_subset(o) && is_cyclic_orientation(d, &k, &o.difference(p).copied().collect())
            });
            let expected = match result.kind {
                ScopoType::Cotree => (true, false),
                ScopoType::Cyclic => (false, true),
                ScopoType::End => return Err(format!("diagram {i}: type (c) on a finite diagram")),
            };
            if (clause_a, clause_b) != expected {
                return Err(format!(
                    "diagram {i}: scopo {o:?} type {} but clauses (a)={clause_a} (b)={clause_b}\n{}",
                    result.kind.letter(),
                    lad_core::diagram::save(d)
                ));
            }
            kinds[usize::from(clause_b)] += 1;
        }
    }
    Ok(format!(
        "{} diagrams, {scopos} scopos, {} of type (a), {} of type (b)",
        population.len(),
        kinds[0],
        kinds[1]
    ))
}

fn pruning_confluence(population: &[Diagram]) -> Check {
    let mut r = rng(5);
    for (i, d) in population.iter().enumerate() {
        let minimal = minimal_cotree(d).map_err(|e| e.to_string())?;
        let singles = single_vertex_cotrees(d).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let set = prune_with(d, |leaves| r.gen_range(0..leaves.len())).map_err(|e| e.to_string())?;
            let agrees = if singles.is_empty() {
                set == minimal.vertices
            } else {
                set.core.len() == 1 && singles.contains(&set.core[0])
            };
            if !agrees {
                return Err(format!("diagram {i}: pruning order changed the cotree"));
            }
        }
    }
    Ok(format!("{} diagrams x 10 orders", population.len()))
}

fn delta_tree_structure() -> Check {
    let d = corpus::load_builtin("u-s2-a3").map_err(|e| e.to_string())?;
    let t = DeltaTree::build(&d, "u", 2).map_err(|e| e.to_string())?;
    if t.len() != 7 {
        return Err(format!("{} vertices", t.len()));
    }
    let violations = t.check_colouring();
    if !violations.is_empty() {
        return Err(format!("{violations:?}"));
    }
    for i in 0..t.len() {
        if t.depth(i) < t.radius() {
            let want = if t.project(i) == "u" { 2 } else { 3 };
            if t.neighbours(i).len() != want {
                return Err(format!("{} has degree {}", t.path_string(i), t.neighbours(i).len()));
            }
        }
    }
    Ok("7 vertices, degrees 2 and 3".into())
}

fn extension_contract() -> Check {
    let mut r = rng(77);
    let trees: Vec<DeltaTree> = corpus::all()
        .iter()
        .map(|e| {
            let d = e.diagram();
            let base = d.graph().vertex_name(0).to_string();
            DeltaTree::build(&d, &base, 3).expect("corpus trees build")
        })
        .collect();
    let mut fixed_half_trees = 0;
    for call in 0..100 {
        let t = trees.choose(&mut r).expect("non-empty corpus");
        let inner: Vec<usize> = (0..t.len()).filter(|&i| t.depth(i) < t.radius()).collect();
        let w = *inner.choose(&mut r).expect("root is inner");
        let projection = t.vertex(w).projection;
        let Some(lad_core::LocalAction::Explicit(group)) = t.view().action(projection) else {
            return Err("symbolic action in the corpus".into());
        };
        let elements = group.enumerate(DEFAULT_CAP).map_err(|e| e.to_string())?;
        let sigma = elements.choose(&mut r).expect("groups are non-empty").clone();
        let colours = t.navigator().colours().vertex_colours(projection).expect("finite");
        let fixable: Vec<usize> = t
            .neighbours(w)
            .into_iter()
            .filter(|&(c, _)| sigma.fixes(colours.iter().position(|&x| x == c).expect("in X")))
            .map(|(_, j)| j)
            .collect();
        let fix = if r.gen_bool(0.5) { fixable.choose(&mut r).copied() } else { None };
        let g = extend(t, w, &sigma, fix).map_err(|e| format!("call {call}: {e}"))?;
        if !g.fixes(t, w) {
            return Err(format!("call {call}: w moved"));
        }
        if local_action(t, &g, w).map_err(|e| e.to_string())? != sigma {
            return Err(format!("call {call}: wrong local action at w"));
        }
        if let Some(b) = fix {
            fixed_half_trees += 1;
            if half_tree(t, w, b).into_iter().any(|x| !g.fixes(t, x)) {
                return Err(format!("call {call}: half-tree moved"));
            }
        }
        if !is_member(t, &g).map_err(|e| e.to_string())? {
            return Err(format!("call {call}: not in the universal group"));
        }
    }
    Ok(format!("100 calls, {fixed_half_trees} with a fixed half-tree"))
}

fn permutation_kernel() -> Check {
    let mut r = rng(8);
    let mut skipped = 0;
    for i in 0..500 {
        let degree = r.gen_range(1..=8);
        let g = random_group(&mut r, degree, 3);
        let e = |err: lad_core::PermError| format!("group {i}: {err}");
        let orbits = g.orbits();
        let mut covered: Vec<usize> = orbits.iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != (0..degree).collect::<Vec<_>>() {
            return Err(format!("group {i}: orbits do not partition the universe"));
        }
        for orbit in &orbits {
            let set: HashSet<usize> = orbit.iter().copied().collect();
            if g.generators().iter().any(|s| orbit.iter().any(|&p| !set.contains(&s.apply(p)))) {
                return Err(format!("group {i}: orbit not invariant"));
            }
        }
        let elements = match g.enumerate(DEFAULT_CAP) {
            Ok(elements) => elements,
            Err(lad_core::PermError::CapExceeded { .. }) => {
                skipped += 1;
                continue;
            }
            Err(err) => return Err(e(err)),
        };
        let order = elements.len();
        for p in 0..degree {
            let stab = g.pointwise_stabiliser(&[p], DEFAULT_CAP).map_err(e)?;
            if g.orbit_of(p).len() * stab.order(DEFAULT_CAP).map_err(e)? != order {
                return Err(format!("group {i}: orbit-stabiliser fails at {p}"));
            }
        }
        let base = g.find_base(DEFAULT_CAP).map_err(e)?;
        if g.pointwise_stabiliser(&base, DEFAULT_CAP).map_err(e)?.order(DEFAULT_CAP).map_err(e)? != 1 {
            return Err(format!("group {i}: base {base:?} has non-trivial stabiliser"));
        }
        let semiregular = elements
            .iter()
            .all(|x| x.is_identity() || (0..degree).all(|p| !x.fixes(p)));
        if g.is_semiregular(DEFAULT_CAP).map_err(e)? != semiregular {
            return Err(format!("group {i}: semiregularity disagrees with enumeration"));
        }
    }
    Ok(format!("500 groups, {skipped} beyond the enumeration cap"))
}

fn main() -> ExitCode {
    let population = random_population();
    let results: Vec<(&str, Check)> = vec![
        ("golden classification", timed(Duration::from_secs(1), golden_classification)),
        ("discreteness verdicts", timed(Duration::from_secs(1), discreteness_verdicts)),
        ("oracle cross-validation", oracle_cross_validation()),
        (
            "attractor property suite",
            timed(Duration::from_secs(120), || attractor_suite(&population)),
        ),
        ("pruning confluence", pruning_confluence(&population)),
        ("delta-tree structure", timed(Duration::from_secs(1), delta_tree_structure)),
        ("extension contract", extension_contract()),
        ("permutation kernel", timed(Duration::from_secs(30), permutation_kernel)),
    ];
    let mut ok = true;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(why) => {
                ok = false;
                println!("criterion {}: FAIL {name} ({why})", i + 1);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
