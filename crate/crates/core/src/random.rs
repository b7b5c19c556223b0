//! Seeded generation of random valid finite diagrams and permutation groups.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::diagram::{ColourSet, Diagram, DiagramBuilder};
use crate::perm::{PermGroup, Permutation};

#[derive(Debug, Clone, Copy)]
pub struct RandomDiagramConfig {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Probability that a colour set is a singleton; larger sets have two or
    /// three colours with equal probability.
    pub singleton_weight: f64,
    /// Probability that an extra (non-tree) edge is a loop.
    pub loop_weight: f64,
}

impl Default for RandomDiagramConfig {
    fn default() -> Self {
        RandomDiagramConfig {
            max_vertices: 6,
            max_edges: 8,
            singleton_weight: 0.6,
            loop_weight: 0.3,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Namer(usize);

impl Namer {
    fn colours(&mut self, n: usize) -> Vec<String> {
        (0..n)
            .map(|_| {
                self.0 += 1;
                format!("c{}", self.0)
            })
            .collect()
    }
}

fn colour_count<R: Rng>(rng: &mut R, cfg: &RandomDiagramConfig) -> usize {
    if rng.gen_bool(cfg.singleton_weight) {
        1
    } else {
        rng.gen_range(2..=3)
    }
}

/// A transitive group on `colours`, written as cycle generators.
fn transitive_generators<R: Rng>(rng: &mut R, colours: &[String]) -> Vec<String> {
    match colours.len() {
        0 | 1 => Vec::new(),
        2 => vec![format!("({} {})", colours[0], colours[1])],
        _ => {
            let cycle = format!("({})", colours.join(" "));
            if rng.gen_bool(0.5) {
                vec![cycle]
            } else {
                vec![cycle, format!("({} {})", colours[0], colours[1])]
            }
        }
    }
}

/// A connected diagram with at most `max_vertices` vertices and `max_edges`
/// edges whose local actions are products of transitive groups on the
/// colour sets.
pub fn random_diagram<R: Rng>(rng: &mut R, cfg: &RandomDiagramConfig) -> Diagram {
    let n = rng.gen_range(1..=cfg.max_vertices.max(1));
    let max_edges = cfg.max_edges.max(n.saturating_sub(1));
    let mut builder = DiagramBuilder::new();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for v in &names {
        builder.vertex(v);
    }
    let mut namer = Namer(0);
    let mut sets_at: Vec<Vec<Vec<String>>> = vec![Vec::new(); n];
    let mut edge = 0usize;

    let mut add_edge = |builder: &mut DiagramBuilder,
                        sets_at: &mut Vec<Vec<Vec<String>>>,
                        rng: &mut R,
                        u: usize,
                        w: usize,
                        non_orientable: bool| {
        let a = format!("e{edge}");
        edge += 1;
        let forward = namer.colours(colour_count(rng, cfg));
        sets_at[u].push(forward.clone());
        if non_orientable {
            builder.non_orientable_loop(&a, &names[u], ColourSet::Finite(forward));
        } else {
            let backward = namer.colours(colour_count(rng, cfg));
            sets_at[w].push(backward.clone());
            builder.edge(
                &a,
                &names[u],
                &names[w],
                &format!("{a}'"),
                ColourSet::Finite(forward),
                ColourSet::Finite(backward),
            );
        }
    };

    for w in 1..n {
        let u = rng.gen_range(0..w);
        add_edge(&mut builder, &mut sets_at, rng, u, w, false);
    }
    let extra = rng.gen_range(0..=max_edges - (n - 1));
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        if rng.gen_bool(cfg.loop_weight) {
            let non_orientable = rng.gen_bool(0.5);
            add_edge(&mut builder, &mut sets_at, rng, u, u, non_orientable);
        } else {
            let w = rng.gen_range(0..n);
            add_edge(&mut builder, &mut sets_at, rng, u, w, false);
        }
    }

    for (v, sets) in sets_at.iter().enumerate() {
        let gens: Vec<String> = sets
            .iter()
            .flat_map(|s| transitive_generators(rng, s))
            .collect();
        builder.generators(&names[v], gens);
    }
    builder.build().expect("generated ids resolve")
}

/// A random group on `degree` points with up to `max_generators` random
/// generators.
pub fn random_group<R: Rng>(rng: &mut R, degree: usize, max_generators: usize) -> PermGroup {
    let universe: Vec<String> = (1..=degree).map(|i| i.to_string()).collect();
    let count = rng.gen_range(0..=max_generators);
    let generators = (0..count)
        .map(|_| {
            let mut images: Vec<usize> = (0..degree).collect();
            if rng.gen_bool(0.5) {
                images.shuffle(rng);
            } else {
                let i = rng.gen_range(0..degree);
                let j = rng.gen_range(0..degree);
                images.swap(i, j);
            }
            Permutation::from_images(images).expect("shuffled identity is a bijection")
        })
        .collect();
    PermGroup::new(universe, generators).expect("generators match the degree")
}
