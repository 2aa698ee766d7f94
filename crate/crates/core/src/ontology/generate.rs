use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::concept::ConceptId;
use crate::tree::OntologyTree;

/// Shape parameters for [`generate_ontology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorConfig {
    /// Levels including the person root; 2 means persons with leaf children.
    pub depth: usize,
    /// Maximum children of an internal node.
    pub branching: usize,
    pub persons: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            depth: 4,
            branching: 4,
            persons: 2,
            seed: 1,
        }
    }
}

/// Chance that a child other than the first becomes internal.
const EXTRA_INTERNAL_P: f64 = 1.0 / 6.0;

fn id(token: String) -> ConceptId {
    ConceptId::new(token).expect("generated tokens are valid")
}

struct Grower<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GeneratorConfig,
    tree: OntologyTree,
}

impl Grower<'_> {
    fn grow(&mut self, node: &ConceptId, person: usize, path: &str, level: usize) {
        let count = self.rng.random_range(1..=self.cfg.branching);
        for i in 0..count {
            let child_path = format!("{path}_{}", i + 1);
            // The first child keeps descending so every person reaches full depth.
            let internal =
                level + 1 < self.cfg.depth && (i == 0 || self.rng.random_bool(EXTRA_INTERNAL_P));
            let child = if internal {
                id(format!("p{person}_node{child_path}"))
            } else {
                let value = self.rng.random_range(0..100u32);
                id(format!("p{person}_attr{child_path}:v{value}"))
            };
            self.tree.add_edge(node.clone(), child.clone());
            if internal {
                self.grow(&child, person, &child_path, level + 1);
            }
        }
    }
}

/// Generates a random ontology of uniquely named concepts. Persons are
/// roots named `person0`, `person1`, ...; internal nodes are plain tokens and
/// leaves are `name:value` tokens so that every tree can be written as RDF.
///
/// Parameters below 1 (or depth below 2) are raised to the minimum.
pub fn generate_ontology(cfg: &GeneratorConfig) -> OntologyTree {
    let cfg = GeneratorConfig {
        depth: cfg.depth.max(2),
        branching: cfg.branching.max(1),
        persons: cfg.persons.max(1),
        seed: cfg.seed,
    };
    let mut grower = Grower {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg: &cfg,
        tree: OntologyTree::new(),
    };
    for person in 0..cfg.persons {
        let root = id(format!("person{person}"));
        grower.tree.add_node(root.clone());
        grower.grow(&root, person, "", 1);
    }
    grower.tree
}
