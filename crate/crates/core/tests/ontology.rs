mod common;

use std::collections::BTreeSet;

use common::*;
use conchain::ontology::{
    generate_ontology, parse_rdf, sample_pairs, write_rdf, GeneratorConfig, RdfError, SamplerConfig, BEHAVIOUR_RDF,
};
use conchain::OntologyTree;
use proptest::prelude::*;

fn edge_strings(t: &OntologyTree) -> BTreeSet<(String, String)> {
    t.edges().iter().map(|(p, c)| (p.to_string(), c.to_string())).collect()
}

#[test]
fn behaviour_document_parses_to_the_listed_edges() {
    let tree = parse_rdf(BEHAVIOUR_RDF).unwrap();
    assert_eq!(edge_strings(&tree), behaviour_edges());
    assert_eq!(tree.node_count(), 20);
    let roots: Vec<String> = tree.roots().iter().map(|r| r.to_string()).collect();
    assert_eq!(roots, ["John", "Susan"]);
}

#[test]
fn behaviour_round_trip() {
    let tree = parse_rdf(BEHAVIOUR_RDF).unwrap();
    let text = write_rdf(&tree).unwrap();
    let back = parse_rdf(&text).unwrap();
    assert_eq!(back, tree);
    // Writing is a fixed point after one pass.
    assert_eq!(write_rdf(&back).unwrap(), text);
}

#[test]
fn generated_round_trips() {
    for seed in 0..100 {
        let tree = generate_ontology(&GeneratorConfig { seed, ..GeneratorConfig::default() });
        let back = parse_rdf(&write_rdf(&tree).unwrap()).unwrap();
        assert_eq!(edge_strings(&back), edge_strings(&tree), "seed {seed}");
        assert_eq!(back.nodes(), tree.nodes(), "seed {seed}");
    }
}

#[test]
fn single_person_single_leaf() {
    let doc = "<rdf:RDF>\n  <rdf:Description foaf:Person=\"A\">\n    <x>1</x>\n  </rdf:Description>\n</rdf:RDF>\n";
    let tree = parse_rdf(doc).unwrap();
    assert_eq!(tree.edge_count(), 1);
    assert!(tree.contains_edge("A", "x:1"));
}

#[test]
fn malformed_documents() {
    assert!(matches!(parse_rdf("<rdf:RDF><rdf:Description"), Err(RdfError::MalformedXml(_))));
    assert!(parse_rdf("").is_err());
    let dup = "<rdf:RDF><rdf:Description foaf:Person=\"A\"><x>1</x></rdf:Description>\
               <rdf:Description foaf:Person=\"B\"><x>1</x></rdf:Description></rdf:RDF>";
    assert!(matches!(parse_rdf(dup), Err(RdfError::DuplicateConcept(_))));
}

proptest! {
    #[test]
    fn any_generated_tree_round_trips(depth in 2usize..6, branching in 1usize..6, persons in 1usize..4, seed in any::<u64>()) {
        let tree = generate_ontology(&GeneratorConfig { depth, branching, persons, seed });
        prop_assert!(tree.validate().is_ok());
        prop_assert_eq!(tree.roots().len(), persons);
        prop_assert_eq!(parse_rdf(&write_rdf(&tree).unwrap()).unwrap(), tree);
    }

    #[test]
    fn sampler_is_deterministic_and_counts_noise(presentations in 0usize..700, noise_every in 0usize..25, seed in any::<u64>()) {
        let tree = parse_rdf(BEHAVIOUR_RDF).unwrap();
        let cfg = SamplerConfig { presentations, noise_every, seed };
        let a = sample_pairs(&tree, &cfg).unwrap();
        prop_assert_eq!(&a, &sample_pairs(&tree, &cfg).unwrap());
        prop_assert_eq!(a.pairs.len(), presentations);
        let expected = presentations.checked_div(noise_every).unwrap_or(0);
        prop_assert_eq!(a.corrupted.len(), expected);
        prop_assert!(a.corrupted.iter().all(|i| (i + 1) % noise_every == 0));
        for p in a.clean_pairs() {
            prop_assert!(tree.contains_edge(p.key().as_str(), p.member().as_str()));
        }
        for p in &a.pairs {
            prop_assert!(tree.nodes().contains(p.key()) && tree.nodes().contains(p.member()));
        }
    }
}

#[test]
fn noise_free_sampling_covers_the_behaviour_ontology() {
    let tree = parse_rdf(BEHAVIOUR_RDF).unwrap();
    let mut covered = 0;
    for seed in 0..20 {
        let s = sample_pairs(&tree, &SamplerConfig { presentations: 300, noise_every: 0, seed }).unwrap();
        let seen: BTreeSet<(String, String)> =
            s.pairs.iter().map(|p| (p.key().to_string(), p.member().to_string())).collect();
        assert!(seen.is_subset(&behaviour_edges()));
        if seen == behaviour_edges() {
            covered += 1;
        }
    }
    // 300 draws over 18 edges: missing one is very unlikely.
    assert!(covered >= 19, "covered {covered}/20");
}

#[test]
fn generator_defaults_look_like_the_behaviour_ontology() {
    let sizes: Vec<usize> = (0..50)
        .map(|seed| generate_ontology(&GeneratorConfig { seed, ..GeneratorConfig::default() }).node_count())
        .collect();
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    assert!((12.0..=32.0).contains(&mean), "mean size {mean}");
}
