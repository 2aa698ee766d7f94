//! Test ontologies: the RDF subset format, a random generator and the
//! chain-part sampler with its noise model.

pub mod generate;
pub mod rdf;
pub mod sample;

pub use generate::{generate_ontology, GeneratorConfig};
pub use rdf::{parse_rdf, write_rdf, RdfError};
pub use sample::{sample_pairs, Sample, SampleError, SamplerConfig};

/// Two people (John and Susan) described by their behaviours; 20 concepts.
pub const BEHAVIOUR_RDF: &str = include_str!("../../data/behaviour.rdf");
