//! Getting observations in and counter state out: pair-list files, the
//! state file format and the TCP line protocol.

pub mod pairs;
pub mod server;
pub mod state;

pub use pairs::{format_pairs, ingest_pairs, parse_pair_line, IngestSummary};
pub use server::{Server, ServerHandle};
pub use state::{load_state, parse_state, read_state_file, save_state, write_state_file, StateError};
