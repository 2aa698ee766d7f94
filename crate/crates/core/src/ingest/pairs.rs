use std::io::BufRead;

use crate::chain::ChainStore;
use crate::concept::ObservationPair;

/// Parses one `parent<TAB>child` line. Blank lines and `#` comments yield
/// `Ok(None)`.
pub fn parse_pair_line(line: &str) -> Result<Option<ObservationPair>, String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.trim().is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let mut fields = line.split('\t');
    let (Some(parent), Some(child), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err("expected exactly one tab between parent and child".into());
    };
    ObservationPair::parse(parent, child)
        .map(Some)
        .map_err(|e| e.to_string())
}

pub fn format_pairs<'a>(pairs: impl IntoIterator<Item = &'a ObservationPair>) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(p.key().as_str());
        out.push('\t');
        out.push_str(p.member().as_str());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub applied: u64,
    /// (1-based line number, message) for every rejected line.
    pub skipped: Vec<(usize, String)>,
}

/// Applies every valid line of `input` to `store`, in order.
pub fn ingest_pairs<R: BufRead>(store: &mut ChainStore, input: R) -> std::io::Result<IngestSummary> {
    let mut summary = IngestSummary::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        match parse_pair_line(&line) {
            Ok(Some(pair)) => {
                store.observe(&pair);
                summary.applied += 1;
            }
            Ok(None) => {}
            Err(message) => summary.skipped.push((i + 1, message)),
        }
    }
    Ok(summary)
}
