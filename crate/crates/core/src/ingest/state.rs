//! Versioned text serialisation of a [`ChainStore`].
//!
//! ```text
//! conchain-state	1
//! observations	4
//! chain	K
//! member	a	3	1	1
//! member	b	1	1	3
//! ```
//!
//! Member lines are `member<TAB>token<TAB>own<TAB>chain<TAB>join_seq` and
//! belong to the closest preceding `chain` line. Blank lines and `#`
//! comments are allowed, so fixtures can be written by hand.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::chain::{ChainSnapshot, ChainStore, MemberStats, StoreError};
use crate::concept::ConceptId;

pub const STATE_MAGIC: &str = "conchain-state";
pub const STATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unsupported state version {0}")]
    Version(String),
    #[error("inconsistent state: {0}")]
    Invalid(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn save_state(snap: &ChainSnapshot) -> String {
    let mut out = format!("{STATE_MAGIC}\t{STATE_VERSION}\nobservations\t{}\n", snap.observations);
    for chain in &snap.chains {
        out.push_str("chain\t");
        out.push_str(chain.key.as_str());
        out.push('\n');
        for m in &chain.members {
            out.push_str(&format!(
                "member\t{}\t{}\t{}\t{}\n",
                m.token, m.stats.own_inc, m.stats.chain_inc, m.stats.join_seq
            ));
        }
    }
    out
}

pub fn load_state(text: &str) -> Result<ChainStore, StateError> {
    Ok(ChainStore::from_snapshot(&parse_state(text)?))
}

pub fn parse_state(text: &str) -> Result<ChainSnapshot, StateError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let syntax = |line: usize, message: &str| StateError::Syntax {
        line,
        message: message.to_string(),
    };
    let number = |line: usize, field: &str| {
        field
            .parse::<u64>()
            .map_err(|_| syntax(line, &format!("expected a count, got {field:?}")))
    };
    let concept = |line: usize, field: &str| ConceptId::new(field).map_err(|e| syntax(line, &e.to_string()));

    let (line, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    match header.split('\t').collect::<Vec<_>>().as_slice() {
        [STATE_MAGIC, v] if *v == STATE_VERSION.to_string() => {}
        [STATE_MAGIC, v] => return Err(StateError::Version(v.to_string())),
        _ => return Err(syntax(line, "not a conchain state file")),
    }

    let (line, obs_line) = lines.next().ok_or_else(|| syntax(line + 1, "missing observations line"))?;
    let observations = match obs_line.split('\t').collect::<Vec<_>>().as_slice() {
        ["observations", n] => number(line, n)?,
        _ => return Err(syntax(line, "expected observations<TAB>count")),
    };

    let mut chains: Vec<(ConceptId, Vec<(ConceptId, MemberStats)>)> = Vec::new();
    for (line, text) in lines {
        match text.split('\t').collect::<Vec<_>>().as_slice() {
            ["chain", key] => chains.push((concept(line, key)?, Vec::new())),
            ["member", token, own, chain, join] => {
                let stats = MemberStats {
                    own_inc: number(line, own)?,
                    chain_inc: number(line, chain)?,
                    join_seq: number(line, join)?,
                };
                let token = concept(line, token)?;
                chains
                    .last_mut()
                    .ok_or_else(|| syntax(line, "member line before any chain line"))?
                    .1
                    .push((token, stats));
            }
            _ => return Err(syntax(line, "expected a chain or member line")),
        }
    }
    Ok(ChainSnapshot::from_records(observations, chains)?)
}

/// Reads a state file; a missing file is an empty store.
pub fn read_state_file(path: &Path) -> Result<ChainStore, StateError> {
    match fs::read_to_string(path) {
        Ok(text) => load_state(&text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(ChainStore::new()),
        Err(e) => Err(e.into()),
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a half-written state.
pub fn write_state_file(path: &Path, snap: &ChainSnapshot) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, save_state(snap))?;
    fs::rename(&tmp, path)
}
