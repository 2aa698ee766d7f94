#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::PathBuf;

use conchain::ingest::{ingest_pairs, parse_state};
use conchain::rules::{MemberContext, Occurrence};
use conchain::{classify_member, ChainSnapshot, ChainStore, ConceptId, Decision, MemberStats, ObservationPair, RuleConfig};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_state(name: &str) -> ChainSnapshot {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.state"))).unwrap();
    parse_state(&text).unwrap()
}

pub fn fixture_trace(name: &str) -> Vec<(String, String)> {
    std::fs::read_to_string(fixture_path(&format!("{name}.pairs")))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, m) = l.split_once('\t').unwrap();
            (k.to_string(), m.to_string())
        })
        .collect()
}

pub fn replay_fixture(name: &str) -> ChainSnapshot {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.pairs"))).unwrap();
    let mut store = ChainStore::new();
    let summary = ingest_pairs(&mut store, text.as_bytes()).unwrap();
    assert!(summary.skipped.is_empty(), "{:?}", summary.skipped);
    store.snapshot()
}

/// (own, chain, join_seq) per (key, member).
pub type Counters = BTreeMap<(String, String), (u64, u64, u64)>;

/// Counters straight from the definitions, one full pass over the trace per
/// (key, member). Quadratic; fine for short traces.
pub fn brute_oracle(trace: &[(String, String)]) -> Counters {
    let mut out = Counters::new();
    let mut seen = std::collections::BTreeSet::new();
    for (k, m) in trace {
        if !seen.insert((k.clone(), m.clone())) {
            continue;
        }
        let first = trace.iter().position(|(a, b)| a == k && b == m).unwrap();
        let own = trace.iter().filter(|(a, b)| a == k && b == m).count() as u64;
        let chain = trace
            .iter()
            .enumerate()
            .filter(|(i, (a, b))| *i > first && a == k && b != m)
            .count() as u64;
        out.insert((k.clone(), m.clone()), (own, chain, first as u64 + 1));
    }
    out
}

/// Same counters by position arithmetic: everything addressed to the chain
/// after the first join, minus the member's own repeats.
pub fn scan_oracle(trace: &[(String, String)]) -> Counters {
    let mut chain_total: BTreeMap<&str, u64> = BTreeMap::new();
    let mut first: BTreeMap<(&str, &str), (u64, u64)> = BTreeMap::new(); // (chain total before join, seq)
    let mut own: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for (i, (k, m)) in trace.iter().enumerate() {
        let before = *chain_total.get(k.as_str()).unwrap_or(&0);
        first.entry((k, m)).or_insert((before, i as u64 + 1));
        *own.entry((k, m)).or_default() += 1;
        *chain_total.entry(k).or_default() += 1;
    }
    first
        .into_iter()
        .map(|((k, m), (before, seq))| {
            let o = own[&(k, m)];
            let after_join = chain_total[k] - before - 1;
            ((k.to_string(), m.to_string()), (o, after_join - (o - 1), seq))
        })
        .collect()
}

pub fn counters_of(snap: &ChainSnapshot) -> Counters {
    let mut out = Counters::new();
    for c in &snap.chains {
        for m in &c.members {
            out.insert(
                (c.key.to_string(), m.token.to_string()),
                (m.stats.own_inc, m.stats.chain_inc, m.stats.join_seq),
            );
        }
    }
    out
}

pub fn replay(trace: &[(String, String)]) -> ChainSnapshot {
    let mut store = ChainStore::new();
    for (k, m) in trace {
        store.observe(&ObservationPair::parse(k, m).unwrap());
    }
    store.snapshot()
}

/// Random trace over `chains` keys and a shared member vocabulary.
pub fn random_trace(rng: &mut impl Rng, len: usize, chains: usize, vocab: usize) -> Vec<(String, String)> {
    (0..len)
        .map(|_| {
            let k = rng.random_range(0..chains);
            let mut m = rng.random_range(0..vocab);
            if m == k {
                m += 1;
            }
            (format!("c{k}"), format!("c{m}"))
        })
        .collect()
}

/// The two-person behaviour ontology written out edge by edge.
pub const BEHAVIOUR_EDGES: [(&str, &str); 18] = [
    ("John", "jon_located:Bedroom"),
    ("John", "jon_moodString1:Sad"),
    ("John", "jon_accessing"),
    ("John", "jon_action1"),
    ("jon_accessing", "jon_reading:Book"),
    ("jon_action1", "jon_moveTo:Kitchen"),
    ("jon_action1", "jon_action2"),
    ("jon_action2", "jon_cook:Cup of Coffee"),
    ("jon_action2", "jon_moodString2:Happy"),
    ("Susan", "sus_located:Living Room"),
    ("Susan", "sus_moodString1:Bored"),
    ("Susan", "sus_accessing"),
    ("Susan", "sus_action1"),
    ("sus_accessing", "sus_watching:TV"),
    ("sus_action1", "sus_changeFocus:Music"),
    ("sus_action1", "sus_action2"),
    ("sus_action2", "sus_play:CD"),
    ("sus_action2", "sus_moodString2:Interested"),
];

pub fn behaviour_edges() -> std::collections::BTreeSet<(String, String)> {
    BEHAVIOUR_EDGES
        .iter()
        .map(|(p, c)| (p.to_string(), c.to_string()))
        .collect()
}

/// (chain, member, own, chain_inc, sum)
pub const TABLE1: [(&str, &str, u64, u64, u64); 10] = [
    ("John", "jon_accessing", 26, 66, 92),
    ("John", "jon_action1", 26, 64, 90),
    ("John", "jon_moodString1:Sad", 18, 62, 80),
    ("John", "jon_located:Bedroom", 22, 56, 78),
    ("jon_accessing", "jon_reading:Book", 58, 0, 58),
    ("sus_accessing", "sus_watching:TV", 56, 0, 56),
    ("sus_action2", "sus_moodString2:Interested", 66, 46, 112),
    ("sus_action2", "sus_play:CD", 46, 60, 106),
    ("sus_action1", "sus_action2", 22, 24, 46),
    ("sus_action1", "sus_changeFocus:Music", 24, 20, 44),
];

/// (chain, member, own, chain_inc, sum, in chain, reason label)
pub const TABLE2: [(&str, &str, u64, u64, u64, bool, &str); 13] = [
    ("John", "jon_moodString1:Sad", 18, 56, 74, true, ""),
    ("John", "jon_action1", 20, 50, 70, true, ""),
    ("John", "jon_located:Bedroom", 18, 50, 68, true, ""),
    ("John", "jon_accessing", 12, 52, 64, true, ""),
    ("John", "sus_action2", 2, 52, 54, false, "repeated"),
    ("John", "sus_watching:TV", 2, 6, 8, false, "low value"),
    ("John", "jon_moveTo:Kitchen", 2, 2, 4, false, "low value"),
    ("sus_action2", "sus_play:CD", 38, 52, 90, true, ""),
    ("sus_action2", "sus_moodString2:Interested", 44, 44, 88, true, ""),
    ("sus_action2", "jon_reading:Book", 2, 82, 84, false, "repeated"),
    ("sus_action2", "jon_action2", 2, 54, 56, false, "repeated"),
    ("sus_action2", "sus_watching:TV", 2, 12, 14, false, "low value"),
    ("sus_action2", "jon_moodString1:Sad", 2, 4, 6, false, "low value"),
];

/// Verdict of a member of chain K given its split, the chain's reference
/// values and the own increments of the concept's other occurrences.
pub fn member_verdict(own: u64, chain: u64, max_sum: u64, max_own: u64, others: &[u64], cfg: &RuleConfig) -> Decision {
    let key = ConceptId::new("K").unwrap();
    let ctx = MemberContext {
        chain: &key,
        stats: MemberStats {
            own_inc: own,
            chain_inc: chain,
            join_seq: 1,
        },
        chain_max_sum: max_sum,
        chain_max_own: max_own,
        chain_observations: 100,
    };
    let mut occ = vec![Occurrence {
        chain: key.clone(),
        own_inc: own,
    }];
    occ.extend(others.iter().enumerate().map(|(i, &o)| Occurrence {
        chain: ConceptId::new(format!("other{i}")).unwrap(),
        own_inc: o,
    }));
    classify_member(&ctx, &occ, cfg).decision
}

/// Report with arbitrary links among `n` concepts; duplicate placements and
/// cycles are common.
pub fn random_report(rng: &mut impl Rng, n: usize) -> conchain::ClassificationReport {
    use conchain::rules::{ClassifiedChain, ClassifiedMember};
    use conchain::{Confidence, ExclusionReason, Verdict};
    let mut chains = Vec::new();
    for k in 0..n {
        if !rng.random_bool(0.7) {
            continue;
        }
        let mut members = Vec::new();
        for m in (0..n).filter(|&m| m != k) {
            if !rng.random_bool(0.3) {
                continue;
            }
            let stats = MemberStats {
                own_inc: rng.random_range(1..30),
                chain_inc: rng.random_range(0..30),
                join_seq: 1,
            };
            let decision = if rng.random_bool(0.8) {
                Decision::Included
            } else {
                Decision::Excluded(ExclusionReason::LowValue)
            };
            members.push(ClassifiedMember {
                token: ConceptId::new(format!("n{m:02}")).unwrap(),
                stats,
                verdict: Verdict { decision, confidence: Confidence::Normal },
            });
        }
        if members.is_empty() {
            continue;
        }
        chains.push(ClassifiedChain {
            key: ConceptId::new(format!("n{k:02}")).unwrap(),
            observations: members.iter().map(|m: &ClassifiedMember| m.stats.own_inc).sum(),
            max_sum: members.iter().map(|m| m.stats.sum()).max().unwrap_or(0),
            max_own: members.iter().map(|m| m.stats.own_inc).max().unwrap_or(0),
            members,
        });
    }
    conchain::ClassificationReport { chains }
}

pub struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    pub fn connect(addr: std::net::SocketAddr) -> Client {
        let stream = TcpStream::connect(addr).unwrap();
        stream.set_nodelay(true).unwrap();
        Client {
            writer: stream.try_clone().unwrap(),
            reader: BufReader::new(stream),
        }
    }

    pub fn send(&mut self, line: &str) -> String {
        self.writer.write_all(format!("{line}\n").as_bytes()).unwrap();
        let mut reply = String::new();
        self.reader.read_line(&mut reply).unwrap();
        reply.trim_end_matches('\n').to_string()
    }
}

pub fn serve(store: ChainStore, state: Option<std::path::PathBuf>) -> conchain::ingest::ServerHandle {
    conchain::ingest::Server::bind("127.0.0.1:0", store, state, RuleConfig::default())
        .unwrap()
        .spawn()
        .unwrap()
}
