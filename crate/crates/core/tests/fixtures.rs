mod common;

use std::collections::BTreeSet;

use common::*;
use conchain::eval::render_table;
use conchain::{assemble, classify_all, Decision, ExclusionReason, OccurrenceIndex, RuleConfig};

const FIXTURES: [&str; 4] = ["table1", "table2", "case1", "case2"];

#[test]
fn state_files_match_their_traces() {
    for name in FIXTURES {
        assert_eq!(fixture_state(name), replay_fixture(name), "{name}");
        let trace = fixture_trace(name);
        assert_eq!(counters_of(&fixture_state(name)), brute_oracle(&trace), "{name}");
    }
}

#[test]
fn table1_rows() {
    let snap = fixture_state("table1");
    for (key, token, own, chain, sum) in TABLE1 {
        let m = snap.chain(key).unwrap().member(token).unwrap();
        assert_eq!((m.stats.own_inc, m.stats.chain_inc, m.stats.sum()), (own, chain, sum), "{key}/{token}");
    }
    assert_eq!(snap.chain_totals("John").unwrap().max_sum, 92);
    assert_eq!(snap.chain_totals("sus_action1").unwrap().max_sum, 46);
    assert_eq!(snap.chain_totals("jon_accessing").unwrap().max_sum, 58);
}

#[test]
fn earliest_joiner_collects_every_other_presentation() {
    let snap = fixture_state("table1");
    for chain in &snap.chains {
        let first = chain.members.iter().min_by_key(|m| m.stats.join_seq).unwrap();
        let others: u64 = chain
            .members
            .iter()
            .filter(|m| m.token != first.token)
            .map(|m| m.stats.own_inc)
            .sum();
        assert_eq!(first.stats.chain_inc, others, "{}", chain.key);
    }
    // 66 = 26 + 18 + 22
    assert_eq!(snap.chain("John").unwrap().member("jon_accessing").unwrap().stats.chain_inc, 66);
}

#[test]
fn table1_is_accepted_and_rebuilds_the_ontology() {
    let report = classify_all(&fixture_state("table1"), &RuleConfig::default());
    assert_eq!(report.included_count(), report.members().count());
    assert!(report.exclusion_counts().values().all(|&n| n == 0));

    let (tree, notes) = assemble(&report);
    assert!(notes.is_empty());
    let edges: BTreeSet<(String, String)> = tree
        .edges()
        .iter()
        .map(|(p, c)| (p.to_string(), c.to_string()))
        .collect();
    assert_eq!(edges, behaviour_edges());
    let roots: Vec<String> = tree.roots().iter().map(|r| r.to_string()).collect();
    assert_eq!(roots, ["John", "Susan"]);
}

#[test]
fn table1_rendering() {
    let report = classify_all(&fixture_state("table1"), &RuleConfig::default());
    assert_eq!(
        render_table(&report, "sus_action2").unwrap(),
        "Chain: sus_action2\n\
         sus_moodString2:Interested\t66\t46\t112\tok\n\
         sus_play:CD\t46\t60\t106\tok\n"
    );
}

#[test]
fn table2_rows_and_verdicts() {
    let snap = fixture_state("table2");
    let report = classify_all(&snap, &RuleConfig::default());
    for (key, token, own, chain, sum, ok, reason) in TABLE2 {
        let m = report.chain(key).unwrap().member(token).unwrap();
        assert_eq!((m.stats.own_inc, m.stats.chain_inc, m.stats.sum()), (own, chain, sum), "{key}/{token}");
        match m.verdict.decision {
            Decision::Included => assert!(ok, "{key}/{token} should be excluded"),
            Decision::Excluded(r) => {
                assert!(!ok, "{key}/{token} should be included");
                assert_eq!(r.label(), reason, "{key}/{token}");
            }
        }
    }
}

#[test]
fn table2_renders_as_printed() {
    let report = classify_all(&fixture_state("table2"), &RuleConfig::default());
    let mut expected = String::new();
    for key in ["John", "sus_action2"] {
        expected.push_str(&format!("Chain: {key}\n"));
        for (k, token, own, chain, sum, ok, reason) in TABLE2 {
            if k == key {
                if ok {
                    expected.push_str(&format!("{token}\t{own}\t{chain}\t{sum}\tok\n"));
                } else {
                    expected.push_str(&format!("{token}\t{own}\t{chain}\t{sum}\tx\t{reason}\n"));
                }
            }
        }
    }
    let actual = render_table(&report, "John").unwrap() + &render_table(&report, "sus_action2").unwrap();
    assert_eq!(actual, expected);
    assert!(actual.starts_with("Chain: John\njon_moodString1:Sad\t18\t56\t74\tok\n"));
}

#[test]
fn table2_occurrences_of_tv() {
    let index = OccurrenceIndex::build(&fixture_state("table2"));
    let occ = index.occurrences("sus_watching:TV");
    assert_eq!(occ.len(), 3);
    assert_eq!(occ[0].chain.as_str(), "sus_accessing");
    assert!(occ[0].own_inc > 2);
    let small: Vec<(&str, u64)> = occ[1..].iter().map(|o| (o.chain.as_str(), o.own_inc)).collect();
    assert_eq!(small, [("John", 2), ("sus_action2", 2)]);
}

#[test]
fn case1_both_members_repeated() {
    let report = classify_all(&fixture_state("case1"), &RuleConfig::default());
    let chain = report.chain("jon_moveTo:Kitchen").unwrap();
    assert_eq!(chain.members.len(), 2);
    for (token, own, inc) in [("sus_moodString2:Interested", 2, 2), ("sus_accessing", 2, 0)] {
        let m = chain.member(token).unwrap();
        assert_eq!((m.stats.own_inc, m.stats.chain_inc), (own, inc));
        assert_eq!(m.verdict.decision, Decision::Excluded(ExclusionReason::RepeatedOwn), "{token}");
    }
}

#[test]
fn case2_book_in_music_out() {
    let report = classify_all(&fixture_state("case2"), &RuleConfig::default());
    let chain = report.chain("jon_accessing").unwrap();
    assert_eq!(chain.max_sum, 34);
    let book = chain.member("jon_reading:Book").unwrap();
    assert_eq!((book.stats.own_inc, book.stats.chain_inc, book.stats.sum()), (24, 10, 34));
    assert_eq!(book.verdict.decision, Decision::Included);
    let music = chain.member("sus_changeFocus:Music").unwrap();
    assert_eq!((music.stats.own_inc, music.stats.chain_inc, music.stats.sum()), (6, 26, 32));
    assert_eq!(music.verdict.decision, Decision::Excluded(ExclusionReason::DominatedOwn));

    let index = OccurrenceIndex::build(&fixture_state("case2"));
    let owns: Vec<u64> = index.occurrences("sus_changeFocus:Music").iter().map(|o| o.own_inc).collect();
    assert_eq!(owns, [21, 6, 4]);
}
