//! Compound-noun evaluation against the ranked head list.
//!
//! A modifier earns its place in an emitted compound by how often it sits
//! to the left of its attachment head across the corpus. Each non-head
//! token picks the following token it most often precedes, the ratio of
//! that count to the token's total compound membership is compared to a
//! cutoff, and a token also falls away when the token it attached to was
//! itself omitted. `fighter plane` survives this; `government plane`,
//! whose modifier scatters across many different heads, does not.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::bootstrap::RankedEntry;
use crate::extract::{CompoundOccurrence, CompoundTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompoundError {
    #[error("attachment position {position} is at or past the compound head at {head_index}")]
    BadPosition { position: usize, head_index: usize },
}

/// One emitted compound: the kept tokens end in the head, whose rank on
/// the head list orders the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundEntry {
    pub kept_tokens: Vec<String>,
    pub head: String,
    pub head_rank: usize,
}

/// Picks the attachment head for the token at `position`: the following
/// position whose token most often appears to its right, rightmost on
/// ties. When no following token was ever seen to its right, that is the
/// compound's own head.
pub fn attach_head(
    compound: &CompoundOccurrence,
    position: usize,
    ctable: &CompoundTable,
) -> Result<usize, CompoundError> {
    let head_index = compound.tokens.len() - 1;
    if position >= head_index {
        return Err(CompoundError::BadPosition { position, head_index });
    }
    let word = &compound.tokens[position].0;
    let mut best = position + 1;
    let mut best_count = ctable.right_counts(word, &compound.tokens[best].0);
    for j in position + 2..=head_index {
        let count = ctable.right_counts(word, &compound.tokens[j].0);
        if count >= best_count {
            best = j;
            best_count = count;
        }
    }
    Ok(best)
}

/// Applies the cutoff to every non-head token and cascades omissions down
/// the attachment chain. Returns the kept lemma keys, or `None` when no
/// non-head token survives and the entry should be skipped.
pub fn evaluate_compound(
    compound: &CompoundOccurrence,
    ctable: &CompoundTable,
    cutoff: f64,
) -> Result<Option<Vec<String>>, CompoundError> {
    let head_index = compound.tokens.len() - 1;
    let mut attach = vec![head_index; head_index];
    let mut kept = vec![true; head_index + 1];
    for position in 0..head_index {
        let target = attach_head(compound, position, ctable)?;
        attach[position] = target;
        let word = &compound.tokens[position].0;
        let member = ctable.member_counts(word);
        // A token the table has never seen carries no evidence: ratio 0.
        let ratio = if member == 0 {
            0.0
        } else {
            ctable.right_counts(word, &compound.tokens[target].0) as f64 / member as f64
        };
        kept[position] = ratio >= cutoff;
    }
    // Attachment targets are always to the right, so one right-to-left
    // sweep settles the cascade.
    for position in (0..head_index).rev() {
        if !kept[attach[position]] {
            kept[position] = false;
        }
    }
    if !kept[..head_index].iter().any(|&k| k) {
        return Ok(None);
    }
    Ok(Some(
        compound
            .tokens
            .iter()
            .zip(&kept)
            .filter(|(_, &k)| k)
            .map(|((key, _), _)| key.clone())
            .collect(),
    ))
}

/// Builds the compound list: heads in head-list order, each head's
/// compounds in first-occurrence order, identical kept sequences emitted
/// once.
pub fn emit_compound_list(
    head_list: &[RankedEntry],
    occurrences: &[CompoundOccurrence],
    ctable: &CompoundTable,
    cutoff: f64,
) -> Result<Vec<CompoundEntry>, CompoundError> {
    let mut by_head: HashMap<&str, Vec<&CompoundOccurrence>> = HashMap::new();
    for occurrence in occurrences {
        by_head.entry(occurrence.head_key()).or_default().push(occurrence);
    }
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut entries = Vec::new();
    for (rank, entry) in head_list.iter().enumerate() {
        let Some(group) = by_head.get(entry.lemma.as_str()) else {
            continue;
        };
        for occurrence in group {
            let Some(kept_tokens) = evaluate_compound(occurrence, ctable, cutoff)? else {
                continue;
            };
            if seen.insert(kept_tokens.clone()) {
                entries.push(CompoundEntry {
                    kept_tokens,
                    head: entry.lemma.clone(),
                    head_rank: rank + 1,
                });
            }
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn occurrence(keys: &[&str]) -> CompoundOccurrence {
        CompoundOccurrence {
            tokens: keys.iter().map(|k| (k.to_string(), "NN".to_string())).collect(),
            first_index: 0,
        }
    }

    fn table_of(compounds: &[&[&str]]) -> CompoundTable {
        let mut table = CompoundTable::default();
        for keys in compounds {
            table.record_compound(keys);
        }
        table
    }

    fn ranked(lemmas: &[&str]) -> Vec<RankedEntry> {
        lemmas
            .iter()
            .enumerate()
            .map(|(i, l)| RankedEntry { lemma: l.to_string(), iteration: i + 1, score: 1.0 })
            .collect()
    }

    #[test]
    fn attachment_follows_the_stronger_right_count() {
        let table = table_of(&[
            &["nuclear-powered", "carrier"],
            &["nuclear-powered", "carrier"],
            &["nuclear-powered", "aircraft", "carrier"],
        ]);
        let occ = occurrence(&["nuclear-powered", "aircraft", "carrier"]);
        assert_eq!(attach_head(&occ, 0, &table).unwrap(), 2);
        assert_eq!(attach_head(&occ, 1, &table).unwrap(), 2);
    }

    #[test]
    fn attachment_ties_go_right() {
        let table = table_of(&[&["a", "b", "c"], &["a", "c", "b"]]);
        // right(a,b) == right(a,c) == 2.
        let occ = occurrence(&["a", "b", "c"]);
        assert_eq!(attach_head(&occ, 0, &table).unwrap(), 2);
    }

    #[test]
    fn unseen_modifier_attaches_to_the_final_head() {
        let occ = occurrence(&["ghost", "middle", "head"]);
        assert_eq!(attach_head(&occ, 0, &CompoundTable::default()).unwrap(), 2);
    }

    #[test]
    fn attachment_position_must_precede_the_head() {
        let occ = occurrence(&["fighter", "plane"]);
        assert_eq!(
            attach_head(&occ, 1, &CompoundTable::default()),
            Err(CompoundError::BadPosition { position: 1, head_index: 1 })
        );
    }

    #[test]
    fn strong_modifier_is_kept_and_weak_one_skips_the_entry() {
        let mut table = CompoundTable::default();
        for _ in 0..6 {
            table.record_compound(&["fighter", "plane"]);
        }
        for _ in 0..4 {
            table.record_compound(&["fighter", "jet"]);
        }
        table.record_compound(&["government", "plane"]);
        for _ in 0..19 {
            table.record_compound(&["government", "official"]);
        }
        let fighter = occurrence(&["fighter", "plane"]);
        assert_eq!(
            evaluate_compound(&fighter, &table, 0.25).unwrap(),
            Some(vec!["fighter".to_string(), "plane".to_string()])
        );
        let government = occurrence(&["government", "plane"]);
        assert_eq!(evaluate_compound(&government, &table, 0.25).unwrap(), None);
    }

    #[test]
    fn zero_membership_counts_as_zero_ratio() {
        let occ = occurrence(&["unseen", "plane"]);
        assert_eq!(evaluate_compound(&occ, &CompoundTable::default(), 0.1).unwrap(), None);
    }

    #[test]
    fn zero_cutoff_keeps_even_unseen_modifiers() {
        let occ = occurrence(&["unseen", "plane"]);
        assert_eq!(
            evaluate_compound(&occ, &CompoundTable::default(), 0.0).unwrap(),
            Some(vec!["unseen".to_string(), "plane".to_string()])
        );
    }

    #[test]
    fn omitted_attachment_target_cascades() {
        // "left" attaches to "mid" with a perfect ratio, but "mid"
        // scatters across other heads, is omitted, and drags "left" out
        // with it.
        let mut table = table_of(&[
            &["left", "mid", "head"],
            &["left", "mid", "x"],
            &["left", "mid", "x"],
        ]);
        for _ in 0..9 {
            table.record_compound(&["mid", "other"]);
        }
        let occ = occurrence(&["left", "mid", "head"]);
        assert_eq!(attach_head(&occ, 0, &table).unwrap(), 1);
        assert_eq!(evaluate_compound(&occ, &table, 0.25).unwrap(), None);
    }

    #[test]
    fn survivor_attached_to_the_head_outlives_an_omitted_sibling() {
        // "good" attaches straight to "head"; "bad" is omitted; the entry
        // survives without it.
        let mut table = table_of(&[
            &["good", "head"],
            &["good", "head"],
            &["good", "bad", "head"],
        ]);
        for _ in 0..20 {
            table.record_compound(&["bad", "other"]);
        }
        let occ = occurrence(&["good", "bad", "head"]);
        assert_eq!(
            evaluate_compound(&occ, &table, 0.25).unwrap(),
            Some(vec!["good".to_string(), "head".to_string()])
        );
    }

    #[test]
    fn list_follows_head_rank_then_occurrence_order_with_dedup() {
        let table = table_of(&[
            &["fighter", "plane"],
            &["cargo", "plane"],
            &["fighter", "plane"],
            &["escort", "carrier"],
        ]);
        let occurrences = vec![
            occurrence(&["fighter", "plane"]),
            occurrence(&["escort", "carrier"]),
            occurrence(&["cargo", "plane"]),
            occurrence(&["fighter", "plane"]),
        ];
        let heads = ranked(&["carrier", "plane"]);
        let entries = emit_compound_list(&heads, &occurrences, &table, 0.25).unwrap();
        let listed: Vec<(usize, Vec<String>)> =
            entries.iter().map(|e| (e.head_rank, e.kept_tokens.clone())).collect();
        assert_eq!(
            listed,
            vec![
                (1, vec!["escort".to_string(), "carrier".to_string()]),
                (2, vec!["fighter".to_string(), "plane".to_string()]),
                (2, vec!["cargo".to_string(), "plane".to_string()]),
            ]
        );
    }

    #[test]
    fn heads_missing_from_the_list_are_not_emitted() {
        let table = table_of(&[&["fighter", "plane"]]);
        let occurrences = vec![occurrence(&["fighter", "plane"])];
        let entries = emit_compound_list(&ranked(&["car"]), &occurrences, &table, 0.0).unwrap();
        assert!(entries.is_empty());
    }

    #[test]
    fn empty_head_list_emits_nothing() {
        let table = table_of(&[&["fighter", "plane"]]);
        let entries =
            emit_compound_list(&[], &[occurrence(&["fighter", "plane"])], &table, 0.0).unwrap();
        assert!(entries.is_empty());
    }

    /// Random occurrence sets over a tiny vocabulary; the table is built
    /// from the very occurrences being evaluated, as in the real pipeline.
    fn arb_occurrences() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
        let word = prop::sample::select(vec!["a", "b", "c", "d", "e"]);
        prop::collection::vec(prop::collection::vec(word, 2..5), 1..10)
    }

    proptest! {
        #[test]
        fn kept_modifiers_always_meet_the_cutoff(
            occs in arb_occurrences(),
            cutoff in 0.0f64..=1.0,
        ) {
            let mut table = CompoundTable::default();
            for keys in &occs {
                table.record_compound(keys);
            }
            for keys in &occs {
                let occ = occurrence(keys);
                if let Some(kept) = evaluate_compound(&occ, &table, cutoff).unwrap() {
                    prop_assert!(kept.len() >= 2);
                    prop_assert_eq!(kept.last().unwrap(), occ.head_key());
                    // Every kept non-head token meets the cutoff against
                    // its attachment target. Kept keys map unambiguously
                    // to positions only when the occurrence has no
                    // repeats.
                    let distinct: HashSet<&&str> = keys.iter().collect();
                    if distinct.len() < keys.len() {
                        continue;
                    }
                    for kept_key in &kept[..kept.len() - 1] {
                        let position =
                            occ.tokens.iter().position(|(k, _)| k == kept_key).unwrap();
                        let target = attach_head(&occ, position, &table).unwrap();
                        let word = &occ.tokens[position].0;
                        let member = table.member_counts(word);
                        prop_assert!(member > 0);
                        let ratio = table.right_counts(word, &occ.tokens[target].0) as f64
                            / member as f64;
                        prop_assert!(ratio >= cutoff);
                    }
                }
            }
        }

        #[test]
        fn raising_the_cutoff_never_grows_the_list(
            occs in arb_occurrences(),
            low in 0.0f64..=1.0,
            high in 0.0f64..=1.0,
        ) {
            let (low, high) = if low <= high { (low, high) } else { (high, low) };
            let mut table = CompoundTable::default();
            for keys in &occs {
                table.record_compound(keys);
            }
            let occurrences: Vec<CompoundOccurrence> =
                occs.iter().map(|keys| occurrence(keys)).collect();
            let heads = ranked(&["a", "b", "c", "d", "e"]);
            let at_low = emit_compound_list(&heads, &occurrences, &table, low).unwrap();
            let at_high = emit_compound_list(&heads, &occurrences, &table, high).unwrap();
            prop_assert!(at_high.len() <= at_low.len());

            // Emitted sequences are unique within one run.
            let unique: HashSet<&Vec<String>> =
                at_low.iter().map(|e| &e.kept_tokens).collect();
            prop_assert_eq!(unique.len(), at_low.len());
        }
    }
}
