//! Two-phase iterative seed growth over a co-occurrence table.
//!
//! Phase one grows the seed set with the selection ratio: each round every
//! candidate is scored by the share of its co-occurrence events spent on
//! current seeds, and the whole top-scoring tie group is admitted. The
//! ratio protects rare nouns: a single co-occurrence with a seed scores a
//! perfect 1.0, so low-frequency category members are not starved, while a
//! promiscuous high-frequency noun is held back by its off-category
//! events. Rounds with no positive score stop the phase.
//!
//! Phase two discards everything phase one did not select, resets the
//! seeds to the originals, and replays the same loop with the
//! log-likelihood score, which orders the survivors by strength of
//! evidence instead of purity. The order and round of admission is the
//! final ranking.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::extract::CoocTable;
use crate::stats::{self, StatsError};

#[derive(Debug, Error)]
pub enum BootstrapError {
    /// None of the requested seeds occur in the table at all.
    #[error("no usable seed lemmas: none occur in the corpus")]
    NoUsableSeeds,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Knobs for a bootstrap run.
#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    /// Rounds per phase.
    pub iterations: usize,
    /// Minimum head-occurrence count for candidates; 1 admits every lemma
    /// in the table.
    pub min_occurrence: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { iterations: 50, min_occurrence: 1 }
    }
}

/// One round's admissions: every lemma that attained the round's maximum
/// score.
#[derive(Debug, Clone, PartialEq)]
pub struct TieGroup {
    /// 1-based round number.
    pub iteration: usize,
    pub score: f64,
    pub lemmas: BTreeSet<String>,
}

/// What one phase did, for reporting and for tests that check the
/// mechanics rather than the output.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub initial_seeds: BTreeSet<String>,
    /// Candidate pool size at the start of the phase.
    pub pool_size: usize,
    /// Rounds in which scoring ran, including a round that stopped the
    /// phase.
    pub rounds_run: usize,
    /// Round at which the phase stopped before using up its iterations.
    pub early_stop: Option<usize>,
    pub tie_groups: Vec<TieGroup>,
}

impl PhaseTrace {
    fn new(initial_seeds: BTreeSet<String>, pool_size: usize) -> Self {
        PhaseTrace {
            initial_seeds,
            pool_size,
            rounds_run: 0,
            early_stop: None,
            tie_groups: Vec::new(),
        }
    }

    /// All lemmas admitted across the phase's rounds.
    pub fn additions(&self) -> BTreeSet<String> {
        self.tie_groups.iter().flat_map(|g| g.lemmas.iter().cloned()).collect()
    }
}

/// One ranked head noun: earlier rounds outrank later ones, higher scores
/// break round ties, and the lemma breaks the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub lemma: String,
    /// 1-based round of admission in the ranking phase.
    pub iteration: usize,
    pub score: f64,
}

/// Everything a bootstrap run produces.
#[derive(Debug)]
pub struct BootstrapOutcome {
    pub entries: Vec<RankedEntry>,
    /// Requested seeds that never occur in the corpus, skipped with a
    /// warning at the call site.
    pub ignored_seeds: Vec<String>,
    pub phase1: PhaseTrace,
    pub phase2: PhaseTrace,
}

/// Scores the pool, takes the maximal tie group, feeds it back into the
/// seed set, and repeats. `stop_on_zero` is the phase-one rule: a round
/// whose best score is not positive ends the phase instead of admitting
/// the whole scoreless remainder. Tie-group assembly happens on the
/// sorted pool, so scoring order never shows in the result.
fn run_phase<F>(
    originals: &BTreeSet<String>,
    pool: BTreeSet<String>,
    iterations: usize,
    stop_on_zero: bool,
    score_round: F,
) -> Result<PhaseTrace, StatsError>
where
    F: Fn(&BTreeSet<String>, &BTreeSet<String>) -> Result<Vec<(String, f64)>, StatsError>,
{
    let mut trace = PhaseTrace::new(originals.clone(), pool.len());
    let mut current = originals.clone();
    let mut pool = pool;
    for round in 1..=iterations {
        trace.rounds_run = round;
        if pool.is_empty() {
            trace.early_stop = Some(round);
            break;
        }
        let scored = score_round(&current, &pool)?;
        let best = scored.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        if stop_on_zero && best <= 0.0 {
            trace.early_stop = Some(round);
            break;
        }
        let lemmas: BTreeSet<String> =
            scored.into_iter().filter(|(_, s)| *s == best).map(|(l, _)| l).collect();
        for lemma in &lemmas {
            pool.remove(lemma);
            current.insert(lemma.clone());
        }
        trace.tie_groups.push(TieGroup { iteration: round, score: best, lemmas });
    }
    Ok(trace)
}

/// Candidate pool: every table lemma outside the seed set, subject to the
/// occurrence cutoff.
fn candidate_pool(
    table: &CoocTable,
    seeds: &BTreeSet<String>,
    min_occurrence: u64,
) -> BTreeSet<String> {
    table
        .lemmas()
        .into_iter()
        .filter(|l| !seeds.contains(*l))
        .filter(|l| min_occurrence <= 1 || table.freq(l) >= min_occurrence)
        .map(str::to_string)
        .collect()
}

/// Selection phase: grows the seeds by ratio and returns what it added.
pub fn phase_select(
    table: &CoocTable,
    originals: &BTreeSet<String>,
    iterations: usize,
    min_occurrence: u64,
) -> Result<PhaseTrace, StatsError> {
    let pool = candidate_pool(table, originals, min_occurrence);
    run_phase(originals, pool, iterations, true, |current, pool| {
        pool.par_iter()
            .map(|lemma| {
                let k_seed: u64 = current.iter().map(|s| table.pair_counts(lemma, s)).sum();
                stats::selection_ratio(k_seed, table.any_counts(lemma))
                    .map(|ratio| (lemma.clone(), ratio))
            })
            .collect()
    })
}

/// Ranking phase: resets the seeds to the originals, scores only the
/// phase-one survivors by log likelihood, and returns them in admission
/// order. Survivors were already judged category members, so even a
/// zero-likelihood round admits its tie group rather than dropping it.
pub fn phase_rank(
    table: &CoocTable,
    originals: &BTreeSet<String>,
    survivors: &BTreeSet<String>,
    iterations: usize,
) -> Result<(Vec<RankedEntry>, PhaseTrace), StatsError> {
    let trace = run_phase(originals, survivors.clone(), iterations, false, |current, pool| {
        // The seed-side sums are shared by every candidate this round.
        let sums = stats::SeedSums::new(current, table);
        pool.par_iter()
            .map(|lemma| {
                let contingency = stats::contingency_with_sums(lemma, current, table, &sums)?;
                stats::log_likelihood_g2(&contingency).map(|g| (lemma.clone(), g))
            })
            .collect()
    })?;
    let entries = trace
        .tie_groups
        .iter()
        .flat_map(|group| {
            group.lemmas.iter().map(|lemma| RankedEntry {
                lemma: lemma.clone(),
                iteration: group.iteration,
                score: group.score,
            })
        })
        .collect();
    Ok((entries, trace))
}

/// Full run: validate seeds, select, discard, reset, rank.
pub fn bootstrap(
    table: &CoocTable,
    seeds: &BTreeSet<String>,
    config: &BootstrapConfig,
) -> Result<BootstrapOutcome, BootstrapError> {
    let (usable, ignored): (BTreeSet<String>, Vec<String>) = {
        let mut usable = BTreeSet::new();
        let mut ignored = Vec::new();
        for seed in seeds {
            if table.any_counts(seed) > 0 || table.freq(seed) > 0 {
                usable.insert(seed.clone());
            } else {
                ignored.push(seed.clone());
            }
        }
        (usable, ignored)
    };
    if usable.is_empty() {
        return Err(BootstrapError::NoUsableSeeds);
    }
    let phase1 = phase_select(table, &usable, config.iterations, config.min_occurrence)?;
    let survivors = phase1.additions();
    let (entries, phase2) = phase_rank(table, &usable, &survivors, config.iterations)?;
    Ok(BootstrapOutcome { entries, ignored_seeds: ignored, phase1, phase2 })
}
