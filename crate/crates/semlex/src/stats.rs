//! Selection and ranking statistics.
//!
//! Candidates are selected by the fraction of their co-occurrence events
//! that involve a seed, which favors rare-but-clean words over frequent
//! noise, and ranked by Dunning's log-likelihood statistic, which needs no
//! continuity correction at small counts.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::extract::CoocTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("seed co-occurrence count {k_seed} exceeds total {k_any}")]
    RatioBounds { k_seed: u64, k_any: u64 },
    #[error("contingency cell would be negative; counts table is inconsistent")]
    NegativeCell,
    #[error("log-likelihood of an all-zero table")]
    EmptyTable,
}

/// Fraction of a word's co-occurrence events that involve a seed; zero when
/// the word co-occurs with nothing at all.
pub fn selection_ratio(k_seed: u64, k_any: u64) -> Result<f64, StatsError> {
    if k_seed > k_any {
        return Err(StatsError::RatioBounds { k_seed, k_any });
    }
    if k_any == 0 {
        return Ok(0.0);
    }
    Ok(k_seed as f64 / k_any as f64)
}

/// A 2x2 table over ordered co-occurrence events. Rows split events owned
/// by the word under test from the rest; columns split events whose other
/// member is a seed from the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contingency {
    pub k11: u64,
    pub k12: u64,
    pub k21: u64,
    pub k22: u64,
}

impl Contingency {
    pub fn new(k11: u64, k12: u64, k21: u64, k22: u64) -> Self {
        Contingency { k11, k12, k21, k22 }
    }

    pub fn total(&self) -> u64 {
        self.k11 + self.k12 + self.k21 + self.k22
    }
}

/// Builds the table for `word` against `seeds`.
///
/// Every unordered co-occurrence event contributes two ordered events, one
/// per direction, so the cells sum to the table's grand total. Seed-seed
/// events land in `k22`: they say nothing about how `word` relates to the
/// seed set.
pub fn build_contingency(
    word: &str,
    seeds: &BTreeSet<String>,
    table: &CoocTable,
) -> Result<Contingency, StatsError> {
    let seed_sums = SeedSums::new(seeds, table);
    contingency_with_sums(word, seeds, table, &seed_sums)
}

/// Per-round constants of `build_contingency` that do not depend on the
/// candidate; scoring loops compute them once.
pub(crate) struct SeedSums {
    any_total: u64,
    seed_seed_ordered: u64,
}

impl SeedSums {
    pub(crate) fn new(seeds: &BTreeSet<String>, table: &CoocTable) -> Self {
        let any_total = seeds.iter().map(|s| table.any_counts(s)).sum();
        let mut seed_seed_ordered = 0;
        for a in seeds {
            for b in seeds {
                if a < b {
                    seed_seed_ordered += 2 * table.pair_counts(a, b);
                }
            }
        }
        SeedSums { any_total, seed_seed_ordered }
    }
}

pub(crate) fn contingency_with_sums(
    word: &str,
    seeds: &BTreeSet<String>,
    table: &CoocTable,
    sums: &SeedSums,
) -> Result<Contingency, StatsError> {
    let k11: u64 = seeds.iter().map(|s| table.pair_counts(word, s)).sum();
    let k12 = table
        .any_counts(word)
        .checked_sub(k11)
        .ok_or(StatsError::NegativeCell)?;
    let k21 = sums
        .any_total
        .checked_sub(k11)
        .and_then(|v| v.checked_sub(sums.seed_seed_ordered))
        .ok_or(StatsError::NegativeCell)?;
    let k22 = table
        .grand_total()
        .checked_sub(k11 + k12 + k21)
        .ok_or(StatsError::NegativeCell)?;
    Ok(Contingency { k11, k12, k21, k22 })
}

/// Dunning's G-squared: `2 * sum k_ij * ln(k_ij * N / (R_i * C_j))` with
/// empty cells contributing nothing.
///
/// Each log argument is evaluated as `ln_1p((k*N - R*C) / (R*C))` with the
/// numerator formed in integer arithmetic, so proportional tables come out
/// exactly zero and near-independent tables lose nothing to cancellation.
pub fn log_likelihood_g2(c: &Contingency) -> Result<f64, StatsError> {
    let n = c.total();
    if n == 0 {
        return Err(StatsError::EmptyTable);
    }
    let r1 = c.k11 + c.k12;
    let r2 = c.k21 + c.k22;
    let c1 = c.k11 + c.k21;
    let c2 = c.k12 + c.k22;
    let cells = [
        (c.k11, r1, c1),
        (c.k12, r1, c2),
        (c.k21, r2, c1),
        (c.k22, r2, c2),
    ];
    let mut sum = 0.0;
    for (k, row, col) in cells {
        if k == 0 {
            continue;
        }
        let expected = row as u128 * col as u128;
        let observed = k as u128 * n as u128;
        let diff = observed as i128 - expected as i128;
        let ratio = diff as f64 / expected as f64;
        sum += k as f64 * ratio.ln_1p();
    }
    Ok(2.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::CoocTable;
    use proptest::prelude::*;

    fn seeds(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ratio_basics() {
        assert_eq!(selection_ratio(0, 0).unwrap(), 0.0);
        assert_eq!(selection_ratio(1, 1).unwrap(), 1.0);
        assert_eq!(selection_ratio(1, 4).unwrap(), 0.25);
        assert_eq!(
            selection_ratio(2, 1),
            Err(StatsError::RatioBounds { k_seed: 2, k_any: 1 })
        );
    }

    #[test]
    fn contingency_on_a_single_pair() {
        let mut table = CoocTable::default();
        table.record_pair("plane", "train", 1);
        let c = build_contingency("train", &seeds(&["plane"]), &table).unwrap();
        // One unordered event = two ordered events: (train,plane) is owned
        // by train with a seed partner; (plane,train) is owned by a seed
        // with partner train, which k21 deliberately excludes.
        assert_eq!(c, Contingency::new(1, 0, 0, 1));
        assert_eq!(c.total(), table.grand_total());
    }

    #[test]
    fn contingency_with_background_noise() {
        let mut table = CoocTable::default();
        table.record_pair("plane", "train", 3);
        table.record_pair("train", "dog", 1);
        table.record_pair("dog", "cat", 5);
        table.record_pair("plane", "car", 2);
        table.record_pair("car", "gun", 7);
        let c = build_contingency("train", &seeds(&["plane", "car"]), &table).unwrap();
        assert_eq!(c.k11, 3);
        assert_eq!(c.k12, 1);
        // Seed-owned events: any(plane)+any(car) = 5+9, minus the three
        // (seed, train) events, minus the 4 ordered seed-seed events from
        // plane-car; what survives is the seven car-gun events.
        assert_eq!(c.k21, 7);
        // dog-cat noise lands in k22 along with the mirror-image events.
        assert_eq!(c.k22, 25);
        assert_eq!(c.total(), table.grand_total());
    }

    #[test]
    fn seed_seed_events_stay_out_of_k21() {
        let mut table = CoocTable::default();
        table.record_pair("plane", "car", 4);
        table.record_pair("plane", "train", 1);
        let c = build_contingency("train", &seeds(&["plane", "car"]), &table).unwrap();
        // any(plane)+any(car) = 5+4 = 9; minus k11=1; minus 2*4 ordered
        // seed-seed events = 0.
        assert_eq!(c, Contingency::new(1, 0, 0, 9));
    }

    #[test]
    fn proportional_table_scores_exactly_zero() {
        let c = Contingency::new(10, 10, 10, 10);
        assert_eq!(log_likelihood_g2(&c).unwrap(), 0.0);
        let c = Contingency::new(3, 9, 5, 15);
        assert_eq!(log_likelihood_g2(&c).unwrap(), 0.0);
    }

    #[test]
    fn empty_table_is_an_error() {
        let c = Contingency::new(0, 0, 0, 0);
        assert_eq!(log_likelihood_g2(&c), Err(StatsError::EmptyTable));
    }

    #[test]
    fn zero_cells_contribute_nothing() {
        // One word pair seen twice in a tiny corpus, nothing else: strong
        // association, finite score.
        let c = Contingency::new(2, 0, 0, 2);
        let g = log_likelihood_g2(&c).unwrap();
        assert!((g - 8.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn shared_rarity_beats_tiny_overlap_of_common_words() {
        // Two words of frequency 40 sharing 20 events are more surprising
        // in a million-event corpus than two words that always co-occurred
        // but were seen only twice.
        let common = log_likelihood_g2(&Contingency::new(20, 20, 20, 999_940)).unwrap();
        let rare = log_likelihood_g2(&Contingency::new(2, 0, 0, 999_998)).unwrap();
        assert!(common > rare);
    }

    /// Brute-force check on small tables: with both margins held fixed,
    /// moving one unit of mass onto the diagonal never lowers the score,
    /// provided the table is already at or past independence in the
    /// diagonal direction. Below independence the same move heads toward
    /// the G2 minimum and must be allowed to decrease.
    #[test]
    fn diagonal_shift_is_monotone_under_fixed_margins() {
        for n in 1u64..=40 {
            for a in 0..=n {
                for b in 0..=(n - a) {
                    for c in 0..=(n - a - b) {
                        let d = n - a - b - c;
                        if b == 0 || c == 0 || a * d < b * c {
                            continue;
                        }
                        let base = log_likelihood_g2(&Contingency::new(a, b, c, d)).unwrap();
                        let shifted =
                            log_likelihood_g2(&Contingency::new(a + 1, b - 1, c - 1, d + 1))
                                .unwrap();
                        assert!(
                            shifted >= base - 1e-9,
                            "({a},{b},{c},{d}): {base} -> {shifted}"
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn g2_is_symmetric_under_transpose_and_swaps(
            a in 0u64..100_000, b in 0u64..100_000,
            c in 0u64..100_000, d in 0u64..100_000,
        ) {
            prop_assume!(a + b + c + d > 0);
            let g = log_likelihood_g2(&Contingency::new(a, b, c, d)).unwrap();
            let transposed = log_likelihood_g2(&Contingency::new(a, c, b, d)).unwrap();
            let rows_swapped = log_likelihood_g2(&Contingency::new(c, d, a, b)).unwrap();
            let tol = 1e-9 * g.abs().max(1.0);
            prop_assert!((g - transposed).abs() <= tol);
            prop_assert!((g - rows_swapped).abs() <= tol);
        }

        #[test]
        fn g2_of_proportional_rows_is_zero(
            a in 0u64..1000, b in 0u64..1000, lambda in 1u64..50,
        ) {
            prop_assume!(a + b > 0);
            let c = Contingency::new(a, b, lambda * a, lambda * b);
            prop_assert_eq!(log_likelihood_g2(&c).unwrap(), 0.0);
        }

        #[test]
        fn g2_is_nonnegative_up_to_rounding(
            a in 0u64..1_000_000, b in 0u64..1_000_000,
            c in 0u64..1_000_000, d in 0u64..1_000_000,
        ) {
            prop_assume!(a + b + c + d > 0);
            let g = log_likelihood_g2(&Contingency::new(a, b, c, d)).unwrap();
            prop_assert!(g >= -1e-9);
        }

        #[test]
        fn ratio_is_a_probability(k_any in 0u64..10_000, extra in 0u64..10_000) {
            let k_seed = k_any.saturating_sub(extra);
            let r = selection_ratio(k_seed, k_any).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }
}
