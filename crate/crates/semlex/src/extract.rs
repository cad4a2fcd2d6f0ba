//! Head-noun, co-occurrence, and compound extraction from parsed trees.
//!
//! A sentence's nouns are read off in runs: maximal stretches of adjacent
//! noun/JJ/CD leaves that share their innermost NP. Each run's rightmost
//! noun is the occurrence that gets counted, so a compound like `cargo
//! aircraft` is represented by `aircraft` alone.
//!
//! Two head nouns co-occur when some NP dominates both, that NP dominates
//! no clause or verb phrase, no third head sits between them under the same
//! NP, and a comma or conjunction separates them on the surface. The
//! relation is closed transitively within the sentence, which is what makes
//! every pair in `planes , trains , and automobiles` count.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::morph::{self, Lexicon, MorphError, Morphology};
use crate::treebank::Tree;

/// How often one pair may count within a sentence: once, or once per
/// witnessing NP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMultiplicity {
    #[default]
    Sentence,
    Construction,
}

/// One counted head noun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadOccurrence {
    pub key: String,
    pub token_index: usize,
    /// Span of the innermost NP covering the head's run, when there is one.
    pub np_span: Option<(usize, usize)>,
}

/// One noun compound occurrence: at least two adjacent tokens, the last of
/// which is the head noun.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundOccurrence {
    /// `(lemma key, pos tag)` in surface order.
    pub tokens: Vec<(String, String)>,
    pub first_index: usize,
}

impl CompoundOccurrence {
    pub fn head_key(&self) -> &str {
        &self.tokens[self.tokens.len() - 1].0
    }

    pub fn keys(&self) -> Vec<&str> {
        self.tokens.iter().map(|(k, _)| k.as_str()).collect()
    }
}

/// Symmetric pair counts with their marginals and head frequencies.
///
/// `any_counts` is the row sum of `pair_counts`, and every unordered pair
/// event contributes one count to each member's row, so `grand_total` is
/// twice the number of unordered events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoocTable {
    pairs: HashMap<(String, String), u64>,
    any: HashMap<String, u64>,
    freq: HashMap<String, u64>,
    grand: u64,
}

impl CoocTable {
    /// Records `n` unordered co-occurrence events for a pair of distinct
    /// lemma keys. Panics on a self-pair; the diagonal is zero by design.
    pub fn record_pair(&mut self, a: &str, b: &str, n: u64) {
        assert_ne!(a, b, "self-pairs are never counted");
        if n == 0 {
            return;
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        *self.pairs.entry(key).or_insert(0) += n;
        *self.any.entry(a.to_string()).or_insert(0) += n;
        *self.any.entry(b.to_string()).or_insert(0) += n;
        self.grand += 2 * n;
    }

    /// Records `n` head-noun occurrences of a lemma.
    pub fn record_head(&mut self, key: &str, n: u64) {
        if n > 0 {
            *self.freq.entry(key.to_string()).or_insert(0) += n;
        }
    }

    pub fn pair_counts(&self, a: &str, b: &str) -> u64 {
        if a == b {
            return 0;
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.pairs.get(&key).copied().unwrap_or(0)
    }

    pub fn any_counts(&self, a: &str) -> u64 {
        self.any.get(a).copied().unwrap_or(0)
    }

    pub fn freq(&self, a: &str) -> u64 {
        self.freq.get(a).copied().unwrap_or(0)
    }

    pub fn grand_total(&self) -> u64 {
        self.grand
    }

    /// Every lemma the table knows, sorted.
    pub fn lemmas(&self) -> Vec<&str> {
        let mut set: BTreeSet<&str> = self.freq.keys().map(String::as_str).collect();
        set.extend(self.any.keys().map(String::as_str));
        set.into_iter().collect()
    }

    pub fn merge(&mut self, other: CoocTable) {
        for ((a, b), n) in other.pairs {
            *self.pairs.entry((a, b)).or_insert(0) += n;
        }
        for (k, n) in other.any {
            *self.any.entry(k).or_insert(0) += n;
        }
        for (k, n) in other.freq {
            *self.freq.entry(k).or_insert(0) += n;
        }
        self.grand += other.grand;
    }

    pub fn pair_rows(&self) -> Vec<(&str, &str, u64)> {
        let mut rows: Vec<_> = self
            .pairs
            .iter()
            .map(|((a, b), n)| (a.as_str(), b.as_str(), *n))
            .collect();
        rows.sort_unstable();
        rows
    }

    pub fn freq_rows(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<_> = self.freq.iter().map(|(k, n)| (k.as_str(), *n)).collect();
        rows.sort_unstable();
        rows
    }
}

/// Compound membership counts: how often a lemma occurred in a compound at
/// all, and how often with each other lemma somewhere to its right.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompoundTable {
    rights: HashMap<(String, String), u64>,
    members: HashMap<String, u64>,
}

impl CompoundTable {
    /// Counts one compound occurrence. Each position counts once toward
    /// membership, and each distinct key to a position's right counts once
    /// toward that position's right-counts, which keeps
    /// `right_counts(i, j) <= member_counts(i)` even with repeated tokens.
    pub fn record_compound(&mut self, keys: &[&str]) {
        for (i, w) in keys.iter().enumerate() {
            *self.members.entry(w.to_string()).or_insert(0) += 1;
            let mut seen: HashSet<&str> = HashSet::new();
            for v in &keys[i + 1..] {
                if seen.insert(v) {
                    *self.rights.entry((w.to_string(), v.to_string())).or_insert(0) += 1;
                }
            }
        }
    }

    pub fn right_counts(&self, left: &str, right: &str) -> u64 {
        self.rights
            .get(&(left.to_string(), right.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn member_counts(&self, lemma: &str) -> u64 {
        self.members.get(lemma).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: CompoundTable) {
        for ((a, b), n) in other.rights {
            *self.rights.entry((a, b)).or_insert(0) += n;
        }
        for (k, n) in other.members {
            *self.members.entry(k).or_insert(0) += n;
        }
    }

    /// Rows for the counts file: `(left, right, right_count, member_count(left))`.
    pub fn rows(&self) -> Vec<(&str, &str, u64, u64)> {
        let mut rows: Vec<_> = self
            .rights
            .iter()
            .map(|((a, b), n)| (a.as_str(), b.as_str(), *n, self.member_counts(a)))
            .collect();
        rows.sort_unstable();
        rows
    }
}

/// Everything one pass over a corpus produces.
#[derive(Debug, Default)]
pub struct ExtractResult {
    pub cooc: CoocTable,
    pub compounds: CompoundTable,
    /// All compound occurrences in corpus order; the compound list needs
    /// the actual token sequences, not just the counts.
    pub occurrences: Vec<CompoundOccurrence>,
    pub lexicon: Lexicon,
}

/// Per-sentence extraction products.
#[derive(Debug)]
pub struct SentenceAnalysis {
    pub heads: Vec<HeadOccurrence>,
    /// Lemma-keyed unordered pairs, already reduced per the multiplicity
    /// policy and with self-pairs dropped.
    pub pairs: Vec<(String, String)>,
    pub compounds: Vec<CompoundOccurrence>,
    pub lexicon: Lexicon,
}

struct NpInfo {
    span: (usize, usize),
    svp_free: bool,
}

struct Leaf<'t> {
    tag: &'t str,
    surface: &'t str,
    /// Innermost NP covering this leaf, as an index into the NP list.
    np: Option<usize>,
}

/// Flattens one sentence: leaves with their innermost NP, plus every NP
/// with a flag for whether it dominates a clause or VP.
fn flatten<'t>(tree: &'t Tree) -> (Vec<Leaf<'t>>, Vec<NpInfo>) {
    let mut leaves = Vec::with_capacity(tree.leaf_count());
    let mut nps: Vec<NpInfo> = Vec::new();
    let mut np_stack: Vec<usize> = Vec::new();
    // (node, entering) pairs; an NP is popped from np_stack on its exit visit.
    let mut stack: Vec<(&Tree, bool)> = vec![(tree, true)];
    while let Some((node, entering)) = stack.pop() {
        if !entering {
            np_stack.pop();
            continue;
        }
        match node {
            Tree::Leaf { tag, surface, .. } => {
                leaves.push(Leaf { tag, surface, np: np_stack.last().copied() });
            }
            Tree::Node { children, .. } => {
                if node.is_clausal_or_vp() {
                    for &np in &np_stack {
                        nps[np].svp_free = false;
                    }
                }
                if node.is_np() {
                    nps.push(NpInfo { span: node.span(), svp_free: true });
                    np_stack.push(nps.len() - 1);
                    stack.push((node, false));
                }
                stack.extend(children.iter().rev().map(|c| (c, true)));
            }
        }
    }
    (leaves, nps)
}

/// A maximal stretch of adjacent noun/JJ/CD leaves sharing one innermost
/// NP, cut back to end at its rightmost noun.
struct Run {
    start: usize,
    /// Token indices relative to sentence start; last one is the head.
    len: usize,
    np: Option<usize>,
}

fn runs(leaves: &[Leaf]) -> Vec<Run> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < leaves.len() {
        if !morph::is_compound_tag(leaves[i].tag) {
            i += 1;
            continue;
        }
        let np = leaves[i].np;
        let mut j = i + 1;
        while j < leaves.len() && morph::is_compound_tag(leaves[j].tag) && leaves[j].np == np {
            j += 1;
        }
        // Trim trailing modifiers so the run ends at a noun.
        let mut end = j;
        while end > i && !morph::is_noun_tag(leaves[end - 1].tag) {
            end -= 1;
        }
        if end > i {
            out.push(Run { start: i, len: end - i, np });
        }
        i = j;
    }
    out
}

/// Runs one sentence through head, pair, and compound extraction.
pub fn analyze_sentence(
    tree: &Tree,
    morph: &Morphology,
    multiplicity: PairMultiplicity,
) -> Result<SentenceAnalysis, MorphError> {
    let (leaves, nps) = flatten(tree);
    let mut lexicon = Lexicon::new();
    let keys: Vec<Option<String>> = leaves
        .iter()
        .map(|leaf| {
            if morph::is_compound_tag(leaf.tag) {
                lexicon.observe(leaf.surface, leaf.tag, morph).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut heads = Vec::new();
    let mut compounds = Vec::new();
    for run in runs(&leaves) {
        let head_index = run.start + run.len - 1;
        heads.push(HeadOccurrence {
            key: keys[head_index].clone().expect("run tokens carry keys"),
            token_index: head_index,
            np_span: run.np.map(|i| nps[i].span),
        });
        if run.len >= 2 && run.np.is_some() {
            let tokens = (run.start..run.start + run.len)
                .map(|i| (keys[i].clone().expect("run tokens carry keys"), leaves[i].tag.to_string()))
                .collect();
            compounds.push(CompoundOccurrence { tokens, first_index: run.start });
        }
    }

    let pairs = pair_up(&heads, &leaves, &nps, multiplicity);
    Ok(SentenceAnalysis { heads, pairs, compounds, lexicon })
}

/// Comma or conjunction leaves satisfy the surface separator condition.
fn is_separator(leaf: &Leaf) -> bool {
    leaf.surface == "," || leaf.tag == "," || leaf.tag == "CC"
}

fn pair_up(
    heads: &[HeadOccurrence],
    leaves: &[Leaf],
    nps: &[NpInfo],
    multiplicity: PairMultiplicity,
) -> Vec<(String, String)> {
    // Prefix sums over separator leaves; sep_between is condition 4.
    let mut prefix = vec![0usize; leaves.len() + 1];
    for (i, leaf) in leaves.iter().enumerate() {
        prefix[i + 1] = prefix[i] + usize::from(is_separator(leaf));
    }
    let sep_between = |a: usize, b: usize| prefix[b] > prefix[a + 1];

    // Heads are in token order; only neighbors can pair directly, because
    // any NP covering a wider gap also dominates the head in between.
    let linked: Vec<bool> = heads
        .windows(2)
        .map(|w| {
            sep_between(w[0].token_index, w[1].token_index)
                && nps.iter().any(|np| {
                    np.svp_free && np.span.0 <= w[0].token_index && w[1].token_index <= np.span.1
                })
        })
        .collect();

    let keyed = |a: &HeadOccurrence, b: &HeadOccurrence| {
        let (x, y) = (a.key.as_str(), b.key.as_str());
        match x.cmp(y) {
            std::cmp::Ordering::Less => Some((x.to_string(), y.to_string())),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some((y.to_string(), x.to_string())),
        }
    };

    match multiplicity {
        PairMultiplicity::Sentence => {
            // Closure over the whole sentence, each unordered pair once.
            let mut set = BTreeSet::new();
            let mut start = 0;
            for end in 0..heads.len() {
                if end > start && !linked[end - 1] {
                    start = end;
                }
                for i in start..end {
                    if let Some(pair) = keyed(&heads[i], &heads[end]) {
                        set.insert(pair);
                    }
                }
            }
            set.into_iter().collect()
        }
        PairMultiplicity::Construction => {
            // Closure within each svp-free NP, counted once per NP.
            let mut out = Vec::new();
            for np in nps.iter().filter(|np| np.svp_free) {
                let inside: Vec<&HeadOccurrence> = heads
                    .iter()
                    .filter(|h| np.span.0 <= h.token_index && h.token_index <= np.span.1)
                    .collect();
                let mut start = 0;
                for end in 0..inside.len() {
                    if end > start
                        && !(sep_between(inside[end - 1].token_index, inside[end].token_index))
                    {
                        start = end;
                    }
                    for i in start..end {
                        if let Some(pair) = keyed(inside[i], inside[end]) {
                            out.push(pair);
                        }
                    }
                }
            }
            out.sort_unstable();
            out
        }
    }
}

/// Head occurrences of one sentence, in token order.
pub fn head_occurrences(tree: &Tree, morph: &Morphology) -> Result<Vec<HeadOccurrence>, MorphError> {
    Ok(analyze_sentence(tree, morph, PairMultiplicity::default())?.heads)
}

/// Compound occurrences of one sentence, in surface order.
pub fn find_compounds(tree: &Tree, morph: &Morphology) -> Result<Vec<CompoundOccurrence>, MorphError> {
    Ok(analyze_sentence(tree, morph, PairMultiplicity::default())?.compounds)
}

/// Unordered lemma pairs co-occurring in one sentence under the policy.
pub fn extract_pairs(
    tree: &Tree,
    morph: &Morphology,
    multiplicity: PairMultiplicity,
) -> Result<Vec<(String, String)>, MorphError> {
    Ok(analyze_sentence(tree, morph, multiplicity)?.pairs)
}

/// Extracts a whole corpus into the two count tables, the compound
/// occurrence list, and the display lexicon. Sentences are processed in
/// parallel and merged in corpus order, so the result does not depend on
/// the worker count.
pub fn accumulate(
    trees: &[Tree],
    morph: &Morphology,
    multiplicity: PairMultiplicity,
) -> Result<ExtractResult, MorphError> {
    let analyses: Vec<SentenceAnalysis> = trees
        .par_iter()
        .map(|tree| analyze_sentence(tree, morph, multiplicity))
        .collect::<Result<_, _>>()?;

    let mut result = ExtractResult::default();
    for analysis in analyses {
        for (a, b) in &analysis.pairs {
            result.cooc.record_pair(a, b, 1);
        }
        for head in &analysis.heads {
            result.cooc.record_head(&head.key, 1);
        }
        for compound in &analysis.compounds {
            result.compounds.record_compound(&compound.keys());
        }
        result.occurrences.extend(analysis.compounds);
        result.lexicon.merge(analysis.lexicon);
    }
    Ok(result)
}

/// Renders the counts file: three `#`-headed TSV sections with rows sorted
/// by their key columns. The output is byte-deterministic for a given
/// corpus.
pub fn render_counts(cooc: &CoocTable, compounds: &CompoundTable) -> String {
    let mut out = String::new();
    out.push_str("#PAIRS\n");
    for (a, b, n) in cooc.pair_rows() {
        out.push_str(&format!("{a}\t{b}\t{n}\n"));
    }
    out.push_str("#COMPOUNDS\n");
    for (a, b, right, member) in compounds.rows() {
        out.push_str(&format!("{a}\t{b}\t{right}\t{member}\n"));
    }
    out.push_str("#FREQ\n");
    for (k, n) in cooc.freq_rows() {
        out.push_str(&format!("{k}\t{n}\n"));
    }
    out
}
