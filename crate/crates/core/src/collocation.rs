//! Precomputed matches for gapped patterns `u X v` and `u X v X w` whose
//! parts are all among the most frequent contiguous phrases of the corpus.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::config::Limits;
use crate::corpus::{DataArray, WordId, GAP};
use crate::matcher::MatchSlice;
use crate::suffix::{LcpArray, SuffixArray};

/// A contiguous phrase with its corpus frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentPattern {
    pub phrase: Vec<WordId>,
    pub frequency: usize,
}

// Heap order: higher frequency, then shorter, then smaller id sequence.
impl Ord for FrequentPattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.frequency
            .cmp(&other.frequency)
            .then_with(|| other.phrase.len().cmp(&self.phrase.len()))
            .then_with(|| other.phrase.cmp(&self.phrase))
    }
}

impl PartialOrd for FrequentPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The top-K contiguous phrases in rank order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequentPatternSet {
    patterns: Vec<FrequentPattern>,
}

impl FrequentPatternSet {
    pub fn patterns(&self) -> &[FrequentPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Finds the `k` most frequent contiguous phrases occurring at least twice.
///
/// Walks the LCP intervals of the suffix array with a stack. Every phrase
/// sharing one occurrence set is represented once, by its shortest form:
/// for an interval with lcp value `l` whose enclosing interval has value
/// `p`, that is the prefix of length `p + 1`.
pub fn find_frequent_patterns(
    data: &DataArray,
    sa: &SuffixArray,
    lcp: &LcpArray,
    k: usize,
    max_pattern_len: usize,
) -> FrequentPatternSet {
    if k == 0 {
        return FrequentPatternSet::default();
    }
    let ids = data.ids();
    let positions = sa.positions();
    let lcp = lcp.values();
    let n = positions.len();

    let mut heap = BinaryHeap::new();
    // (lcp value, left bound)
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    for i in 1..=n {
        let current = if i < n { lcp[i] as usize } else { 0 };
        let mut left = i - 1;
        while current < stack.last().expect("bottom entry is never popped").0 {
            let (value, lb) = stack.pop().expect("non-empty");
            left = lb;
            let enclosing = current.max(stack.last().map_or(0, |e| e.0));
            let len = enclosing + 1;
            if len <= max_pattern_len && len <= value {
                let start = positions[lb] as usize;
                heap.push(FrequentPattern {
                    phrase: ids[start..start + len].to_vec(),
                    frequency: i - lb,
                });
            }
        }
        if current > stack.last().expect("non-empty").0 {
            stack.push((current, left));
        }
    }

    let mut patterns = Vec::with_capacity(k.min(heap.len()));
    while patterns.len() < k {
        match heap.pop() {
            Some(p) => patterns.push(p),
            None => break,
        }
    }
    FrequentPatternSet { patterns }
}

/// Map from gapped pattern to its precomputed, corpus-ordered matches.
///
/// Stored as flat arrays sorted by pattern so that it serializes and loads
/// without per-entry allocations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CollocationIndex {
    limits: Option<Limits>,
    /// `keys[key_offsets[e]..key_offsets[e + 1]]` is the pattern of entry `e`.
    key_offsets: Vec<u32>,
    keys: Vec<WordId>,
    /// Same layout for the flat match tuples.
    match_offsets: Vec<u32>,
    matches: Vec<u32>,
}

impl CollocationIndex {
    /// Fills the index in one pass over the corpus.
    pub fn build(data: &DataArray, frequent: &FrequentPatternSet, limits: &Limits) -> Self {
        let mut entries: HashMap<Vec<WordId>, Vec<u32>> = HashMap::new();
        if frequent.is_empty() || limits.max_nonterminals == 0 {
            return Self::from_map(Some(*limits), entries);
        }
        let mut push = |key: &[WordId], tuple: &[u32]| match entries.get_mut(key) {
            Some(flat) => flat.extend_from_slice(tuple),
            None => {
                entries.insert(key.to_vec(), tuple.to_vec());
            }
        };
        let rank: HashMap<&[WordId], usize> = frequent
            .patterns()
            .iter()
            .enumerate()
            .map(|(r, p)| (p.phrase.as_slice(), r))
            .collect();
        let max_len = frequent
            .patterns()
            .iter()
            .map(|p| p.phrase.len())
            .max()
            .unwrap_or(0);
        let span = limits.max_rule_span;
        let gap = limits.min_gap_size;
        let max_symbols = limits.max_rule_symbols;

        // (start, length) of every frequent phrase in one sentence.
        let mut hits: Vec<(usize, usize)> = Vec::new();
        let mut key: Vec<WordId> = Vec::new();
        for k in 0..data.num_sentences() {
            let sentence = data.sentence(k);
            let base = data.sentence_starts()[k] as usize;
            hits.clear();
            for start in 0..sentence.len() {
                for len in 1..=max_len.min(sentence.len() - start) {
                    if rank.contains_key(&sentence[start..start + len]) {
                        hits.push((start, len));
                    }
                }
            }
            for (a, &(us, ul)) in hits.iter().enumerate() {
                for (b, &(vs, vl)) in hits.iter().enumerate().skip(a + 1) {
                    if vs < us + ul + gap {
                        continue;
                    }
                    if vs + 1 - us > span {
                        break;
                    }
                    if vs + vl - us > span {
                        continue;
                    }
                    if ul + vl + 1 <= max_symbols {
                        key.clear();
                        key.extend_from_slice(&sentence[us..us + ul]);
                        key.push(GAP);
                        key.extend_from_slice(&sentence[vs..vs + vl]);
                        push(&key, &[(base + us) as u32, (base + vs) as u32]);
                    }
                    if limits.max_nonterminals < 2 {
                        continue;
                    }
                    for &(ws, wl) in &hits[b + 1..] {
                        if ws < vs + vl + gap {
                            continue;
                        }
                        if ws + 1 - us > span {
                            break;
                        }
                        if ws + wl - us > span {
                            continue;
                        }
                        if ul + vl + wl + 2 > max_symbols {
                            continue;
                        }
                        key.clear();
                        key.extend_from_slice(&sentence[us..us + ul]);
                        key.push(GAP);
                        key.extend_from_slice(&sentence[vs..vs + vl]);
                        key.push(GAP);
                        key.extend_from_slice(&sentence[ws..ws + wl]);
                        let tuple = [(base + us) as u32, (base + vs) as u32, (base + ws) as u32];
                        push(&key, &tuple);
                    }
                }
            }
        }
        Self::from_map(Some(*limits), entries)
    }

    fn from_map(limits: Option<Limits>, entries: HashMap<Vec<WordId>, Vec<u32>>) -> Self {
        let mut sorted: Vec<_> = entries.into_iter().collect();
        sorted.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut index = CollocationIndex {
            limits,
            key_offsets: vec![0],
            match_offsets: vec![0],
            ..Default::default()
        };
        for (key, flat) in sorted {
            index.keys.extend_from_slice(&key);
            index.key_offsets.push(index.keys.len() as u32);
            // Tuples are produced sentence by sentence, left to right, so
            // they are already in corpus order.
            index.matches.extend_from_slice(&flat);
            index.match_offsets.push(index.matches.len() as u32);
        }
        index
    }

    fn key(&self, e: usize) -> &[WordId] {
        &self.keys[self.key_offsets[e] as usize..self.key_offsets[e + 1] as usize]
    }

    fn matches_of(&self, e: usize) -> MatchSlice<'_> {
        let key = self.key(e);
        MatchSlice {
            arity: key.iter().filter(|&&w| w == GAP).count() + 1,
            tuples: &self.matches
                [self.match_offsets[e] as usize..self.match_offsets[e + 1] as usize],
        }
    }

    /// Stored matches of a gapped pattern; `None` for anything not indexed,
    /// including every contiguous pattern.
    pub fn lookup(&self, pattern: &[WordId]) -> Option<MatchSlice<'_>> {
        let e = self.position(pattern)?;
        Some(self.matches_of(e))
    }

    fn position(&self, pattern: &[WordId]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.key(mid).cmp(pattern) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Limits the index was built with. Its contents are only valid for
    /// queries using the same gap and span bounds.
    pub fn limits(&self) -> Option<&Limits> {
        self.limits.as_ref()
    }

    pub fn serves(&self, limits: &Limits) -> bool {
        self.limits.is_some_and(|own| {
            own.max_rule_span == limits.max_rule_span && own.min_gap_size == limits.min_gap_size
        })
    }

    pub fn len(&self) -> usize {
        self.key_offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries in pattern order.
    pub fn entries(&self) -> impl Iterator<Item = (&[WordId], MatchSlice<'_>)> {
        (0..self.len()).map(|e| (self.key(e), self.matches_of(e)))
    }

    /// The four flat arrays: key offsets, keys, match offsets, matches.
    pub(crate) fn raw_parts(&self) -> [&[u32]; 4] {
        [
            &self.key_offsets,
            &self.keys,
            &self.match_offsets,
            &self.matches,
        ]
    }

    /// Reassembles an index from [`raw_parts`](Self::raw_parts), checking
    /// every structural invariant.
    pub(crate) fn from_raw_parts(
        limits: Option<Limits>,
        parts: [Vec<u32>; 4],
    ) -> Result<Self, String> {
        let [key_offsets, keys, match_offsets, matches] = parts;
        let offsets_ok = |offsets: &[u32], total: usize| {
            offsets.first() == Some(&0)
                && offsets.last() == Some(&(total as u32))
                && offsets.windows(2).all(|w| w[0] <= w[1])
        };
        if key_offsets.len() != match_offsets.len()
            || !offsets_ok(&key_offsets, keys.len())
            || !offsets_ok(&match_offsets, matches.len())
        {
            return Err("collocation offsets are inconsistent".into());
        }
        let index = CollocationIndex {
            limits,
            key_offsets,
            keys,
            match_offsets,
            matches,
        };
        for e in 0..index.len() {
            let key = index.key(e);
            if key.first().is_none_or(|&w| w == GAP) || key.last() == Some(&GAP) {
                return Err("collocation key has an outer gap".into());
            }
            if e > 0 && index.key(e - 1) >= key {
                return Err("collocation keys are not sorted".into());
            }
            let m = index.matches_of(e);
            if !m.tuples.len().is_multiple_of(m.arity) {
                return Err("collocation tuples do not fit the pattern".into());
            }
        }
        Ok(index)
    }
}
