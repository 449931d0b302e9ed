//! Matching contiguous and gapped source patterns against the corpus.
//!
//! A match of a pattern is the tuple of corpus positions where each of its
//! contiguous terminal chunks starts. Patterns of one input sentence are
//! matched breadth first into a [`SentenceTrie`]: a pattern `a β c` is only
//! searched when both `a β` and `β c` have matches, and its match set is
//! derived from whichever of the two is smaller.

use std::collections::HashMap;
use std::fmt;

use crate::collocation::CollocationIndex;
use crate::config::Limits;
use crate::corpus::{DataArray, WordId, GAP, SENTINEL};
use crate::error::{Error, Result};
use crate::suffix::{SuffixArray, SuffixInterval};

/// A source pattern: word ids interleaved with [`GAP`] markers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(Vec<WordId>);

impl Pattern {
    pub fn new(symbols: Vec<WordId>) -> Result<Self> {
        if symbols.iter().all(|&s| s == GAP) {
            return Err(Error::format(0, "pattern must contain at least one word"));
        }
        if symbols.contains(&SENTINEL) {
            return Err(Error::format(
                0,
                "pattern must not contain the sentence terminator",
            ));
        }
        if symbols.windows(2).any(|w| w[0] == GAP && w[1] == GAP) {
            return Err(Error::format(0, "pattern must not contain adjacent gaps"));
        }
        Ok(Pattern(symbols))
    }

    pub fn symbols(&self) -> &[WordId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_gaps(&self) -> usize {
        self.0.iter().filter(|&&s| s == GAP).count()
    }

    pub fn is_contiguous(&self) -> bool {
        !self.0.contains(&GAP)
    }

    pub fn has_outer_gap(&self) -> bool {
        self.0.first() == Some(&GAP) || self.0.last() == Some(&GAP)
    }

    /// The pattern without leading and trailing gaps. Its match set equals
    /// that of the full pattern.
    pub fn inner(&self) -> &[WordId] {
        strip_gaps(&self.0)
    }

    /// Lengths of the terminal chunks of [`Pattern::inner`].
    pub fn chunk_lens(&self) -> Vec<usize> {
        chunk_lens(self.inner())
    }

    /// True when the pattern respects the symbol and gap limits.
    pub fn within(&self, limits: &Limits) -> bool {
        self.len() <= limits.max_rule_symbols && self.num_gaps() <= limits.max_nonterminals
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern(")?;
        for (k, &s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if s == GAP {
                write!(f, "X")?;
            } else {
                write!(f, "{s}")?;
            }
        }
        write!(f, ")")
    }
}

fn strip_gaps(symbols: &[WordId]) -> &[WordId] {
    let start = symbols
        .iter()
        .position(|&s| s != GAP)
        .unwrap_or(symbols.len());
    let end = symbols
        .iter()
        .rposition(|&s| s != GAP)
        .map_or(start, |e| e + 1);
    &symbols[start..end]
}

fn chunk_lens(symbols: &[WordId]) -> Vec<usize> {
    symbols
        .split(|&s| s == GAP)
        .filter(|c| !c.is_empty())
        .map(<[WordId]>::len)
        .collect()
}

/// Occurrences of a pattern as flat tuples of chunk start positions.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MatchSet {
    arity: usize,
    tuples: Vec<u32>,
}

/// Borrowed view of a match set, e.g. a suffix-array range of arity 1.
#[derive(Clone, Copy, Debug)]
pub struct MatchSlice<'a> {
    pub arity: usize,
    pub tuples: &'a [u32],
}

impl<'a> MatchSlice<'a> {
    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'a, u32> {
        self.tuples.chunks_exact(self.arity.max(1))
    }

    pub fn to_owned(&self) -> MatchSet {
        MatchSet {
            arity: self.arity,
            tuples: self.tuples.to_vec(),
        }
    }
}

impl MatchSet {
    pub fn new(arity: usize) -> Self {
        MatchSet {
            arity,
            tuples: Vec::new(),
        }
    }

    pub fn from_flat(arity: usize, tuples: Vec<u32>) -> Self {
        assert!(arity > 0 && tuples.len().is_multiple_of(arity));
        MatchSet { arity, tuples }
    }

    pub fn from_tuples<I, T>(arity: usize, tuples: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u32]>,
    {
        let mut set = MatchSet::new(arity);
        for t in tuples {
            set.push(t.as_ref());
        }
        set
    }

    /// Number of contiguous chunks per tuple.
    pub fn num_subpatterns(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn push(&mut self, tuple: &[u32]) {
        debug_assert_eq!(tuple.len(), self.arity);
        self.tuples.extend_from_slice(tuple);
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u32> {
        self.tuples.chunks_exact(self.arity.max(1))
    }

    pub fn flat(&self) -> &[u32] {
        &self.tuples
    }

    pub fn view(&self) -> MatchSlice<'_> {
        MatchSlice {
            arity: self.arity,
            tuples: &self.tuples,
        }
    }

    /// Puts tuples in corpus order.
    pub fn sort(&mut self) {
        if self.arity <= 1 {
            self.tuples.sort_unstable();
            return;
        }
        let sorted = self
            .tuples
            .chunks_exact(self.arity)
            .zip(self.tuples.chunks_exact(self.arity).skip(1))
            .all(|(a, b)| a <= b);
        if sorted {
            return;
        }
        let mut rows: Vec<&[u32]> = self.tuples.chunks_exact(self.arity).collect();
        rows.sort_unstable();
        self.tuples = rows.concat();
    }

    pub fn sorted(mut self) -> Self {
        self.sort();
        self
    }
}

impl fmt::Debug for MatchSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Matches of `Xβ` or `βX`: the outer gap does not change any chunk start.
pub fn strip_outer_gap(pattern: &Pattern, inner_matches: &MatchSet) -> MatchSet {
    debug_assert!(pattern.has_outer_gap());
    inner_matches.clone()
}

/// `a β b` to `a β b c`: keeps tuples whose last chunk is directly followed
/// by `c`. One comparison per tuple.
pub fn extend_with_terminal(
    prefix: MatchSlice<'_>,
    last_chunk_len: usize,
    c: WordId,
    data: &DataArray,
    limits: &Limits,
    comparisons: &mut u64,
) -> MatchSet {
    let ids = data.ids();
    let mut out = MatchSet::new(prefix.arity);
    for t in prefix.iter() {
        let first = t[0] as usize;
        let next = t[t.len() - 1] as usize + last_chunk_len;
        if next + 1 - first > limits.max_rule_span {
            continue;
        }
        *comparisons += 1;
        // A terminator never equals a word, so sentence ends drop out here.
        if ids[next] == c {
            out.push(t);
        }
    }
    out
}

/// `a β X` to `a β X c`: for each match of `a β`, looks for `c` in the
/// following window allowed by the gap and span limits, adding one match
/// per occurrence.
pub fn extend_through_gap(
    prefix: MatchSlice<'_>,
    last_chunk_len: usize,
    c: WordId,
    data: &DataArray,
    limits: &Limits,
    comparisons: &mut u64,
) -> MatchSet {
    let ids = data.ids();
    let mut out = MatchSet::new(prefix.arity + 1);
    let mut tuple = Vec::with_capacity(prefix.arity + 1);
    for t in prefix.iter() {
        let first = t[0] as usize;
        let sentence_end = data.sentence_end(data.sentence_index(first));
        let from = t[t.len() - 1] as usize + last_chunk_len + limits.min_gap_size;
        let to = sentence_end.min(first + limits.max_rule_span);
        for q in from..to {
            *comparisons += 1;
            if ids[q] == c {
                tuple.clear();
                tuple.extend_from_slice(t);
                tuple.push(q as u32);
                out.push(&tuple);
            }
        }
    }
    out
}

/// Mirror images of the two extensions above: `b β c` to `a b β c` when
/// `through_gap` is false, `X β c` to `a X β c` when it is true.
/// `last_chunk_len` is the length of the final chunk of the suffix pattern.
pub fn extend_from_front(
    suffix: MatchSlice<'_>,
    last_chunk_len: usize,
    a: WordId,
    through_gap: bool,
    data: &DataArray,
    limits: &Limits,
    comparisons: &mut u64,
) -> MatchSet {
    let ids = data.ids();
    let span = limits.max_rule_span;
    let arity = if through_gap {
        suffix.arity + 1
    } else {
        suffix.arity
    };
    let mut out = MatchSet::new(arity);
    let mut tuple = Vec::with_capacity(arity);
    for t in suffix.iter() {
        let start = t[0] as usize;
        let end = t[t.len() - 1] as usize + last_chunk_len;
        let sentence_start = data.sentence_starts()[data.sentence_index(start)] as usize;
        if !through_gap {
            if start == sentence_start || end - (start - 1) > span {
                continue;
            }
            *comparisons += 1;
            if ids[start - 1] == a {
                tuple.clear();
                tuple.push(start as u32 - 1);
                tuple.extend_from_slice(&t[1..]);
                out.push(&tuple);
            }
        } else {
            let lowest = sentence_start.max(end.saturating_sub(span));
            let Some(highest) = start.checked_sub(limits.min_gap_size + 1) else {
                continue;
            };
            for q in (lowest..=highest).rev() {
                *comparisons += 1;
                if ids[q] == a {
                    tuple.clear();
                    tuple.push(q as u32);
                    tuple.extend_from_slice(t);
                    out.push(&tuple);
                }
            }
        }
    }
    out
}

/// Which operand a gapped pattern `a β c` is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Extend the matches of `a β` at their end.
    Back,
    /// Extend the matches of `β c` at their start.
    Front,
}

pub fn choose_extension_side(prefix_len: usize, suffix_len: usize) -> Side {
    if prefix_len <= suffix_len {
        Side::Back
    } else {
        Side::Front
    }
}

/// Exhaustive matcher used as an oracle: tries every placement of every
/// chunk inside every sentence.
pub fn brute_force_match(pattern: &Pattern, data: &DataArray, limits: &Limits) -> MatchSet {
    let inner = pattern.inner();
    let chunks: Vec<&[WordId]> = inner.split(|&s| s == GAP).collect();
    let gapped = chunks.len() > 1;
    let ids = data.ids();
    let mut out = MatchSet::new(chunks.len());
    let mut tuple = Vec::with_capacity(chunks.len());

    fn place(
        ids: &[WordId],
        chunks: &[&[WordId]],
        k: usize,
        from: usize,
        sentence_end: usize,
        gapped: bool,
        limits: &Limits,
        tuple: &mut Vec<u32>,
        out: &mut MatchSet,
    ) {
        if k == chunks.len() {
            out.push(tuple);
            return;
        }
        let chunk = chunks[k];
        let mut p = from;
        while p + chunk.len() <= sentence_end {
            let end = p + chunk.len();
            if gapped && k > 0 && end - tuple[0] as usize > limits.max_rule_span {
                break;
            }
            if &ids[p..end] == chunk {
                tuple.push(p as u32);
                let next_from = end + limits.min_gap_size;
                place(
                    ids,
                    chunks,
                    k + 1,
                    next_from,
                    sentence_end,
                    gapped,
                    limits,
                    tuple,
                    out,
                );
                tuple.pop();
            }
            p += 1;
        }
    }

    for k in 0..data.num_sentences() {
        let start = data.sentence_starts()[k] as usize;
        let end = data.sentence_end(k);
        place(
            ids, &chunks, 0, start, end, gapped, limits, &mut tuple, &mut out,
        );
    }
    out
}

/// Shared, read-only indexes consulted while matching.
#[derive(Clone, Copy)]
pub struct SourceIndex<'a> {
    pub data: &'a DataArray,
    pub sa: &'a SuffixArray,
    pub collocations: Option<&'a CollocationIndex>,
}

pub type NodeId = usize;

#[derive(Debug, Clone)]
enum NodeMatches {
    Absent,
    Interval(SuffixInterval),
    Tuples(MatchSet),
    /// Pattern with a trailing gap, sharing the matches of another node.
    SameAs(NodeId),
    /// Present, but the tuples were dropped once no longer needed.
    Released,
}

#[derive(Debug, Clone)]
pub struct TrieNode {
    pattern: Pattern,
    parent: Option<NodeId>,
    suffix_link: Option<NodeId>,
    matches: NodeMatches,
    comparisons: u64,
    from_index: bool,
}

impl TrieNode {
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    /// Node of the pattern without its first symbol (and without the gap
    /// that may follow it). `None` for single words.
    pub fn suffix_link(&self) -> Option<NodeId> {
        self.suffix_link
    }

    pub fn is_present(&self) -> bool {
        !matches!(self.matches, NodeMatches::Absent)
    }

    /// Corpus comparisons spent computing this node's matches.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    /// Whether the matches were taken from the collocation index.
    pub fn from_index(&self) -> bool {
        self.from_index
    }
}

/// Per-sentence memo of pattern matches, keyed by pattern.
#[derive(Debug, Clone)]
pub struct SentenceTrie {
    nodes: Vec<TrieNode>,
    by_pattern: HashMap<Vec<WordId>, NodeId>,
    suffix_array_steps: u64,
    /// Nodes created since the last call to `take_fresh`.
    fresh: Vec<NodeId>,
}

/// Borrowed matches of a trie node.
#[derive(Debug, Clone, Copy)]
pub enum NodeMatchView<'a> {
    Interval(SuffixInterval),
    Tuples(&'a MatchSet),
}

impl NodeMatchView<'_> {
    pub fn len(&self) -> usize {
        match self {
            NodeMatchView::Interval(i) => i.len(),
            NodeMatchView::Tuples(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slice<'s>(&self, sa: &'s SuffixArray) -> MatchSlice<'s>
    where
        Self: 's,
    {
        match *self {
            NodeMatchView::Interval(i) => MatchSlice {
                arity: 1,
                tuples: &sa.positions()[i.low..i.high],
            },
            NodeMatchView::Tuples(m) => m.view(),
        }
    }
}

impl SentenceTrie {
    fn new() -> Self {
        SentenceTrie {
            nodes: Vec::new(),
            by_pattern: HashMap::new(),
            suffix_array_steps: 0,
            fresh: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[TrieNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &TrieNode {
        &self.nodes[id]
    }

    pub fn find(&self, symbols: &[WordId]) -> Option<NodeId> {
        self.by_pattern.get(symbols).copied()
    }

    /// Suffix-array narrowing steps performed while building the trie.
    pub fn suffix_array_steps(&self) -> u64 {
        self.suffix_array_steps
    }

    /// Total corpus comparisons spent on gapped patterns.
    pub fn comparisons(&self) -> u64 {
        self.nodes.iter().map(|n| n.comparisons).sum()
    }

    pub fn view(&self, id: NodeId) -> Option<NodeMatchView<'_>> {
        match &self.nodes[id].matches {
            NodeMatches::Absent | NodeMatches::Released => None,
            NodeMatches::Interval(i) => Some(NodeMatchView::Interval(*i)),
            NodeMatches::Tuples(m) => Some(NodeMatchView::Tuples(m)),
            NodeMatches::SameAs(other) => self.view(*other),
        }
    }

    /// Owned matches of a pattern, or `None` if it is absent or was never
    /// reached.
    pub fn matches(&self, symbols: &[WordId], sa: &SuffixArray) -> Option<MatchSet> {
        let id = self.find(symbols)?;
        self.view(id).map(|v| v.slice(sa).to_owned())
    }

    /// Present patterns without outer gaps: the ones rules are built from.
    pub fn extractable(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_present() && !n.pattern.has_outer_gap())
            .map(|(id, _)| id)
    }

    fn insert(&mut self, node: TrieNode) -> NodeId {
        let id = self.nodes.len();
        self.by_pattern.insert(node.pattern.0.clone(), id);
        self.nodes.push(node);
        self.fresh.push(id);
        id
    }

    /// Looks up or computes the child of `parent` (or a root child) by `symbol`.
    fn child(
        &mut self,
        parent: Option<NodeId>,
        symbol: WordId,
        index: &SourceIndex<'_>,
        limits: &Limits,
    ) -> NodeId {
        let mut symbols = parent.map_or_else(Vec::new, |p| self.nodes[p].pattern.0.clone());
        symbols.push(symbol);
        if let Some(&id) = self.by_pattern.get(&symbols) {
            return id;
        }

        let suffix_symbols = match symbols.get(1) {
            Some(&GAP) => &symbols[2..],
            _ => &symbols[1..],
        };
        let suffix_link = if suffix_symbols.is_empty() {
            None
        } else {
            self.by_pattern.get(suffix_symbols).copied()
        };
        let suffix_present =
            suffix_symbols.is_empty() || suffix_link.is_some_and(|s| self.nodes[s].is_present());
        let parent_present = parent.is_none_or(|p| self.nodes[p].is_present());

        let mut comparisons = 0;
        let mut from_index = false;
        let matches = if !parent_present || !suffix_present {
            NodeMatches::Absent
        } else if symbol == GAP {
            let p = parent.expect("a lone gap is never inserted");
            NodeMatches::SameAs(self.resolve(p))
        } else if !symbols.contains(&GAP) {
            let interval = match parent {
                None => index.sa.full_interval(),
                Some(p) => match self.nodes[p].matches {
                    NodeMatches::Interval(i) => i,
                    _ => unreachable!("contiguous parent holds an interval"),
                },
            };
            self.suffix_array_steps += 1;
            let narrowed = index.sa.narrow(index.data, interval, symbol);
            if narrowed.is_empty() {
                NodeMatches::Absent
            } else {
                NodeMatches::Interval(narrowed)
            }
        } else {
            let indexed = index
                .collocations
                .filter(|c| c.serves(limits))
                .and_then(|c| c.lookup(&symbols));
            let set = match indexed {
                Some(set) => {
                    from_index = true;
                    set.to_owned()
                }
                None => self.extend(
                    &symbols,
                    parent.expect("gapped pattern has a parent"),
                    suffix_link.expect("checked above"),
                    index,
                    limits,
                    &mut comparisons,
                ),
            };
            if set.is_empty() {
                NodeMatches::Absent
            } else {
                NodeMatches::Tuples(set)
            }
        };

        self.insert(TrieNode {
            pattern: Pattern(symbols),
            parent,
            suffix_link,
            matches,
            comparisons,
            from_index,
        })
    }

    fn resolve(&self, id: NodeId) -> NodeId {
        match self.nodes[id].matches {
            NodeMatches::SameAs(other) => other,
            _ => id,
        }
    }

    /// Computes the matches of a gapped pattern `a β c` from the smaller of
    /// `a β` and `β c`.
    fn extend(
        &self,
        symbols: &[WordId],
        parent: NodeId,
        suffix: NodeId,
        index: &SourceIndex<'_>,
        limits: &Limits,
        comparisons: &mut u64,
    ) -> MatchSet {
        let prefix_view = self.view(parent).expect("present");
        let suffix_view = self.view(suffix).expect("present");
        let n = symbols.len();
        let set = match choose_extension_side(prefix_view.len(), suffix_view.len()) {
            Side::Back => {
                let prefix = prefix_view.slice(index.sa);
                let (c, before) = (symbols[n - 1], symbols[n - 2]);
                if before == GAP {
                    let last = *chunk_lens(&symbols[..n - 2])
                        .last()
                        .expect("prefix has words");
                    extend_through_gap(prefix, last, c, index.data, limits, comparisons)
                } else {
                    let last = *chunk_lens(&symbols[..n - 1])
                        .last()
                        .expect("prefix has words");
                    extend_with_terminal(prefix, last, c, index.data, limits, comparisons)
                }
            }
            Side::Front => {
                let suffix_slice = suffix_view.slice(index.sa);
                let last = *chunk_lens(symbols)
                    .last()
                    .expect("pattern ends with a word");
                extend_from_front(
                    suffix_slice,
                    last,
                    symbols[0],
                    symbols[1] == GAP,
                    index.data,
                    limits,
                    comparisons,
                )
            }
        };
        set.sorted()
    }
}

// Breadth first over pattern length: all patterns with `n` symbols are
// matched before any with `n + 1`.
fn build_trie(
    sentence: &[WordId],
    index: &SourceIndex<'_>,
    limits: &Limits,
    retain: bool,
    visit: &mut dyn FnMut(&TrieNode, MatchSlice<'_>),
) -> SentenceTrie {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    struct Instance {
        node: NodeId,
        start: usize,
        // One past the last word of the final chunk.
        end: usize,
        trailing_gap: bool,
        gaps: usize,
        symbols: usize,
    }

    let mut trie = SentenceTrie::new();
    let m = sentence.len();
    let span = limits.max_rule_span;
    let min_gap = limits.min_gap_size;

    let mut frontier = Vec::new();
    for (i, &w) in sentence.iter().enumerate() {
        let node = trie.child(None, w, index, limits);
        if trie.nodes[node].is_present() {
            frontier.push(Instance {
                node,
                start: i,
                end: i + 1,
                trailing_gap: false,
                gaps: 0,
                symbols: 1,
            });
        }
    }

    let mut level = 1;
    loop {
        // Every node created in the last round has `level` symbols.
        for id in std::mem::take(&mut trie.fresh) {
            let node = &trie.nodes[id];
            if node.is_present() && !node.pattern.has_outer_gap() {
                let view = trie.view(id).expect("fresh present nodes hold matches");
                visit(node, view.slice(index.sa));
            }
        }
        if !retain && level >= 2 {
            // Extending to `level + 1` symbols reads nodes with `level` or
            // `level - 1` symbols only.
            for node in &mut trie.nodes {
                if node.pattern.len() + 1 < level && matches!(node.matches, NodeMatches::Tuples(_))
                {
                    node.matches = NodeMatches::Released;
                }
            }
        }
        if frontier.is_empty() {
            break;
        }
        level += 1;
        let mut next = Vec::new();
        for inst in frontier {
            if inst.symbols >= limits.max_rule_symbols {
                continue;
            }
            let mut push = |trie: &mut SentenceTrie, symbol: WordId, end: usize| {
                let node = trie.child(Some(inst.node), symbol, index, limits);
                if trie.nodes[node].is_present() {
                    let is_gap = symbol == GAP;
                    next.push(Instance {
                        node,
                        start: inst.start,
                        end,
                        trailing_gap: is_gap,
                        gaps: inst.gaps + is_gap as usize,
                        symbols: inst.symbols + 1,
                    });
                }
            };
            if inst.trailing_gap {
                for q in inst.end + min_gap..m.min(inst.start + span) {
                    push(&mut trie, sentence[q], q + 1);
                }
            } else {
                if inst.end < m && inst.end + 1 - inst.start <= span {
                    push(&mut trie, sentence[inst.end], inst.end + 1);
                }
                if inst.gaps < limits.max_nonterminals
                    && inst.end + min_gap <= m
                    && inst.end + min_gap - inst.start <= span
                {
                    push(&mut trie, GAP, inst.end);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    trie
}

/// Matches every pattern of `sentence` that fits `limits`, keeping all
/// match sets.
pub fn match_sentence(
    sentence: &[WordId],
    index: &SourceIndex<'_>,
    limits: &Limits,
) -> SentenceTrie {
    build_trie(sentence, index, limits, true, &mut |_, _| {})
}

/// Like [`match_sentence`], but hands each present pattern without outer
/// gaps to `visit` as soon as its matches are known and drops match sets
/// once no longer needed. Nodes in the returned trie may have no view.
pub fn match_sentence_streaming(
    sentence: &[WordId],
    index: &SourceIndex<'_>,
    limits: &Limits,
    mut visit: impl FnMut(&TrieNode, MatchSlice<'_>),
) -> SentenceTrie {
    build_trie(sentence, index, limits, false, &mut visit)
}
