//! Oracles, corpus generators and process helpers shared by the
//! integration tests. Everything here is deliberately naive.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sa_extract::corpus::{Link, GAP, SENTINEL};
use sa_extract::rules::{is_consistent, Symbol};
use sa_extract::{Bundle, DataArray, Limits, Rule, WordId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- suffixes

/// Sort key of one symbol: terminators sort first, ordered by sentence.
fn key(ids: &[WordId], sentence_of: &[usize], p: usize) -> (u8, usize) {
    if ids[p] == SENTINEL {
        (0, sentence_of[p])
    } else {
        (1, ids[p] as usize)
    }
}

fn sentence_numbers(ids: &[WordId]) -> Vec<usize> {
    let mut k = 0;
    ids.iter()
        .map(|&w| {
            let here = k;
            if w == SENTINEL {
                k += 1;
            }
            here
        })
        .collect()
}

/// All non-terminator positions sorted by comparing suffixes symbol by symbol.
pub fn naive_suffix_array(ids: &[WordId]) -> Vec<u32> {
    let sentence_of = sentence_numbers(ids);
    let mut positions: Vec<usize> = (0..ids.len()).filter(|&p| ids[p] != SENTINEL).collect();
    positions.sort_by(|&a, &b| {
        let (mut i, mut j) = (a, b);
        loop {
            let (x, y) = (key(ids, &sentence_of, i), key(ids, &sentence_of, j));
            if x != y || x.0 == 0 {
                return x.cmp(&y);
            }
            i += 1;
            j += 1;
        }
    });
    positions.into_iter().map(|p| p as u32).collect()
}

/// Longest common prefix of neighbouring suffixes, never counting
/// terminators.
pub fn naive_lcp(ids: &[WordId], sa: &[u32]) -> Vec<u32> {
    let mut out = vec![0; sa.len()];
    for r in 1..sa.len() {
        let (a, b) = (sa[r - 1] as usize, sa[r] as usize);
        let mut l = 0;
        while ids[a + l] != SENTINEL && ids[a + l] == ids[b + l] {
            l += 1;
        }
        out[r] = l as u32;
    }
    out
}

// ---------------------------------------------------------------- patterns

/// Every pattern (no outer gaps) with an instance in `sentence` that
/// respects `limits`.
pub fn query_patterns(sentence: &[WordId], limits: &Limits) -> BTreeSet<Vec<WordId>> {
    fn grow(
        sentence: &[WordId],
        start: usize,
        pos: usize,
        symbols: &mut Vec<WordId>,
        gaps: usize,
        limits: &Limits,
        out: &mut BTreeSet<Vec<WordId>>,
    ) {
        let base = symbols.len();
        for end in pos + 1..=sentence.len() {
            if end - start > limits.max_rule_span {
                break;
            }
            symbols.truncate(base);
            symbols.extend_from_slice(&sentence[pos..end]);
            if symbols.len() > limits.max_rule_symbols {
                break;
            }
            out.insert(symbols.clone());
            if gaps < limits.max_nonterminals && symbols.len() + 2 <= limits.max_rule_symbols {
                symbols.push(GAP);
                for next in end + limits.min_gap_size..sentence.len() {
                    grow(sentence, start, next, symbols, gaps + 1, limits, out);
                }
                symbols.pop();
            }
        }
        symbols.truncate(base);
    }

    let mut out = BTreeSet::new();
    let mut symbols = Vec::new();
    for start in 0..sentence.len() {
        grow(sentence, start, start, &mut symbols, 0, limits, &mut out);
    }
    out
}

pub fn chunks_of(pattern: &[WordId]) -> Vec<&[WordId]> {
    pattern.split(|&w| w == GAP).collect()
}

/// Corpus positions of every chunk for every occurrence of `pattern`,
/// in corpus order.
pub struct NaiveMatcher<'a> {
    ids: &'a [WordId],
    by_word: HashMap<WordId, Vec<usize>>,
    sentence_end: Vec<usize>,
}

impl<'a> NaiveMatcher<'a> {
    pub fn new(data: &'a DataArray) -> Self {
        let ids = data.ids();
        let mut by_word: HashMap<WordId, Vec<usize>> = HashMap::new();
        let mut sentence_end = vec![0; ids.len()];
        let mut end = ids.len();
        for p in (0..ids.len()).rev() {
            if ids[p] == SENTINEL {
                end = p;
            }
            sentence_end[p] = end;
        }
        for (p, &w) in ids.iter().enumerate() {
            if w != SENTINEL {
                by_word.entry(w).or_default().push(p);
            }
        }
        NaiveMatcher {
            ids,
            by_word,
            sentence_end,
        }
    }

    pub fn matches(&self, pattern: &[WordId], limits: &Limits) -> Vec<Vec<u32>> {
        let chunks = chunks_of(pattern);
        let gapped = chunks.len() > 1;
        let mut out = Vec::new();
        let Some(starts) = self.by_word.get(&chunks[0][0]) else {
            return out;
        };
        let mut tuple = Vec::new();
        for &p in starts {
            self.place(
                &chunks,
                0,
                p,
                p,
                self.sentence_end[p],
                gapped,
                limits,
                &mut tuple,
                &mut out,
            );
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn place(
        &self,
        chunks: &[&[WordId]],
        k: usize,
        p: usize,
        first: usize,
        end_of_sentence: usize,
        gapped: bool,
        limits: &Limits,
        tuple: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let chunk = chunks[k];
        let end = p + chunk.len();
        if end > end_of_sentence || &self.ids[p..end] != chunk {
            return;
        }
        if gapped && end - first > limits.max_rule_span {
            return;
        }
        tuple.push(p as u32);
        if k + 1 == chunks.len() {
            out.push(tuple.clone());
        } else {
            for q in end + limits.min_gap_size..end_of_sentence {
                self.place(
                    chunks,
                    k + 1,
                    q,
                    first,
                    end_of_sentence,
                    gapped,
                    limits,
                    tuple,
                    out,
                );
            }
        }
        tuple.pop();
    }
}

// ---------------------------------------------------------------- rules

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    pub source: Vec<Symbol>,
    pub target: Vec<Symbol>,
    pub alignment: Vec<(u16, u16)>,
}

impl From<&Rule> for Shape {
    fn from(r: &Rule) -> Self {
        Shape {
            source: r.source.clone(),
            target: r.target.clone(),
            alignment: r.alignment.clone(),
        }
    }
}

fn consistent(src: (usize, usize), tgt: (usize, usize), links: &[Link]) -> bool {
    links.iter().all(|&(i, j)| {
        let a = src.0 <= i as usize && i as usize <= src.1;
        let b = tgt.0 <= j as usize && j as usize <= tgt.1;
        a == b
    })
}

/// Rules licensed by one occurrence, found by trying every target span.
/// `chunks` are half-open, sentence-local. Also returns the whole and gap
/// target spans used (inclusive).
pub fn occurrence_rules(
    chunks: &[(usize, usize)],
    src: &[WordId],
    tgt: &[WordId],
    links: &[Link],
) -> Vec<(Shape, (usize, usize), Vec<(usize, usize)>)> {
    windowed_rules(chunks, src, tgt, links, 0..tgt.len())
}

/// [`occurrence_rules`] with every target span searched inside `window`.
fn windowed_rules(
    chunks: &[(usize, usize)],
    src: &[WordId],
    tgt: &[WordId],
    links: &[Link],
    window: std::ops::Range<usize>,
) -> Vec<(Shape, (usize, usize), Vec<(usize, usize)>)> {
    let aligned: Vec<bool> = (0..tgt.len())
        .map(|j| links.iter().any(|&(_, b)| b as usize == j))
        .collect();
    let has_link = |s: (usize, usize), t: (usize, usize)| {
        links.iter().any(|&(i, j)| {
            (s.0..=s.1).contains(&(i as usize)) && (t.0..=t.1).contains(&(j as usize))
        })
    };

    let mut gap_spans = Vec::new();
    for w in chunks.windows(2) {
        let gap = (w[0].1, w[1].0 - 1);
        let mut found = None;
        for a in window.clone() {
            for b in a..window.end {
                if aligned[a]
                    && aligned[b]
                    && has_link(gap, (a, b))
                    && consistent(gap, (a, b), links)
                {
                    assert!(found.is_none(), "tight gap span is unique");
                    found = Some((a, b));
                }
            }
        }
        match found {
            Some(span) => gap_spans.push(span),
            None => return Vec::new(),
        }
    }

    let whole = (chunks[0].0, chunks[chunks.len() - 1].1 - 1);
    let mut source = Vec::new();
    let mut source_pos = BTreeMap::new();
    for (k, &(lo, hi)) in chunks.iter().enumerate() {
        if k > 0 {
            source.push(Symbol::Gap(k as u8));
        }
        for (i, &w) in src.iter().enumerate().take(hi).skip(lo) {
            source_pos.insert(i, source.len() as u16);
            source.push(Symbol::Word(w));
        }
    }

    let mut out = Vec::new();
    for a in window.clone() {
        for b in a..window.end {
            if !has_link(whole, (a, b)) || !consistent(whole, (a, b), links) {
                continue;
            }
            let leading = (a..=b).take_while(|&j| !aligned[j]).count();
            let trailing = (a..=b).rev().take_while(|&j| !aligned[j]).count();
            if leading > 1 || trailing > 1 {
                continue;
            }
            let mut target = Vec::new();
            let mut target_pos = BTreeMap::new();
            let mut j = a;
            while j <= b {
                if let Some(g) = gap_spans.iter().position(|s| s.0 == j) {
                    target.push(Symbol::Gap(g as u8 + 1));
                    j = gap_spans[g].1 + 1;
                } else {
                    target_pos.insert(j, target.len() as u16);
                    target.push(Symbol::Word(tgt[j]));
                    j += 1;
                }
            }
            let mut alignment: Vec<(u16, u16)> = links
                .iter()
                .filter_map(|&(i, j)| {
                    Some((
                        *source_pos.get(&(i as usize))?,
                        *target_pos.get(&(j as usize))?,
                    ))
                })
                .collect();
            alignment.sort();
            out.push((
                Shape {
                    source: source.clone(),
                    target,
                    alignment,
                },
                (a, b),
                gap_spans.clone(),
            ));
        }
    }
    out
}

/// Splits a global match tuple into its sentence and sentence-local chunks.
pub fn localize(
    data: &DataArray,
    tuple: &[u32],
    pattern: &[WordId],
) -> (usize, Vec<(usize, usize)>) {
    let k = data.sentence_index(tuple[0] as usize);
    let base = data.sentence_starts()[k] as usize;
    let chunks = chunks_of(pattern)
        .iter()
        .zip(tuple)
        .map(|(c, &p)| (p as usize - base, p as usize - base + c.len()))
        .collect();
    (k, chunks)
}

/// Expected rules for one query without sampling: shape -> (count, number
/// of occurrences of its source pattern).
pub fn oracle_grammar(
    bundle: &Bundle,
    matcher: &NaiveMatcher<'_>,
    query: &[WordId],
    limits: &Limits,
) -> BTreeMap<Shape, (u32, usize)> {
    let mut out = BTreeMap::new();
    for pattern in query_patterns(query, limits) {
        let occurrences = matcher.matches(&pattern, limits);
        let mut counts: BTreeMap<Shape, u32> = BTreeMap::new();
        for tuple in &occurrences {
            let (k, chunks) = localize(&bundle.source, tuple, &pattern);
            let rules = occurrence_rules(
                &chunks,
                bundle.source.sentence(k),
                bundle.target.sentence(k),
                bundle.alignment.links(k),
            );
            for (shape, _, _) in rules {
                *counts.entry(shape).or_default() += 1;
            }
        }
        for (shape, c) in counts {
            out.insert(shape, (c, occurrences.len()));
        }
    }
    out
}

/// Checks that `rule` is well formed and is produced by some occurrence of
/// its source side whose whole span and gap spans pass `is_consistent`.
/// Returns a description of the problem otherwise.
pub fn soundness_violation(
    rule: &Rule,
    bundle: &Bundle,
    matcher: &NaiveMatcher<'_>,
    limits: &Limits,
) -> Option<String> {
    let gaps = |side: &[Symbol]| {
        let mut g: Vec<u8> = side
            .iter()
            .filter_map(|s| match s {
                Symbol::Gap(k) => Some(*k),
                Symbol::Word(_) => None,
            })
            .collect();
        g.sort();
        g
    };
    let source_gaps = gaps(&rule.source);
    if source_gaps != gaps(&rule.target) {
        return Some("gap sets differ between sides".into());
    }
    if source_gaps
        .iter()
        .enumerate()
        .any(|(k, &g)| g as usize != k + 1)
    {
        return Some("gaps are not numbered 1..".into());
    }
    if matches!(rule.source.first(), Some(Symbol::Gap(_)))
        || matches!(rule.source.last(), Some(Symbol::Gap(_)))
    {
        return Some("source side starts or ends with a gap".into());
    }
    for &(s, t) in &rule.alignment {
        let ok = matches!(rule.source.get(s as usize), Some(Symbol::Word(_)))
            && matches!(rule.target.get(t as usize), Some(Symbol::Word(_)));
        if !ok {
            return Some(format!("link {s}-{t} does not join two terminals"));
        }
    }

    let pattern: Vec<WordId> = rule
        .source
        .iter()
        .map(|s| match s {
            Symbol::Gap(_) => GAP,
            Symbol::Word(w) => *w,
        })
        .collect();
    let want = Shape::from(rule);
    for tuple in matcher.matches(&pattern, limits) {
        let (k, chunks) = localize(&bundle.source, &tuple, &pattern);
        let links = bundle.alignment.links(k);
        let (src, tgt) = (bundle.source.sentence(k), bundle.target.sentence(k));
        for (shape, whole, gap_spans) in fast_occurrence_rules(&chunks, src, tgt, links) {
            if shape != want {
                continue;
            }
            let source_whole = (chunks[0].0, chunks[chunks.len() - 1].1 - 1);
            let sound = is_consistent(source_whole, whole, links)
                && chunks
                    .windows(2)
                    .zip(&gap_spans)
                    .all(|(w, &t)| is_consistent((w[0].1, w[1].0 - 1), t, links));
            if sound {
                return None;
            }
        }
    }
    Some("no consistent occurrence produces this rule".into())
}

/// Same result as [`occurrence_rules`]: every whole target span contains
/// all words linked to the source span and at most one more word on each
/// side, so only that window is searched.
fn fast_occurrence_rules(
    chunks: &[(usize, usize)],
    src: &[WordId],
    tgt: &[WordId],
    links: &[Link],
) -> Vec<(Shape, (usize, usize), Vec<(usize, usize)>)> {
    let lo = chunks[0].0;
    let hi = chunks[chunks.len() - 1].1 - 1;
    let linked = links
        .iter()
        .filter(|&&(i, _)| (lo..=hi).contains(&(i as usize)))
        .map(|&(_, j)| j as usize);
    let (Some(a), Some(b)) = (linked.clone().min(), linked.max()) else {
        return Vec::new();
    };
    let window = a.saturating_sub(1)..(b + 2).min(tgt.len());
    windowed_rules(chunks, src, tgt, links, window)
}

// ---------------------------------------------------------------- corpora

/// A word-aligned parallel corpus as text lines.
pub struct TextCorpus {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub alignment: Vec<String>,
}

impl TextCorpus {
    pub fn tokens(&self) -> usize {
        self.source
            .iter()
            .map(|l| l.split_whitespace().count())
            .sum()
    }

    pub fn write(&self, dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
        let paths = (
            dir.join("source.txt"),
            dir.join("target.txt"),
            dir.join("alignment.txt"),
        );
        for (path, lines) in [
            (&paths.0, &self.source),
            (&paths.1, &self.target),
            (&paths.2, &self.alignment),
        ] {
            let mut text = lines.join("\n");
            text.push('\n');
            fs::write(path, text).unwrap();
        }
        paths
    }

    pub fn bundle(&self, config: &sa_extract::ExtractorConfig) -> Bundle {
        let tok = |lines: &[String]| -> Vec<Vec<String>> {
            lines
                .iter()
                .map(|l| l.split_whitespace().map(String::from).collect())
                .collect()
        };
        let links = self
            .alignment
            .iter()
            .enumerate()
            .map(|(n, l)| sa_extract::corpus::parse_alignment_line(l, n + 1).unwrap())
            .collect();
        Bundle::build(&tok(&self.source), &tok(&self.target), links, config).unwrap()
    }
}

/// Zipf-distributed source words; the target is a noisy word-by-word
/// translation with local swaps, dropped and inserted words.
pub struct ZipfGenerator {
    words: WeightedIndex<f64>,
}

impl ZipfGenerator {
    pub fn new(vocab: usize, exponent: f64) -> Self {
        let weights: Vec<f64> = (1..=vocab)
            .map(|r| 1.0 / (r as f64).powf(exponent))
            .collect();
        ZipfGenerator {
            words: WeightedIndex::new(weights).unwrap(),
        }
    }

    pub fn sentence(&self, rng: &mut impl Rng, min_len: usize, max_len: usize) -> Vec<usize> {
        let len = rng.gen_range(min_len..=max_len);
        (0..len).map(|_| self.words.sample(rng)).collect()
    }

    pub fn corpus(&self, rng: &mut impl Rng, tokens: usize) -> TextCorpus {
        let mut corpus = TextCorpus {
            source: Vec::new(),
            target: Vec::new(),
            alignment: Vec::new(),
        };
        let mut total = 0;
        while total < tokens {
            let src = self.sentence(rng, 8, 30);
            total += src.len();
            let mut tgt: Vec<(String, Option<usize>)> = Vec::new();
            for (i, &w) in src.iter().enumerate() {
                if rng.gen_bool(0.08) {
                    continue;
                }
                tgt.push((format!("t{w}"), Some(i)));
                if rng.gen_bool(0.05) {
                    tgt.push((format!("t{w}b"), Some(i)));
                }
                if rng.gen_bool(0.07) {
                    tgt.push((format!("e{}", rng.gen_range(0..20)), None));
                }
            }
            let mut j = 0;
            while j + 1 < tgt.len() {
                if rng.gen_bool(0.15) {
                    tgt.swap(j, j + 1);
                    j += 2;
                } else {
                    j += 1;
                }
            }
            if tgt.is_empty() {
                tgt.push(("e0".into(), None));
            }
            let words: Vec<String> = src.iter().map(|w| format!("s{w}")).collect();
            corpus.source.push(words.join(" "));
            corpus.target.push(
                tgt.iter()
                    .map(|t| t.0.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            let mut links: Vec<(usize, usize)> = tgt
                .iter()
                .enumerate()
                .filter_map(|(j, t)| Some((t.1?, j)))
                .collect();
            links.sort();
            corpus.alignment.push(
                links
                    .iter()
                    .map(|(i, j)| format!("{i}-{j}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        corpus
    }

    pub fn test_set(&self, rng: &mut impl Rng, sentences: usize) -> Vec<String> {
        (0..sentences)
            .map(|_| {
                self.sentence(rng, 8, 30)
                    .iter()
                    .map(|w| format!("s{w}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

/// Short sentence pairs over tiny vocabularies with uniformly random links.
pub fn random_aligned_corpus(
    rng: &mut impl Rng,
    pairs: usize,
    max_len: usize,
    vocab: usize,
) -> TextCorpus {
    let mut corpus = TextCorpus {
        source: Vec::new(),
        target: Vec::new(),
        alignment: Vec::new(),
    };
    for _ in 0..pairs {
        let m = rng.gen_range(1..=max_len);
        let n = rng.gen_range(1..=max_len);
        let src: Vec<String> = (0..m)
            .map(|_| format!("f{}", rng.gen_range(0..vocab)))
            .collect();
        let tgt: Vec<String> = (0..n)
            .map(|_| format!("e{}", rng.gen_range(0..vocab)))
            .collect();
        let density = rng.gen_range(0.05..0.35);
        let mut links = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if rng.gen_bool(density) {
                    links.push(format!("{i}-{j}"));
                }
            }
        }
        corpus.source.push(src.join(" "));
        corpus.target.push(tgt.join(" "));
        corpus.alignment.push(links.join(" "));
    }
    corpus
}

// ---------------------------------------------------------------- processes

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_sa-extract")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("spawn sa-extract")
}

/// Runs the tool and reports wall time and peak resident set size in KiB.
pub fn run_measured(args: &[&str]) -> (i32, Duration, u64) {
    let start = Instant::now();
    let child = Command::new(binary())
        .args(args)
        .spawn()
        .expect("spawn sa-extract");
    let mut status = 0;
    // SAFETY: rusage is plain old data and wait4 fills it for our own child.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let pid = unsafe { libc::wait4(child.id() as libc::pid_t, &mut status, 0, &mut usage) };
    assert_eq!(pid, child.id() as libc::pid_t, "wait4 failed");
    let elapsed = start.elapsed();
    let code = if libc::WIFEXITED(status) {
        libc::WEXITSTATUS(status)
    } else {
        -1
    };
    (code, elapsed, usage.ru_maxrss as u64)
}

/// Peak resident set size of the calling process in KiB.
pub fn own_peak_rss_kib() -> u64 {
    // SAFETY: rusage is plain old data and getrusage only writes to it.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut usage) };
    usage.ru_maxrss as u64
}

/// Sorted `(file name, contents)` of every file in a directory.
pub fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}
