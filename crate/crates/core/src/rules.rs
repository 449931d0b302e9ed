//! Alignment-consistent extraction and scoring of hierarchical rules.

use std::collections::HashMap;
use std::fmt;

use crate::corpus::{Link, WordId};
use crate::lexical::{TranslationTable, NULL_WORD};
use crate::matcher::{MatchSet, MatchSlice};

/// One symbol of a rule side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Nonterminal `[X,k]`, numbered from 1 in source order.
    Gap(u8),
    Word(WordId),
}

impl Symbol {
    pub fn is_gap(&self) -> bool {
        matches!(self, Symbol::Gap(_))
    }
}

/// Names of the emitted features, in output order.
pub const FEATURE_NAMES: [&str; 5] = [
    "EGivenFCoherent",
    "SampleCountF",
    "CountEF",
    "MaxLexFGivenE",
    "MaxLexEGivenF",
];

/// Ceiling applied to lexical features whose probability product is zero.
pub const DEFAULT_LEX_CEILING: f64 = 99.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Features {
    pub e_given_f_coherent: f64,
    pub sample_count_f: f64,
    pub count_ef: f64,
    pub max_lex_f_given_e: f64,
    pub max_lex_e_given_f: f64,
}

impl Features {
    pub fn values(&self) -> [f64; 5] {
        [
            self.e_given_f_coherent,
            self.sample_count_f,
            self.count_ef,
            self.max_lex_f_given_e,
            self.max_lex_e_given_f,
        ]
    }

    pub fn from_values(v: [f64; 5]) -> Self {
        Features {
            e_given_f_coherent: v[0],
            sample_count_f: v[1],
            count_ef: v[2],
            max_lex_f_given_e: v[3],
            max_lex_e_given_f: v[4],
        }
    }
}

/// A scored synchronous rule `[X] -> source | target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub source: Vec<Symbol>,
    pub target: Vec<Symbol>,
    /// Links between symbol positions of the two sides; terminals only.
    pub alignment: Vec<(u16, u16)>,
    pub features: Features,
    /// Sampled matches that produced this rule.
    pub count: u32,
}

/// An unscored rule produced by one match.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleShape {
    pub source: Vec<Symbol>,
    pub target: Vec<Symbol>,
    pub alignment: Vec<(u16, u16)>,
}

/// A deterministic subset of a match set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledMatches {
    pub matches: MatchSet,
    /// Size of the set the sample was drawn from.
    pub original_size: usize,
}

impl SampledMatches {
    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }
}

/// Stride sampling without replacement: tuple `floor(i * |m| / max)` for
/// `i < max`, or everything when the set is small enough.
pub fn sample_matches(m: MatchSlice<'_>, max_samples: usize) -> SampledMatches {
    let n = m.len();
    let matches = if n <= max_samples {
        m.to_owned()
    } else {
        let arity = m.arity;
        let mut flat = Vec::with_capacity(max_samples * arity);
        for i in 0..max_samples {
            let k = (i as u128 * n as u128 / max_samples as u128) as usize;
            flat.extend_from_slice(&m.tuples[k * arity..(k + 1) * arity]);
        }
        MatchSet::from_flat(arity, flat)
    };
    SampledMatches {
        matches,
        original_size: n,
    }
}

/// Smallest and largest target index linked to a source word in
/// `[source_low, source_high]` (inclusive).
pub fn target_span(
    source_low: usize,
    source_high: usize,
    links: &[Link],
) -> Option<(usize, usize)> {
    links
        .iter()
        .filter(|&&(i, _)| (source_low..=source_high).contains(&(i as usize)))
        .fold(None, |acc, &(_, j)| {
            let j = j as usize;
            Some(match acc {
                None => (j, j),
                Some((lo, hi)) => (lo.min(j), hi.max(j)),
            })
        })
}

/// True iff no link connects the inside of one span with the outside of
/// the other. Spans are inclusive.
pub fn is_consistent(source: (usize, usize), target: (usize, usize), links: &[Link]) -> bool {
    links.iter().all(|&(i, j)| {
        let in_source = (source.0..=source.1).contains(&(i as usize));
        let in_target = (target.0..=target.1).contains(&(j as usize));
        in_source == in_target
    })
}

/// Extracts the rules licensed by one occurrence of a source pattern.
///
/// `chunks` are the half-open source ranges of the pattern's terminal
/// chunks, in order, within `source`; the source words between consecutive
/// chunks are the gaps. The whole pair and every gap pair must be
/// consistent, and every gap must cover at least one aligned word. Up to
/// one unaligned target word is absorbed on each side of the whole target
/// span, giving at most four rules per occurrence.
pub fn extract_rules(
    chunks: &[(usize, usize)],
    source: &[WordId],
    target: &[WordId],
    links: &[Link],
) -> Vec<RuleShape> {
    let (Some(&(src_lo, _)), Some(&(_, src_end))) = (chunks.first(), chunks.last()) else {
        return Vec::new();
    };
    let src_hi = src_end - 1;
    let Some((t_lo, t_hi)) = target_span(src_lo, src_hi, links) else {
        return Vec::new();
    };
    if !is_consistent((src_lo, src_hi), (t_lo, t_hi), links) {
        return Vec::new();
    }

    let mut gap_targets = Vec::with_capacity(chunks.len() - 1);
    for pair in chunks.windows(2) {
        let (gap_lo, gap_hi) = (pair[0].1, pair[1].0 - 1);
        match target_span(gap_lo, gap_hi, links) {
            Some(span) if is_consistent((gap_lo, gap_hi), span, links) => gap_targets.push(span),
            _ => return Vec::new(),
        }
    }

    let mut source_side = Vec::new();
    // Source symbol index of every covered terminal position.
    let mut source_index = HashMap::new();
    for (k, &(lo, hi)) in chunks.iter().enumerate() {
        if k > 0 {
            source_side.push(Symbol::Gap(k as u8));
        }
        for (i, &w) in source.iter().enumerate().take(hi).skip(lo) {
            source_index.insert(i, source_side.len() as u16);
            source_side.push(Symbol::Word(w));
        }
    }

    let mut target_aligned = vec![false; target.len()];
    for &(_, j) in links {
        target_aligned[j as usize] = true;
    }
    let lefts = [
        Some(t_lo),
        t_lo.checked_sub(1).filter(|&j| !target_aligned[j]),
    ];
    let rights = [
        Some(t_hi),
        Some(t_hi + 1).filter(|&j| j < target.len() && !target_aligned[j]),
    ];

    let mut rules = Vec::new();
    for left in lefts.into_iter().flatten() {
        for right in rights.into_iter().flatten() {
            let mut target_side = Vec::new();
            let mut target_index = HashMap::new();
            let mut j = left;
            while j <= right {
                if let Some(g) = gap_targets.iter().position(|&(lo, _)| lo == j) {
                    target_side.push(Symbol::Gap(g as u8 + 1));
                    j = gap_targets[g].1 + 1;
                } else {
                    target_index.insert(j, target_side.len() as u16);
                    target_side.push(Symbol::Word(target[j]));
                    j += 1;
                }
            }
            let mut alignment: Vec<(u16, u16)> = links
                .iter()
                .filter_map(|&(i, j)| {
                    let s = source_index.get(&(i as usize))?;
                    let t = target_index.get(&(j as usize))?;
                    Some((*s, *t))
                })
                .collect();
            alignment.sort_unstable();
            rules.push(RuleShape {
                source: source_side.clone(),
                target: target_side,
                alignment,
            });
        }
    }
    rules
}

/// Scores the rules of one source side.
///
/// `counts` maps each distinct rule to the number of sampled matches that
/// produced it; `sample_size` is the number of sampled matches.
pub fn score_rules(
    counts: impl IntoIterator<Item = (RuleShape, u32)>,
    sample_size: usize,
    table: &TranslationTable,
    lex_ceiling: f64,
) -> Vec<Rule> {
    let sample = sample_size as f64;
    counts
        .into_iter()
        .map(|(shape, count)| {
            let c = count as f64;
            let (f_given_e, e_given_f) = lexical_weights(&shape, table);
            let features = Features {
                e_given_f_coherent: clean(-(c / sample).log10()),
                sample_count_f: (1.0 + sample).log10(),
                count_ef: (1.0 + c).log10(),
                max_lex_f_given_e: neg_log10_clamped(f_given_e, lex_ceiling),
                max_lex_e_given_f: neg_log10_clamped(e_given_f, lex_ceiling),
            };
            Rule {
                source: shape.source,
                target: shape.target,
                alignment: shape.alignment,
                features,
                count,
            }
        })
        .collect()
}

/// Products of the best word translation probability of every source
/// (resp. target) terminal: `(prod p(s|t), prod p(t|s))`.
fn lexical_weights(rule: &RuleShape, table: &TranslationTable) -> (f64, f64) {
    let word = |s: &Symbol| match s {
        Symbol::Word(w) => Some(*w),
        Symbol::Gap(_) => None,
    };
    let mut f_given_e = 1.0;
    for (si, s) in rule.source.iter().enumerate() {
        let Some(s) = word(s) else { continue };
        let best = rule
            .alignment
            .iter()
            .filter(|&&(a, _)| a as usize == si)
            .filter_map(|&(_, b)| word(&rule.target[b as usize]))
            .map(|t| table.query(s, t).source_given_target)
            .reduce(f64::max)
            .unwrap_or_else(|| table.query(s, NULL_WORD).source_given_target);
        f_given_e *= best;
    }
    let mut e_given_f = 1.0;
    for (ti, t) in rule.target.iter().enumerate() {
        let Some(t) = word(t) else { continue };
        let best = rule
            .alignment
            .iter()
            .filter(|&&(_, b)| b as usize == ti)
            .filter_map(|&(a, _)| word(&rule.source[a as usize]))
            .map(|s| table.query(s, t).target_given_source)
            .reduce(f64::max)
            .unwrap_or_else(|| table.query(NULL_WORD, t).target_given_source);
        e_given_f *= best;
    }
    (f_given_e, e_given_f)
}

fn neg_log10_clamped(p: f64, ceiling: f64) -> f64 {
    if p <= 0.0 {
        return ceiling;
    }
    clean(-p.log10()).min(ceiling)
}

// Turns -0.0 into 0.0.
fn clean(x: f64) -> f64 {
    x + 0.0
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Gap(k) => write!(f, "[X,{k}]"),
            Symbol::Word(w) => write!(f, "{w}"),
        }
    }
}
