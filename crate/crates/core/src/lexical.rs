//! Count-based word translation probabilities `p(t|s)` and `p(s|t)`.

use std::collections::HashMap;

use crate::corpus::{Alignment, DataArray, WordId, SENTINEL};
use crate::error::{Error, Result};

/// Stands for an unaligned word on the other side. The sentence terminator
/// id is reused because it never occurs as a word.
pub const NULL_WORD: WordId = SENTINEL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexProbs {
    pub target_given_source: f64,
    pub source_given_target: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationTable {
    entries: HashMap<(WordId, WordId), LexProbs>,
}

impl TranslationTable {
    /// Every link `(i, j)` counts `c(s_i, t_j)`; unaligned source words count
    /// `c(s_i, NULL)` and unaligned target words `c(NULL, t_j)`.
    pub fn build(source: &DataArray, target: &DataArray, alignment: &Alignment) -> Result<Self> {
        if source.num_sentences() != target.num_sentences() {
            return Err(Error::CountMismatch {
                what: "target",
                found: target.num_sentences(),
                expected: source.num_sentences(),
            });
        }
        if alignment.num_sentences() != source.num_sentences() {
            return Err(Error::CountMismatch {
                what: "alignment",
                found: alignment.num_sentences(),
                expected: source.num_sentences(),
            });
        }

        let mut pair_counts: HashMap<(WordId, WordId), u64> = HashMap::new();
        let mut source_counts: HashMap<WordId, u64> = HashMap::new();
        let mut target_counts: HashMap<WordId, u64> = HashMap::new();
        let mut count = |s: WordId, t: WordId| {
            *pair_counts.entry((s, t)).or_default() += 1;
            *source_counts.entry(s).or_default() += 1;
            *target_counts.entry(t).or_default() += 1;
        };

        let mut source_aligned = Vec::new();
        let mut target_aligned = Vec::new();
        for k in 0..source.num_sentences() {
            let (src, tgt) = (source.sentence(k), target.sentence(k));
            source_aligned.clear();
            source_aligned.resize(src.len(), false);
            target_aligned.clear();
            target_aligned.resize(tgt.len(), false);
            for &(i, j) in alignment.links(k) {
                let (i, j) = (i as usize, j as usize);
                count(src[i], tgt[j]);
                source_aligned[i] = true;
                target_aligned[j] = true;
            }
            for (i, _) in source_aligned.iter().enumerate().filter(|(_, &a)| !a) {
                count(src[i], NULL_WORD);
            }
            for (j, _) in target_aligned.iter().enumerate().filter(|(_, &a)| !a) {
                count(NULL_WORD, tgt[j]);
            }
        }

        let entries = pair_counts
            .into_iter()
            .map(|((s, t), c)| {
                let c = c as f64;
                let probs = LexProbs {
                    target_given_source: c / source_counts[&s] as f64,
                    source_given_target: c / target_counts[&t] as f64,
                };
                ((s, t), probs)
            })
            .collect();
        Ok(TranslationTable { entries })
    }

    /// Probabilities for a word pair; `(0, 0)` if it was never linked.
    pub fn query(&self, source: WordId, target: WordId) -> LexProbs {
        self.entries
            .get(&(source, target))
            .copied()
            .unwrap_or(LexProbs {
                target_given_source: 0.0,
                source_given_target: 0.0,
            })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by `(source, target)`.
    pub fn entries(&self) -> Vec<((WordId, WordId), LexProbs)> {
        let mut out: Vec<_> = self.entries.iter().map(|(&k, &v)| (k, v)).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    pub(crate) fn from_entries(
        entries: impl IntoIterator<Item = ((WordId, WordId), LexProbs)>,
    ) -> Self {
        TranslationTable {
            entries: entries.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{EncodeMode, Vocabulary};

    fn table(src: &[&str], tgt: &[&str], links: Vec<(u32, u32)>) -> (Vocabulary, TranslationTable) {
        let vocab = Vocabulary::build(src.iter().chain(tgt)).unwrap();
        let s = DataArray::encode(&[src.to_vec()], &vocab, EncodeMode::Build).unwrap();
        let t = DataArray::encode(&[tgt.to_vec()], &vocab, EncodeMode::Build).unwrap();
        let a = Alignment::new(vec![links], &s, &t).unwrap();
        (vocab, TranslationTable::build(&s, &t, &a).unwrap())
    }

    #[test]
    fn single_links() {
        let (v, t) = table(&["le", "chat"], &["the", "cat"], vec![(0, 0), (1, 1)]);
        let id = |w| v.get(w).unwrap();
        let p = t.query(id("le"), id("the"));
        assert_eq!((p.target_given_source, p.source_given_target), (1.0, 1.0));
        assert_eq!(t.query(id("chat"), id("cat")).target_given_source, 1.0);
        let unseen = t.query(id("le"), id("cat"));
        assert_eq!(
            (unseen.target_given_source, unseen.source_given_target),
            (0.0, 0.0)
        );
    }

    #[test]
    fn one_to_many() {
        let (v, t) = table(&["a"], &["x", "y"], vec![(0, 0), (0, 1)]);
        let id = |w| v.get(w).unwrap();
        assert_eq!(t.query(id("a"), id("x")).target_given_source, 0.5);
        assert_eq!(t.query(id("a"), id("y")).target_given_source, 0.5);
        assert_eq!(t.query(id("a"), NULL_WORD).target_given_source, 0.0);
        assert_eq!(t.query(NULL_WORD, id("x")).source_given_target, 0.0);
    }

    #[test]
    fn unaligned_words_pair_with_null() {
        let (v, t) = table(&["a", "b"], &["x"], vec![(0, 0)]);
        let id = |w| v.get(w).unwrap();
        assert_eq!(t.query(id("b"), NULL_WORD).target_given_source, 1.0);
        assert_eq!(t.query(id("a"), id("x")).source_given_target, 1.0);
    }

    #[test]
    fn mismatched_sides() {
        let vocab = Vocabulary::build(["a"]).unwrap();
        let s = DataArray::encode(&[vec!["a"], vec!["a"]], &vocab, EncodeMode::Build).unwrap();
        let t = DataArray::encode(&[vec!["a"]], &vocab, EncodeMode::Build).unwrap();
        let a = Alignment::default();
        assert!(matches!(
            TranslationTable::build(&s, &t, &a),
            Err(Error::CountMismatch { .. })
        ));
    }
}
