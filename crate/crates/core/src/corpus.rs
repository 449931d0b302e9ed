//! Integer-encoded corpora, vocabularies and word alignments.
//!
//! Every sentence in a [`DataArray`] is followed by a single [`SENTINEL`] id,
//! so no phrase match can ever cross a sentence boundary.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type WordId = u32;

/// Sentence terminator. Never produced for a user token.
pub const SENTINEL: WordId = 0;
/// Unknown word, used when encoding queries against a closed vocabulary.
pub const UNK: WordId = 1;
/// The nonterminal `X` inside source patterns.
pub const GAP: WordId = 2;
/// First id handed out to a user token.
pub const FIRST_USER_ID: WordId = 3;

const RESERVED: [&str; 3] = ["</s>", "<unk>", "[X]"];

/// Bidirectional token <-> id mapping with reserved ids 0..3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, WordId>,
    id_to_token: Vec<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            token_to_id: HashMap::new(),
            id_to_token: RESERVED.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary assigning ids in first-occurrence order.
    pub fn build<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary::new();
        for token in tokens {
            vocab.insert(token.as_ref())?;
        }
        Ok(vocab)
    }

    /// Returns the id of `token`, adding it if needed.
    pub fn insert(&mut self, token: &str) -> Result<WordId> {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::format(
                0,
                format!("invalid token {token:?}: tokens must be non-empty and whitespace-free"),
            ));
        }
        if let Some(&id) = self.token_to_id.get(token) {
            return Ok(id);
        }
        let id = self.id_to_token.len() as WordId;
        self.token_to_id.insert(token.to_string(), id);
        self.id_to_token.push(token.to_string());
        Ok(id)
    }

    pub fn get(&self, token: &str) -> Option<WordId> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: WordId) -> Option<&str> {
        self.id_to_token.get(id as usize).map(String::as_str)
    }

    /// Total number of ids including the reserved ones.
    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    /// True when only the reserved ids exist.
    pub fn is_empty(&self) -> bool {
        self.id_to_token.len() == RESERVED.len()
    }

    /// User tokens in id order.
    pub fn user_tokens(&self) -> &[String] {
        &self.id_to_token[RESERVED.len()..]
    }

    pub(crate) fn from_user_tokens(tokens: Vec<String>) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        for token in &tokens {
            let before = vocab.len();
            vocab.insert(token)?;
            if vocab.len() == before {
                return Err(Error::BundleCorrupt(format!("duplicate token {token:?}")));
            }
        }
        Ok(vocab)
    }
}

/// How [`DataArray::encode`] treats tokens missing from the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    /// Unknown tokens are an error.
    Build,
    /// Unknown tokens become [`UNK`].
    Query,
}

/// All sentences of one side of a corpus, concatenated with sentinels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataArray {
    data: Vec<WordId>,
    sentence_start: Vec<u32>,
    sentence_id: Vec<u32>,
}

impl DataArray {
    pub fn encode<S: AsRef<str>>(
        sentences: &[Vec<S>],
        vocab: &Vocabulary,
        mode: EncodeMode,
    ) -> Result<Self> {
        let total: usize = sentences.iter().map(|s| s.len() + 1).sum();
        let mut data = Vec::with_capacity(total);
        for sentence in sentences {
            for token in sentence {
                let token = token.as_ref();
                let id = match (vocab.get(token), mode) {
                    (Some(id), _) => id,
                    (None, EncodeMode::Query) => UNK,
                    (None, EncodeMode::Build) => {
                        return Err(Error::UnknownToken(token.to_string()))
                    }
                };
                data.push(id);
            }
            data.push(SENTINEL);
        }
        Self::from_ids(data)
    }

    /// Wraps raw ids. Must be empty or end with [`SENTINEL`].
    pub fn from_ids(data: Vec<WordId>) -> Result<Self> {
        if data.last().is_some_and(|&w| w != SENTINEL) {
            return Err(Error::format(
                0,
                "data array must end with a sentence terminator",
            ));
        }
        if data.len() > u32::MAX as usize {
            return Err(Error::format(0, "corpus exceeds 2^32 positions"));
        }
        let mut sentence_start = Vec::new();
        let mut sentence_id = Vec::with_capacity(data.len());
        let mut at_start = true;
        for (pos, &w) in data.iter().enumerate() {
            if at_start {
                sentence_start.push(pos as u32);
                at_start = false;
            }
            sentence_id.push((sentence_start.len() - 1) as u32);
            if w == SENTINEL {
                at_start = true;
            }
        }
        Ok(DataArray {
            data,
            sentence_start,
            sentence_id,
        })
    }

    pub fn ids(&self) -> &[WordId] {
        &self.data
    }

    /// Total length N including sentinels.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn num_sentences(&self) -> usize {
        self.sentence_start.len()
    }

    pub fn sentence_starts(&self) -> &[u32] {
        &self.sentence_start
    }

    /// Word ids of sentence `k`, without its sentinel.
    pub fn sentence(&self, k: usize) -> &[WordId] {
        let start = self.sentence_start[k] as usize;
        &self.data[start..self.sentence_end(k)]
    }

    /// Position of the sentinel terminating sentence `k`.
    pub fn sentence_end(&self, k: usize) -> usize {
        match self.sentence_start.get(k + 1) {
            Some(&next) => next as usize - 1,
            None => self.data.len() - 1,
        }
    }

    /// Maps a corpus position to `(sentence index, offset within sentence)`.
    pub fn sentence_of(&self, position: usize) -> Result<(usize, usize)> {
        match self.data.get(position) {
            Some(&w) if w != SENTINEL => {
                let k = self.sentence_id[position] as usize;
                Ok((k, position - self.sentence_start[k] as usize))
            }
            _ => Err(Error::InvalidPosition(position)),
        }
    }

    /// Sentence index of `position`, which may be a sentinel.
    #[inline]
    pub fn sentence_index(&self, position: usize) -> usize {
        self.sentence_id[position] as usize
    }

    pub fn decode(&self, k: usize, vocab: &Vocabulary) -> Vec<String> {
        self.sentence(k)
            .iter()
            .map(|&w| vocab.token(w).unwrap_or("<unk>").to_string())
            .collect()
    }
}

/// One alignment link: `(source index, target index)` within a sentence pair.
pub type Link = (u32, u32);

/// Word alignment for every sentence pair of a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alignment {
    sentences: Vec<Vec<Link>>,
}

impl Alignment {
    /// Validates the links against both sides' sentence lengths.
    pub fn new(sentences: Vec<Vec<Link>>, source: &DataArray, target: &DataArray) -> Result<Self> {
        for (what, found, expected) in [
            ("alignment", sentences.len(), source.num_sentences()),
            ("target", target.num_sentences(), source.num_sentences()),
        ] {
            if found != expected {
                return Err(Error::CountMismatch {
                    what,
                    found,
                    expected,
                });
            }
        }
        for (k, links) in sentences.iter().enumerate() {
            let (m, n) = (source.sentence(k).len(), target.sentence(k).len());
            if let Some(&(i, j)) = links
                .iter()
                .find(|&&(i, j)| i as usize >= m || j as usize >= n)
            {
                return Err(Error::format(
                    k + 1,
                    format!("link {i}-{j} outside a {m}x{n} sentence pair"),
                ));
            }
            if links.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::format(k + 1, "links must be sorted and unique"));
            }
        }
        Ok(Alignment { sentences })
    }

    pub fn links(&self, k: usize) -> &[Link] {
        &self.sentences[k]
    }

    pub fn num_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Link]> {
        self.sentences.iter().map(Vec::as_slice)
    }
}

/// Parses one `i-j i-j ...` line into a sorted, deduplicated link list.
/// `line_no` is only used in error messages.
pub fn parse_alignment_line(line: &str, line_no: usize) -> Result<Vec<Link>> {
    let mut links = line
        .split_ascii_whitespace()
        .map(|pair| {
            let (i, j) = pair
                .split_once('-')
                .ok_or_else(|| Error::format(line_no, format!("malformed link {pair:?}")))?;
            let parse = |s: &str| {
                if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::format(line_no, format!("malformed link {pair:?}")));
                }
                s.parse::<u32>().map_err(|_| {
                    Error::format(line_no, format!("link index out of range in {pair:?}"))
                })
            };
            Ok((parse(i)?, parse(j)?))
        })
        .collect::<Result<Vec<Link>>>()?;
    links.sort_unstable();
    links.dedup();
    Ok(links)
}

/// Splits a line on ASCII whitespace.
pub fn tokenize(line: &str) -> Vec<&str> {
    line.split_ascii_whitespace().collect()
}

/// Splits a joint `source ||| target` line.
pub fn split_joint_line(line: &str, line_no: usize) -> Result<(Vec<&str>, Vec<&str>)> {
    let (src, tgt) = line
        .split_once("|||")
        .ok_or_else(|| Error::format(line_no, "expected `source ||| target`"))?;
    Ok((tokenize(src), tokenize(tgt)))
}
