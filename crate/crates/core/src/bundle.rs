//! Everything built at preprocessing time, and its on-disk form.
//!
//! The bundle is one little-endian file: an 8-byte magic, a `u32` format
//! version, a `u32` section count, a table of `(id u32, offset u64,
//! length u64, crc32 u32)` entries and then the section payloads.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::collocation::{find_frequent_patterns, CollocationIndex};
use crate::config::{ExtractorConfig, Limits};
use crate::corpus::{
    parse_alignment_line, split_joint_line, tokenize, Alignment, DataArray, EncodeMode, Link,
    Vocabulary, WordId,
};
use crate::error::{Error, Result};
use crate::grammar::Extractor;
use crate::lexical::{LexProbs, TranslationTable};
use crate::rules::DEFAULT_LEX_CEILING;
use crate::suffix::SuffixArray;

pub const MAGIC: &[u8; 8] = b"SAXBNDL\0";
pub const FORMAT_VERSION: u32 = 1;
pub const BUNDLE_FILE: &str = "bundle.bin";

const HEADER_LEN: usize = 16;
const ENTRY_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Config = 1,
    Vocabulary = 2,
    Source = 3,
    SuffixArray = 4,
    Target = 5,
    Alignment = 6,
    Collocations = 7,
    Lexical = 8,
}

const SECTIONS: [Section; 8] = [
    Section::Config,
    Section::Vocabulary,
    Section::Source,
    Section::SuffixArray,
    Section::Target,
    Section::Alignment,
    Section::Collocations,
    Section::Lexical,
];

/// Preprocessed parallel corpus with all its indexes.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    /// Settings used to build the bundle; also the extraction defaults.
    pub config: ExtractorConfig,
    pub vocab: Vocabulary,
    pub source: DataArray,
    pub sa: SuffixArray,
    pub target: DataArray,
    pub alignment: Alignment,
    pub collocations: CollocationIndex,
    pub table: TranslationTable,
}

impl Bundle {
    /// Builds every index from tokenized sentence pairs.
    pub fn build<S: AsRef<str>>(
        source: &[Vec<S>],
        target: &[Vec<S>],
        links: Vec<Vec<Link>>,
        config: &ExtractorConfig,
    ) -> Result<Self> {
        config.validate()?;
        if target.len() != source.len() {
            return Err(Error::CountMismatch {
                what: "target",
                found: target.len(),
                expected: source.len(),
            });
        }
        let mut vocab = Vocabulary::new();
        for token in source.iter().chain(target).flatten() {
            vocab.insert(token.as_ref())?;
        }
        let source = DataArray::encode(source, &vocab, EncodeMode::Build)?;
        let target = DataArray::encode(target, &vocab, EncodeMode::Build)?;
        let alignment = Alignment::new(links, &source, &target)?;
        let sa = SuffixArray::build(&source);
        let lcp = sa.lcp(&source);
        let frequent = find_frequent_patterns(
            &source,
            &sa,
            &lcp,
            config.frequent_patterns,
            config.max_pattern_len,
        );
        let collocations = CollocationIndex::build(&source, &frequent, &config.limits);
        let table = TranslationTable::build(&source, &target, &alignment)?;
        Ok(Bundle {
            config: *config,
            vocab,
            source,
            sa,
            target,
            alignment,
            collocations,
            table,
        })
    }

    /// Reads a corpus from files. Without `target`, every source line must
    /// be a joint `source ||| target` pair.
    pub fn from_files(
        source: &Path,
        target: Option<&Path>,
        alignment: &Path,
        config: &ExtractorConfig,
    ) -> Result<Self> {
        let source_lines = read_lines(source)?;
        let target_lines;
        let (src, tgt): (Vec<Vec<&str>>, Vec<Vec<&str>>) = match target {
            Some(path) => {
                target_lines = read_lines(path)?;
                if target_lines.len() != source_lines.len() {
                    return Err(Error::CountMismatch {
                        what: "target",
                        found: target_lines.len(),
                        expected: source_lines.len(),
                    });
                }
                (
                    source_lines.iter().map(|l| tokenize(l)).collect(),
                    target_lines.iter().map(|l| tokenize(l)).collect(),
                )
            }
            None => source_lines
                .iter()
                .enumerate()
                .map(|(n, l)| split_joint_line(l, n + 1))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip(),
        };
        Self::finish(src, tgt, alignment, config)
    }

    fn finish(
        src: Vec<Vec<&str>>,
        tgt: Vec<Vec<&str>>,
        alignment: &Path,
        config: &ExtractorConfig,
    ) -> Result<Self> {
        let alignment_lines = read_lines(alignment)?;
        if alignment_lines.len() != src.len() {
            return Err(Error::CountMismatch {
                what: "alignment",
                found: alignment_lines.len(),
                expected: src.len(),
            });
        }
        let links = alignment_lines
            .iter()
            .enumerate()
            .map(|(n, l)| parse_alignment_line(l, n + 1))
            .collect::<Result<Vec<_>>>()?;
        Self::build(&src, &tgt, links, config)
    }

    /// An extractor over this bundle. With `use_index` false the
    /// collocation index is ignored.
    pub fn extractor(&self, limits: Limits, max_samples: usize, use_index: bool) -> Extractor<'_> {
        Extractor {
            vocab: &self.vocab,
            source: &self.source,
            sa: &self.sa,
            target: &self.target,
            alignment: &self.alignment,
            table: &self.table,
            collocations: use_index.then_some(&self.collocations),
            limits,
            max_samples,
            lex_ceiling: DEFAULT_LEX_CEILING,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payloads: Vec<(Section, Vec<u8>)> = SECTIONS
            .iter()
            .map(|&s| (s, self.encode_section(s)))
            .collect();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(payloads.len() as u32).to_le_bytes());
        let mut offset = (HEADER_LEN + ENTRY_LEN * payloads.len()) as u64;
        for (section, payload) in &payloads {
            out.extend_from_slice(&(*section as u32).to_le_bytes());
            out.extend_from_slice(&offset.to_le_bytes());
            out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
            out.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
            offset += payload.len() as u64;
        }
        for (_, payload) in &payloads {
            out.extend_from_slice(payload);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(corrupt("not a bundle file"));
        }
        let mut header = Reader::new(&bytes[8..HEADER_LEN]);
        let version = header.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::BundleVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let count = header.u32()? as usize;
        let table_end = count
            .checked_mul(ENTRY_LEN)
            .and_then(|n| n.checked_add(HEADER_LEN))
            .filter(|&n| n <= bytes.len())
            .ok_or_else(|| corrupt("truncated section table"))?;
        let mut table = Reader::new(&bytes[HEADER_LEN..table_end]);
        let mut sections: HashMap<u32, &[u8]> = HashMap::new();
        for _ in 0..count {
            let id = table.u32()?;
            let offset = table.u64()?;
            let len = table.u64()?;
            let crc = table.u32()?;
            let payload = usize::try_from(offset)
                .ok()
                .zip(usize::try_from(len).ok())
                .and_then(|(o, l)| bytes.get(o..o.checked_add(l)?))
                .ok_or_else(|| corrupt(format!("section {id} lies outside the file")))?;
            if crc32fast::hash(payload) != crc {
                return Err(corrupt(format!("checksum mismatch in section {id}")));
            }
            sections.insert(id, payload);
        }
        let section = |s: Section| {
            sections
                .get(&(s as u32))
                .map(|&p| Reader::new(p))
                .ok_or_else(|| corrupt(format!("missing section {s:?}")))
        };

        let config = decode_config(&mut section(Section::Config)?)?;
        let vocab = {
            let mut r = section(Section::Vocabulary)?;
            let n = r.len_prefix()?;
            let tokens = (0..n).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
            r.finish()?;
            Vocabulary::from_user_tokens(tokens)?
        };
        let data_array = |s: Section| -> Result<DataArray> {
            let mut r = section(s)?;
            let ids = r.u32_vec()?;
            r.finish()?;
            if ids.iter().any(|&w| w as usize >= vocab.len()) {
                return Err(corrupt("word id outside the vocabulary"));
            }
            DataArray::from_ids(ids).map_err(|e| corrupt(e.to_string()))
        };
        let source = data_array(Section::Source)?;
        let target = data_array(Section::Target)?;
        let sa = {
            let mut r = section(Section::SuffixArray)?;
            let positions = r.u32_vec()?;
            r.finish()?;
            if positions.len() != source.len() - source.num_sentences()
                || positions.iter().any(|&p| p as usize >= source.len())
            {
                return Err(corrupt("suffix array does not fit the source corpus"));
            }
            SuffixArray::from_raw(positions)
        };
        let alignment = {
            let mut r = section(Section::Alignment)?;
            let n = r.len_prefix()?;
            let mut sentences = Vec::with_capacity(n.min(1 << 20));
            for _ in 0..n {
                let flat = r.u32_vec()?;
                if flat.len() % 2 != 0 {
                    return Err(corrupt("odd alignment link list"));
                }
                sentences.push(flat.chunks_exact(2).map(|c| (c[0], c[1])).collect());
            }
            r.finish()?;
            Alignment::new(sentences, &source, &target).map_err(|e| corrupt(e.to_string()))?
        };
        let collocations = {
            let mut r = section(Section::Collocations)?;
            let limits = match r.u8()? {
                0 => None,
                _ => Some(decode_limits(&mut r)?),
            };
            let parts = [r.u32_vec()?, r.u32_vec()?, r.u32_vec()?, r.u32_vec()?];
            r.finish()?;
            CollocationIndex::from_raw_parts(limits, parts).map_err(corrupt)?
        };
        let table = {
            let mut r = section(Section::Lexical)?;
            let n = r.len_prefix()?;
            let mut entries = Vec::with_capacity(n.min(1 << 20));
            for _ in 0..n {
                let key = (r.u32()?, r.u32()?);
                let probs = LexProbs {
                    target_given_source: r.f64()?,
                    source_given_target: r.f64()?,
                };
                entries.push((key, probs));
            }
            r.finish()?;
            TranslationTable::from_entries(entries)
        };

        Ok(Bundle {
            config,
            vocab,
            source,
            sa,
            target,
            alignment,
            collocations,
            table,
        })
    }

    /// Writes `dir/bundle.bin`, creating `dir` if needed.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(BUNDLE_FILE);
        fs::write(&path, self.to_bytes()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// Loads a bundle from a directory written by [`Bundle::save`] or from
    /// the bundle file itself.
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() {
            path.join(BUNDLE_FILE)
        } else {
            path.to_path_buf()
        };
        let bytes = fs::read(&file).map_err(|e| Error::io(&file, e))?;
        Self::from_bytes(&bytes)
    }

    fn encode_section(&self, section: Section) -> Vec<u8> {
        let mut w = Writer::default();
        match section {
            Section::Config => {
                encode_limits(&mut w, &self.config.limits);
                w.u32(self.config.max_samples as u32);
                w.u32(self.config.frequent_patterns as u32);
                w.u32(self.config.max_pattern_len as u32);
            }
            Section::Vocabulary => {
                let tokens = self.vocab.user_tokens();
                w.u32(tokens.len() as u32);
                for t in tokens {
                    w.u32(t.len() as u32);
                    w.0.extend_from_slice(t.as_bytes());
                }
            }
            Section::Source => w.u32_slice(self.source.ids()),
            Section::SuffixArray => w.u32_slice(self.sa.positions()),
            Section::Target => w.u32_slice(self.target.ids()),
            Section::Alignment => {
                w.u32(self.alignment.num_sentences() as u32);
                for links in self.alignment.iter() {
                    let flat: Vec<u32> = links.iter().flat_map(|&(i, j)| [i, j]).collect();
                    w.u32_slice(&flat);
                }
            }
            Section::Collocations => {
                match self.collocations.limits() {
                    Some(limits) => {
                        w.0.push(1);
                        encode_limits(&mut w, limits);
                    }
                    None => w.0.push(0),
                }
                for part in self.collocations.raw_parts() {
                    w.u32_slice(part);
                }
            }
            Section::Lexical => {
                let entries = self.table.entries();
                w.u32(entries.len() as u32);
                for ((s, t), p) in entries {
                    w.u32(s);
                    w.u32(t);
                    w.f64(p.target_given_source);
                    w.f64(p.source_given_target);
                }
            }
        }
        w.0
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .map(|l| {
            l.map_err(|e| match e.kind() {
                std::io::ErrorKind::InvalidData => {
                    Error::format(0, format!("{}: not UTF-8", path.display()))
                }
                _ => Error::io(path, e),
            })
        })
        .collect()
}

fn corrupt(message: impl Into<String>) -> Error {
    Error::BundleCorrupt(message.into())
}

fn encode_limits(w: &mut Writer, limits: &Limits) {
    w.u32(limits.max_rule_span as u32);
    w.u32(limits.max_nonterminals as u32);
    w.u32(limits.max_rule_symbols as u32);
    w.u32(limits.min_gap_size as u32);
}

fn decode_limits(r: &mut Reader<'_>) -> Result<Limits> {
    let limits = Limits {
        max_rule_span: r.u32()? as usize,
        max_nonterminals: r.u32()? as usize,
        max_rule_symbols: r.u32()? as usize,
        min_gap_size: r.u32()? as usize,
    };
    limits.validate().map_err(|e| corrupt(e.to_string()))?;
    Ok(limits)
}

fn decode_config(r: &mut Reader<'_>) -> Result<ExtractorConfig> {
    let config = ExtractorConfig {
        limits: decode_limits(r)?,
        max_samples: r.u32()? as usize,
        frequent_patterns: r.u32()? as usize,
        max_pattern_len: r.u32()? as usize,
        threads: 1,
    };
    r.finish()?;
    config.validate().map_err(|e| corrupt(e.to_string()))?;
    Ok(config)
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u32_slice(&mut self, values: &[u32]) {
        self.u32(values.len() as u32);
        self.0.reserve(values.len() * 4);
        for &v in values {
            self.u32(v);
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| corrupt("unexpected end of section"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    /// A `u32` count, checked against the bytes left so corrupt input
    /// cannot trigger huge allocations.
    fn len_prefix(&mut self) -> Result<usize> {
        let n = self.u32()? as usize;
        if n > self.bytes.len() - self.pos {
            return Err(corrupt("count exceeds section size"));
        }
        Ok(n)
    }

    fn u32_vec(&mut self) -> Result<Vec<WordId>> {
        let n = self.len_prefix()?;
        let raw = self.take(n.checked_mul(4).ok_or_else(|| corrupt("count overflow"))?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }

    fn string(&mut self) -> Result<String> {
        let n = self.len_prefix()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("token is not UTF-8"))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(corrupt("trailing bytes in section"));
        }
        Ok(())
    }
}
