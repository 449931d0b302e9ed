//! Per-sentence grammar extraction and the rule text format.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::collocation::CollocationIndex;
use crate::config::Limits;
use crate::corpus::{Alignment, DataArray, EncodeMode, Vocabulary, WordId};
use crate::error::{Error, Result};
use crate::lexical::TranslationTable;
use crate::matcher::{match_sentence_streaming, SourceIndex};
use crate::rules::{
    extract_rules, sample_matches, score_rules, Features, Rule, RuleShape, Symbol, FEATURE_NAMES,
};
use crate::suffix::SuffixArray;

/// Read-only view of everything needed to extract grammars.
#[derive(Clone, Copy)]
pub struct Extractor<'a> {
    pub vocab: &'a Vocabulary,
    pub source: &'a DataArray,
    pub sa: &'a SuffixArray,
    pub target: &'a DataArray,
    pub alignment: &'a Alignment,
    pub table: &'a TranslationTable,
    pub collocations: Option<&'a CollocationIndex>,
    pub limits: Limits,
    pub max_samples: usize,
    pub lex_ceiling: f64,
}

impl Extractor<'_> {
    /// Rules applicable to `sentence`, sorted by source, target and
    /// alignment.
    pub fn extract_grammar(&self, sentence: &[WordId]) -> Vec<Rule> {
        let index = SourceIndex {
            data: self.source,
            sa: self.sa,
            collocations: self.collocations.filter(|c| c.serves(&self.limits)),
        };
        let mut rules = Vec::new();
        let mut counts: HashMap<RuleShape, u32> = HashMap::new();
        let mut chunks = Vec::new();
        match_sentence_streaming(sentence, &index, &self.limits, |node, matches| {
            let lens = node.pattern().chunk_lens();
            let sample = sample_matches(matches, self.max_samples);
            counts.clear();
            for tuple in sample.matches.iter() {
                let k = self.source.sentence_index(tuple[0] as usize);
                let base = self.source.sentence_starts()[k] as usize;
                chunks.clear();
                chunks.extend(tuple.iter().zip(&lens).map(|(&s, &len)| {
                    let start = s as usize - base;
                    (start, start + len)
                }));
                let shapes = extract_rules(
                    &chunks,
                    self.source.sentence(k),
                    self.target.sentence(k),
                    self.alignment.links(k),
                );
                for shape in shapes {
                    *counts.entry(shape).or_default() += 1;
                }
            }
            rules.extend(score_rules(
                counts.drain(),
                sample.len(),
                self.table,
                self.lex_ceiling,
            ));
        });
        rules.sort_by(|a, b| {
            (&a.source, &a.target, &a.alignment).cmp(&(&b.source, &b.target, &b.alignment))
        });
        rules
    }

    /// Encodes a tokenized sentence (unknown words become UNK) and extracts.
    pub fn extract_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Rule> {
        let encoded = DataArray::encode(
            &[tokens.iter().map(AsRef::as_ref).collect::<Vec<&str>>()],
            self.vocab,
            EncodeMode::Query,
        )
        .expect("query mode never fails");
        self.extract_grammar(encoded.sentence(0))
    }
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros removed.
pub fn format_g6(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let sci = format!("{:.5e}", value);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, value)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn render_side(side: &[Symbol], vocab: &Vocabulary, out: &mut String) {
    for (k, s) in side.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        match s {
            Symbol::Gap(g) => {
                out.push_str("[X,");
                out.push_str(&g.to_string());
                out.push(']');
            }
            Symbol::Word(w) => out.push_str(vocab.token(*w).unwrap_or("<unk>")),
        }
    }
}

/// One rule in decoder text format.
pub fn render_rule(rule: &Rule, vocab: &Vocabulary) -> String {
    let mut line = String::from("[X] ||| ");
    render_side(&rule.source, vocab, &mut line);
    line.push_str(" ||| ");
    render_side(&rule.target, vocab, &mut line);
    line.push_str(" |||");
    for (name, value) in FEATURE_NAMES.iter().zip(rule.features.values()) {
        line.push(' ');
        line.push_str(name);
        line.push('=');
        line.push_str(&format_g6(value));
    }
    line.push_str(" |||");
    for (s, t) in &rule.alignment {
        line.push_str(&format!(" {s}-{t}"));
    }
    line
}

/// Writes one rule per line. A `#` comment header precedes non-empty rule
/// lists; an empty list produces no output at all.
pub fn write_grammar<W: Write>(
    rules: &[Rule],
    vocab: &Vocabulary,
    header: Option<&str>,
    out: &mut W,
) -> io::Result<()> {
    if rules.is_empty() {
        return Ok(());
    }
    if let Some(header) = header {
        for line in header.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    for rule in rules {
        out.write_all(render_rule(rule, vocab).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses grammar text written by [`write_grammar`]. The rule count is
/// recovered from `CountEF`.
pub fn parse_grammar(text: &str, vocab: &Vocabulary) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split("|||").map(str::trim).collect();
        let [lhs, source, target, features, alignment] = fields[..] else {
            return Err(Error::format(
                line_no,
                "expected five `|||`-separated fields",
            ));
        };
        if lhs != "[X]" {
            return Err(Error::format(
                line_no,
                format!("unexpected left-hand side {lhs:?}"),
            ));
        }
        let side = |text: &str| -> Result<Vec<Symbol>> {
            text.split_ascii_whitespace()
                .map(|tok| {
                    if let Some(k) = tok.strip_prefix("[X,").and_then(|t| t.strip_suffix(']')) {
                        let k = k.parse().map_err(|_| {
                            Error::format(line_no, format!("bad nonterminal {tok:?}"))
                        })?;
                        Ok(Symbol::Gap(k))
                    } else {
                        vocab
                            .get(tok)
                            .map(Symbol::Word)
                            .ok_or_else(|| Error::format(line_no, format!("unknown token {tok:?}")))
                    }
                })
                .collect()
        };
        let mut values = [0.0; 5];
        let mut seen = [false; 5];
        for item in features.split_ascii_whitespace() {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::format(line_no, format!("bad feature {item:?}")))?;
            let k = FEATURE_NAMES
                .iter()
                .position(|&f| f == name)
                .ok_or_else(|| Error::format(line_no, format!("unknown feature {name:?}")))?;
            values[k] = value
                .parse()
                .map_err(|_| Error::format(line_no, format!("bad feature value {item:?}")))?;
            seen[k] = true;
        }
        if seen.contains(&false) {
            return Err(Error::format(line_no, "missing feature"));
        }
        let alignment = alignment
            .split_ascii_whitespace()
            .map(|link| {
                let parsed = link
                    .split_once('-')
                    .and_then(|(s, t)| Some((s.parse().ok()?, t.parse().ok()?)));
                parsed.ok_or_else(|| Error::format(line_no, format!("bad link {link:?}")))
            })
            .collect::<Result<Vec<(u16, u16)>>>()?;
        let features = Features::from_values(values);
        rules.push(Rule {
            source: side(source)?,
            target: side(target)?,
            alignment,
            count: (10f64.powf(features.count_ef) - 1.0).round() as u32,
            features,
        });
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(0.0), "0");
        assert_eq!(format_g6(-0.0), "0");
        assert_eq!(format_g6(2f64.log10()), "0.30103");
        assert_eq!(format_g6(99.0), "99");
        assert_eq!(format_g6(1.0 / 3.0), "0.333333");
        assert_eq!(format_g6(123456.0), "123456");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(0.0001), "0.0001");
        assert_eq!(format_g6(0.00001234), "1.234e-05");
        assert_eq!(format_g6(2.5), "2.5");
        assert_eq!(format_g6(-1.5), "-1.5");
        assert_eq!(format_g6(9.999999), "10");
    }

    #[test]
    fn empty_grammar_writes_nothing() {
        let mut out = Vec::new();
        write_grammar(&[], &Vocabulary::new(), Some("header"), &mut out).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn parse_rejects_garbage() {
        let v = Vocabulary::build(["a"]).unwrap();
        assert!(parse_grammar("[X] ||| a ||| a", &v).is_err());
        assert!(parse_grammar("[X] ||| b ||| a ||| EGivenFCoherent=0 ||| ", &v).is_err());
        assert!(parse_grammar("# only a comment\n\n", &v)
            .unwrap()
            .is_empty());
    }
}
