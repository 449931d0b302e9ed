//! Multi-threaded extraction over a whole test set.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::config::ExtractorConfig;
use crate::corpus::tokenize;
use crate::error::{Error, Result};
use crate::grammar::{write_grammar, Extractor};
use crate::rules::FEATURE_NAMES;

/// Name of the annotated copy of the test set written next to the grammars.
pub const ANNOTATED_FILE: &str = "corpus.annotated";

/// Version of the feature set printed in grammar headers.
pub const FEATURE_VERSION: u32 = 1;

/// Comment header written at the top of every non-empty grammar file.
pub fn grammar_header(config: &ExtractorConfig) -> String {
    let l = &config.limits;
    format!(
        "sa-extract grammar, features v{FEATURE_VERSION}: {}\n\
         max_rule_span={} max_nonterminals={} max_rule_symbols={} min_gap_size={} \
         max_samples={} frequent_patterns={} max_pattern_len={}",
        FEATURE_NAMES.join(" "),
        l.max_rule_span,
        l.max_nonterminals,
        l.max_rule_symbols,
        l.min_gap_size,
        config.max_samples,
        config.frequent_patterns,
        config.max_pattern_len,
    )
}

pub fn grammar_path(out_dir: &Path, index: usize) -> PathBuf {
    out_dir.join(format!("grammar.{index}"))
}

/// Extracts one grammar file per line of `lines` into `out_dir`, using
/// `threads` workers that pull sentence indexes from a shared counter, and
/// writes the annotated test set. Output does not depend on `threads`.
pub fn extract_corpus<S: AsRef<str> + Sync>(
    extractor: &Extractor<'_>,
    lines: &[S],
    out_dir: &Path,
    threads: usize,
    header: Option<&str>,
) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let next = AtomicUsize::new(0);
    let failure: Mutex<Option<Error>> = Mutex::new(None);

    thread::scope(|scope| {
        for _ in 0..threads.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= lines.len() || failure.lock().expect("lock").is_some() {
                    break;
                }
                let tokens = tokenize(lines[i].as_ref());
                let rules = extractor.extract_tokens(&tokens);
                let path = grammar_path(out_dir, i);
                let written = fs::File::create(&path).and_then(|file| {
                    let mut out = BufWriter::new(file);
                    write_grammar(&rules, extractor.vocab, header, &mut out)?;
                    out.flush()
                });
                if let Err(e) = written {
                    failure
                        .lock()
                        .expect("lock")
                        .get_or_insert(Error::io(&path, e));
                    break;
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().expect("lock") {
        return Err(e);
    }

    let path = out_dir.join(ANNOTATED_FILE);
    let written = fs::File::create(&path).and_then(|file| {
        let mut out = BufWriter::new(file);
        for (i, line) in lines.iter().enumerate() {
            let grammar = grammar_path(out_dir, i);
            writeln!(
                out,
                "<seg grammar=\"{}\" id=\"{i}\"> {} </seg>",
                grammar.display(),
                tokenize(line.as_ref()).join(" ")
            )?;
        }
        out.flush()
    });
    written.map_err(|e| Error::io(&path, e))
}
