//! Online extraction of hierarchical phrase-based translation grammars.
//!
//! A parallel corpus is indexed once with a suffix array over its source
//! side. For every test sentence, all source patterns it contains (with up
//! to two gaps) are located in the corpus, their occurrences are sampled,
//! and synchronous rules are read off the word alignment of each sampled
//! occurrence.

pub mod batch;
pub mod bundle;
pub mod collocation;
pub mod config;
pub mod corpus;
pub mod error;
pub mod grammar;
pub mod lexical;
pub mod matcher;
pub mod rules;
pub mod suffix;

pub use bundle::Bundle;
pub use config::{ExtractorConfig, Limits};
pub use corpus::{Alignment, DataArray, Vocabulary, WordId};
pub use error::{Error, Result};
pub use grammar::Extractor;
pub use rules::Rule;
