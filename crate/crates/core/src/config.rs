use crate::error::{Error, Result};

/// Bounds on the source patterns that are matched and turned into rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Maximum number of source words covered by one rule occurrence.
    pub max_rule_span: usize,
    /// Maximum number of gaps in a source pattern.
    pub max_nonterminals: usize,
    /// Maximum number of source symbols (words plus gaps).
    pub max_rule_symbols: usize,
    /// Minimum number of words a gap must cover.
    pub min_gap_size: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_rule_span: 15,
            max_nonterminals: 2,
            max_rule_symbols: 5,
            min_gap_size: 1,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        if self.max_rule_span < 1 {
            return Err(Error::Config("max_rule_span must be at least 1".into()));
        }
        if self.max_nonterminals > 2 {
            return Err(Error::Config("max_nonterminals must be at most 2".into()));
        }
        if self.max_rule_symbols < 1 {
            return Err(Error::Config("max_rule_symbols must be at least 1".into()));
        }
        if self.min_gap_size < 1 {
            return Err(Error::Config("min_gap_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Every tunable of the extractor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractorConfig {
    pub limits: Limits,
    /// Matches sampled per source pattern.
    pub max_samples: usize,
    /// Number of frequent contiguous phrases feeding the collocation index.
    pub frequent_patterns: usize,
    /// Longest contiguous phrase considered frequent.
    pub max_pattern_len: usize,
    pub threads: usize,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        ExtractorConfig {
            limits: Limits::default(),
            max_samples: 300,
            frequent_patterns: 1000,
            max_pattern_len: 3,
            threads: 1,
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        self.limits.validate()?;
        if self.max_samples < 1 {
            return Err(Error::Config("max_samples must be at least 1".into()));
        }
        if self.max_pattern_len < 1 {
            return Err(Error::Config("max_pattern_len must be at least 1".into()));
        }
        if self.threads < 1 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExtractorConfig::default().validate().unwrap();
        let l = Limits::default();
        assert_eq!(
            (
                l.max_rule_span,
                l.max_nonterminals,
                l.max_rule_symbols,
                l.min_gap_size
            ),
            (15, 2, 5, 1)
        );
    }

    #[test]
    fn rejects_out_of_range_values() {
        let mut c = ExtractorConfig::default();
        c.limits.max_nonterminals = 3;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = ExtractorConfig {
            threads: 0,
            ..ExtractorConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = ExtractorConfig::default();
        c.limits.min_gap_size = 0;
        assert!(c.validate().is_err());
    }
}
