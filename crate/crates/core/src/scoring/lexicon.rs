use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::error::{Error, Result};

pub const BUNDLED_VALENCES: &str = include_str!("../../data/lexicon.tsv");
pub const BUNDLED_BOOSTERS: &str = include_str!("../../data/boosters.tsv");
pub const BUNDLED_NEGATORS: &str = include_str!("../../data/negators.txt");

/// Valence lexicon plus the booster and negator tables used by the
/// compound scorer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pub entries: BTreeMap<String, f64>,
    pub boosters: BTreeMap<String, f64>,
    pub negators: BTreeSet<String>,
}

impl Lexicon {
    /// The small lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Lexicon {
            entries: parse_weighted(BUNDLED_VALENCES, "lexicon").expect("bundled lexicon"),
            boosters: parse_weighted(BUNDLED_BOOSTERS, "boosters").expect("bundled boosters"),
            negators: parse_tokens(BUNDLED_NEGATORS, "negators").expect("bundled negators"),
        }
    }

    pub fn from_readers<A: Read, B: Read, C: Read>(
        valences: A,
        boosters: B,
        negators: C,
    ) -> Result<Self> {
        Ok(Lexicon {
            entries: parse_weighted(&read_all(valences, "lexicon")?, "lexicon")?,
            boosters: parse_weighted(&read_all(boosters, "boosters")?, "boosters")?,
            negators: parse_tokens(&read_all(negators, "negators")?, "negators")?,
        })
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn words(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Copy of the lexicon with every valence negated.
    pub fn negated(&self) -> Self {
        Lexicon {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            ..self.clone()
        }
    }
}

fn read_all<R: Read>(mut r: R, what: &str) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)
        .map_err(|e| Error::Ingest(format!("{what}: {e}")))?;
    Ok(s)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn check_token(token: &str, line: usize, what: &str) -> Result<()> {
    if token.is_empty() || token.chars().any(|c| c.is_uppercase() || c.is_whitespace()) {
        return Err(Error::Schema(format!(
            "{what} line {line}: token {token:?} must be lowercase and non-empty"
        )));
    }
    Ok(())
}

/// `token<TAB>value` lines.
fn parse_weighted(text: &str, what: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let mut parts = l.split('\t');
        let (Some(token), Some(value)) = (parts.next(), parts.next()) else {
            return Err(Error::Schema(format!(
                "{what} line {line}: expected token<TAB>value"
            )));
        };
        let token = token.trim();
        check_token(token, line, what)?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("{what} line {line}: bad number {value:?}")))?;
        if out.insert(token.to_string(), value).is_some() {
            return Err(Error::Schema(format!(
                "{what} line {line}: duplicate token {token:?}"
            )));
        }
    }
    Ok(out)
}

fn parse_tokens(text: &str, what: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for (line, token) in content_lines(text) {
        check_token(token, line, what)?;
        out.insert(token.to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let lex = Lexicon::bundled();
        assert!(lex.entries.len() > 100);
        assert!(lex.valence("good").unwrap() > 0.0);
        assert!(lex.valence("terrible").unwrap() < 0.0);
        assert!(lex.boosters["very"] > 0.0);
        assert!(lex.negators.contains("not"));
    }

    #[test]
    fn rejects_uppercase_and_duplicates() {
        assert!(parse_weighted("Good\t1.0\n", "t").is_err());
        assert!(parse_weighted("good\t1.0\ngood\t2.0\n", "t").is_err());
        assert!(parse_weighted("good 1.0\n", "t").is_err());
        assert!(parse_tokens("NOT\n", "t").is_err());
    }
}
