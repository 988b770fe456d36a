//! Corpus association measures over 2x2 co-occurrence tables.
//!
//! Observed cells follow the usual layout: `o11` counts the two words
//! together, `o12` the first without the second, `o21` the second without the
//! first, and `o22` neither. Row sums are `r1`/`r2`, column sums `c1`/`c2`,
//! and every expected cell is `E_hk = R_h * C_k / N`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContingencyTable {
    pub o11: u64,
    pub o12: u64,
    pub o21: u64,
    pub o22: u64,
    pub r1: u64,
    pub r2: u64,
    pub c1: u64,
    pub c2: u64,
    pub n: u64,
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
}

impl ContingencyTable {
    /// Builds the full table from the joint count, the two marginal
    /// frequencies, and the corpus size.
    pub fn from_counts(o11: u64, r1: u64, c1: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCounts("corpus size must be positive".into()));
        }
        if o11 > r1 || o11 > c1 {
            return Err(Error::InvalidCounts(format!(
                "joint count {o11} exceeds a marginal ({r1}, {c1})"
            )));
        }
        if r1 > n || c1 > n {
            return Err(Error::InvalidCounts(format!(
                "marginal ({r1}, {c1}) exceeds corpus size {n}"
            )));
        }
        // o22 = n - r1 - c1 + o11, computed without underflow.
        let o22 = (n + o11)
            .checked_sub(r1 + c1)
            .ok_or_else(|| Error::InvalidCounts(format!("negative o22 for ({o11}, {r1}, {c1}, {n})")))?;
        Ok(Self::from_observed_unchecked(o11, r1 - o11, c1 - o11, o22))
    }

    pub fn from_observed(o11: u64, o12: u64, o21: u64, o22: u64) -> Result<Self> {
        if o11 + o12 + o21 + o22 == 0 {
            return Err(Error::InvalidCounts("corpus size must be positive".into()));
        }
        Ok(Self::from_observed_unchecked(o11, o12, o21, o22))
    }

    fn from_observed_unchecked(o11: u64, o12: u64, o21: u64, o22: u64) -> Self {
        let r1 = o11 + o12;
        let r2 = o21 + o22;
        let c1 = o11 + o21;
        let c2 = o12 + o22;
        let n = r1 + r2;
        let nf = n as f64;
        let expected = |r: u64, c: u64| r as f64 * c as f64 / nf;
        Self {
            o11,
            o12,
            o21,
            o22,
            r1,
            r2,
            c1,
            c2,
            n,
            e11: expected(r1, c1),
            e12: expected(r1, c2),
            e21: expected(r2, c1),
            e22: expected(r2, c2),
        }
    }

    /// The same pair seen from the other word.
    pub fn transposed(&self) -> Self {
        Self::from_observed_unchecked(self.o11, self.o21, self.o12, self.o22)
    }

    fn observed(&self) -> [f64; 4] {
        [self.o11 as f64, self.o12 as f64, self.o21 as f64, self.o22 as f64]
    }

    fn expected(&self) -> [f64; 4] {
        [self.e11, self.e12, self.e21, self.e22]
    }
}

pub fn table_from_counts(o11: u64, r1: u64, c1: u64, n: u64) -> Result<ContingencyTable> {
    ContingencyTable::from_counts(o11, r1, c1, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssociationMeasure {
    Dice,
    MDice,
    Pmi,
    TScore,
    ZScore,
    OddsRatio,
    ChiSquared,
    ChiSquaredCorrected,
}

impl AssociationMeasure {
    pub const ALL: [AssociationMeasure; 8] = [
        Self::Dice,
        Self::MDice,
        Self::Pmi,
        Self::TScore,
        Self::ZScore,
        Self::OddsRatio,
        Self::ChiSquared,
        Self::ChiSquaredCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Dice => "dice",
            Self::MDice => "mdice",
            Self::Pmi => "pmi",
            Self::TScore => "t-score",
            Self::ZScore => "z-score",
            Self::OddsRatio => "odds-r",
            Self::ChiSquared => "chi-s",
            Self::ChiSquaredCorrected => "chi-s-c",
        }
    }

    pub fn score(self, table: &ContingencyTable) -> Result<f64> {
        score(table, self)
    }
}

impl fmt::Display for AssociationMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AssociationMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|m| m.name() == key || m.name().replace('-', "") == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown association measure {s:?}")))
    }
}

fn undefined(measure: AssociationMeasure, reason: &'static str) -> Error {
    Error::UndefinedForTable {
        measure: measure.name(),
        reason,
    }
}

/// Scores a table with one of the eight association measures.
///
/// Measures that can be negative (pmi, t-score, z-score, odds-r) are returned
/// as computed. `odds-r` uses the natural logarithm; pmi and mdice use base 2.
pub fn score(t: &ContingencyTable, measure: AssociationMeasure) -> Result<f64> {
    use AssociationMeasure::*;

    let o11 = t.o11 as f64;
    let (r1, c1) = (t.r1 as f64, t.c1 as f64);
    let value = match measure {
        Dice => {
            if t.r1 + t.c1 == 0 {
                return Err(undefined(measure, "r1 + c1 = 0"));
            }
            2.0 * o11 / (r1 + c1)
        }
        MDice => {
            if t.o11 == 0 {
                return Err(undefined(measure, "o11 = 0"));
            }
            o11.log2() * 2.0 * o11 / (r1 + c1)
        }
        Pmi => {
            if t.o11 == 0 {
                return Err(undefined(measure, "o11 = 0"));
            }
            (o11 / t.e11).log2()
        }
        TScore => {
            if t.o11 == 0 {
                return Err(undefined(measure, "o11 = 0"));
            }
            (o11 - t.e11) / o11.sqrt()
        }
        ZScore => {
            if t.e11 <= 0.0 {
                return Err(undefined(measure, "e11 = 0"));
            }
            (o11 - t.e11) / t.e11.sqrt()
        }
        OddsRatio => {
            let [o11, o12, o21, o22] = t.observed();
            ((o11 + 0.5) * (o22 + 0.5) / ((o12 + 0.5) * (o21 + 0.5))).ln()
        }
        ChiSquared => {
            let expected = t.expected();
            if expected.iter().any(|&e| e <= 0.0) {
                return Err(undefined(measure, "an expected cell is 0"));
            }
            t.observed()
                .iter()
                .zip(expected)
                .map(|(o, e)| (o - e) * (o - e) / e)
                .sum()
        }
        ChiSquaredCorrected => {
            let margins = t.r1 as f64 * t.r2 as f64 * t.c1 as f64 * t.c2 as f64;
            if margins == 0.0 {
                return Err(undefined(measure, "a marginal is 0"));
            }
            let [o11, o12, o21, o22] = t.observed();
            let n = t.n as f64;
            let d = (o11 * o22 - o12 * o21).abs() - n / 2.0;
            n * d * d / margins
        }
    };
    Ok(value)
}

/// Precomputed co-occurrence counts: unigram frequencies, unordered pair
/// counts, and the corpus size.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountStore {
    total: Option<u64>,
    unigrams: HashMap<String, u64>,
    pairs: HashMap<(String, String), u64>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn parse_total(text: &str, source: &str, line: usize) -> Result<u64> {
    let rest = text.trim_start_matches("#N").trim();
    io::parse_field(source, line, rest, "corpus size")
}

impl CountStore {
    pub fn new(total: u64) -> Self {
        Self {
            total: Some(total),
            ..Self::default()
        }
    }

    pub fn total(&self) -> Option<u64> {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.unigrams.is_empty() && self.pairs.is_empty()
    }

    pub fn insert_unigram(&mut self, word: &str, frequency: u64) {
        self.unigrams.insert(word.to_string(), frequency);
    }

    pub fn insert_pair(&mut self, a: &str, b: &str, o11: u64) {
        self.pairs.insert(pair_key(a, b), o11);
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.unigrams.get(word).copied()
    }

    pub fn cooccurrence(&self, a: &str, b: &str) -> Option<u64> {
        self.pairs.get(&pair_key(a, b)).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.unigrams.contains_key(word) || self.pairs.keys().any(|(a, b)| a == word || b == word)
    }

    /// The contingency table of a pair, or `None` when either unigram, the
    /// pair record, or the corpus size is missing.
    pub fn table(&self, a: &str, b: &str) -> Option<Result<ContingencyTable>> {
        let o11 = self.cooccurrence(a, b)?;
        let r1 = self.frequency(a)?;
        let c1 = self.frequency(b)?;
        let n = self.total?;
        Some(ContingencyTable::from_counts(o11, r1, c1, n))
    }

    /// Association score of a pair; `None` if the pair is absent or the
    /// measure is undefined on its table.
    pub fn pair_score(&self, a: &str, b: &str, measure: AssociationMeasure) -> Option<f64> {
        let table = self.table(a, b)?.ok()?;
        score(&table, measure).ok()
    }

    /// All pair records in lexicographic order.
    pub fn pairs(&self) -> Vec<(&str, &str, u64)> {
        let mut out: Vec<_> = self
            .pairs
            .iter()
            .map(|((a, b), &n)| (a.as_str(), b.as_str(), n))
            .collect();
        out.sort_unstable();
        out
    }

    /// Parses a unigram file (`word<TAB>frequency`, `#N <total>` header) and a
    /// pair file (`word_a<TAB>word_b<TAB>o11`). The header may appear in
    /// either file; if both carry it the values must agree.
    pub fn parse(unigram_text: &str, unigram_source: &str, pair_text: &str, pair_source: &str) -> Result<Self> {
        let mut store = CountStore::default();
        for (text, source) in [(unigram_text, unigram_source), (pair_text, pair_source)] {
            for line in io::lines(text).filter(|l| l.text.starts_with("#N")) {
                let total = parse_total(line.text, source, line.number)?;
                match store.total {
                    Some(prev) if prev != total => {
                        return Err(io::parse_error(
                            source,
                            line.number,
                            format!("corpus size {total} disagrees with {prev}"),
                        ))
                    }
                    _ => store.total = Some(total),
                }
            }
        }

        for record in io::records(unigram_text, unigram_source, 2) {
            let (line, f) = record?;
            let freq = io::parse_field(unigram_source, line, f[1], "frequency")?;
            if store.unigrams.insert(f[0].to_string(), freq).is_some() {
                return Err(io::parse_error(
                    unigram_source,
                    line,
                    format!("duplicate word {:?}", f[0]),
                ));
            }
        }
        for record in io::records(pair_text, pair_source, 3) {
            let (line, f) = record?;
            let o11: u64 = io::parse_field(pair_source, line, f[2], "co-occurrence count")?;
            match store.pairs.insert(pair_key(f[0], f[1]), o11) {
                Some(prev) if prev != o11 => {
                    return Err(io::parse_error(
                        pair_source,
                        line,
                        format!("pair {}/{} already recorded with count {prev}", f[0], f[1]),
                    ))
                }
                _ => {}
            }
        }
        if store.total.is_none() && !store.pairs.is_empty() {
            return Err(io::parse_error(unigram_source, 1, "missing `#N <total>` header"));
        }
        Ok(store)
    }

    pub fn load(unigram_path: &Path, pair_path: &Path) -> Result<Self> {
        let unigrams = io::read_file(unigram_path)?;
        let pairs = io::read_file(pair_path)?;
        Self::parse(
            &unigrams,
            &io::source_name(unigram_path),
            &pairs,
            &io::source_name(pair_path),
        )
    }
}
