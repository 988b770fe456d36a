//! The player graph: one node per target-word occurrence, edges weighted by
//! corpus association, optionally boosted for words that sit close together
//! in the text.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::contingency::{AssociationMeasure, CountStore};
use crate::error::{Error, Result};
use crate::io;

/// One occurrence of a target word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub doc_id: String,
    pub position: usize,
    pub lemma: String,
    pub pos: String,
    pub instance_id: String,
}

impl Occurrence {
    pub fn new(doc_id: &str, position: usize, lemma: &str, pos: &str, instance_id: &str) -> Self {
        Self {
            doc_id: doc_id.to_string(),
            position,
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            instance_id: instance_id.to_string(),
        }
    }
}

/// Parses `doc_id<TAB>position<TAB>lemma<TAB>pos<TAB>instance_id` lines.
pub fn parse_occurrences(text: &str, source: &str) -> Result<Vec<Occurrence>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in io::records(text, source, 5) {
        let (line, f) = record?;
        let position = io::parse_field(source, line, f[1], "position")?;
        if !seen.insert(f[4].to_string()) {
            return Err(io::parse_error(
                source,
                line,
                format!("duplicate instance id {:?}", f[4]),
            ));
        }
        out.push(Occurrence::new(f[0], position, f[2], f[3], f[4]));
    }
    Ok(out)
}

pub fn load_occurrences(path: &Path) -> Result<Vec<Occurrence>> {
    parse_occurrences(&io::read_file(path)?, &io::source_name(path))
}

/// One surface form per line; blank lines and `#` comments are skipped.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    io::lines(text)
        .filter(|l| !l.is_comment())
        .map(|l| l.text.trim().to_string())
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    Ok(parse_stopwords(&io::read_file(path)?))
}

/// Symmetric weighted graph over players with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WordGraph {
    players: Vec<Occurrence>,
    weights: Vec<f64>,
}

impl WordGraph {
    pub fn new(players: Vec<Occurrence>) -> Self {
        let n = players.len();
        Self {
            players,
            weights: vec![0.0; n * n],
        }
    }

    /// A graph over `n` placeholder players, all in one document at
    /// consecutive positions. Used for abstract games.
    pub fn anonymous(n: usize) -> Self {
        let players = (0..n)
            .map(|i| Occurrence::new("game", i, &format!("p{i}"), "x", &format!("p{i}")))
            .collect();
        Self::new(players)
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn players(&self) -> &[Occurrence] {
        &self.players
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.len() + j]
    }

    /// Sets `w_ij = w_ji = w`.
    ///
    /// # Panics
    /// If `i == j` with a nonzero weight, or either index is out of range.
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        assert!(i != j || w == 0.0, "self-loops are not allowed");
        let n = self.len();
        self.weights[i * n + j] = w;
        self.weights[j * n + i] = w;
    }

    /// Neighbors of `i` with nonzero weight, in player order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let n = self.len();
        self.weights[i * n..(i + 1) * n]
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, w)| w != 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            players: self.players.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    /// Mean of the strictly positive upper-triangle weights, `None` if there are none.
    pub fn mean_positive_weight(&self) -> Option<f64> {
        let n = self.len();
        let (mut sum, mut count) = (0.0, 0usize);
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weight(i, j);
                if w > 0.0 {
                    sum += w;
                    count += 1;
                }
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Upper-triangle edge list, `i<TAB>j<TAB>w_ij`, nonzero weights only.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weight(i, j);
                if w != 0.0 {
                    writeln!(out, "{i}\t{j}\t{w}").unwrap();
                }
            }
        }
        out
    }

    /// Reads an edge list written by [`WordGraph::to_edge_list`] over the given players.
    pub fn from_edge_list(players: Vec<Occurrence>, text: &str, source: &str) -> Result<Self> {
        let mut graph = Self::new(players);
        let n = graph.len();
        for record in io::records(text, source, 3) {
            let (line, f) = record?;
            let i: usize = io::parse_field(source, line, f[0], "player index")?;
            let j: usize = io::parse_field(source, line, f[1], "player index")?;
            let w: f64 = io::parse_field(source, line, f[2], "weight")?;
            if i >= n || j >= n {
                return Err(io::parse_error(
                    source,
                    line,
                    format!("player index out of range (n = {n})"),
                ));
            }
            if i == j {
                return Err(io::parse_error(source, line, "self-loop"));
            }
            if !w.is_finite() {
                return Err(io::parse_error(source, line, "non-finite weight"));
            }
            graph.set_weight(i, j, w);
        }
        Ok(graph)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.weight(i, i) == 0.0 && (0..i).all(|j| self.weight(i, j) == self.weight(j, i)))
    }
}

/// Window for proximity edges plus the stop-word set removed from the token
/// stream before distances are measured.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NgramPolicy {
    pub window: usize,
    pub stopwords: HashSet<String>,
}

impl NgramPolicy {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            stopwords: HashSet::new(),
        }
    }

    pub fn with_stopwords(mut self, stopwords: HashSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }
}

/// Weights every pair of players by their association score. Pairs with no
/// count record, or whose table fails the measure's preconditions, get 0.
pub fn build_word_graph(occurrences: &[Occurrence], counts: &CountStore, measure: AssociationMeasure) -> WordGraph {
    let keys: Vec<&str> = occurrences.iter().map(|o| o.lemma.as_str()).collect();
    build_word_graph_with_keys(occurrences, &keys, counts, measure)
}

/// Like [`build_word_graph`], but looks pairs up under `keys[i]` instead of
/// each occurrence's own lemma (used after query expansion).
pub fn build_word_graph_with_keys(
    occurrences: &[Occurrence],
    keys: &[&str],
    counts: &CountStore,
    measure: AssociationMeasure,
) -> WordGraph {
    assert_eq!(occurrences.len(), keys.len());
    let mut graph = WordGraph::new(occurrences.to_vec());
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            if occurrences[i].doc_id != occurrences[j].doc_id {
                continue;
            }
            if let Some(w) = counts.pair_score(keys[i], keys[j], measure) {
                if w.is_finite() {
                    graph.set_weight(i, j, w);
                }
            }
        }
    }
    graph
}

/// Content-token index of each non-stop-word player, grouped by document.
///
/// A player's index is its position minus the number of stop-word players
/// that precede it in the same document.
fn content_positions<'a>(
    players: &'a [Occurrence],
    stopwords: &HashSet<String>,
) -> BTreeMap<&'a str, Vec<(usize, usize)>> {
    let mut by_doc: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in players.iter().enumerate() {
        by_doc.entry(p.doc_id.as_str()).or_default().push(i);
    }
    let mut out = BTreeMap::new();
    for (doc, mut members) in by_doc {
        members.sort_by_key(|&i| (players[i].position, i));
        let mut removed = 0;
        let mut content = Vec::new();
        for i in members {
            if stopwords.contains(&players[i].lemma) {
                removed += 1;
            } else {
                content.push((i, players[i].position.saturating_sub(removed)));
            }
        }
        out.insert(doc, content);
    }
    out
}

/// Adds the graph's mean positive weight to every pair of players within
/// `policy.window` content tokens of each other in the same document.
///
/// The increment is fixed before any edge is touched. When the graph has no
/// positive weight at all the increment is 1, so proximity still connects the
/// players.
pub fn augment_with_ngram(graph: &WordGraph, policy: &NgramPolicy) -> WordGraph {
    let mut out = graph.clone();
    if policy.window == 0 {
        return out;
    }
    let increment = graph.mean_positive_weight().unwrap_or(1.0);
    for content in content_positions(graph.players(), &policy.stopwords).values() {
        for (a, &(i, pi)) in content.iter().enumerate() {
            for &(j, pj) in &content[a + 1..] {
                if pi.abs_diff(pj) > policy.window {
                    break;
                }
                out.set_weight(i, j, out.weight(i, j) + increment);
            }
        }
    }
    out
}

/// Picks a lexicalization that the count store knows about.
///
/// Returns `lemma` itself when it is in the store; otherwise the alternative
/// with the largest summed co-occurrence against `context`, earliest first on
/// ties.
pub fn expand_query(lemma: &str, alternatives: &[String], counts: &CountStore, context: &[String]) -> Result<String> {
    if counts.contains(lemma) {
        return Ok(lemma.to_string());
    }
    let mut best: Option<(&String, u64)> = None;
    for alt in alternatives.iter().filter(|a| counts.contains(a)) {
        let total: u64 = context.iter().filter_map(|c| counts.cooccurrence(alt, c)).sum();
        if best.is_none_or(|(_, b)| total > b) {
            best = Some((alt, total));
        }
    }
    best.map(|(alt, _)| alt.clone())
        .ok_or_else(|| Error::NoAlternativeFound(lemma.to_string()))
}

/// Parses `lemma<TAB>alt1,alt2,...` lines of alternative lexicalizations.
pub fn parse_alternatives(text: &str, source: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut out = BTreeMap::new();
    for record in io::records(text, source, 2) {
        let (line, f) = record?;
        let alts: Vec<String> = f[1]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        if out.insert(f[0].to_string(), alts).is_some() {
            return Err(io::parse_error(source, line, format!("duplicate lemma {:?}", f[0])));
        }
    }
    Ok(out)
}

pub fn load_alternatives(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    parse_alternatives(&io::read_file(path)?, &io::source_name(path))
}
