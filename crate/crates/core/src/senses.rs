//! Sense inventories and the initial mixed strategies of the players.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Occurrence;
use crate::io;

type Key = (String, String);

fn key(lemma: &str, pos: &str) -> Key {
    (lemma.to_string(), pos.to_string())
}

/// Rank-ordered senses per `(lemma, pos)`, with optional ranked clusters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SenseInventory {
    senses: HashMap<Key, Vec<String>>,
    clusters: HashMap<Key, Vec<Vec<String>>>,
}

impl SenseInventory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. Senses are in rank order, most frequent first.
    pub fn insert(&mut self, lemma: &str, pos: &str, senses: Vec<String>) -> Result<()> {
        if senses.is_empty() {
            return Err(Error::InvalidParameter(format!("empty inventory for {lemma}/{pos}")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = senses.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "duplicate concept {dup} for {lemma}/{pos}"
            )));
        }
        self.senses.insert(key(lemma, pos), senses);
        Ok(())
    }

    /// Adds ranked clusters; they must partition the entry's senses.
    pub fn insert_clusters(&mut self, lemma: &str, pos: &str, clusters: Vec<Vec<String>>) -> Result<()> {
        let senses = self.senses(lemma, pos).ok_or_else(|| Error::MissingInventory {
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            player: usize::MAX,
        })?;
        let mut flat: Vec<&str> = clusters.iter().flatten().map(String::as_str).collect();
        let mut expected: Vec<&str> = senses.iter().map(String::as_str).collect();
        flat.sort_unstable();
        expected.sort_unstable();
        if clusters.iter().any(Vec::is_empty) || flat != expected {
            return Err(Error::InvalidParameter(format!(
                "clusters for {lemma}/{pos} do not partition its senses"
            )));
        }
        self.clusters.insert(key(lemma, pos), clusters);
        Ok(())
    }

    pub fn senses(&self, lemma: &str, pos: &str) -> Option<&[String]> {
        self.senses.get(&key(lemma, pos)).map(Vec::as_slice)
    }

    pub fn clusters(&self, lemma: &str, pos: &str) -> Option<&[Vec<String>]> {
        self.clusters.get(&key(lemma, pos)).map(Vec::as_slice)
    }

    pub fn senses_for(&self, player: &Occurrence) -> Option<&[String]> {
        self.senses(&player.lemma, &player.pos)
    }

    /// Parses `lemma<TAB>pos<TAB>c1,c2,...` lines.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut inv = Self::new();
        for record in io::records(text, source, 3) {
            let (line, f) = record?;
            if inv.senses(f[0], f[1]).is_some() {
                return Err(io::parse_error(
                    source,
                    line,
                    format!("duplicate entry {}/{}", f[0], f[1]),
                ));
            }
            let senses = split_ids(f[2]);
            inv.insert(f[0], f[1], senses)
                .map_err(|e| io::parse_error(source, line, e.to_string()))?;
        }
        Ok(inv)
    }

    /// Parses `lemma<TAB>pos<TAB>{c1,c2}|{c3}|...` lines into this inventory.
    pub fn parse_clusters(&mut self, text: &str, source: &str) -> Result<()> {
        for record in io::records(text, source, 3) {
            let (line, f) = record?;
            let mut clusters = Vec::new();
            for group in f[2].split('|') {
                let group = group.trim();
                let inner = group
                    .strip_prefix('{')
                    .and_then(|g| g.strip_suffix('}'))
                    .ok_or_else(|| io::parse_error(source, line, format!("malformed cluster {group:?}")))?;
                clusters.push(split_ids(inner));
            }
            self.insert_clusters(f[0], f[1], clusters)
                .map_err(|e| io::parse_error(source, line, e.to_string()))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_file(path)?, &io::source_name(path))
    }

    pub fn load_clusters(&mut self, path: &Path) -> Result<()> {
        self.parse_clusters(&io::read_file(path)?, &io::source_name(path))
    }
}

fn split_ids(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

/// Splits players into those with an inventory entry and the indices of
/// those without one.
pub fn partition_known(players: &[Occurrence], inv: &SenseInventory) -> (Vec<Occurrence>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, p) in players.iter().enumerate() {
        if inv.senses_for(p).is_some() {
            kept.push(p.clone());
        } else {
            dropped.push(i);
        }
    }
    (kept, dropped)
}

/// Row-stochastic player-by-concept matrix over the global concept list.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyState {
    concepts: Vec<String>,
    supports: Vec<Vec<usize>>,
    matrix: Vec<f64>,
}

impl StrategyState {
    /// Builds a state from explicit rows. `supports[i]` lists the concept
    /// columns player `i` may play, in rank order; `rows[i]` gives their
    /// probabilities in the same order.
    pub fn from_rows(concepts: Vec<String>, supports: Vec<Vec<usize>>, rows: &[Vec<f64>]) -> Result<Self> {
        if supports.len() != rows.len() {
            return Err(Error::Shape(format!(
                "{} supports but {} rows",
                supports.len(),
                rows.len()
            )));
        }
        let c = concepts.len();
        let mut matrix = vec![0.0; supports.len() * c];
        for (i, (support, row)) in supports.iter().zip(rows).enumerate() {
            if support.is_empty() || support.len() != row.len() {
                return Err(Error::Shape(format!("player {i}: support/row length mismatch")));
            }
            let mut seen = HashSet::new();
            for (&col, &p) in support.iter().zip(row) {
                if col >= c || !seen.insert(col) {
                    return Err(Error::Shape(format!("player {i}: bad concept column {col}")));
                }
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!("player {i}: probability {p}")));
                }
                matrix[i * c + col] = p;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("player {i}: row sums to {sum}")));
            }
        }
        Ok(Self {
            concepts,
            supports,
            matrix,
        })
    }

    /// Uniform rows over the given supports.
    pub fn uniform(concepts: Vec<String>, supports: Vec<Vec<usize>>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = supports
            .iter()
            .map(|s| vec![1.0 / s.len().max(1) as f64; s.len()])
            .collect();
        Self::from_rows(concepts, supports, &rows)
    }

    pub fn players(&self) -> usize {
        self.supports.len()
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn concept_index(&self, id: &str) -> Option<usize> {
        self.concepts.iter().position(|c| c == id)
    }

    /// Concept columns of player `i` in rank order.
    pub fn support(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.concepts.len();
        &self.matrix[i * c..(i + 1) * c]
    }

    pub fn get(&self, i: usize, col: usize) -> f64 {
        self.matrix[i * self.concepts.len() + col]
    }

    /// Probabilities of player `i` over its support, in rank order.
    pub fn support_row(&self, i: usize) -> Vec<f64> {
        self.supports[i].iter().map(|&col| self.get(i, col)).collect()
    }

    pub(crate) fn set_support_row(&mut self, i: usize, values: &[f64]) {
        let c = self.concepts.len();
        for (&col, &v) in self.supports[i].iter().zip(values) {
            self.matrix[i * c + col] = v;
        }
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when every row is on the simplex within `tol` and lives on its support.
    pub fn is_valid(&self, tol: f64) -> bool {
        (0..self.players()).all(|i| {
            let row = self.row(i);
            let sum: f64 = row.iter().sum();
            (sum - 1.0).abs() <= tol
                && row.iter().all(|&p| p >= 0.0)
                && row
                    .iter()
                    .enumerate()
                    .all(|(col, &p)| p == 0.0 || self.supports[i].contains(&col))
        })
    }
}

/// How the players' mixed strategies start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initialization {
    Uniform,
    Geometric { p: f64 },
    Clustered { p: f64 },
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "geometric parameter must lie in (0, 1), got {p}"
        )))
    }
}

/// Normalized `p (1-p)^(rank + offset)` over ranks `0..m`. The offset
/// cancels after normalization.
pub(crate) fn geometric_row(ranks: impl Iterator<Item = usize>, p: f64, offset: usize) -> Vec<f64> {
    let raw: Vec<f64> = ranks.map(|r| p * (1.0 - p).powi((r + offset) as i32)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Geometric starting row for `m` ranked senses.
pub fn geometric_weights(m: usize, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    Ok(geometric_row(0..m, p, 0))
}

type ConceptSpace<'a> = (Vec<String>, Vec<&'a [String]>, Vec<Vec<usize>>);

/// Collects the global concept list (first-appearance order) and each
/// player's support.
fn concept_space<'a>(inv: &'a SenseInventory, players: &[Occurrence]) -> Result<ConceptSpace<'a>> {
    let mut concepts = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut inventories = Vec::with_capacity(players.len());
    let mut supports = Vec::with_capacity(players.len());
    for (i, p) in players.iter().enumerate() {
        let senses = inv.senses_for(p).ok_or_else(|| Error::MissingInventory {
            lemma: p.lemma.clone(),
            pos: p.pos.clone(),
            player: i,
        })?;
        let support = senses
            .iter()
            .map(|s| {
                *index.entry(s.as_str()).or_insert_with(|| {
                    concepts.push(s.clone());
                    concepts.len() - 1
                })
            })
            .collect();
        inventories.push(senses);
        supports.push(support);
    }
    Ok((concepts, inventories, supports))
}

pub fn init_uniform(inv: &SenseInventory, players: &[Occurrence]) -> Result<StrategyState> {
    let (concepts, _, supports) = concept_space(inv, players)?;
    StrategyState::uniform(concepts, supports)
}

pub fn init_geometric(inv: &SenseInventory, players: &[Occurrence], p: f64) -> Result<StrategyState> {
    check_p(p)?;
    let (concepts, _, supports) = concept_space(inv, players)?;
    let rows: Vec<Vec<f64>> = supports.iter().map(|s| geometric_row(0..s.len(), p, 0)).collect();
    StrategyState::from_rows(concepts, supports, &rows)
}

/// Geometric weights by cluster rank; senses sharing a cluster share a weight.
pub fn init_clustered(inv: &SenseInventory, players: &[Occurrence], p: f64) -> Result<StrategyState> {
    check_p(p)?;
    let (concepts, inventories, supports) = concept_space(inv, players)?;
    let mut rows = Vec::with_capacity(players.len());
    for (player, senses) in players.iter().zip(&inventories) {
        let clusters = inv
            .clusters(&player.lemma, &player.pos)
            .ok_or_else(|| Error::MissingClusters {
                lemma: player.lemma.clone(),
                pos: player.pos.clone(),
            })?;
        let ranks = senses.iter().map(|s| {
            clusters
                .iter()
                .position(|c| c.contains(s))
                .expect("clusters partition the inventory")
        });
        rows.push(geometric_row(ranks, p, 0));
    }
    StrategyState::from_rows(concepts, supports, &rows)
}

pub fn initialize(inv: &SenseInventory, players: &[Occurrence], init: Initialization) -> Result<StrategyState> {
    match init {
        Initialization::Uniform => init_uniform(inv, players),
        Initialization::Geometric { p } => init_geometric(inv, players, p),
        Initialization::Clustered { p } => init_clustered(inv, players, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inventory() -> SenseInventory {
        let mut inv = SenseInventory::parse(
            "bank\tn\tb1,b2,b3,b4\nriver\tn\tr1\nrun\tv\tv1,v2,v3\nis\tv\tbe1,be2\n",
            "inv",
        )
        .unwrap();
        inv.parse_clusters("run\tv\t{v1,v3}|{v2}\nbank\tn\t{b1}|{b2}|{b3}|{b4}\n", "cl")
            .unwrap();
        inv
    }

    fn players(lemmas: &[(&str, &str)]) -> Vec<Occurrence> {
        lemmas
            .iter()
            .enumerate()
            .map(|(i, (l, p))| Occurrence::new("d", i, l, p, &format!("t{i}")))
            .collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn uniform_rows() {
        let s = init_uniform(&inventory(), &players(&[("bank", "n"), ("river", "n")])).unwrap();
        assert_eq!(s.support_row(0), vec![0.25; 4]);
        assert_eq!(s.support_row(1), vec![1.0]);
        assert_eq!(s.concepts().len(), 5);
        assert_eq!(s.get(0, 4), 0.0);
        assert!(s.is_valid(1e-9));
    }

    #[test]
    fn ten_sense_word() {
        let ids: Vec<String> = (0..10).map(|i| format!("bank.n.{i:02}")).collect();
        let mut inv = SenseInventory::new();
        inv.insert("bank", "n", ids).unwrap();
        let s = init_uniform(&inv, &players(&[("bank", "n")])).unwrap();
        assert_eq!(s.support_row(0), vec![0.1; 10]);
    }

    #[test]
    fn geometric_rows() {
        let mut inv = SenseInventory::new();
        inv.insert("a", "n", vec!["x".into(), "y".into(), "z".into()]).unwrap();
        inv.insert("b", "n", vec!["u".into(), "v".into()]).unwrap();
        let s = init_geometric(&inv, &players(&[("a", "n"), ("b", "n"), ("a", "n")]), 0.4).unwrap();
        assert!(close(&s.support_row(0), &[0.5102, 0.3061, 0.1837], 1e-4));
        assert_eq!(s.support_row(0), s.support_row(2));
        let half = init_geometric(&inv, &players(&[("b", "n")]), 0.5).unwrap();
        assert!(close(&half.support_row(0), &[2.0 / 3.0, 1.0 / 3.0], 1e-15));
        let mono = init_geometric(&inventory(), &players(&[("river", "n")]), 0.9).unwrap();
        assert_eq!(mono.support_row(0), vec![1.0]);
    }

    #[test]
    fn geometric_parameter_bounds() {
        let p = players(&[("bank", "n")]);
        for bad in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(
                init_geometric(&inventory(), &p, bad),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn clustered_rows() {
        let s = init_clustered(&inventory(), &players(&[("run", "v")]), 0.5).unwrap();
        assert!(close(&s.support_row(0), &[0.4, 0.2, 0.4], 1e-15));
        let singletons = init_clustered(&inventory(), &players(&[("bank", "n")]), 0.3).unwrap();
        let geo = init_geometric(&inventory(), &players(&[("bank", "n")]), 0.3).unwrap();
        assert_eq!(singletons, geo);

        let mut one = SenseInventory::new();
        one.insert("a", "n", vec!["x".into(), "y".into(), "z".into()]).unwrap();
        one.insert_clusters("a", "n", vec![vec!["x".into(), "y".into(), "z".into()]])
            .unwrap();
        let s = init_clustered(&one, &players(&[("a", "n")]), 0.7).unwrap();
        assert!(close(&s.support_row(0), &[1.0 / 3.0; 3], 1e-15));
    }

    #[test]
    fn missing_entries() {
        let err = init_uniform(&inventory(), &players(&[("bank", "n"), ("moon", "n")])).unwrap_err();
        assert!(matches!(err, Error::MissingInventory { player: 1, .. }));
        let err = init_clustered(&inventory(), &players(&[("river", "n")]), 0.4).unwrap_err();
        assert!(matches!(err, Error::MissingClusters { .. }));
        let (kept, dropped) = partition_known(&players(&[("bank", "n"), ("moon", "n")]), &inventory());
        assert_eq!(kept.len(), 1);
        assert_eq!(dropped, vec![1]);
    }

    #[test]
    fn cluster_validation() {
        let mut inv = inventory();
        assert!(inv.parse_clusters("run\tv\t{v1}|{v2}\n", "cl").is_err());
        assert!(inv.parse_clusters("run\tv\tv1,v2,v3\n", "cl").is_err());
        assert!(SenseInventory::parse("a\tn\tx,x\n", "inv").is_err());
        assert!(SenseInventory::parse("a\tn\tx\na\tn\ty\n", "inv").is_err());
    }

    #[test]
    fn shared_concepts_share_a_column() {
        let mut inv = SenseInventory::new();
        inv.insert("bank", "n", vec!["slope".into(), "depository".into()])
            .unwrap();
        inv.insert("shore", "n", vec!["slope".into()]).unwrap();
        let s = init_uniform(&inv, &players(&[("bank", "n"), ("shore", "n")])).unwrap();
        assert_eq!(s.concepts(), ["slope", "depository"]);
        assert_eq!(s.support(1), [0]);
    }

    proptest! {
        #[test]
        fn rank_offset_cancels(m in 1usize..12, p in 0.01f64..0.99) {
            let zero = geometric_row(0..m, p, 0);
            let one = geometric_row(0..m, p, 1);
            prop_assert!(close(&zero, &one, 1e-12));
            let sum: f64 = zero.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(zero.windows(2).all(|w| w[0] > w[1]));
        }
    }
}
