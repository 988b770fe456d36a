//! Sense similarity and the payoff matrices of the pairwise games.
//!
//! A [`PayoffStore`] holds one similarity matrix over every concept in play.
//! The payoff matrix of the game between two players is the slice of that
//! matrix indexed by their two sense inventories ([`partial_payoff`]).
//!
//! Matrices built from a similarity provider have a zero diagonal: a concept
//! is never scored against itself.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provider {
    Wup,
    Jcn,
    GlossCosineTfidf,
    GlossCosineRaw,
    Precomputed,
}

impl Provider {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wup => "wup",
            Self::Jcn => "jcn",
            Self::GlossCosineTfidf => "gloss-tfidf",
            Self::GlossCosineRaw => "gloss-raw",
            Self::Precomputed => "precomputed",
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Provider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "wup" => Ok(Self::Wup),
            "jcn" => Ok(Self::Jcn),
            "gloss-tfidf" | "tfidf" | "tf-idf" | "gloss-cosine-tfidf" => Ok(Self::GlossCosineTfidf),
            "gloss-raw" | "vec" | "raw" | "gloss-cosine-raw" => Ok(Self::GlossCosineRaw),
            "precomputed" => Ok(Self::Precomputed),
            _ => Err(Error::InvalidParameter(format!("unknown payoff provider {s:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Taxonomy measures

#[derive(Debug, Clone, PartialEq)]
struct TaxonomyNode {
    depth: u32,
    ic: Option<f64>,
    parents: Vec<String>,
}

/// Concepts with depth (root = 1), information content, and parent links.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Taxonomy {
    nodes: HashMap<String, TaxonomyNode>,
}

impl Taxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, depth: u32, ic: Option<f64>, parent: Option<&str>) -> Result<()> {
        if depth == 0 {
            return Err(Error::InvalidParameter(format!("{id}: depth must be at least 1")));
        }
        let node = self.nodes.entry(id.to_string()).or_insert_with(|| TaxonomyNode {
            depth,
            ic,
            parents: Vec::new(),
        });
        if node.depth != depth || node.ic != ic {
            return Err(Error::InvalidParameter(format!("{id}: conflicting depth or IC")));
        }
        if let Some(parent) = parent {
            if !node.parents.iter().any(|p| p == parent) {
                node.parents.push(parent.to_string());
            }
        }
        Ok(())
    }

    pub fn depth(&self, id: &str) -> Option<u32> {
        self.nodes.get(id).map(|n| n.depth)
    }

    pub fn ic(&self, id: &str) -> Option<f64> {
        self.nodes.get(id).and_then(|n| n.ic)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    /// The concept and all its ancestors.
    pub fn ancestors(&self, id: &str) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if let Some((key, node)) = self.nodes.get_key_value(c) {
                if out.insert(key.as_str()) {
                    stack.extend(node.parents.iter().map(String::as_str));
                }
            }
        }
        out
    }

    /// Deepest shared ancestor; ties go to the smallest id.
    pub fn msa(&self, a: &str, b: &str) -> Option<&str> {
        let left = self.ancestors(a);
        let right = self.ancestors(b);
        left.intersection(&right)
            .copied()
            .max_by(|x, y| self.nodes[*x].depth.cmp(&self.nodes[*y].depth).then(y.cmp(x)))
    }

    /// Parses `concept_id<TAB>depth<TAB>ic<TAB>parent_id` lines. An empty or
    /// `-` IC is missing; an empty or `-` parent marks a root.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut tax = Self::new();
        for record in io::records(text, source, 4) {
            let (line, f) = record?;
            let depth = io::parse_field(source, line, f[1], "depth")?;
            let ic = match f[2].trim() {
                "" | "-" => None,
                raw => {
                    let v: f64 = io::parse_field(source, line, raw, "information content")?;
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(io::parse_error(
                            source,
                            line,
                            format!("invalid information content {v}"),
                        ));
                    }
                    Some(v)
                }
            };
            let parent = match f[3].trim() {
                "" | "-" => None,
                p => Some(p),
            };
            tax.insert(f[0], depth, ic, parent)
                .map_err(|e| io::parse_error(source, line, e.to_string()))?;
        }
        Ok(tax)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_file(path)?, &io::source_name(path))
    }
}

/// `2 depth(msa) / (depth(a) + depth(b))`.
pub fn wup(a: &str, b: &str, tax: &Taxonomy) -> Result<f64> {
    let da = tax.depth(a).ok_or_else(|| Error::UnknownConcept(a.to_string()))?;
    let db = tax.depth(b).ok_or_else(|| Error::UnknownConcept(b.to_string()))?;
    let msa = tax
        .msa(a, b)
        .ok_or_else(|| Error::NoCommonAncestor(a.to_string(), b.to_string()))?;
    let dm = tax.depth(msa).expect("ancestors are taxonomy nodes");
    Ok(2.0 * dm as f64 / (da + db) as f64)
}

/// `IC(a) + IC(b) - 2 IC(msa)`, returned as is.
///
/// This is a distance: identical concepts score 0. Use
/// [`jcn_inverted`] to turn it into a similarity.
pub fn jcn(a: &str, b: &str, tax: &Taxonomy) -> Result<f64> {
    let msa = tax
        .msa(a, b)
        .ok_or_else(|| Error::NoCommonAncestor(a.to_string(), b.to_string()))?;
    let ic = |c: &str| tax.ic(c).ok_or_else(|| Error::MissingIc(c.to_string()));
    Ok(ic(a)? + ic(b)? - 2.0 * ic(msa)?)
}

pub const JCN_EPSILON: f64 = 1e-9;
pub const JCN_CAP: f64 = 1e9;

/// Maps a jcn distance `d` to `1 / (d + 1e-9)`, capped at `1e9`.
pub fn jcn_inverted(distance: f64) -> f64 {
    (1.0 / (distance.max(0.0) + JCN_EPSILON)).min(JCN_CAP)
}

// ---------------------------------------------------------------------------
// Gloss vectors

/// Sparse nonnegative term weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlossVector(pub BTreeMap<String, f64>);

impl GlossVector {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Self(pairs.into_iter().map(|(t, w)| (t.to_string(), w)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|&w| w == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn get(&self, term: &str) -> f64 {
        self.0.get(term).copied().unwrap_or(0.0)
    }
}

/// Cosine of the angle between two vectors; 0 if either is zero.
pub fn cosine(a: &GlossVector, b: &GlossVector) -> f64 {
    let (small, large) = if a.0.len() <= b.0.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.0.iter().map(|(t, w)| w * large.get(t)).sum();
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        0.0
    } else {
        (dot / denom).clamp(-1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermWeighting {
    TfIdf,
    Raw,
}

/// Concept glosses keyed by id.
pub fn parse_glosses(text: &str, source: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for record in io::records(text, source, 2) {
        let (line, f) = record?;
        if out.insert(f[0].to_string(), f[1].to_string()).is_some() {
            return Err(io::parse_error(source, line, format!("duplicate gloss for {}", f[0])));
        }
    }
    Ok(out)
}

pub fn load_glosses(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_glosses(&io::read_file(path)?, &io::source_name(path))
}

/// Directed `concept_id<TAB>related_id` links.
pub fn parse_relations(text: &str, source: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for record in io::records(text, source, 2) {
        let (_, f) = record?;
        let related = out.entry(f[0].to_string()).or_default();
        if !related.iter().any(|r| r == f[1]) {
            related.push(f[1].to_string());
        }
    }
    Ok(out)
}

pub fn load_relations(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    parse_relations(&io::read_file(path)?, &io::source_name(path))
}

fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// One vector per glossed concept, built from its super-gloss: its own gloss
/// followed by the glosses of its directly related concepts.
///
/// With [`TermWeighting::TfIdf`] each count is multiplied by `ln(N / df)`,
/// where `N` is the number of super-glosses and `df` the number containing
/// the term.
pub fn build_gloss_vectors(
    glosses: &BTreeMap<String, String>,
    relations: &BTreeMap<String, Vec<String>>,
    weighting: TermWeighting,
) -> BTreeMap<String, GlossVector> {
    let mut counts: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (concept, gloss) in glosses {
        let mut tf: BTreeMap<String, f64> = BTreeMap::new();
        let related = relations.get(concept).into_iter().flatten();
        let texts = std::iter::once(gloss.as_str()).chain(related.filter_map(|r| glosses.get(r).map(String::as_str)));
        for text in texts {
            for term in tokenize(text) {
                *tf.entry(term).or_default() += 1.0;
            }
        }
        counts.insert(concept.clone(), tf);
    }

    if weighting == TermWeighting::Raw {
        return counts.into_iter().map(|(c, tf)| (c, GlossVector(tf))).collect();
    }

    let docs = counts.len() as f64;
    let mut df: HashMap<&str, f64> = HashMap::new();
    for tf in counts.values() {
        for term in tf.keys() {
            *df.entry(term.as_str()).or_default() += 1.0;
        }
    }
    let idf: HashMap<String, f64> = df.into_iter().map(|(t, d)| (t.to_string(), (docs / d).ln())).collect();
    counts
        .into_iter()
        .map(|(c, tf)| {
            let v = tf.into_iter().map(|(t, n)| {
                let w = n * idf[&t];
                (t, w)
            });
            (c, GlossVector(v.collect()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Payoff store

/// Where similarity values come from.
#[derive(Debug, Clone, Copy)]
pub enum SimilaritySource<'a> {
    Wup(&'a Taxonomy),
    Jcn {
        taxonomy: &'a Taxonomy,
        inverted: bool,
    },
    Gloss {
        vectors: &'a BTreeMap<String, GlossVector>,
        weighting: TermWeighting,
    },
    Precomputed(&'a PrecomputedScores),
}

impl SimilaritySource<'_> {
    pub fn provider(&self) -> Provider {
        match self {
            Self::Wup(_) => Provider::Wup,
            Self::Jcn { .. } => Provider::Jcn,
            Self::Gloss {
                weighting: TermWeighting::TfIdf,
                ..
            } => Provider::GlossCosineTfidf,
            Self::Gloss {
                weighting: TermWeighting::Raw,
                ..
            } => Provider::GlossCosineRaw,
            Self::Precomputed(_) => Provider::Precomputed,
        }
    }

    /// Similarity of two distinct concepts; `Err` marks a provider failure.
    fn similarity(&self, a: &str, b: &str) -> Result<f64> {
        match self {
            Self::Wup(tax) => wup(a, b, tax),
            Self::Jcn { taxonomy, inverted } => {
                let d = jcn(a, b, taxonomy)?;
                Ok(if *inverted { jcn_inverted(d) } else { d })
            }
            Self::Gloss { vectors, .. } => {
                let va = vectors.get(a).ok_or_else(|| Error::UnknownConcept(a.to_string()))?;
                let vb = vectors.get(b).ok_or_else(|| Error::UnknownConcept(b.to_string()))?;
                Ok(cosine(va, vb))
            }
            Self::Precomputed(scores) => Ok(scores.get(a, b)),
        }
    }
}

/// Symmetric `concept_a<TAB>concept_b<TAB>similarity` scores; missing pairs are 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrecomputedScores {
    scores: HashMap<(String, String), f64>,
}

impl PrecomputedScores {
    pub fn insert(&mut self, a: &str, b: &str, value: f64) {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.scores.insert((key.0.to_string(), key.1.to_string()), value);
    }

    pub fn get(&self, a: &str, b: &str) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.scores
            .get(&(key.0.to_string(), key.1.to_string()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut out = Self::default();
        for record in io::records(text, source, 3) {
            let (line, f) = record?;
            let v: f64 = io::parse_field(source, line, f[2], "similarity")?;
            if !v.is_finite() {
                return Err(io::parse_error(source, line, "non-finite similarity"));
            }
            let key = if f[0] <= f[1] { (f[0], f[1]) } else { (f[1], f[0]) };
            match out.scores.insert((key.0.to_string(), key.1.to_string()), v) {
                Some(prev) if prev != v => {
                    return Err(io::parse_error(
                        source,
                        line,
                        format!("{}/{} already scored {prev}", f[0], f[1]),
                    ))
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&io::read_file(path)?, &io::source_name(path))
    }
}

/// Similarity matrix over the global concept list.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffStore {
    concepts: Vec<String>,
    index: HashMap<String, usize>,
    z: Vec<f64>,
    provider: Provider,
    failures: usize,
}

impl PayoffStore {
    /// Wraps an explicit row-major `c x c` matrix. The matrix need not be
    /// symmetric, which allows arbitrary normal-form games; providers built
    /// through [`build_payoff_store`] always are.
    pub fn from_matrix(concepts: Vec<String>, z: Vec<f64>) -> Result<Self> {
        let c = concepts.len();
        if z.len() != c * c {
            return Err(Error::Shape(format!("{} entries for {c} concepts", z.len())));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("payoff entries must be finite".into()));
        }
        let index = index_of(&concepts)?;
        Ok(Self {
            concepts,
            index,
            z,
            provider: Provider::Precomputed,
            failures: 0,
        })
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn provider(&self) -> Provider {
        self.provider
    }

    /// Number of concept pairs whose provider lookup failed and was scored 0.
    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.z[a * self.concepts.len() + b]
    }

    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        let ia = self.index(a).ok_or_else(|| Error::UnknownConcept(a.to_string()))?;
        let ib = self.index(b).ok_or_else(|| Error::UnknownConcept(b.to_string()))?;
        Ok(self.value(ia, ib))
    }

    pub fn is_symmetric(&self) -> bool {
        let c = self.concepts.len();
        (0..c).all(|a| (0..a).all(|b| self.value(a, b) == self.value(b, a)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            z: self.z.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Upper-triangle `concept_a<TAB>concept_b<TAB>similarity` lines, nonzero only.
    pub fn to_precomputed(&self) -> String {
        let mut out = String::new();
        let c = self.concepts.len();
        for a in 0..c {
            for b in a + 1..c {
                let v = self.value(a, b);
                if v != 0.0 {
                    writeln!(out, "{}\t{}\t{v}", self.concepts[a], self.concepts[b]).unwrap();
                }
            }
        }
        out
    }
}

fn index_of(concepts: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(concepts.len());
    for (i, c) in concepts.iter().enumerate() {
        if index.insert(c.clone(), i).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate concept {c}")));
        }
    }
    Ok(index)
}

/// Scores every pair of distinct concepts once. Failed lookups score 0 and
/// are counted in [`PayoffStore::failures`]. The diagonal is 0.
pub fn build_payoff_store(concepts: &[String], source: SimilaritySource<'_>) -> Result<PayoffStore> {
    let c = concepts.len();
    let index = index_of(concepts)?;
    let rows: Vec<(Vec<f64>, usize)> = (0..c)
        .into_par_iter()
        .map(|a| {
            let mut failures = 0;
            let row = (a + 1..c)
                .map(|b| match source.similarity(&concepts[a], &concepts[b]) {
                    Ok(v) if v.is_finite() => v,
                    _ => {
                        failures += 1;
                        0.0
                    }
                })
                .collect();
            (row, failures)
        })
        .collect();

    let mut z = vec![0.0; c * c];
    let mut failures = 0;
    for (a, (row, f)) in rows.into_iter().enumerate() {
        failures += f;
        for (offset, v) in row.into_iter().enumerate() {
            let b = a + 1 + offset;
            z[a * c + b] = v;
            z[b * c + a] = v;
        }
    }
    Ok(PayoffStore {
        concepts: concepts.to_vec(),
        index,
        z,
        provider: source.provider(),
        failures,
    })
}

/// The `|mi| x |mj|` slice `z[mi[h], mj[k]]`.
pub fn partial_payoff(store: &PayoffStore, mi: &[String], mj: &[String]) -> Result<Vec<Vec<f64>>> {
    let lookup = |ids: &[String]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| store.index(id).ok_or_else(|| Error::UnknownConcept(id.clone())))
            .collect()
    };
    let (rows, cols) = (lookup(mi)?, lookup(mj)?);
    Ok(rows
        .iter()
        .map(|&a| cols.iter().map(|&b| store.value(a, b)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    // root(1) -> mid(2) -> {left(3), right(3)}; root -> other(2); island(1)
    fn taxonomy() -> Taxonomy {
        Taxonomy::parse(
            "root\t1\t0.5\t-\nmid\t2\t1\troot\nleft\t3\t3\tmid\nright\t3\t4\tmid\nother\t2\t2\troot\nisland\t1\t-\t\n",
            "tax",
        )
        .unwrap()
    }

    #[test]
    fn wup_values() {
        let tax = taxonomy();
        assert_eq!(wup("left", "left", &tax).unwrap(), 1.0);
        assert!((wup("left", "right", &tax).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert!((wup("left", "other", &tax).unwrap() - 2.0 / 5.0).abs() < 1e-15);
        assert!(matches!(wup("left", "island", &tax), Err(Error::NoCommonAncestor(..))));
        assert!(matches!(wup("left", "ghost", &tax), Err(Error::UnknownConcept(_))));
    }

    #[test]
    fn jcn_values() {
        let tax = taxonomy();
        assert_eq!(jcn("left", "left", &tax).unwrap(), 0.0);
        assert_eq!(jcn("left", "right", &tax).unwrap(), 5.0);
        assert!(matches!(jcn("island", "island", &tax), Err(Error::MissingIc(_))));
        assert!((jcn_inverted(0.0) - JCN_CAP).abs() < 1e-3);
        assert!((jcn_inverted(5.0) - 0.2).abs() < 1e-9);
    }

    #[test]
    fn multiple_parents() {
        let tax = Taxonomy::parse(
            "r\t1\t0\t-\na\t2\t1\tr\nb\t2\t1\tr\nc\t3\t2\ta\nc\t3\t2\tb\nd\t3\t2\tb\n",
            "t",
        )
        .unwrap();
        assert_eq!(tax.msa("c", "d"), Some("b"));
        assert!(Taxonomy::parse("a\t1\t0\t-\na\t2\t0\t-\n", "t").is_err());
        assert!(Taxonomy::parse("a\t0\t0\t-\n", "t").is_err());
    }

    #[test]
    fn raw_gloss_counts() {
        let glosses = parse_glosses("c1\ta b b\n", "g").unwrap();
        let v = build_gloss_vectors(&glosses, &BTreeMap::new(), TermWeighting::Raw);
        assert_eq!(v["c1"], GlossVector::from_pairs([("a", 1.0), ("b", 2.0)]));
    }

    #[test]
    fn super_gloss_includes_related_terms() {
        let glosses = parse_glosses("c1\tsloping land\nc2\triver water\n", "g").unwrap();
        let rel = parse_relations("c1\tc2\n", "r").unwrap();
        let v = build_gloss_vectors(&glosses, &rel, TermWeighting::Raw);
        let terms: Vec<&str> = v["c1"].0.keys().map(String::as_str).collect();
        assert_eq!(terms, ["land", "river", "sloping", "water"]);
        assert_eq!(v["c2"].0.len(), 2);
    }

    #[test]
    fn tfidf_zeroes_ubiquitous_terms() {
        let glosses = parse_glosses("c1\tthe river\nc2\tthe bank\nc3\tthe money bank\n", "g").unwrap();
        let v = build_gloss_vectors(&glosses, &BTreeMap::new(), TermWeighting::TfIdf);
        assert_eq!(v["c1"].get("the"), 0.0);
        assert!((v["c3"].get("money") - 3f64.ln()).abs() < 1e-15);
        // c1 shares only "the" with the others
        assert_eq!(cosine(&v["c1"], &v["c2"]), 0.0);
        let raw = build_gloss_vectors(&glosses, &BTreeMap::new(), TermWeighting::Raw);
        assert!(cosine(&raw["c1"], &raw["c2"]) > 0.0);
    }

    #[test]
    fn cosine_values() {
        let a = GlossVector::from_pairs([("a", 1.0), ("b", 1.0)]);
        let b = GlossVector::from_pairs([("a", 1.0)]);
        let c = GlossVector::from_pairs([("z", 2.0)]);
        assert!((cosine(&a, &b) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((cosine(&a, &a) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&a, &c), 0.0);
        assert_eq!(cosine(&a, &GlossVector::default()), 0.0);
    }

    #[test]
    fn gloss_store_matches_pairwise_cosines() {
        let glosses = parse_glosses("x\tland by water\ny\tflowing water\nz\tmoney deposit\n", "g").unwrap();
        let v = build_gloss_vectors(&glosses, &BTreeMap::new(), TermWeighting::Raw);
        let c = ids(&["x", "y", "z"]);
        let store = build_payoff_store(
            &c,
            SimilaritySource::Gloss {
                vectors: &v,
                weighting: TermWeighting::Raw,
            },
        )
        .unwrap();
        assert_eq!(store.provider(), Provider::GlossCosineRaw);
        assert!(store.is_symmetric());
        for a in &c {
            for b in &c {
                let expected = if a == b { 0.0 } else { cosine(&v[a], &v[b]) };
                assert_eq!(store.get(a, b).unwrap(), expected);
            }
        }
    }

    #[test]
    fn provider_failures_score_zero() {
        let tax = taxonomy();
        let store =
            build_payoff_store(&ids(&["left", "right", "island", "ghost"]), SimilaritySource::Wup(&tax)).unwrap();
        assert_eq!(store.get("left", "island").unwrap(), 0.0);
        assert_eq!(store.get("left", "ghost").unwrap(), 0.0);
        assert_eq!(store.failures(), 5);
        let single = build_payoff_store(&ids(&["left"]), SimilaritySource::Wup(&tax)).unwrap();
        assert_eq!(single.get("left", "left").unwrap(), 0.0);
    }

    #[test]
    fn precomputed_round_trip() {
        let glosses = parse_glosses("x\tland by water\ny\tflowing water by land\nz\tmoney by deposit\n", "g").unwrap();
        let v = build_gloss_vectors(&glosses, &BTreeMap::new(), TermWeighting::TfIdf);
        let c = ids(&["x", "y", "z"]);
        let store = build_payoff_store(
            &c,
            SimilaritySource::Gloss {
                vectors: &v,
                weighting: TermWeighting::TfIdf,
            },
        )
        .unwrap();
        let scores = PrecomputedScores::parse(&store.to_precomputed(), "z").unwrap();
        let back = build_payoff_store(&c, SimilaritySource::Precomputed(&scores)).unwrap();
        assert_eq!(back.z, store.z);
        assert!(PrecomputedScores::parse("a\tb\t1\nb\ta\t2\n", "z").is_err());
    }

    #[test]
    fn partial_payoff_slices() {
        let c = ids(&["a", "b", "c"]);
        let z = vec![0.0, 0.1, 0.2, 0.1, 0.0, 0.3, 0.2, 0.3, 0.0];
        let store = PayoffStore::from_matrix(c.clone(), z).unwrap();
        let full = partial_payoff(&store, &c, &c).unwrap();
        assert_eq!(
            full,
            vec![vec![0.0, 0.1, 0.2], vec![0.1, 0.0, 0.3], vec![0.2, 0.3, 0.0]]
        );
        let slice = partial_payoff(&store, &ids(&["c", "a"]), &c).unwrap();
        assert_eq!(slice.len(), 2);
        assert_eq!(slice[0][1], store.get("c", "b").unwrap());
        assert!(matches!(
            partial_payoff(&store, &ids(&["q"]), &c),
            Err(Error::UnknownConcept(_))
        ));
    }

    proptest! {
        #[test]
        fn partial_payoff_transposes(
            vals in proptest::collection::vec(0.0f64..1.0, 36),
            mi in proptest::collection::vec(0usize..6, 1..5),
            mj in proptest::collection::vec(0usize..6, 1..5),
        ) {
            let c: Vec<String> = (0..6).map(|i| format!("c{i}")).collect();
            let mut z = vec![0.0; 36];
            for a in 0..6 {
                for b in a + 1..6 {
                    z[a * 6 + b] = vals[a * 6 + b];
                    z[b * 6 + a] = vals[a * 6 + b];
                }
            }
            let store = PayoffStore::from_matrix(c.clone(), z).unwrap();
            let mi: Vec<String> = mi.into_iter().map(|i| c[i].clone()).collect();
            let mj: Vec<String> = mj.into_iter().map(|i| c[i].clone()).collect();
            let ij = partial_payoff(&store, &mi, &mj).unwrap();
            let ji = partial_payoff(&store, &mj, &mi).unwrap();
            for h in 0..mi.len() {
                for k in 0..mj.len() {
                    prop_assert_eq!(ij[h][k], ji[k][h]);
                }
            }
            prop_assert_eq!(ij, partial_payoff(&store, &mi, &mj).unwrap());
        }

        #[test]
        fn gloss_similarity_in_unit_range(
            words in proptest::collection::vec(proptest::collection::vec(0usize..8, 1..6), 2..6),
        ) {
            let vocab = ["land", "river", "money", "bank", "water", "slope", "fund", "the"];
            let text: String = words
                .iter()
                .enumerate()
                .map(|(i, ws)| format!("c{i}\t{}\n", ws.iter().map(|&w| vocab[w]).collect::<Vec<_>>().join(" ")))
                .collect();
            let glosses = parse_glosses(&text, "g").unwrap();
            let concepts: Vec<String> = glosses.keys().cloned().collect();
            for weighting in [TermWeighting::Raw, TermWeighting::TfIdf] {
                let v = build_gloss_vectors(&glosses, &BTreeMap::new(), weighting);
                let store = build_payoff_store(&concepts, SimilaritySource::Gloss { vectors: &v, weighting }).unwrap();
                prop_assert!(store.is_symmetric());
                for a in &concepts {
                    for b in &concepts {
                        let z = store.get(a, b).unwrap();
                        prop_assert!((0.0..=1.0).contains(&z));
                    }
                }
            }
        }
    }
}
