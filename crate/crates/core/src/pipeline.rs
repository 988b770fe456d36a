//! End-to-end disambiguation from resource files.
//!
//! The steps run in order: read the target words, weight the player graph
//! from co-occurrence counts, add proximity edges, collect the concept list,
//! initialize the strategies, build the sense-similarity payoffs, run the
//! dynamics, and label every word.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::contingency::{AssociationMeasure, CountStore};
use crate::dynamics::{Fallback, Game, GameConfig, GameOutcome};
use crate::error::{Error, Result};
use crate::eval::{self, Answer, GoldStandard, ScoreReport};
use crate::graph::{self, NgramPolicy, Occurrence, WordGraph};
use crate::io;
use crate::payoff::{self, PayoffStore, PrecomputedScores, Provider, SimilaritySource, Taxonomy, TermWeighting};
use crate::senses::{self, Initialization, SenseInventory, StrategyState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitKind {
    #[default]
    Uniform,
    Geometric,
    Clustered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub occurrences: Option<PathBuf>,
    pub counts: Option<PathBuf>,
    pub unigrams: Option<PathBuf>,
    pub inventory: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
    pub glosses: Option<PathBuf>,
    pub relations: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub precomputed: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub alternatives: Option<PathBuf>,
    /// A finished player graph (edge list); skips graph construction.
    pub graph: Option<PathBuf>,
    pub measure: AssociationMeasure,
    pub provider: Provider,
    pub ngram: usize,
    pub init: InitKind,
    /// Geometric parameter for the geometric and clustered initializations.
    pub p: f64,
    pub jcn_inverted: bool,
    pub dynamics: GameConfig,
    pub trajectory: Option<PathBuf>,
    pub answers: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            occurrences: None,
            counts: None,
            unigrams: None,
            inventory: None,
            clusters: None,
            glosses: None,
            relations: None,
            taxonomy: None,
            precomputed: None,
            gold: None,
            stopwords: None,
            alternatives: None,
            graph: None,
            measure: AssociationMeasure::MDice,
            provider: Provider::GlossCosineTfidf,
            ngram: 5,
            init: InitKind::Uniform,
            p: 0.4,
            jcn_inverted: false,
            dynamics: GameConfig::default(),
            trajectory: None,
            answers: None,
            report: None,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn required<'a>(path: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("missing required `{key}` path")))
}

impl PipelineConfig {
    pub fn initialization(&self) -> Initialization {
        match self.init {
            InitKind::Uniform => Initialization::Uniform,
            InitKind::Geometric => Initialization::Geometric { p: self.p },
            InitKind::Clustered => Initialization::Clustered { p: self.p },
        }
    }

    /// Sets one option. Relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim();
        let path = || Some(base.join(value));
        match key.as_str() {
            "occurrences" => self.occurrences = path(),
            "counts" => self.counts = path(),
            "unigrams" => self.unigrams = path(),
            "inventory" => self.inventory = path(),
            "clusters" => self.clusters = path(),
            "glosses" => self.glosses = path(),
            "relations" => self.relations = path(),
            "taxonomy" => self.taxonomy = path(),
            "precomputed" => self.precomputed = path(),
            "gold" => self.gold = path(),
            "stopwords" => self.stopwords = path(),
            "alternatives" => self.alternatives = path(),
            "graph" => self.graph = path(),
            "trajectory" => self.trajectory = path(),
            "answers" => self.answers = path(),
            "report" => self.report = path(),
            "measure" => self.measure = value.parse()?,
            "provider" => self.provider = value.parse()?,
            "ngram" | "n" => self.ngram = parse_num(&key, value)?,
            "init" => {
                self.init = match value.to_ascii_lowercase().as_str() {
                    "uniform" => InitKind::Uniform,
                    "geometric" => InitKind::Geometric,
                    "clustered" => InitKind::Clustered,
                    other => return Err(Error::Config(format!("init: unknown initialization {other:?}"))),
                }
            }
            "p" => self.p = parse_num(&key, value)?,
            "max_iterations" => self.dynamics.max_iterations = parse_num(&key, value)?,
            "epsilon" => self.dynamics.epsilon = parse_num(&key, value)?,
            "workers" => self.dynamics.workers = parse_num(&key, value)?,
            "fallback" => {
                self.dynamics.fallback = match value.to_ascii_lowercase().replace('_', "-").as_str() {
                    "none" => Fallback::None,
                    "first-sense" => Fallback::FirstSense,
                    other => return Err(Error::Config(format!("fallback: unknown policy {other:?}"))),
                }
            }
            "jcn_inverted" => self.jcn_inverted = parse_bool(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. Blank lines and `#` comments are
    /// skipped; relative paths resolve against the file's directory.
    pub fn apply_text(&mut self, text: &str, source: &str, base: &Path) -> Result<()> {
        for line in io::lines(text).filter(|l| !l.text.trim_start().starts_with('#')) {
            let (key, value) = line
                .text
                .split_once('=')
                .ok_or_else(|| io::parse_error(source, line.number, "expected `key = value`"))?;
            self.set(key, value, base)
                .map_err(|e| io::parse_error(source, line.number, e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = io::read_file(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        self.apply_text(&text, &io::source_name(path), base)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }
}

/// Target words and the player graph, before any sense information is used.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    /// Every occurrence in file order.
    pub occurrences: Vec<Occurrence>,
    pub inventory: SenseInventory,
    /// Occurrences with a sense inventory; these are the players.
    pub players: Vec<Occurrence>,
    /// Indices into `occurrences` of words left out for lack of an inventory.
    pub dropped: Vec<usize>,
    pub graph: WordGraph,
}

/// Loads everything the graph needs and builds (or reads) it.
pub fn prepare_graph(cfg: &PipelineConfig) -> Result<PreparedGraph> {
    let occurrences = graph::load_occurrences(required(&cfg.occurrences, "occurrences")?)?;
    let mut inventory = SenseInventory::load(required(&cfg.inventory, "inventory")?)?;
    if let Some(path) = &cfg.clusters {
        inventory.load_clusters(path)?;
    }
    let (players, dropped) = senses::partition_known(&occurrences, &inventory);

    let graph = match &cfg.graph {
        Some(path) => WordGraph::from_edge_list(players.clone(), &io::read_file(path)?, &io::source_name(path))?,
        None => {
            let counts = CountStore::load(required(&cfg.unigrams, "unigrams")?, required(&cfg.counts, "counts")?)?;
            let keys = match &cfg.alternatives {
                Some(path) => expanded_keys(&players, &counts, &graph::load_alternatives(path)?),
                None => players.iter().map(|p| p.lemma.clone()).collect(),
            };
            let stopwords = match &cfg.stopwords {
                Some(path) => graph::load_stopwords(path)?,
                None => Default::default(),
            };
            let key_refs: Vec<&str> = keys.iter().map(String::as_str).collect();
            let base = graph::build_word_graph_with_keys(&players, &key_refs, &counts, cfg.measure);
            graph::augment_with_ngram(&base, &NgramPolicy::new(cfg.ngram).with_stopwords(stopwords))
        }
    };
    Ok(PreparedGraph {
        occurrences,
        inventory,
        players,
        dropped,
        graph,
    })
}

/// Lookup key per player: its lemma, or the best alternative lexicalization
/// when the lemma is unknown to the count store. Context is the other
/// lemmas of the same document.
fn expanded_keys(
    players: &[Occurrence],
    counts: &CountStore,
    alternatives: &BTreeMap<String, Vec<String>>,
) -> Vec<String> {
    players
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let context: Vec<String> = players
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && q.doc_id == p.doc_id)
                .map(|(_, q)| q.lemma.clone())
                .collect();
            let alts = alternatives.get(&p.lemma).map(Vec::as_slice).unwrap_or(&[]);
            graph::expand_query(&p.lemma, alts, counts, &context).unwrap_or_else(|_| p.lemma.clone())
        })
        .collect()
}

fn build_payoffs(cfg: &PipelineConfig, concepts: &[String]) -> Result<PayoffStore> {
    match cfg.provider {
        Provider::Wup | Provider::Jcn => {
            let tax = Taxonomy::load(required(&cfg.taxonomy, "taxonomy")?)?;
            let source = if cfg.provider == Provider::Wup {
                SimilaritySource::Wup(&tax)
            } else {
                SimilaritySource::Jcn {
                    taxonomy: &tax,
                    inverted: cfg.jcn_inverted,
                }
            };
            payoff::build_payoff_store(concepts, source)
        }
        Provider::GlossCosineTfidf | Provider::GlossCosineRaw => {
            let glosses = payoff::load_glosses(required(&cfg.glosses, "glosses")?)?;
            let relations = match &cfg.relations {
                Some(path) => payoff::load_relations(path)?,
                None => BTreeMap::new(),
            };
            let weighting = if cfg.provider == Provider::GlossCosineTfidf {
                TermWeighting::TfIdf
            } else {
                TermWeighting::Raw
            };
            let vectors = payoff::build_gloss_vectors(&glosses, &relations, weighting);
            payoff::build_payoff_store(
                concepts,
                SimilaritySource::Gloss {
                    vectors: &vectors,
                    weighting,
                },
            )
        }
        Provider::Precomputed => {
            let scores = PrecomputedScores::load(required(&cfg.precomputed, "precomputed")?)?;
            payoff::build_payoff_store(concepts, SimilaritySource::Precomputed(&scores))
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub prepared: PreparedGraph,
    pub initial: StrategyState,
    pub payoffs: PayoffStore,
    pub outcome: GameOutcome,
    /// One answer per occurrence, in file order.
    pub answers: Vec<Answer>,
    pub report: Option<ScoreReport>,
}

/// Runs every step and scores the answers when a gold file is configured.
/// Nothing is written to disk; see [`write_outputs`].
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.dynamics.validate()?;
    let prepared = prepare_graph(cfg)?;
    let gold = cfg.gold.as_deref().map(GoldStandard::load).transpose()?;

    let initial = senses::initialize(&prepared.inventory, &prepared.players, cfg.initialization())?;
    let payoffs = build_payoffs(cfg, initial.concepts())?;
    let mut dynamics = cfg.dynamics.clone();
    dynamics.record_trajectory |= cfg.trajectory.is_some();
    let outcome = Game::new(&prepared.graph, &payoffs, initial.concepts())?.run(&initial, &dynamics)?;

    let mut by_player = eval::answers_from_outcome(&prepared.players, &outcome).into_iter();
    let answers = prepared
        .occurrences
        .iter()
        .enumerate()
        .map(|(i, occ)| {
            if prepared.dropped.binary_search(&i).is_ok() {
                Answer {
                    instance_id: occ.instance_id.clone(),
                    pos: Some(occ.pos.clone()),
                    concept: None,
                }
            } else {
                by_player.next().expect("one answer per player")
            }
        })
        .collect::<Vec<_>>();
    let report = gold.as_ref().map(|g| eval::score(&answers, g)).transpose()?;
    Ok(PipelineRun {
        prepared,
        initial,
        payoffs,
        outcome,
        answers,
        report,
    })
}

/// Writes the answers, report, and trajectory files named in the config.
pub fn write_outputs(cfg: &PipelineConfig, run: &PipelineRun) -> Result<()> {
    if let Some(path) = &cfg.answers {
        io::write_file(path, &eval::format_answers(&run.answers))?;
    }
    if let (Some(path), Some(report)) = (&cfg.report, &run.report) {
        io::write_file(path, &report.to_tsv())?;
    }
    if let Some(path) = &cfg.trajectory {
        let io_err = |source| Error::Io {
            path: path.clone(),
            source,
        };
        let file = File::create(path).map_err(io_err)?;
        run.outcome.write_trajectory(BufWriter::new(file)).map_err(io_err)?;
    }
    Ok(())
}
