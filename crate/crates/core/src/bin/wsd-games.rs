use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wsd_games::contingency::{self, AssociationMeasure, ContingencyTable, CountStore};
use wsd_games::demo;
use wsd_games::eval::{self, GoldStandard};
use wsd_games::graph;
use wsd_games::pipeline::{self, PipelineConfig};
use wsd_games::senses::{self, SenseInventory};
use wsd_games::Error;

#[derive(Parser)]
#[command(
    name = "wsd-games",
    version,
    about = "Word sense disambiguation with replicator dynamics"
)]
struct Cli {
    /// Flat `key = value` configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write per-iteration strategy probabilities here.
    #[arg(long, global = true)]
    trajectory: Option<PathBuf>,

    /// Policy for words whose strategies never moved (`none` or `first-sense`).
    #[arg(long, global = true)]
    fallback: Option<String>,

    /// Worker threads per replicator step (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score word pairs with an association measure.
    Assoc(AssocArgs),
    /// Build the player graph and emit it as an upper-triangle edge list.
    BuildGraph {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Output file (stdout if omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the full pipeline and write per-instance answers.
    Disambiguate {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Answer every word with its first-ranked sense instead of playing the game.
        #[arg(long)]
        mfs: bool,
    },
    /// Score an answers file against a gold standard.
    Score {
        #[arg(long)]
        answers: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Occurrence file, for a per-POS breakdown.
        #[arg(long)]
        occurrences: Option<PathBuf>,
    },
    /// Run the repeated prisoner's dilemma and print its trajectory.
    DemoPd {
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-10)]
        epsilon: f64,
    },
}

#[derive(Args)]
struct AssocArgs {
    #[arg(long)]
    counts: Option<PathBuf>,
    #[arg(long)]
    unigrams: Option<PathBuf>,
    /// dice, mdice, pmi, t-score, z-score, odds-r, chi-s, chi-s-c
    #[arg(long, default_value = "mdice")]
    measure: String,
    /// Score a single table given as `o11,r1,c1,n`.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args, Default)]
struct PipelineArgs {
    #[arg(long)]
    occurrences: Option<String>,
    #[arg(long)]
    counts: Option<String>,
    #[arg(long)]
    unigrams: Option<String>,
    #[arg(long)]
    inventory: Option<String>,
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    glosses: Option<String>,
    #[arg(long)]
    relations: Option<String>,
    #[arg(long)]
    taxonomy: Option<String>,
    #[arg(long)]
    precomputed: Option<String>,
    #[arg(long)]
    gold: Option<String>,
    #[arg(long)]
    stopwords: Option<String>,
    #[arg(long)]
    alternatives: Option<String>,
    /// Use this edge list as the player graph.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    measure: Option<String>,
    /// wup, jcn, gloss-tfidf, gloss-raw, precomputed
    #[arg(long)]
    provider: Option<String>,
    /// Proximity window in content words (0 disables).
    #[arg(long)]
    ngram: Option<String>,
    /// uniform, geometric, clustered
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    jcn_inverted: Option<String>,
    #[arg(long)]
    answers: Option<String>,
    #[arg(long)]
    report: Option<String>,
}

impl PipelineArgs {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("occurrences", &self.occurrences),
            ("counts", &self.counts),
            ("unigrams", &self.unigrams),
            ("inventory", &self.inventory),
            ("clusters", &self.clusters),
            ("glosses", &self.glosses),
            ("relations", &self.relations),
            ("taxonomy", &self.taxonomy),
            ("precomputed", &self.precomputed),
            ("gold", &self.gold),
            ("stopwords", &self.stopwords),
            ("alternatives", &self.alternatives),
            ("graph", &self.graph),
            ("measure", &self.measure),
            ("provider", &self.provider),
            ("ngram", &self.ngram),
            ("init", &self.init),
            ("p", &self.p),
            ("max_iterations", &self.max_iterations),
            ("epsilon", &self.epsilon),
            ("jcn_inverted", &self.jcn_inverted),
            ("answers", &self.answers),
            ("report", &self.report),
        ]
    }
}

fn pipeline_config(cli: &Cli, args: &PipelineArgs) -> Result<PipelineConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    let here = Path::new(".");
    for (key, value) in args.pairs() {
        if let Some(v) = value {
            cfg.set(key, v, here)?;
        }
    }
    if let Some(path) = &cli.trajectory {
        cfg.trajectory = Some(path.clone());
    }
    if let Some(f) = &cli.fallback {
        cfg.set("fallback", f, here)?;
    }
    if let Some(w) = cli.workers {
        cfg.dynamics.workers = w;
    }
    Ok(cfg)
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn assoc(args: &AssocArgs) -> Result<(), Error> {
    let measure: AssociationMeasure = args.measure.parse()?;
    if let Some(table) = &args.table {
        let nums: Vec<u64> = table
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("--table expects o11,r1,c1,n, got {table:?}")))?;
        let [o11, r1, c1, n] = nums[..] else {
            return Err(Error::InvalidParameter(format!(
                "--table expects 4 counts, got {}",
                nums.len()
            )));
        };
        let t = ContingencyTable::from_counts(o11, r1, c1, n)?;
        println!("{}", contingency::score(&t, measure)?);
        return Ok(());
    }
    let (Some(counts), Some(unigrams)) = (&args.counts, &args.unigrams) else {
        return Err(Error::Config(
            "assoc needs --table, or both --counts and --unigrams".into(),
        ));
    };
    let store = CountStore::load(unigrams, counts)?;
    let mut out = String::new();
    for (a, b, _) in store.pairs() {
        if let Some(s) = store.pair_score(a, b, measure) {
            out.push_str(&format!("{a}\t{b}\t{s}\n"));
        }
    }
    print!("{out}");
    Ok(())
}

fn disambiguate(cli: &Cli, args: &PipelineArgs, mfs: bool) -> Result<(), Error> {
    let cfg = pipeline_config(cli, args)?;
    if mfs {
        let occurrences = graph::load_occurrences(
            cfg.occurrences
                .as_deref()
                .ok_or_else(|| Error::Config("missing required `occurrences` path".into()))?,
        )?;
        let inventory = SenseInventory::load(
            cfg.inventory
                .as_deref()
                .ok_or_else(|| Error::Config("missing required `inventory` path".into()))?,
        )?;
        let answers = eval::mfs_baseline(&occurrences, &inventory);
        let report = cfg
            .gold
            .as_deref()
            .map(GoldStandard::load)
            .transpose()?
            .map(|g| eval::score(&answers, &g))
            .transpose()?;
        write_or_print(cfg.answers.as_deref(), &eval::format_answers(&answers))?;
        if let Some(report) = report {
            if let Some(path) = &cfg.report {
                write_or_print(Some(path), &report.to_tsv())?;
            }
            eprint!("{report}");
        }
        return Ok(());
    }

    let run = pipeline::run_pipeline(&cfg)?;
    pipeline::write_outputs(&cfg, &run)?;
    if cfg.answers.is_none() {
        print!("{}", eval::format_answers(&run.answers));
    }
    let dropped = run.prepared.dropped.len();
    eprintln!(
        "{} players, {} concepts, {} iterations ({})",
        run.prepared.players.len(),
        run.initial.concepts().len(),
        run.outcome.iterations,
        if run.outcome.converged {
            "converged"
        } else {
            "not converged"
        }
    );
    if dropped > 0 {
        eprintln!("{dropped} words had no sense inventory and were left unanswered");
    }
    if run.payoffs.failures() > 0 {
        eprintln!(
            "{} concept pairs could not be scored and were set to 0",
            run.payoffs.failures()
        );
    }
    if let Some(report) = &run.report {
        eprint!("{report}");
    }
    Ok(())
}

fn score(answers: &Path, gold: &Path, occurrences: Option<&Path>) -> Result<(), Error> {
    let mut answers = eval::load_answers(answers)?;
    let gold = GoldStandard::load(gold)?;
    if let Some(path) = occurrences {
        let occ = graph::load_occurrences(path)?;
        for a in &mut answers {
            a.pos = occ
                .iter()
                .find(|o| o.instance_id == a.instance_id)
                .map(|o| o.pos.clone());
        }
    }
    let report = eval::score(&answers, &gold)?;
    print!("{}", report.to_tsv());
    eprint!("{report}");
    Ok(())
}

fn demo_pd(cli: &Cli, max_iterations: usize, epsilon: f64) -> Result<(), Error> {
    let outcome = demo::run_prisoners_dilemma(max_iterations, epsilon)?;
    println!("iteration\tconfess\tdont-confess");
    for (t, state) in outcome.trajectory.iter().enumerate() {
        println!(
            "{t}\t{:.6}\t{:.6}",
            state.get(0, demo::CONFESS),
            state.get(0, demo::COOPERATE)
        );
    }
    eprintln!(
        "payoffs are all negative: the discrete ratio update favors cooperation, \
         unlike the continuous replicator equation"
    );
    if let Some(path) = &cli.trajectory {
        let mut buf = Vec::new();
        outcome
            .write_trajectory(&mut buf)
            .and_then(|_| fs::write(path, &buf))
            .map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
    }
    Ok(())
}

fn build_graph(cli: &Cli, args: &PipelineArgs, output: Option<&Path>) -> Result<(), Error> {
    let cfg = pipeline_config(cli, args)?;
    let prepared = pipeline::prepare_graph(&cfg)?;
    // keep the game players aligned with what `disambiguate --graph` will load
    debug_assert_eq!(
        senses::partition_known(&prepared.occurrences, &prepared.inventory).0,
        prepared.players
    );
    write_or_print(output, &prepared.graph.to_edge_list())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Assoc(args) => assoc(args),
        Command::BuildGraph { pipeline, output } => build_graph(&cli, pipeline, output.as_deref()),
        Command::Disambiguate { pipeline, mfs } => disambiguate(&cli, pipeline, *mfs),
        Command::Score {
            answers,
            gold,
            occurrences,
        } => score(answers, gold, occurrences.as_deref()),
        Command::DemoPd {
            max_iterations,
            epsilon,
        } => demo_pd(&cli, *max_iterations, *epsilon),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
