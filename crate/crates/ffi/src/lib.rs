//! C ABI over the `wsd-games` engine.
//!
//! Every fallible call returns a [`WsdStatus`]; on failure the message is
//! available from [`wsd_last_error_message`] on the same thread until the
//! next failing call. Handles are opaque and must be released with their
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wsd_games::contingency::{self, AssociationMeasure, ContingencyTable};
use wsd_games::dynamics::{Fallback, Game, GameConfig, GameOutcome};
use wsd_games::graph::WordGraph;
use wsd_games::payoff::PayoffStore;
use wsd_games::pipeline::{self, PipelineConfig};
use wsd_games::senses::{self, StrategyState};
use wsd_games::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Undefined = 5,
    Shape = 6,
    NotFound = 7,
    Panic = 99,
}

/// How a player's strategy row starts.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsdInit {
    Uniform = 0,
    /// `p (1-p)^rank`, normalized, in the order the columns were given.
    Geometric = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsdRunOptions {
    pub max_iterations: usize,
    pub epsilon: f64,
    /// 1 runs serially, 0 uses every core.
    pub workers: usize,
    /// Assign the first column to players that never updated instead of
    /// leaving them unanswered.
    pub fallback_first_sense: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsdPipelineSummary {
    pub players: usize,
    pub dropped: usize,
    pub iterations: usize,
    pub converged: bool,
    pub answered: usize,
    pub total: usize,
    /// Percent; NaN when no gold file is configured.
    pub f1: f64,
}

/// A game under construction: players, concept columns, weights, payoffs,
/// and per-player starting rows.
pub struct WsdGame {
    graph: WordGraph,
    concepts: Vec<String>,
    z: Vec<f64>,
    rows: Vec<Option<(Vec<usize>, Vec<f64>)>>,
}

pub struct WsdOutcome(GameOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> WsdStatus {
    match err {
        Error::Parse { .. } | Error::Config(_) => WsdStatus::Parse,
        Error::Io { .. } => WsdStatus::Io,
        Error::UndefinedForTable { .. } | Error::NoCommonAncestor(..) | Error::MissingIc(_) => WsdStatus::Undefined,
        Error::Shape(_) => WsdStatus::Shape,
        Error::UnknownConcept(_)
        | Error::UnknownInstance(_)
        | Error::MissingInventory { .. }
        | Error::MissingClusters { .. }
        | Error::NoAlternativeFound(_) => WsdStatus::NotFound,
        Error::InvalidCounts(_) | Error::InvalidParameter(_) => WsdStatus::InvalidArgument,
    }
}

fn fail(status: WsdStatus, msg: impl Into<String>) -> WsdStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> WsdStatus {
    let status = status_of(&err);
    fail(status, err.to_string())
}

/// Runs `f`, turning a panic into [`WsdStatus::Panic`].
fn guard(f: impl FnOnce() -> WsdStatus) -> WsdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(WsdStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WsdStatus> {
    if p.is_null() {
        return Err(fail(WsdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(WsdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

macro_rules! deref {
    ($ptr:expr, $what:literal) => {
        match $ptr.as_ref() {
            Some(v) => v,
            None => return fail(WsdStatus::NullPointer, concat!($what, " is null")),
        }
    };
    (mut $ptr:expr, $what:literal) => {
        match $ptr.as_mut() {
            Some(v) => v,
            None => return fail(WsdStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

/// Message for the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn wsd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wsd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Defaults: 1000 iterations, epsilon 1e-6, one worker, no fallback.
#[no_mangle]
pub extern "C" fn wsd_run_options_default() -> WsdRunOptions {
    let d = GameConfig::default();
    WsdRunOptions {
        max_iterations: d.max_iterations,
        epsilon: d.epsilon,
        workers: d.workers,
        fallback_first_sense: false,
    }
}

/// Scores the table built from `o11`, `r1`, `c1`, `n` with the named measure
/// (`dice`, `mdice`, `pmi`, `t-score`, `z-score`, `odds-r`, `chi-s`, `chi-s-c`).
///
/// # Safety
/// `measure` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn wsd_association_score(
    o11: u64,
    r1: u64,
    c1: u64,
    n: u64,
    measure: *const c_char,
    out: *mut f64,
) -> WsdStatus {
    guard(|| {
        let out = deref!(mut out, "out");
        let name = match str_arg(measure, "measure") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let result = name
            .parse::<AssociationMeasure>()
            .and_then(|m| contingency::score(&ContingencyTable::from_counts(o11, r1, c1, n)?, m));
        match result {
            Ok(v) => {
                *out = v;
                WsdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// New game with `players` players over `concepts` strategy columns. All
/// weights and payoffs start at 0. Returns null if either count is 0.
#[no_mangle]
pub extern "C" fn wsd_game_new(players: usize, concepts: usize) -> *mut WsdGame {
    if players == 0 || concepts == 0 {
        set_error("a game needs at least one player and one concept");
        return ptr::null_mut();
    }
    let Some(cells) = concepts.checked_mul(concepts) else {
        set_error("too many concepts");
        return ptr::null_mut();
    };
    Box::into_raw(Box::new(WsdGame {
        graph: WordGraph::anonymous(players),
        concepts: (0..concepts).map(|k| format!("c{k}")).collect(),
        z: vec![0.0; cells],
        rows: vec![None; players],
    }))
}

/// # Safety
/// `game` must come from [`wsd_game_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_free(game: *mut WsdGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Sets the symmetric weight between players `i` and `j` (`i != j`).
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_set_weight(game: *mut WsdGame, i: usize, j: usize, weight: f64) -> WsdStatus {
    guard(|| {
        let game = deref!(mut game, "game");
        let n = game.graph.len();
        if i >= n || j >= n {
            return fail(
                WsdStatus::InvalidArgument,
                format!("player index out of range (players: {n})"),
            );
        }
        if i == j {
            return fail(WsdStatus::InvalidArgument, "self-loops are not allowed");
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return fail(
                WsdStatus::InvalidArgument,
                format!("weight must be finite and >= 0, got {weight}"),
            );
        }
        game.graph.set_weight(i, j, weight);
        WsdStatus::Ok
    })
}

/// Sets the payoff of playing column `a` against column `b`. Only this
/// direction is set; call again with the columns swapped for a symmetric
/// game.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_set_payoff(game: *mut WsdGame, a: usize, b: usize, payoff: f64) -> WsdStatus {
    guard(|| {
        let game = deref!(mut game, "game");
        let k = game.concepts.len();
        if a >= k || b >= k {
            return fail(
                WsdStatus::InvalidArgument,
                format!("concept index out of range (concepts: {k})"),
            );
        }
        if !payoff.is_finite() {
            return fail(WsdStatus::InvalidArgument, "payoff must be finite");
        }
        game.z[a * k + b] = payoff;
        WsdStatus::Ok
    })
}

/// Declares the columns player `i` may play, in rank order, and how its row
/// starts. `p` is only read for [`WsdInit::Geometric`].
///
/// # Safety
/// `game` must be a live handle and `columns` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_set_support(
    game: *mut WsdGame,
    player: usize,
    columns: *const usize,
    len: usize,
    init: WsdInit,
    p: f64,
) -> WsdStatus {
    guard(|| {
        let game = deref!(mut game, "game");
        if columns.is_null() {
            return fail(WsdStatus::NullPointer, "columns is null");
        }
        if len == 0 {
            return fail(WsdStatus::InvalidArgument, "a support needs at least one column");
        }
        let cols = std::slice::from_raw_parts(columns, len).to_vec();
        let row = match init {
            WsdInit::Uniform => vec![1.0 / len as f64; len],
            WsdInit::Geometric => match senses::geometric_weights(len, p) {
                Ok(r) => r,
                Err(e) => return from_error(e),
            },
        };
        store_row(game, player, cols, row)
    })
}

/// Declares player `i`'s columns with explicit starting probabilities,
/// which must sum to 1.
///
/// # Safety
/// `game` must be a live handle; `columns` and `probabilities` must each
/// point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_set_strategy(
    game: *mut WsdGame,
    player: usize,
    columns: *const usize,
    probabilities: *const f64,
    len: usize,
) -> WsdStatus {
    guard(|| {
        let game = deref!(mut game, "game");
        if columns.is_null() || probabilities.is_null() {
            return fail(WsdStatus::NullPointer, "columns or probabilities is null");
        }
        if len == 0 {
            return fail(WsdStatus::InvalidArgument, "a support needs at least one column");
        }
        let cols = std::slice::from_raw_parts(columns, len).to_vec();
        let row = std::slice::from_raw_parts(probabilities, len).to_vec();
        store_row(game, player, cols, row)
    })
}

fn store_row(game: &mut WsdGame, player: usize, cols: Vec<usize>, row: Vec<f64>) -> WsdStatus {
    if player >= game.rows.len() {
        return fail(WsdStatus::InvalidArgument, format!("player {player} out of range"));
    }
    // validate now so errors point at the offending call
    let mut supports = vec![vec![0]; game.rows.len()];
    let mut rows = vec![vec![1.0]; game.rows.len()];
    supports[player] = cols.clone();
    rows[player] = row.clone();
    if let Err(e) = StrategyState::from_rows(game.concepts.clone(), supports, &rows) {
        return from_error(e);
    }
    game.rows[player] = Some((cols, row));
    WsdStatus::Ok
}

/// Runs the replicator dynamics. On success `*out` receives a new outcome
/// handle.
///
/// # Safety
/// `game` must be a live handle, `options` readable or null (defaults), and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wsd_game_run(
    game: *const WsdGame,
    options: *const WsdRunOptions,
    out: *mut *mut WsdOutcome,
) -> WsdStatus {
    guard(|| {
        let game = deref!(game, "game");
        let out = deref!(mut out, "out");
        let opts = options.as_ref().copied().unwrap_or_else(|| wsd_run_options_default());
        let mut supports = Vec::with_capacity(game.rows.len());
        let mut rows = Vec::with_capacity(game.rows.len());
        for (i, r) in game.rows.iter().enumerate() {
            match r {
                Some((s, x)) => {
                    supports.push(s.clone());
                    rows.push(x.clone());
                }
                None => return fail(WsdStatus::Shape, format!("player {i} has no support")),
            }
        }
        let cfg = GameConfig {
            max_iterations: opts.max_iterations,
            epsilon: opts.epsilon,
            workers: opts.workers,
            fallback: if opts.fallback_first_sense {
                Fallback::FirstSense
            } else {
                Fallback::None
            },
            ..GameConfig::default()
        };
        let result = StrategyState::from_rows(game.concepts.clone(), supports, &rows).and_then(|state| {
            let payoffs = PayoffStore::from_matrix(game.concepts.clone(), game.z.clone())?;
            Game::new(&game.graph, &payoffs, &game.concepts)?.run(&state, &cfg)
        });
        match result {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(WsdOutcome(outcome)));
                WsdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `outcome` must come from [`wsd_game_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wsd_outcome_free(outcome: *mut WsdOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Iterations performed; 0 for a null handle.
///
/// # Safety
/// `outcome` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wsd_outcome_iterations(outcome: *const WsdOutcome) -> usize {
    outcome.as_ref().map_or(0, |o| o.0.iterations)
}

/// Whether the largest step fell below epsilon; false for a null handle.
///
/// # Safety
/// `outcome` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wsd_outcome_converged(outcome: *const WsdOutcome) -> bool {
    outcome.as_ref().is_some_and(|o| o.0.converged)
}

/// Chosen column of `player`. `*assigned` is false when the player never
/// updated and no fallback was requested; `*column` is then untouched.
///
/// # Safety
/// `outcome` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn wsd_outcome_assignment(
    outcome: *const WsdOutcome,
    player: usize,
    assigned: *mut bool,
    column: *mut usize,
    probability: *mut f64,
) -> WsdStatus {
    guard(|| {
        let outcome = deref!(outcome, "outcome");
        let assigned = deref!(mut assigned, "assigned");
        let column = deref!(mut column, "column");
        let probability = deref!(mut probability, "probability");
        let Some(a) = outcome.0.assignments.get(player) else {
            return fail(WsdStatus::InvalidArgument, format!("player {player} out of range"));
        };
        *assigned = a.column.is_some();
        if let Some(c) = a.column {
            *column = c;
        }
        *probability = a.probability;
        WsdStatus::Ok
    })
}

/// Final probability of `player` playing `column` (0 off its support).
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wsd_outcome_probability(
    outcome: *const WsdOutcome,
    player: usize,
    column: usize,
    out: *mut f64,
) -> WsdStatus {
    guard(|| {
        let outcome = deref!(outcome, "outcome");
        let out = deref!(mut out, "out");
        let state = &outcome.0.state;
        if player >= state.players() || column >= state.concepts().len() {
            return fail(WsdStatus::InvalidArgument, "player or column out of range");
        }
        *out = state.get(player, column);
        WsdStatus::Ok
    })
}

/// Runs the full pipeline described by a `key = value` config file and
/// writes the outputs it names. `answers_path` overrides the config's
/// answers file when non-null. `summary` may be null.
///
/// # Safety
/// String arguments must be NUL-terminated; `summary` writable or null.
#[no_mangle]
pub unsafe extern "C" fn wsd_pipeline_run(
    config_path: *const c_char,
    answers_path: *const c_char,
    summary: *mut WsdPipelineSummary,
) -> WsdStatus {
    guard(|| {
        let config = match str_arg(config_path, "config_path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let mut cfg = match PipelineConfig::from_file(Path::new(config)) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        if !answers_path.is_null() {
            match str_arg(answers_path, "answers_path") {
                Ok(s) => cfg.answers = Some(s.into()),
                Err(status) => return status,
            }
        }
        let run = match pipeline::run_pipeline(&cfg).and_then(|run| pipeline::write_outputs(&cfg, &run).map(|_| run)) {
            Ok(run) => run,
            Err(e) => return from_error(e),
        };
        if let Some(s) = summary.as_mut() {
            *s = WsdPipelineSummary {
                players: run.prepared.players.len(),
                dropped: run.prepared.dropped.len(),
                iterations: run.outcome.iterations,
                converged: run.outcome.converged,
                answered: run.answers.iter().filter(|a| a.concept.is_some()).count(),
                total: run.answers.len(),
                f1: run.report.as_ref().map_or(f64::NAN, |r| r.f1()),
            };
        }
        WsdStatus::Ok
    })
}
