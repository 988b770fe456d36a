//! Discrete replicator dynamics over the player graph.
//!
//! Player `i` plays one game with every neighbor `j` on the graph. The payoff
//! of its pure strategy `h` sums those games:
//!
//! ```text
//! u_i(e^h) = sum_j w_ij (Z_ij x_j)_h
//! u_i(x)   = sum_h x_ih u_i(e^h)
//! ```
//!
//! and one step rescales every strategy by how it fares against the average,
//! `x_ih <- x_ih u_i(e^h) / u_i(x)`. All players read the state of the
//! previous step, so a step is the same for any number of worker threads.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WordGraph;
use crate::payoff::PayoffStore;
use crate::senses::StrategyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// The strategy earliest in the player's rank order wins.
    #[default]
    LowestRank,
}

/// What to do with players the dynamics could not move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    None,
    FirstSense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub max_iterations: usize,
    /// Stop once no strategy probability moves by this much in one step.
    pub epsilon: f64,
    pub tie_break: TieBreak,
    pub fallback: Fallback,
    /// Worker threads per step; 0 uses the rayon default, 1 runs inline.
    pub workers: usize,
    pub record_trajectory: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            epsilon: 1e-6,
            tie_break: TieBreak::LowestRank,
            fallback: Fallback::None,
            workers: 1,
            record_trajectory: false,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// The label a player settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Chosen concept column, `None` when unassigned.
    pub column: Option<usize>,
    pub concept: Option<String>,
    /// Largest probability in the player's final row.
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub assignments: Vec<Assignment>,
    pub iterations: usize,
    pub converged: bool,
    pub state: StrategyState,
    /// States at every iteration, starting with the initial one, when recorded.
    pub trajectory: Vec<StrategyState>,
}

impl GameOutcome {
    pub fn assigned(&self) -> usize {
        self.assignments.iter().filter(|a| a.column.is_some()).count()
    }

    /// `iteration<TAB>player<TAB>concept<TAB>probability`, one line per
    /// support entry of every recorded state.
    pub fn write_trajectory<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (t, state) in self.trajectory.iter().enumerate() {
            let mut buf = String::new();
            for i in 0..state.players() {
                for &col in state.support(i) {
                    writeln!(buf, "{t}\t{i}\t{}\t{}", state.concepts()[col], state.get(i, col)).unwrap();
                }
            }
            out.write_all(buf.as_bytes())?;
        }
        Ok(())
    }
}

/// A graph and a payoff store bound to one concept list.
#[derive(Debug, Clone)]
pub struct Game<'a> {
    payoffs: &'a PayoffStore,
    neighbors: Vec<Vec<(usize, f64)>>,
    /// Store index of each state concept column.
    columns: Vec<usize>,
    concepts: Vec<String>,
}

/// One updated row plus whether any of its strategy payoffs was nonzero.
struct RowUpdate {
    values: Vec<f64>,
    active: bool,
}

impl<'a> Game<'a> {
    pub fn new(graph: &WordGraph, payoffs: &'a PayoffStore, concepts: &[String]) -> Result<Self> {
        let columns = concepts
            .iter()
            .map(|c| payoffs.index(c).ok_or_else(|| Error::UnknownConcept(c.clone())))
            .collect::<Result<Vec<_>>>()?;
        let neighbors = (0..graph.len()).map(|i| graph.neighbors(i).collect()).collect();
        Ok(Self {
            payoffs,
            neighbors,
            columns,
            concepts: concepts.to_vec(),
        })
    }

    pub fn players(&self) -> usize {
        self.neighbors.len()
    }

    fn check(&self, state: &StrategyState) -> Result<()> {
        if state.players() != self.players() {
            return Err(Error::Shape(format!(
                "state has {} players, graph has {}",
                state.players(),
                self.players()
            )));
        }
        if state.concepts() != self.concepts.as_slice() {
            return Err(Error::Shape("state and game use different concept lists".into()));
        }
        Ok(())
    }

    /// Payoff of each of player `i`'s strategies, in support order.
    fn support_payoffs(&self, state: &StrategyState, i: usize) -> Vec<f64> {
        let support = state.support(i);
        let mut out = vec![0.0; support.len()];
        for &(j, w) in &self.neighbors[i] {
            let other = state.support(j);
            for (slot, &h) in out.iter_mut().zip(support) {
                let zh = self.columns[h];
                let mut game = 0.0;
                for &k in other {
                    game += self.payoffs.value(zh, self.columns[k]) * state.get(j, k);
                }
                *slot += w * game;
            }
        }
        out
    }

    /// `u_i(e^h)` for concept column `h`.
    pub fn strategy_payoff(&self, state: &StrategyState, i: usize, h: usize) -> Result<f64> {
        self.check(state)?;
        let pos = state
            .support(i)
            .iter()
            .position(|&c| c == h)
            .ok_or_else(|| Error::InvalidParameter(format!("column {h} is not a strategy of player {i}")))?;
        Ok(self.support_payoffs(state, i)[pos])
    }

    /// `u_i(x)`, the expected payoff of player `i`'s mixed strategy.
    pub fn average_payoff(&self, state: &StrategyState, i: usize) -> Result<f64> {
        self.check(state)?;
        Ok(dot(&state.support_row(i), &self.support_payoffs(state, i)))
    }

    fn update_row(&self, state: &StrategyState, i: usize) -> RowUpdate {
        let x = state.support_row(i);
        let payoffs = self.support_payoffs(state, i);
        let active = payoffs.iter().any(|&u| u != 0.0);
        let average = dot(&x, &payoffs);
        if average == 0.0 {
            return RowUpdate { values: x, active };
        }
        // Mixed-sign payoffs can push entries negative; those are clipped.
        let mut next: Vec<f64> = x
            .iter()
            .zip(&payoffs)
            .map(|(xh, uh)| (xh * uh / average).max(0.0))
            .collect();
        let sum: f64 = next.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return RowUpdate { values: x, active };
        }
        next.iter_mut().for_each(|v| *v /= sum);
        RowUpdate { values: next, active }
    }

    fn step_rows(&self, state: &StrategyState, pool: Option<&rayon::ThreadPool>) -> Vec<RowUpdate> {
        match pool {
            None => (0..self.players()).map(|i| self.update_row(state, i)).collect(),
            Some(pool) => pool.install(|| {
                (0..self.players())
                    .into_par_iter()
                    .map(|i| self.update_row(state, i))
                    .collect()
            }),
        }
    }

    fn apply(state: &StrategyState, rows: &[RowUpdate]) -> StrategyState {
        let mut next = state.clone();
        for (i, row) in rows.iter().enumerate() {
            next.set_support_row(i, &row.values);
        }
        next
    }

    /// One synchronous replicator step.
    pub fn step(&self, state: &StrategyState) -> Result<StrategyState> {
        self.check(state)?;
        Ok(Self::apply(state, &self.step_rows(state, None)))
    }

    /// Iterates until the largest per-entry change drops below `epsilon` or
    /// the iteration budget runs out, then labels each player with its most
    /// probable strategy.
    ///
    /// A player whose row started uniform and whose strategy payoffs were
    /// zero throughout is left unassigned (or given its first sense under
    /// [`Fallback::FirstSense`]).
    pub fn run(&self, initial: &StrategyState, cfg: &GameConfig) -> Result<GameOutcome> {
        cfg.validate()?;
        self.check(initial)?;
        let pool = match cfg.workers {
            1 => None,
            n => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
            ),
        };

        let mut state = initial.clone();
        let mut active = vec![false; self.players()];
        let mut trajectory = Vec::new();
        if cfg.record_trajectory {
            trajectory.push(state.clone());
        }
        let mut iterations = 0;
        let mut converged = false;
        while iterations < cfg.max_iterations {
            let rows = self.step_rows(&state, pool.as_ref());
            for (flag, row) in active.iter_mut().zip(&rows) {
                *flag |= row.active;
            }
            let next = Self::apply(&state, &rows);
            let change = next.max_abs_diff(&state);
            state = next;
            iterations += 1;
            if cfg.record_trajectory {
                trajectory.push(state.clone());
            }
            if change < cfg.epsilon {
                converged = true;
                break;
            }
        }

        let assignments = (0..self.players())
            .map(|i| assign(&state, initial, i, active[i], cfg))
            .collect();
        Ok(GameOutcome {
            assignments,
            iterations,
            converged,
            state,
            trajectory,
        })
    }

    /// Per player: every strategy carrying more than `tol` probability earns
    /// within `tol` of the best payoff available to that player.
    pub fn nash_check(&self, state: &StrategyState, tol: f64) -> Result<Vec<bool>> {
        self.check(state)?;
        Ok((0..self.players())
            .map(|i| {
                let payoffs = self.support_payoffs(state, i);
                let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                state
                    .support_row(i)
                    .iter()
                    .zip(&payoffs)
                    .all(|(&x, &u)| x <= tol || best - u <= tol)
            })
            .collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn is_uniform(row: &[f64]) -> bool {
    row.iter().all(|&p| p == row[0])
}

fn assign(state: &StrategyState, initial: &StrategyState, i: usize, active: bool, cfg: &GameConfig) -> Assignment {
    let support = state.support(i);
    let row = state.support_row(i);
    // Strict comparison keeps the lowest rank on ties.
    let mut best = 0;
    for (k, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = k;
        }
    }
    let probability = row[best];
    let stuck = !active && is_uniform(&initial.support_row(i));
    let column = match (stuck, cfg.fallback) {
        (false, _) => Some(support[best]),
        (true, Fallback::FirstSense) => Some(support[0]),
        (true, Fallback::None) => None,
    };
    Assignment {
        column,
        concept: column.map(|c| state.concepts()[c].clone()),
        probability,
    }
}

pub fn strategy_payoff(i: usize, h: usize, s: &StrategyState, w: &WordGraph, z: &PayoffStore) -> Result<f64> {
    Game::new(w, z, s.concepts())?.strategy_payoff(s, i, h)
}

pub fn average_payoff(i: usize, s: &StrategyState, w: &WordGraph, z: &PayoffStore) -> Result<f64> {
    Game::new(w, z, s.concepts())?.average_payoff(s, i)
}

pub fn replicator_step(s: &StrategyState, w: &WordGraph, z: &PayoffStore) -> Result<StrategyState> {
    Game::new(w, z, s.concepts())?.step(s)
}

pub fn run(s0: &StrategyState, w: &WordGraph, z: &PayoffStore, cfg: &GameConfig) -> Result<GameOutcome> {
    Game::new(w, z, s0.concepts())?.run(s0, cfg)
}

pub fn nash_check(s: &StrategyState, w: &WordGraph, z: &PayoffStore, tol: f64) -> Result<Vec<bool>> {
    Game::new(w, z, s.concepts())?.nash_check(s, tol)
}
