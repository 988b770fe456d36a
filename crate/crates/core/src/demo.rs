//! The repeated prisoner's dilemma as a two-player replicator game.
//!
//! Both players share the strategy list `(confess, dont-confess)` and the
//! row-player payoff matrix
//!
//! ```text
//!                 confess   dont-confess
//! confess           -5          0
//! dont-confess      -6         -1
//! ```
//!
//! Every payoff is negative, so the ratio `u(e^h) / u(x)` exceeds 1 for the
//! strategy whose loss is *larger* than average. Under the discrete update
//! the cooperative strategy therefore grows, whereas the continuous
//! replicator equation (which subtracts rather than divides) drives both
//! players to confess.

use crate::dynamics::{Game, GameConfig, GameOutcome};
use crate::error::Result;
use crate::graph::WordGraph;
use crate::payoff::PayoffStore;
use crate::senses::StrategyState;

pub const CONFESS: usize = 0;
pub const COOPERATE: usize = 1;

/// Graph, payoffs, and the uniform starting state.
pub fn prisoners_dilemma() -> (WordGraph, PayoffStore, StrategyState) {
    let concepts: Vec<String> = vec!["confess".into(), "dont-confess".into()];
    let payoffs = PayoffStore::from_matrix(concepts.clone(), vec![-5.0, 0.0, -6.0, -1.0]).expect("2x2 matrix");
    let mut graph = WordGraph::anonymous(2);
    graph.set_weight(0, 1, 1.0);
    let state = StrategyState::uniform(concepts, vec![vec![0, 1], vec![0, 1]]).expect("uniform rows");
    (graph, payoffs, state)
}

/// Runs the dilemma with the trajectory recorded.
pub fn run_prisoners_dilemma(max_iterations: usize, epsilon: f64) -> Result<GameOutcome> {
    let (graph, payoffs, state) = prisoners_dilemma();
    let game = Game::new(&graph, &payoffs, state.concepts())?;
    let cfg = GameConfig {
        max_iterations,
        epsilon,
        record_trajectory: true,
        ..GameConfig::default()
    };
    game.run(&state, &cfg)
}

/// Probability of cooperating for player 0 at each recorded step.
pub fn cooperation_curve(outcome: &GameOutcome) -> Vec<f64> {
    outcome.trajectory.iter().map(|s| s.get(0, COOPERATE)).collect()
}
