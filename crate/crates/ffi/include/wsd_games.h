#ifndef WSD_GAMES_H
#define WSD_GAMES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * How a player's strategy row starts.
 */
typedef enum WsdInit {
  WSD_INIT_UNIFORM = 0,
  /**
   * `p (1-p)^rank`, normalized, in the order the columns were given.
   */
  WSD_INIT_GEOMETRIC = 1,
} WsdInit;

typedef enum WsdStatus {
  WSD_STATUS_OK = 0,
  WSD_STATUS_NULL_POINTER = 1,
  WSD_STATUS_INVALID_ARGUMENT = 2,
  WSD_STATUS_PARSE = 3,
  WSD_STATUS_IO = 4,
  WSD_STATUS_UNDEFINED = 5,
  WSD_STATUS_SHAPE = 6,
  WSD_STATUS_NOT_FOUND = 7,
  WSD_STATUS_PANIC = 99,
} WsdStatus;

/**
 * A game under construction: players, concept columns, weights, payoffs,
 * and per-player starting rows.
 */
typedef struct WsdGame WsdGame;

typedef struct WsdOutcome WsdOutcome;

typedef struct WsdRunOptions {
  size_t max_iterations;
  double epsilon;
  /**
   * 1 runs serially, 0 uses every core.
   */
  size_t workers;
  /**
   * Assign the first column to players that never updated instead of
   * leaving them unanswered.
   */
  bool fallback_first_sense;
} WsdRunOptions;

typedef struct WsdPipelineSummary {
  size_t players;
  size_t dropped;
  size_t iterations;
  bool converged;
  size_t answered;
  size_t total;
  /**
   * Percent; NaN when no gold file is configured.
   */
  double f1;
} WsdPipelineSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on this thread.
 */
const char *wsd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wsd_version(void);

/**
 * Defaults: 1000 iterations, epsilon 1e-6, one worker, no fallback.
 */
struct WsdRunOptions wsd_run_options_default(void);

/**
 * Scores the table built from `o11`, `r1`, `c1`, `n` with the named measure
 * (`dice`, `mdice`, `pmi`, `t-score`, `z-score`, `odds-r`, `chi-s`, `chi-s-c`).
 *
 * # Safety
 * `measure` must be a NUL-terminated string and `out` a writable pointer.
 */
enum WsdStatus wsd_association_score(uint64_t o11,
                                     uint64_t r1,
                                     uint64_t c1,
                                     uint64_t n,
                                     const char *measure,
                                     double *out);

/**
 * New game with `players` players over `concepts` strategy columns. All
 * weights and payoffs start at 0. Returns null if either count is 0.
 */
struct WsdGame *wsd_game_new(size_t players, size_t concepts);

/**
 * # Safety
 * `game` must come from [`wsd_game_new`] and not be used afterwards.
 */
void wsd_game_free(struct WsdGame *game);

/**
 * Sets the symmetric weight between players `i` and `j` (`i != j`).
 *
 * # Safety
 * `game` must be a live handle.
 */
enum WsdStatus wsd_game_set_weight(struct WsdGame *game, size_t i, size_t j, double weight);

/**
 * Sets the payoff of playing column `a` against column `b`. Only this
 * direction is set; call again with the columns swapped for a symmetric
 * game.
 *
 * # Safety
 * `game` must be a live handle.
 */
enum WsdStatus wsd_game_set_payoff(struct WsdGame *game, size_t a, size_t b, double payoff);

/**
 * Declares the columns player `i` may play, in rank order, and how its row
 * starts. `p` is only read for [`WsdInit::Geometric`].
 *
 * # Safety
 * `game` must be a live handle and `columns` must point to `len` values.
 */
enum WsdStatus wsd_game_set_support(struct WsdGame *game,
                                    size_t player,
                                    const size_t *columns,
                                    size_t len,
                                    enum WsdInit init,
                                    double p);

/**
 * Declares player `i`'s columns with explicit starting probabilities,
 * which must sum to 1.
 *
 * # Safety
 * `game` must be a live handle; `columns` and `probabilities` must each
 * point to `len` values.
 */
enum WsdStatus wsd_game_set_strategy(struct WsdGame *game,
                                     size_t player,
                                     const size_t *columns,
                                     const double *probabilities,
                                     size_t len);

/**
 * Runs the replicator dynamics. On success `*out` receives a new outcome
 * handle.
 *
 * # Safety
 * `game` must be a live handle, `options` readable or null (defaults), and
 * `out` writable.
 */
enum WsdStatus wsd_game_run(const struct WsdGame *game,
                            const struct WsdRunOptions *options,
                            struct WsdOutcome **out);

/**
 * # Safety
 * `outcome` must come from [`wsd_game_run`] and not be used afterwards.
 */
void wsd_outcome_free(struct WsdOutcome *outcome);

/**
 * Iterations performed; 0 for a null handle.
 *
 * # Safety
 * `outcome` must be a live handle or null.
 */
size_t wsd_outcome_iterations(const struct WsdOutcome *outcome);

/**
 * Whether the largest step fell below epsilon; false for a null handle.
 *
 * # Safety
 * `outcome` must be a live handle or null.
 */
bool wsd_outcome_converged(const struct WsdOutcome *outcome);

/**
 * Chosen column of `player`. `*assigned` is false when the player never
 * updated and no fallback was requested; `*column` is then untouched.
 *
 * # Safety
 * `outcome` must be a live handle; the out pointers must be writable.
 */
enum WsdStatus wsd_outcome_assignment(const struct WsdOutcome *outcome,
                                      size_t player,
                                      bool *assigned,
                                      size_t *column,
                                      double *probability);

/**
 * Final probability of `player` playing `column` (0 off its support).
 *
 * # Safety
 * `outcome` must be a live handle and `out` writable.
 */
enum WsdStatus wsd_outcome_probability(const struct WsdOutcome *outcome,
                                       size_t player,
                                       size_t column,
                                       double *out);

/**
 * Runs the full pipeline described by a `key = value` config file and
 * writes the outputs it names. `answers_path` overrides the config's
 * answers file when non-null. `summary` may be null.
 *
 * # Safety
 * String arguments must be NUL-terminated; `summary` writable or null.
 */
enum WsdStatus wsd_pipeline_run(const char *config_path,
                                const char *answers_path,
                                struct WsdPipelineSummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSD_GAMES_H */
