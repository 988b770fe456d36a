#include <math.h>
#include <stdio.h>
#include <string.h>

#include "wsd_games.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    double v = 0.0;
    CHECK(wsd_association_score(10, 20, 20, 100, "chi-s-c", &v) == WSD_STATUS_OK);
    CHECK(fabs(v - 11.81640625) < 1e-12);
    CHECK(wsd_association_score(30, 20, 20, 100, "dice", &v) == WSD_STATUS_INVALID_ARGUMENT);
    CHECK(wsd_last_error_message() != NULL);

    WsdGame *game = wsd_game_new(2, 2);
    CHECK(game != NULL);
    CHECK(wsd_game_set_weight(game, 0, 1, 1.0) == WSD_STATUS_OK);
    const double z[2][2] = {{-5.0, 0.0}, {-6.0, -1.0}};
    for (size_t a = 0; a < 2; a++)
        for (size_t b = 0; b < 2; b++)
            CHECK(wsd_game_set_payoff(game, a, b, z[a][b]) == WSD_STATUS_OK);
    const size_t cols[2] = {0, 1};
    for (size_t i = 0; i < 2; i++)
        CHECK(wsd_game_set_support(game, i, cols, 2, WSD_INIT_UNIFORM, 0.0) == WSD_STATUS_OK);

    WsdRunOptions opts = wsd_run_options_default();
    opts.max_iterations = 1;
    WsdOutcome *out = NULL;
    CHECK(wsd_game_run(game, &opts, &out) == WSD_STATUS_OK);
    double p = 0.0;
    CHECK(wsd_outcome_probability(out, 0, 1, &p) == WSD_STATUS_OK);
    CHECK(fabs(p - 7.0 / 12.0) < 1e-12);
    wsd_outcome_free(out);

    opts.max_iterations = 200;
    opts.epsilon = 1e-10;
    opts.workers = 2;
    CHECK(wsd_game_run(game, &opts, &out) == WSD_STATUS_OK);
    bool assigned = false;
    size_t column = 0;
    CHECK(wsd_outcome_assignment(out, 0, &assigned, &column, &p) == WSD_STATUS_OK);
    CHECK(assigned && column == 1 && p > 0.99);
    CHECK(wsd_outcome_converged(out));
    wsd_outcome_free(out);
    wsd_game_free(game);

    printf("ok %s\n", wsd_version());
    return 0;
}
