#include <math.h>
#include <stdio.h>
#include "stablerange.h"

int main(void) {
    SrSolution *sol = NULL;
    const char *cfg = "{\"equation\":\"kz2d\",\"family\":\"polynomial\",\"params\":{\"alpha\":\"1\"}}";
    if (sr_solution_from_config_json(cfg, &sol) != SR_STATUS_OK) {
        fprintf(stderr, "build: %s\n", sr_last_error_message());
        return 1;
    }
    double u = 0.0;
    if (sr_solution_eval(sol, 0.0, 0.5, -1.0, 0.0, &u) != SR_STATUS_OK || fabs(u - 1.0) > 1e-14) {
        fprintf(stderr, "eval: %g\n", u);
        return 1;
    }
    SrVerifySummary sum;
    if (sr_solution_verify(sol, 50, &sum) != SR_STATUS_OK || !sum.pass) {
        fprintf(stderr, "verify: %s\n", sr_last_error_message());
        return 1;
    }
    sr_solution_free(sol);
    if (sr_solution_from_config_json("{", &sol) != SR_STATUS_INVALID_INPUT || sol != NULL) {
        return 1;
    }
    printf("ok %s\n", sr_version());
    return 0;
}
