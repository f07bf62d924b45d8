#include <stdio.h>
#include <stdlib.h>

#include "sncontrol.h"

int main(void) {
    SncProblem *p = NULL;
    if (snc_problem_default(16, 16, &p) != SNC_STATUS_OK) {
        fprintf(stderr, "%s\n", snc_last_error());
        return 1;
    }
    uint32_t n = 0, m = 0;
    snc_problem_dims(p, &n, &m);
    size_t len = (size_t)(n + 1) * (m + 1);
    double *y = malloc(len * sizeof(double));
    uint32_t iters = 0;
    if (snc_nash(p, NULL, 0, y, len, &iters) != SNC_STATUS_OK) {
        fprintf(stderr, "%s\n", snc_last_error());
        return 2;
    }
    SncHumSummary s;
    if (snc_hum(p, 1e-2, &s) != SNC_STATUS_OK || !s.converged) {
        return 3;
    }
    if (snc_solve_state(p, y, 3) != SNC_STATUS_BUFFER_TOO_SMALL || snc_last_error() == NULL) {
        return 4;
    }
    printf("%u %u %u %.3e\n", n, m, iters, s.y_final_norm);
    free(y);
    snc_problem_free(p);
    return 0;
}
