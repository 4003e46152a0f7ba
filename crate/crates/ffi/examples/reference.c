#include <stdio.h>

#include "hyperabsorb.h"

int main(void) {
    HaComplex alpha = {0.1, 0.0}, beta = {0.99498743710662, 0.0};
    HaScenario *s = NULL;
    HaStatus st = ha_scenario_new(HA_KIND_ENTANGLED, alpha, beta, alpha, beta, 0.9, 0.9, &s);
    if (st != HA_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", st, ha_last_error());
        return 1;
    }
    HaReport r;
    st = ha_scenario_evaluate(s, 0.0, &r);
    ha_scenario_free(s);
    if (st != HA_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", st, ha_last_error());
        return 1;
    }
    printf("hyperabsorb %s\n", ha_version());
    printf("p_double_indistinguishable %.6e\n", r.p_double_indistinguishable);
    printf("entropy_final %.12f\n", r.entropy_final);
    printf("classification %d\n", (int)r.classification);
    return 0;
}
