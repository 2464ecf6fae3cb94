#include <math.h>
#include <stdio.h>
#include "poincare_halfmap.h"

int main(void) {
    PhSystem *sys = NULL;
    PhHalfMap out;
    PhClassification c;
    if (ph_system_new(0.0, 0.0, 1.0, &sys) != PH_STATUS_OK) return 1;
    if (ph_left_halfmap(sys, 3.0, &out) != PH_STATUS_OK) return 2;
    if (fabs(out.image + 3.0) > 1e-12 || fabs(out.tau - 3.14159265358979323846) > 1e-12) return 3;
    if (ph_classify(sys, &c) != PH_STATUS_OK || c.scenario != PH_SCENARIO_S1) return 4;
    if (ph_left_halfmap(sys, -1.0, &out) != PH_STATUS_OUT_OF_DOMAIN) return 5;
    ph_system_free(sys);
    printf("%s\n", ph_status_message(PH_STATUS_OK));
    return 0;
}
