#include <stdio.h>
#include <string.h>
#include "rhmember.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, rhm_last_error()); return 1; } } while (0)

int main(void) {
    RhmGraph *g = NULL;
    CHECK(rhm_graph_fold("a,b", "a*a,a*b", &g) == RHM_STATUS_OK);
    CHECK(rhm_graph_num_vertices(g) == 2);
    CHECK(rhm_graph_num_edges(g) == 3);
    CHECK(rhm_graph_rank(g) == 2);
    CHECK(rhm_graph_index(g) == -1);
    bool in = false;
    CHECK(rhm_graph_contains(g, "b^-1*a", &in) == RHM_STATUS_OK && in);
    rhm_graph_free(g);

    CHECK(rhm_graph_fold("a,b", "a*(", &g) == RHM_STATUS_PARSE);
    CHECK(strlen(rhm_last_error()) > 0);

    RhmStructure *s = NULL;
    CHECK(rhm_structure_load("builtin:abelian(a,b)*free(t)", &s) == RHM_STATUS_OK);
    RhmInstance *inst = NULL;
    const char *pres = "{\"alphabet\":[\"a\",\"b\",\"t\"],\"relators\":[\"a*b*a^-1*b^-1\"],"
                       "\"peripherals\":[{\"name\":\"P1\",\"rank\":2,\"alphabet\":[\"a\",\"b\"],"
                       "\"embedding\":{\"a\":\"a\",\"b\":\"b\"}}]}";
    CHECK(rhm_instance_new(pres, s, &inst) == RHM_STATUS_OK);
    RhmVerdict v;
    char *report = NULL;
    CHECK(rhm_member(inst, "t", "a", 20, RHM_SCHEDULE_DIAG, &v, &report) == RHM_STATUS_OK);
    CHECK(v == RHM_VERDICT_NON_MEMBER);
    CHECK(strstr(report, "certificate") != NULL);
    rhm_string_free(report);
    CHECK(rhm_member(inst, "t", "t*t*t", 20, RHM_SCHEDULE_ALT, &v, NULL) == RHM_STATUS_OK);
    CHECK(v == RHM_VERDICT_MEMBER);
    rhm_instance_free(inst);
    rhm_structure_free(s);
    printf("ok\n");
    return 0;
}
