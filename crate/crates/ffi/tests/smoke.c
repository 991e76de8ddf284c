#include <stdio.h>
#include <string.h>
#include "fatpoint.h"

#define CHECK(cond)                                          \
    do {                                                     \
        if (!(cond)) {                                       \
            fprintf(stderr, "failed at line %d: %s (%s)\n",  \
                    __LINE__, #cond,                         \
                    fatpoint_last_error_message());          \
            return 1;                                        \
        }                                                    \
    } while (0)

int main(void) {
    const char *doc = "{\"field\":\"Q\",\"n\":2,\"polys\":[\"y1^2-(1+t)\",\"y2-y1-3\"]}";
    FatpointCycle *c = NULL;
    CHECK(fatpoint_cycle_parse(doc, 10, &c) == FATPOINT_STATUS_OK);
    CHECK(fatpoint_cycle_validate(c) == FATPOINT_STATUS_OK);

    uint32_t d[4];
    size_t n = 0;
    CHECK(fatpoint_cycle_degree_vector(c, d, 4, &n) == FATPOINT_STATUS_OK);
    CHECK(n == 2 && d[0] == 2 && d[1] == 1);

    char *sym = NULL;
    FatpointTrace *tr = NULL;
    CHECK(fatpoint_regulator(c, 3, &sym, &tr) == FATPOINT_STATUS_OK);
    CHECK(strstr(sym, "\"-1-t\"") != NULL && strstr(sym, "\"2-t\"") != NULL);
    CHECK(fatpoint_trace_replay(tr) == FATPOINT_STATUS_OK);

    const char *bad = "{\"field\":\"Q\",\"n\":2,\"polys\":[\"y1-(1+t)\",\"y2-t\"]}";
    FatpointCycle *g = NULL;
    CHECK(fatpoint_cycle_parse(bad, 8, &g) == FATPOINT_STATUS_OK);
    CHECK(fatpoint_cycle_validate(g) == FATPOINT_STATUS_MATH);
    CHECK(strcmp(fatpoint_last_error_message(), "constant term of P2 is not a unit") == 0);

    char *w = NULL;
    CHECK(fatpoint_witt("add", "F101", 2, "1+100*t", "1+t", &w) == FATPOINT_STATUS_OK);
    CHECK(strstr(w, "1+100*t^2") != NULL);

    fatpoint_string_free(w);
    fatpoint_string_free(sym);
    fatpoint_trace_free(tr);
    fatpoint_cycle_free(g);
    fatpoint_cycle_free(c);
    printf("ok %s\n", fatpoint_version());
    return 0;
}
