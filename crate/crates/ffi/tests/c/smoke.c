#include <stdio.h>
#include "dea_frontier.h"

int main(void) {
    const double x[] = {1, 4, 2, 2, 4, 1};
    const double y[] = {1, 1, 1};
    DfDataset *ds = NULL;
    if (df_dataset_new(3, 2, 1, x, y, &ds) != DF_STATUS_OK) return 10;

    double score = 0;
    if (df_score(ds, 1, DF_ORIENTATION_INPUT, &score) != DF_STATUS_OK) return 11;
    if (score < 0.999999 || score > 1.000001) return 12;

    DfImprovement *res = NULL;
    if (df_improve(ds, &res) != DF_STATUS_OK) return 13;
    bool certified = false;
    size_t kept = 0;
    df_improvement_summary(res, &certified, &kept);
    if (!certified || kept == 0) return 14;

    if (df_score(NULL, 0, DF_ORIENTATION_INPUT, &score) != DF_STATUS_NULL_POINTER) return 15;
    if (df_last_error() == NULL) return 16;

    printf("kept %zu\n", kept);
    df_improvement_free(res);
    df_dataset_free(ds);
    return 0;
}
