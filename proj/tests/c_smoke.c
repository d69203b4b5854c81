/* The public header must be usable from plain C. */
#include "adaptode/adaptode.h"

#include <math.h>
#include <stdio.h>

int main(void)
{
    adaptode_dataset_config cfg;
    adaptode_trajectory* t = NULL;
    double x[3];

    adaptode_dataset_config_default(&cfg);
    cfg.n = 3;
    if (adaptode_generate_dataset(&cfg, &t) != ADAPTODE_OK) {
        fprintf(stderr, "generate failed: %s\n", adaptode_last_error());
        return 1;
    }
    if (adaptode_trajectory_size(t) != 3 || adaptode_trajectory_point(t, 2, x) != ADAPTODE_OK || !isfinite(x[0])) {
        adaptode_trajectory_free(t);
        return 1;
    }
    adaptode_trajectory_free(t);
    if (adaptode_trajectory_point(NULL, 0, x) != ADAPTODE_ERR_INVALID_ARGUMENT)
        return 1;
    printf("%s\n", adaptode_version());
    return 0;
}
