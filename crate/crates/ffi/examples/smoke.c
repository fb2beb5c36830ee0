#include <stdio.h>
#include <string.h>

#include "rotavg.h"

int main(void) {
    rotavg_average *avg = NULL;
    if (rotavg_average_new(9, &avg) != ROTAVG_STATUS_OK) {
        fprintf(stderr, "%s\n", rotavg_last_error());
        return 1;
    }
    char *value = NULL;
    if (rotavg_average_entry_exact(avg, "xxxyyyzzz", "xxxyyyzzz", &value) != ROTAVG_STATUS_OK) {
        fprintf(stderr, "%s\n", rotavg_last_error());
        return 1;
    }
    printf("%s\n", value);
    int ok = strcmp(value, "19/420") == 0;
    rotavg_string_free(value);

    if (rotavg_average_new(4, &avg) != ROTAVG_STATUS_INVALID_RANK) ok = 0;
    rotavg_average_free(avg);
    return ok ? 0 : 1;
}
