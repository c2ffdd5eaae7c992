/* Exercises the C interface against the checked-in fixture system.
 * Build and run from the repository root; see README.md for the
 * compile line. */
#include <stdio.h>
#include <string.h>
#include "msfeat.h"

int main(void) {
    if (strlen(msfeat_version()) == 0) return 1;
    msfeat_config *cfg = msfeat_config_default();
    if (!cfg) return 2;
    msfeat_config_free(cfg);

    msfeat_records *records = NULL;
    msfeat_status st = msfeat_analyze_tree(
        "crates/core/tests/fixtures/shopsys", "shopsys", "r1", NULL, false, &records);
    if (st != MSFEAT_OK) { fprintf(stderr, "%s\n", msfeat_last_error_message()); return 3; }
    if (msfeat_records_len(records) != 6) return 4;

    char *csv = NULL;
    if (msfeat_records_to_csv(records, &csv) != MSFEAT_OK) return 5;
    printf("csv bytes: %zu\n", strlen(csv));
    msfeat_string_free(csv);
    msfeat_records_free(records);

    uint64_t n = 0;
    st = msfeat_count_effective_lines(NULL, &n);
    if (st != MSFEAT_NULL_ARG) return 6;
    puts("ffi check ok");
    return 0;
}
