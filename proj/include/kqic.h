/* C interface to the kqic library. All functions return a kqic_status;
 * on failure kqic_last_error() describes the most recent error on the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef KQIC_H
#define KQIC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KQIC_API __declspec(dllexport)
#else
#define KQIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    KQIC_OK = 0,
    KQIC_ERR_DATA = 1,
    KQIC_ERR_CONFIG = 2,
    KQIC_ERR_FEASIBILITY = 3,
    KQIC_ERR_ARGUMENT = 4,
    KQIC_ERR_INTERNAL = 5
} kqic_status;

typedef enum {
    KQIC_KERNEL_GAUSSIAN = 0,
    KQIC_KERNEL_IMQ = 1,
    KQIC_KERNEL_CONSTANT = 2
} kqic_kernel_family;

typedef enum {
    KQIC_BANDWIDTH_MEDIAN = 0, /* median heuristic on the full data */
    KQIC_BANDWIDTH_SELECT = 1, /* power-proxy selection on a 20% split */
    KQIC_BANDWIDTH_FIXED = 2   /* entry_scale / time_scale as given */
} kqic_bandwidth_mode;

typedef enum { KQIC_FORMAT_JSON = 0, KQIC_FORMAT_CSV = 1 } kqic_format;

typedef struct kqic_dataset kqic_dataset;

typedef struct {
    double alpha;
    size_t bootstrap_draws;
    uint64_t seed;
    kqic_bandwidth_mode bandwidth_mode;
    double entry_scale;
    double time_scale;
    size_t permutations;
    size_t min_events;
} kqic_test_options;

typedef struct {
    double statistic;
    double p_value;
    int reject;
    uint64_t seed;
    double entry_scale; /* 0 for non-kernel methods and constant kernels */
    double time_scale;
    int selection_fallback;
} kqic_result;

KQIC_API const char* kqic_version(void);
KQIC_API const char* kqic_last_error(void);
KQIC_API void kqic_test_options_default(kqic_test_options* options);

KQIC_API kqic_status kqic_dataset_create(const double* entry, const double* observed,
                                         const int* event, size_t n, kqic_dataset** out);
KQIC_API kqic_status kqic_dataset_load_csv(const char* path, kqic_dataset** out);
KQIC_API kqic_status kqic_dataset_write_csv(const kqic_dataset* dataset, const char* path);
KQIC_API void kqic_dataset_free(kqic_dataset* dataset);
KQIC_API size_t kqic_dataset_size(const kqic_dataset* dataset);
KQIC_API size_t kqic_dataset_event_count(const kqic_dataset* dataset);
KQIC_API kqic_status kqic_dataset_get(const kqic_dataset* dataset, size_t index, double* entry,
                                      double* observed, int* event);

KQIC_API kqic_status kqic_median_scales(const kqic_dataset* dataset, double* entry_scale,
                                        double* time_scale);
KQIC_API kqic_status kqic_statistic(const kqic_dataset* dataset, kqic_kernel_family family,
                                    double entry_scale, double time_scale, double* out);

/* method: KQIC_Gauss, KQIC_IMQ, KQIC_Const, WLR, WLR_SC, MB, MinP1, MinP2. */
KQIC_API kqic_status kqic_run_method(const kqic_dataset* dataset, const char* method,
                                     const kqic_test_options* options, kqic_result* out);

/* model: monotone, vshape, periodic, depcens, null. censoring in [0, 1). */
KQIC_API kqic_status kqic_simulate(const char* model, double param, size_t n, double censoring,
                                   uint64_t seed, kqic_dataset** out);

/* Runs an experiment described by a JSON config; *out is freed with
 * kqic_string_free. */
KQIC_API kqic_status kqic_benchmark_run(const char* config_json, kqic_format format,
                                        int include_runtime, char** out);

/* Per-group and combined p-values as JSON. methods is comma separated. */
KQIC_API kqic_status kqic_realdata_run(const kqic_dataset* dataset, const char* methods,
                                       const kqic_test_options* options, char** out);

KQIC_API void kqic_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
