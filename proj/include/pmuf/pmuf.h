/* C interface to the PMU data-feature library. */
#ifndef PMUF_PMUF_H
#define PMUF_PMUF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PMUF_BUILDING_LIBRARY)
#    define PMUF_API __declspec(dllexport)
#  else
#    define PMUF_API __declspec(dllimport)
#  endif
#else
#  define PMUF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match pmuf::ErrorCode. */
typedef enum pmuf_status {
  PMUF_OK = 0,
  PMUF_E_INVALID_ARGUMENT = 1,
  PMUF_E_EMPTY_SERIES = 2,
  PMUF_E_INVALID_SPEC = 3,
  PMUF_E_ORDER_TOO_LARGE = 4,
  PMUF_E_DEGENERATE_SIGNAL = 5,
  PMUF_E_WINDOW_TOO_LARGE = 6,
  PMUF_E_CONSTANT_SERIES = 7,
  PMUF_E_WRONG_KIND = 8,
  PMUF_E_TOO_SHORT = 9,
  PMUF_E_TOO_FEW_SAMPLES = 10,
  PMUF_E_NUMERICAL_FAILURE = 11,
  PMUF_E_ABOVE_NYQUIST = 12,
  PMUF_E_DEGENERATE_BASELINE = 13,
  PMUF_E_INFEASIBLE_PLACEMENT = 14,
  PMUF_E_OUT_OF_RANGE = 15,
  PMUF_E_PARSE_ERROR = 16,
  PMUF_E_RAGGED_ROW = 17,
  PMUF_E_NON_UNIFORM_TIMESTAMPS = 18,
  PMUF_E_MIXED_RATES = 19,
  PMUF_E_SCHEMA_ERROR = 20,
  PMUF_E_IO = 21,
  PMUF_E_BUFFER_TOO_SMALL = 98,
  PMUF_E_INTERNAL = 99
} pmuf_status;

typedef enum pmuf_channel_kind {
  PMUF_KIND_VOLTAGE_MAGNITUDE = 0,
  PMUF_KIND_VOLTAGE_ANGLE = 1,
  PMUF_KIND_FREQUENCY = 2
} pmuf_channel_kind;

typedef struct pmuf_series pmuf_series;
typedef struct pmuf_dataset pmuf_dataset;

PMUF_API const char* pmuf_version(void);
PMUF_API const char* pmuf_status_name(pmuf_status status);
/* Message of the last failure on the calling thread; empty after success. */
PMUF_API const char* pmuf_last_error(void);
/* "trace", "debug", "info", "warn", "error", "off". */
PMUF_API pmuf_status pmuf_set_log_level(const char* level);

/* Series ------------------------------------------------------------------ */

/* mask may be NULL, in which case NaN, 9999 and -9999 mark missing samples. */
PMUF_API pmuf_status pmuf_series_create(pmuf_channel_kind kind, double rate_fps, double nominal_hz,
                                        double start_time, const double* values, const uint8_t* mask,
                                        size_t length, const char* pmu_id, pmuf_series** out);
PMUF_API void pmuf_series_free(pmuf_series* series);
PMUF_API size_t pmuf_series_length(const pmuf_series* series);
PMUF_API pmuf_channel_kind pmuf_series_kind(const pmuf_series* series);
PMUF_API double pmuf_series_rate(const pmuf_series* series);
PMUF_API const char* pmuf_series_pmu_id(const pmuf_series* series);
/* Copies min(capacity, length) samples. */
PMUF_API pmuf_status pmuf_series_values(const pmuf_series* series, double* out, size_t capacity);
PMUF_API pmuf_status pmuf_series_mask(const pmuf_series* series, uint8_t* out, size_t capacity);

/* Analyses ---------------------------------------------------------------- */

/* noise_out may be NULL; otherwise receives a new series owned by the caller. */
PMUF_API pmuf_status pmuf_extract_noise(const pmuf_series* series, size_t order, double* snr_db,
                                        pmuf_series** noise_out);
PMUF_API pmuf_status pmuf_median_filter(const pmuf_series* series, size_t order, pmuf_series** out);
PMUF_API pmuf_status pmuf_average_variability(const pmuf_series* series, size_t window, double* out);

typedef struct pmuf_variance {
  double total;
  double dynamics;
  double noise;
  double anomaly;
} pmuf_variance;
PMUF_API pmuf_status pmuf_variance_decomposition(const pmuf_series* series, size_t order, pmuf_variance* out);

/* coefficients must hold max_lag + 1 values. */
PMUF_API pmuf_status pmuf_autocorrelation(const double* values, size_t length, size_t max_lag,
                                          double* coefficients, double* mean_abs_excl_zero);

typedef struct pmuf_outlier_config {
  size_t window;
  double threshold;
  double robust_scale_factor;
} pmuf_outlier_config;
PMUF_API void pmuf_outlier_config_default(pmuf_outlier_config* cfg);
/* indices may be NULL when capacity is 0; count always receives the total. */
PMUF_API pmuf_status pmuf_detect_outliers(const pmuf_series* series, const pmuf_outlier_config* cfg,
                                          size_t* indices, size_t capacity, size_t* count, double* percentage);
PMUF_API pmuf_status pmuf_angle_outlier_scan(const pmuf_series* series, const pmuf_outlier_config* cfg,
                                             size_t* indices, size_t capacity, size_t* count,
                                             double* percentage);

typedef struct pmuf_completeness {
  double dropout_rate;
  size_t max_gap_samples;
  double max_gap_seconds;
  size_t expected_samples;
  size_t dropped_samples;
} pmuf_completeness;
PMUF_API pmuf_status pmuf_completeness_stats(const pmuf_series* series, pmuf_completeness* out);

typedef struct pmuf_mode {
  double frequency_hz;
  double magnitude;
  double damping_factor;
  double decay_rate;
  double phase_rad;
} pmuf_mode;
/* Default pencil settings. count receives the number of modes found. */
PMUF_API pmuf_status pmuf_estimate_modes(const double* samples, size_t length, double rate_fps,
                                         pmuf_mode* modes, size_t capacity, size_t* count);

/* Datasets ---------------------------------------------------------------- */

PMUF_API pmuf_status pmuf_dataset_read(const char* path, pmuf_dataset** out);
PMUF_API pmuf_status pmuf_dataset_write(const pmuf_series* const* channels, size_t count, const char* path);
PMUF_API size_t pmuf_dataset_size(const pmuf_dataset* dataset);
/* Borrowed; valid until the dataset is freed. */
PMUF_API const pmuf_series* pmuf_dataset_channel(const pmuf_dataset* dataset, size_t index);
PMUF_API void pmuf_dataset_free(pmuf_dataset* dataset);

/* Commands ---------------------------------------------------------------- */

enum {
  PMUF_ANALYSIS_NOISE = 1 << 0,
  PMUF_ANALYSIS_VARIABILITY = 1 << 1,
  PMUF_ANALYSIS_VARIANCE = 1 << 2,
  PMUF_ANALYSIS_ACF = 1 << 3,
  PMUF_ANALYSIS_OUTLIERS = 1 << 4,
  PMUF_ANALYSIS_COMPLETENESS = 1 << 5,
  PMUF_ANALYSIS_MODAL = 1 << 6,
  PMUF_ANALYSIS_ALL = (1 << 7) - 1
};

typedef struct pmuf_analyze_options {
  unsigned analyses; /* PMUF_ANALYSIS_* bits */
  size_t filter_order;
  size_t acf_lags;
  double pencil_window_s;
  double pencil_step_s;
  size_t outlier_window;
  double outlier_threshold;
  double nominal_hz;
  const double* filler_values; /* NULL keeps 9999 and -9999 */
  size_t filler_count;
  unsigned threads; /* 0 = hardware concurrency */
} pmuf_analyze_options;

PMUF_API void pmuf_analyze_options_default(pmuf_analyze_options* options);
/* out_path NULL writes the report to standard output. */
PMUF_API pmuf_status pmuf_analyze_file(const char* dataset_path, const char* out_path,
                                       const pmuf_analyze_options* options);
/* seed NULL keeps the config seed. Ground truth goes to <stem>.truth.json. */
PMUF_API pmuf_status pmuf_synthesize_file(const char* config_path, const char* out_path, const uint64_t* seed,
                                          unsigned threads);

#ifdef __cplusplus
}
#endif

#endif /* PMUF_PMUF_H */
