/*
 * driftcast C API
 *
 * Opaque handles over the C++ core. Every function that can fail returns a
 * dc_status; the message of the most recent failure on the calling thread is
 * available from dc_last_error(). Handles are owned by the caller and must
 * be released with the matching *_destroy function. Output strings are
 * copied into caller buffers; when the buffer is too small the call returns
 * DC_ERR_BUFFER and stores the required size (including the terminator) in
 * *needed when that pointer is non-null.
 */
#ifndef DRIFTCAST_H
#define DRIFTCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DRIFTCAST_BUILDING)
#    define DC_API __declspec(dllexport)
#  else
#    define DC_API __declspec(dllimport)
#  endif
#else
#  define DC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dc_status {
    DC_OK = 0,
    DC_ERR_INVALID_ARGUMENT = 1,
    DC_ERR_INSUFFICIENT_DATA = 2,
    DC_ERR_CONFIG = 3,
    DC_ERR_DATA = 4,
    DC_ERR_IO = 5,
    DC_ERR_RUNTIME = 6,
    DC_ERR_BUFFER = 7,
    DC_END_OF_STREAM = 8
} dc_status;

typedef enum dc_pseudo_mode {
    DC_PSEUDO_LITERAL = 0,
    DC_PSEUDO_MEAN_REANCHOR = 1
} dc_pseudo_mode;

typedef struct dc_series dc_series;
typedef struct dc_config dc_config;
typedef struct dc_result dc_result;
typedef struct dc_engine dc_engine;

typedef struct dc_summary {
    double rmse;
    double mae;
    double mae_percent;
    double hstep_rmse;
    double hstep_mae_percent;
    double mean_time_s;
    double median_time_s;
    size_t increments;
    size_t updates;
    size_t pairs;
    size_t n;
    size_t h;
    uint64_t seed;
} dc_summary;

typedef struct dc_step {
    size_t increment;
    size_t index;
    double actual;
    double loss;
    double err_inc;
    double err_pseudo;
    double gamma;
    double eta;
    size_t update_calls;
    double wall_time_s;
} dc_step;

DC_API const char* dc_version(void);
DC_API const char* dc_last_error(void);
DC_API const char* dc_status_name(dc_status status);

/* ---- numerics ---------------------------------------------------------- */

DC_API dc_status dc_soh_from_capacity(double q_full, double q_nominal, double* out);
/* Fits the clamped line to `window` (length n >= 2) and writes h pseudo targets. */
DC_API dc_status dc_pseudo_targets(const double* window, size_t n, size_t h, dc_pseudo_mode mode, double* out);
DC_API dc_status dc_gamma_lr(double err_inc, double err_pseudo, double eta0, double* out);
DC_API dc_status dc_rmse(const double* pred, const double* actual, size_t len, double* out);
DC_API dc_status dc_mae(const double* pred, const double* actual, size_t len, double* out);

/* ---- series ------------------------------------------------------------ */

/* schema: a preset name ("nasa", "mit", "calce", "soh") or a path to a schema
 * file. nominal_override > 0 replaces the schema's nominal capacity. */
DC_API dc_status dc_series_load_csv(const char* path, const char* schema, double nominal_override, dc_series** out);
DC_API dc_status dc_series_from_values(const double* values, size_t len, double nominal, const char* label,
                                       dc_series** out);
/* seed_or_negative < 0 keeps the preset's own seed. */
DC_API dc_status dc_series_synth_preset(const char* preset, int64_t seed_or_negative, dc_series** out);
DC_API dc_status dc_series_write_csv(const dc_series* series, const char* path, const char* note);
DC_API size_t dc_series_length(const dc_series* series);
DC_API dc_status dc_series_values(const dc_series* series, double* out, size_t capacity);
DC_API dc_status dc_series_label(const dc_series* series, char* buf, size_t cap, size_t* needed);
DC_API void dc_series_destroy(dc_series* series);

DC_API size_t dc_preset_count(void);
DC_API const char* dc_preset_name(size_t index);
DC_API const char* dc_preset_regime(size_t index);

/* ---- configuration ----------------------------------------------------- */

DC_API dc_status dc_config_create(dc_config** out);
DC_API dc_status dc_config_load(const char* path, dc_config** out);
DC_API dc_status dc_config_set(dc_config* config, const char* key, const char* value);
DC_API dc_status dc_config_get(const dc_config* config, const char* key, char* buf, size_t cap, size_t* needed);
DC_API dc_status dc_config_format(const dc_config* config, char* buf, size_t cap, size_t* needed);
DC_API dc_status dc_config_validate(const dc_config* config);
DC_API void dc_config_destroy(dc_config* config);

/* ---- whole runs -------------------------------------------------------- */

/* pretrain may be null. */
DC_API dc_status dc_run(const dc_config* config, const dc_series* series, const dc_series* pretrain,
                        dc_result** out);
DC_API dc_status dc_result_summary(const dc_result* result, const dc_series* series, dc_summary* out);
/* Writes report.json and traces.csv. */
DC_API dc_status dc_result_write(const dc_result* result, const dc_series* series, const char* out_dir);
DC_API size_t dc_result_step_count(const dc_result* result);
DC_API dc_status dc_result_step(const dc_result* result, size_t i, dc_step* out);
/* Copies the H forecasts issued at step i. */
DC_API dc_status dc_result_forecast(const dc_result* result, size_t i, double* out, size_t capacity);
DC_API dc_status dc_result_checkpoint(const dc_result* result, const char* path);
DC_API void dc_result_destroy(dc_result* result);

/* axis: "n" or "h". models: array of model ids. Writes sweep.csv to out_csv. */
DC_API dc_status dc_sweep(const dc_config* config, const dc_series* series, const dc_series* pretrain,
                          const char* axis, const size_t* grid, size_t grid_len, const char* const* models,
                          size_t model_count, unsigned jobs, const char* out_csv, size_t* failed_cells);

/* Merges report.json files (or run directories) into one comparison CSV. */
DC_API dc_status dc_report_merge(const char* const* runs, size_t count, const char* out_path, size_t* rows,
                                 size_t* warnings);

/* ---- incremental engine ------------------------------------------------ */

/* Builds the configured model, performs warm-up on the first warmup_samples
 * values pushed, then each dc_engine_push reveals one sample. */
DC_API dc_status dc_engine_create(const dc_config* config, size_t warmup_samples, dc_engine** out);
/* Returns DC_OK with *stepped = 0 while still collecting warm-up samples. */
DC_API dc_status dc_engine_push(dc_engine* engine, double soh, int* stepped, dc_step* out);
/* Latest H-step forecast; DC_ERR_INSUFFICIENT_DATA before the first step. */
DC_API dc_status dc_engine_forecast(const dc_engine* engine, double* out, size_t capacity);
DC_API dc_status dc_engine_save(const dc_engine* engine, const char* path);
DC_API dc_status dc_engine_load(dc_engine* engine, const char* path);
DC_API void dc_engine_destroy(dc_engine* engine);

#ifdef __cplusplus
}
#endif

#endif /* DRIFTCAST_H */
