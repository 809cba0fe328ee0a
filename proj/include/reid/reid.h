/*
 * C interface to the re-identification toolkit: LOMO descriptor extraction,
 * XQDA and baseline metric learning, and CMC evaluation.
 *
 * All objects are opaque handles created by a *_create / *_load / *_open or
 * producing call and released with the matching *_free (NULL is accepted).
 * Functions returning reid_status report details of the last failure on the
 * calling thread through reid_last_error().
 */
#ifndef REID_H
#define REID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(REID_BUILDING_LIBRARY)
#    define REID_API __declspec(dllexport)
#  else
#    define REID_API __declspec(dllimport)
#  endif
#else
#  define REID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum reid_status {
  REID_OK = 0,
  REID_ERR_USAGE = 1,   /* invalid argument or configuration */
  REID_ERR_DATA = 2,    /* unreadable or inconsistent input data */
  REID_ERR_NUMERIC = 3, /* a factorization or solver failed */
  REID_ERR_INTERNAL = 4 /* unexpected failure (e.g. out of memory) */
} reid_status;

typedef enum reid_method {
  REID_METHOD_XQDA = 0,
  REID_METHOD_KISSME = 1,
  REID_METHOD_MAHALANOBIS = 2,
  REID_METHOD_EUCLIDEAN = 3,
  REID_METHOD_COSINE = 4
} reid_method;

typedef struct reid_settings reid_settings;
typedef struct reid_image reid_image;
typedef struct reid_cache reid_cache;
typedef struct reid_model reid_model;
typedef struct reid_report reid_report;

typedef void (*reid_log_fn)(const char* message, void* user);

REID_API const char* reid_version(void);
/* Message of the last failed call on this thread; "" if none. */
REID_API const char* reid_last_error(void);

/* ---- settings -------------------------------------------------------- */

REID_API reid_status reid_settings_create(reid_settings** out);
/* Flat "key = value" file; unknown keys are an error. */
REID_API reid_status reid_settings_load(const char* path, reid_settings** out);
REID_API reid_status reid_settings_set(reid_settings* settings, const char* key, const char* value);
REID_API reid_status reid_settings_validate(const reid_settings* settings);
REID_API reid_status reid_settings_feature_dim(const reid_settings* settings, size_t* out);
/* Image geometry every input is resized to before description. */
REID_API reid_status reid_settings_geometry(const reid_settings* settings, int* width, int* height);
REID_API reid_status reid_settings_digest(const reid_settings* settings, uint8_t out[32]);
REID_API uint64_t reid_settings_seed(const reid_settings* settings);
REID_API void reid_settings_free(reid_settings* settings);

/* ---- images ---------------------------------------------------------- */

REID_API reid_status reid_image_load(const char* path, reid_image** out);
/* Copies width*height interleaved RGB bytes. */
REID_API reid_status reid_image_create(int width, int height, const uint8_t* rgb, reid_image** out);
REID_API int reid_image_width(const reid_image* image);
REID_API int reid_image_height(const reid_image* image);
REID_API reid_status reid_image_resize(const reid_image* image, int width, int height,
                                       reid_image** out);
/* Multiscale Retinex with the settings' scales; *degenerate (optional) is set
 * to 1 when the response was flat and a constant image was produced. */
REID_API reid_status reid_image_retinex(const reid_image* image, const reid_settings* settings,
                                        reid_image** out, int* degenerate);
/* PNG when the path ends in ".png", binary PPM otherwise. */
REID_API reid_status reid_image_save(const reid_image* image, const char* path);
REID_API void reid_image_free(reid_image* image);

/* ---- features -------------------------------------------------------- */

/* Resizes to the configured geometry and writes the descriptor into out,
 * which must hold exactly reid_settings_feature_dim() values. */
REID_API reid_status reid_extract(const reid_image* image, const reid_settings* settings,
                                  double* out, size_t len);

typedef struct reid_extract_summary {
  size_t images;
  size_t failed;
  double mean_seconds;
  double p95_seconds;
} reid_extract_summary;

/* Describes every image of a CSV manifest (image_path,person_id,camera_id)
 * into a feature cache. Per-image failures go to log (if given) and are
 * counted in summary->failed; the call itself still succeeds. */
REID_API reid_status reid_extract_manifest(const char* manifest_path, const reid_settings* settings,
                                           const char* cache_path, reid_log_fn log, void* user,
                                           reid_extract_summary* summary);

/* ---- feature caches -------------------------------------------------- */

REID_API reid_status reid_cache_open(const char* path, reid_cache** out);
REID_API size_t reid_cache_count(const reid_cache* cache);
REID_API size_t reid_cache_dim(const reid_cache* cache);
/* REID_ERR_DATA when the cache was built with other feature settings. */
REID_API reid_status reid_cache_check(const reid_cache* cache, const reid_settings* settings);
REID_API void reid_cache_free(reid_cache* cache);

/* ---- models ---------------------------------------------------------- */

REID_API reid_status reid_method_parse(const char* name, reid_method* out);
REID_API const char* reid_method_name(reid_method method);

/* Trains on one camera pair (both names given) or on all camera pairs pooled
 * (both NULL or empty). Euclidean and cosine cannot be trained. */
REID_API reid_status reid_train(const reid_cache* cache, reid_method method,
                                const reid_settings* settings, const char* probe_cam,
                                const char* gallery_cam, reid_model** out);
REID_API reid_status reid_model_load(const char* path, reid_model** out);
REID_API reid_status reid_model_save(const reid_model* model, const char* path);
REID_API reid_method reid_model_method(const reid_model* model);
REID_API size_t reid_model_input_dim(const reid_model* model);
/* Learned subspace dimension (XQDA r, or PCA dimension for baselines). */
REID_API size_t reid_model_dims(const reid_model* model);
REID_API double reid_model_regularizer(const reid_model* model);
/* Copies up to cap eigenvalues (XQDA only) and returns how many exist. */
REID_API size_t reid_model_eigenvalues(const reid_model* model, double* out, size_t cap);
REID_API reid_status reid_model_distance(const reid_model* model, const double* x, const double* z,
                                         size_t len, double* out);
REID_API void reid_model_free(reid_model* model);

/* ---- evaluation ------------------------------------------------------ */

typedef struct reid_eval_options {
  const reid_method* methods; /* trained per trial */
  size_t method_count;
  const reid_model* model;    /* optional fixed model scored in every trial */
  const char* probe_cam;      /* optional; required when the cache has >2 cameras */
  const char* gallery_cam;
  const int* sweep_dims;      /* optional XQDA subspace dimensions to sweep */
  size_t sweep_count;
} reid_eval_options;

REID_API reid_status reid_evaluate(const reid_cache* cache, const reid_settings* settings,
                                   const reid_eval_options* options, reid_report** out);
REID_API size_t reid_report_method_count(const reid_report* report);
REID_API const char* reid_report_method_label(const reid_report* report, size_t method);
REID_API size_t reid_report_ranks(const reid_report* report);
/* Mean CMC rate at a 1-based rank (saturates at the last rank). */
REID_API double reid_report_rate(const reid_report* report, size_t method, int rank);
REID_API double reid_report_rate_std(const reid_report* report, size_t method, int rank);
REID_API size_t reid_report_sweep_count(const reid_report* report);
REID_API reid_status reid_report_sweep_row(const reid_report* report, size_t row, int* dims,
                                           double* rank1, double* rank1_std, double* rank10,
                                           double* rank20);
REID_API reid_status reid_report_write_csv(const reid_report* report, const char* path);
REID_API reid_status reid_report_write_sweep_csv(const reid_report* report, const char* path);
REID_API reid_status reid_report_write_svg(const reid_report* report, const char* path);
REID_API void reid_report_free(reid_report* report);

/* ---- benchmarking ---------------------------------------------------- */

typedef struct reid_bench_result {
  size_t images;
  double extract_mean_seconds;
  double extract_p95_seconds;
  int train_dim;
  int train_samples_per_view;
  double train_seconds;
  size_t train_retained_dims;
} reid_bench_result;

/* Times descriptor extraction on `images` synthetic images at the configured
 * geometry, then XQDA training on random data of dimension train_dim with
 * train_samples_per_view samples in each view (two per identity). */
REID_API reid_status reid_bench(const reid_settings* settings, size_t images, int train_dim,
                                int train_samples_per_view, reid_bench_result* out);

#ifdef __cplusplus
}
#endif

#endif /* REID_H */
