/* C interface to the it2sqa PPG signal-quality library.
 *
 * All objects are opaque handles created by *_create/_load/_synthesize/_train
 * calls and released with the matching *_free. Every fallible call returns an
 * it2sqa_status; on failure it2sqa_last_error() describes the problem. The
 * message is thread-local and stays valid until the next failing call on the
 * same thread. Handles are immutable after creation and may be shared across
 * threads for read-only calls.
 */
#ifndef IT2SQA_H
#define IT2SQA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IT2SQA_BUILDING_LIBRARY)
#    define IT2SQA_API __declspec(dllexport)
#  else
#    define IT2SQA_API __declspec(dllimport)
#  endif
#else
#  define IT2SQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum it2sqa_status {
  IT2SQA_OK = 0,
  IT2SQA_ERR_RUNTIME = 1,     /* unexpected internal failure */
  IT2SQA_ERR_INVALID = 2,     /* malformed file, bad argument, null handle */
  IT2SQA_ERR_IO = 3,          /* missing input or unwritable output */
  IT2SQA_ERR_UNTRAINABLE = 4  /* too few windows of one class to cross-validate */
} it2sqa_status;

typedef enum it2sqa_label { IT2SQA_NOISY = 0, IT2SQA_CLEAN = 1 } it2sqa_label;

typedef enum it2sqa_split {
  IT2SQA_SPLIT_TRAIN = 0,
  IT2SQA_SPLIT_VALIDATION = 1,
  IT2SQA_SPLIT_TEST = 2
} it2sqa_split;

typedef struct it2sqa_study it2sqa_study;   /* labelled windows of one or more subjects */
typedef struct it2sqa_models it2sqa_models; /* one SI rule base plus per-subject SD rule bases */

typedef struct it2sqa_synth_params {
  size_t n_subjects;
  size_t windows_per_subject;
  double noisy_fraction;
  double subject_shift;
  uint64_t seed;
  double fs;
  double window_seconds;
  double train_fraction;
  double validation_fraction;
} it2sqa_synth_params;

typedef struct it2sqa_ga_config {
  size_t population_size;
  size_t generations;
  double crossover_rate;
  double mutation_rate;
  size_t tournament_size;
  size_t elite_count;
  uint64_t seed;
  size_t a_max;
  size_t m_max;
  size_t n_terms;
  size_t threads;
  double delta;        /* upper-MF foot widening */
  double lower_height; /* lower-MF apex height */
} it2sqa_ga_config;

typedef struct it2sqa_decision {
  it2sqa_label predicted;
  double score_noisy;
  double score_clean;
  double sqi;
} it2sqa_decision;

typedef struct it2sqa_eval_summary {
  size_t n_subjects;
  size_t n_skipped; /* subjects without an SD model or without windows in the split */
  double mcc_mean;  /* fused model at the requested alpha */
  double mcc_std;
  double acc_mean;
  double acc_std;
} it2sqa_eval_summary;

typedef struct it2sqa_sweep_summary {
  size_t n_points;
  size_t n_subjects;
  size_t n_skipped;
  double best_alpha;
  double best_mean_mcc;
  double best_std_mcc;
} it2sqa_sweep_summary;

IT2SQA_API const char* it2sqa_version(void);
IT2SQA_API const char* it2sqa_last_error(void);

IT2SQA_API void it2sqa_synth_params_default(it2sqa_synth_params* params);
IT2SQA_API void it2sqa_ga_config_default(it2sqa_ga_config* config);

/* Overwrites only the fields present in the file; either output may be NULL. */
IT2SQA_API it2sqa_status it2sqa_config_load(const char* path, it2sqa_synth_params* synth,
                                            it2sqa_ga_config* ga);

IT2SQA_API it2sqa_status it2sqa_study_synthesize(const it2sqa_synth_params* params, it2sqa_study** out);
IT2SQA_API it2sqa_status it2sqa_study_load_csv(const char* path, double fs, it2sqa_study** out);
IT2SQA_API it2sqa_status it2sqa_study_save_csv(const it2sqa_study* study, const char* path);
IT2SQA_API it2sqa_status it2sqa_study_save_features_csv(const it2sqa_study* study, const char* path);
IT2SQA_API it2sqa_status it2sqa_study_counts(const it2sqa_study* study, size_t* subjects, size_t* windows,
                                             size_t* noisy);
IT2SQA_API void it2sqa_study_free(it2sqa_study* study);

/* Writes `dim` features of one window into out (dim must equal the feature dimension, 4). */
IT2SQA_API it2sqa_status it2sqa_extract_features(const double* samples, size_t n, double* out, size_t dim);
IT2SQA_API size_t it2sqa_feature_dimension(void);

IT2SQA_API it2sqa_status it2sqa_train(const it2sqa_study* study, const it2sqa_ga_config* config,
                                      it2sqa_models** out);
IT2SQA_API it2sqa_status it2sqa_models_save(const it2sqa_models* models, const char* dir);
IT2SQA_API it2sqa_status it2sqa_models_load(const char* dir, it2sqa_models** out);
IT2SQA_API size_t it2sqa_models_sd_count(const it2sqa_models* models);
IT2SQA_API size_t it2sqa_models_untrainable_count(const it2sqa_models* models);
IT2SQA_API const char* it2sqa_models_untrainable_subject(const it2sqa_models* models, size_t i);
IT2SQA_API const char* it2sqa_models_untrainable_reason(const it2sqa_models* models, size_t i);
IT2SQA_API void it2sqa_models_free(it2sqa_models* models);

/* alpha 0 uses the SI rule base only and does not require an SD model for the subject. */
IT2SQA_API it2sqa_status it2sqa_classify(const it2sqa_models* models, const char* subject_id, double alpha,
                                         const double* features, size_t dim, it2sqa_decision* out);

/* Segments a single-column signal CSV into windows and writes
 * window_index,predicted,score_noisy,score_clean,sqi per window. */
IT2SQA_API it2sqa_status it2sqa_classify_signal_csv(const it2sqa_models* models, const char* subject_id,
                                                    double alpha, const char* signal_path, double fs,
                                                    double window_seconds, const char* out_path,
                                                    size_t* n_windows);

/* Report rows for alpha 0, alpha 1 and the requested alpha; per_subject_path may be NULL. */
IT2SQA_API it2sqa_status it2sqa_evaluate(const it2sqa_models* models, const it2sqa_study* study,
                                         it2sqa_split split, double alpha, const char* report_path,
                                         const char* per_subject_path, it2sqa_eval_summary* summary);

/* Parses "start:step:stop". With out == NULL only *count is set. */
IT2SQA_API it2sqa_status it2sqa_parse_grid(const char* text, double* out, size_t capacity, size_t* count);

/* grid == NULL selects the default 0..1 grid in 0.1 steps. */
IT2SQA_API it2sqa_status it2sqa_sweep(const it2sqa_models* models, const it2sqa_study* study, it2sqa_split split,
                                      const double* grid, size_t grid_size, const char* per_subject_path,
                                      const char* summary_path, it2sqa_sweep_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* IT2SQA_H */
