/* C interface to the fockpulse library.
 *
 * Every fallible call returns fp_status. On failure the message is available
 * from fp_last_error() on the same thread until the next call. Objects are
 * opaque handles released with their matching *_free function; strings
 * returned through char** are released with fp_string_free.
 *
 * Matrices are row-major, dimension 2 * cutoff, ground block first.
 */
#ifndef FOCKPULSE_H
#define FOCKPULSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FP_API __declspec(dllexport)
#else
#define FP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fp_status {
  FP_OK = 0,
  FP_ERR_CONFIG = 1,
  FP_ERR_PARAMETER = 2,
  FP_ERR_INDEX = 3,
  FP_ERR_SHAPE = 4,
  FP_ERR_CONTRACT = 5,
  FP_ERR_LAYOUT = 6,
  FP_ERR_NUMERICAL = 7,
  FP_ERR_ILL_CONDITIONED = 8,
  FP_ERR_IO = 9,
  FP_ERR_OPTIMIZATION = 10,
  FP_ERR_INTERNAL = 11
} fp_status;

FP_API const char* fp_version(void);
FP_API const char* fp_status_name(fp_status status);
FP_API const char* fp_last_error(void);
/* Condition number attached to the last FP_ERR_ILL_CONDITIONED, else 0. */
FP_API double fp_last_condition(void);
FP_API void fp_string_free(char* s);

typedef struct fp_system {
  double eta;
  double nu;
  double hbar;
  int cutoff;
  int fock_offset;
} fp_system;

typedef struct fp_pulse_params {
  double delta;
  double omega;
  double phi;
  double t;
} fp_pulse_params;

/* eta 0.084, nu 1, hbar 1, cutoff 4, offset 0 */
FP_API void fp_system_default(fp_system* out);

/* One microsecond in dimensionless time units. */
FP_API double fp_time_units_per_microsecond(void);

/* ---- composite pulses ---- */

typedef struct fp_pulse fp_pulse;

FP_API fp_status fp_pulse_create(const fp_pulse_params* params, size_t count, fp_pulse** out);
FP_API fp_status fp_pulse_analytic_swap(const fp_system* system, double omega, fp_pulse** out);
FP_API size_t fp_pulse_size(const fp_pulse* pulse);
FP_API fp_status fp_pulse_get(const fp_pulse* pulse, size_t index, fp_pulse_params* out);
FP_API double fp_pulse_total_duration(const fp_pulse* pulse);
FP_API void fp_pulse_free(fp_pulse* pulse);

/* ---- evaluation ---- */

/* re, im: dim * dim each */
FP_API fp_status fp_unitary(const fp_system* system, const fp_pulse* pulse, double* re,
                            double* im);
/* out: dim * dim */
FP_API fp_status fp_modulus_matrix(const fp_system* system, const fp_pulse* pulse, double* out);
/* out: cutoff entries, probability that |g, n> ends in the excited manifold */
FP_API fp_status fp_excitation_profile(const fp_system* system, const fp_pulse* pulse,
                                       double* out);
/* preset: "swap(n)" or "shelve(n)" with absolute Fock index n */
FP_API fp_status fp_target_loss(const fp_system* system, const fp_pulse* pulse,
                                const char* preset, double* loss);

/* ---- run configuration ---- */

typedef struct fp_config fp_config;

/* path NULL or "" gives the defaults */
FP_API fp_status fp_config_load(const char* path, fp_config** out);
FP_API fp_status fp_config_parse(const char* json_text, fp_config** out);
FP_API void fp_config_free(fp_config* cfg);
/* Replaces the seed list with this single seed. */
FP_API fp_status fp_config_set_seed(fp_config* cfg, uint64_t seed);
FP_API fp_status fp_config_set_cutoff(fp_config* cfg, int cutoff);
FP_API fp_status fp_config_set_output_dir(fp_config* cfg, const char* dir);
FP_API fp_status fp_config_get_system(const fp_config* cfg, fp_system* out);
FP_API double fp_config_omega(const fp_config* cfg);
FP_API double fp_config_max_loss(const fp_config* cfg);
FP_API fp_status fp_config_output_dir(const fp_config* cfg, char** out);
FP_API fp_status fp_config_target(const fp_config* cfg, char** out);
/* Full configuration with every default filled in. */
FP_API fp_status fp_config_to_json(const fp_config* cfg, char** out);

/* stage is "pso", "refine" or "design"; start is the swarm (design) or the
 * window state (thermometry). May be called from worker threads, never
 * concurrently. */
typedef void (*fp_progress_fn)(const char* stage, int start, int iteration, double best_loss,
                               void* user);

/* ---- design ---- */

typedef struct fp_design_result fp_design_result;

/* One design per configured seed; keeps the lowest loss, ties going to the
 * shorter total duration. Phases of the result are mapped into [0, 2 pi)
 * and the loss is re-evaluated on the mapped pulse. */
FP_API fp_status fp_design(const fp_config* cfg, fp_progress_fn progress, void* user,
                           fp_design_result** out);
FP_API double fp_design_loss(const fp_design_result* r);
FP_API uint64_t fp_design_seed(const fp_design_result* r);
FP_API size_t fp_design_evaluations(const fp_design_result* r);
FP_API const fp_pulse* fp_design_pulse(const fp_design_result* r);
FP_API size_t fp_design_history_size(const fp_design_result* r);
FP_API fp_status fp_design_history(const fp_design_result* r, int* iterations, double* losses);
FP_API void fp_design_result_free(fp_design_result* r);

/* ---- pulse library ---- */

/* Writes <dir>/<id>.json. provenance_json may be NULL. */
FP_API fp_status fp_library_save(const char* dir, const fp_system* system, const char* target,
                                 const fp_pulse* pulse, double loss, const char* provenance_json,
                                 char** id_out, char** path_out);
/* ref: an id under dir or a path to an entry file. Output pointers other
 * than pulse may be NULL. */
FP_API fp_status fp_library_load(const char* dir, const char* ref, fp_pulse** pulse,
                                 fp_system* system, char** target, char** id, double* loss);
/* Library directory for a configuration: <output_dir>/library */
FP_API fp_status fp_config_library_dir(const fp_config* cfg, char** out);

/* ---- thermometry ---- */

typedef struct fp_thermometry_report fp_thermometry_report;

/* Designs (or loads from the library) one shelving pulse per window state,
 * builds the coefficient matrix on the design space, simulates readout on
 * the truth space and corrects. */
FP_API fp_status fp_thermometry_run(const fp_config* cfg, fp_progress_fn progress, void* user,
                                    fp_thermometry_report** out);
FP_API size_t fp_report_window_size(const fp_thermometry_report* r);
/* Each output has window_size entries; any may be NULL. */
FP_API fp_status fp_report_vectors(const fp_thermometry_report* r, int* window, double* truth,
                                   double* measured, double* corrected);
FP_API double fp_report_condition(const fp_thermometry_report* r);
FP_API double fp_report_max_corrected_error(const fp_thermometry_report* r);
FP_API double fp_report_max_measured_error(const fp_thermometry_report* r);
FP_API fp_status fp_report_design_system(const fp_thermometry_report* r, fp_system* out);
FP_API const fp_pulse* fp_report_pulse(const fp_thermometry_report* r, size_t index);
FP_API double fp_report_loss(const fp_thermometry_report* r, size_t index);
FP_API fp_status fp_report_to_json(const fp_thermometry_report* r, char** out);
/* Columns: n,P,M,R */
FP_API fp_status fp_report_to_csv(const fp_thermometry_report* r, char** out);
FP_API void fp_report_free(fp_thermometry_report* r);

/* ---- robustness ---- */

typedef enum fp_sweep_axis { FP_SWEEP_DURATION = 0, FP_SWEEP_PHASE = 1 } fp_sweep_axis;

typedef struct fp_sweep_spec {
  fp_sweep_axis axis;
  int which;        /* pulse index, -1 for every pulse */
  double lower;
  double upper;
  int points;
  int input_fock;   /* absolute */
  int target_fock;  /* absolute, -1 for total excitation */
  int threads;      /* 0 picks the hardware count */
} fp_sweep_spec;

/* phase sweep over [-1, 1], 41 points, |g,0> -> |e,1>, one thread */
FP_API void fp_sweep_spec_default(fp_sweep_spec* out);

/* Each output holds spec->points entries; clamped may be NULL. */
FP_API fp_status fp_sweep(const fp_system* system, const fp_pulse* pulse,
                          const fp_sweep_spec* spec, double* offsets, double* probabilities,
                          int* clamped);
/* Widest run of samples containing offset 0 with probability >= threshold.
 * *found is 0 when the sample nearest 0 is already below the threshold. */
FP_API fp_status fp_widest_window(const double* offsets, const double* probabilities, size_t n,
                                  double threshold, int* found, double* lower, double* upper);
/* Columns: offset,probability,clamped */
FP_API fp_status fp_sweep_to_csv(const double* offsets, const double* probabilities,
                                 const int* clamped, size_t n, char** out);

#ifdef __cplusplus
}
#endif

#endif
