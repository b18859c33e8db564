/*
 * morsekit — verification and construction toolkit for Morse quasigeodesics
 * and Morse group actions on the space of positive-definite unimodular
 * matrices.
 *
 * Stable C surface over the C++ core.  A context holds the model
 * configuration (matrix size, flag pattern, tolerances) plus an optional
 * calibration table; commands consume JSON input files and return JSON
 * result documents as heap strings owned by the library (release them with
 * mk_string_free).  All functions return MK_OK on success; on any other
 * status *error (when non-NULL) receives a message string.
 */

#ifndef MORSEKIT_H
#define MORSEKIT_H

#include <stdint.h>

#if defined(_WIN32)
#define MK_API __declspec(dllexport)
#else
#define MK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mk_context mk_context;

typedef enum mk_status {
  MK_OK = 0,
  MK_ERROR = 1,             /* I/O, parse, invalid input, internal */
  MK_REJECTED = 2,          /* check ran and the verdict is negative */
  MK_NONGENERIC = 3,        /* generator pair is not generic */
  MK_BUDGET_EXHAUSTED = 4,  /* power search ran out of budget */
  MK_STAGES_EXHAUSTED = 5,  /* recognition ran out of stages */
  MK_RESOURCE = 6,          /* enumeration over the configured cap */
  MK_CALIBRATION = 7        /* missing or contradictory calibration entry */
} mk_status;

MK_API const char* mk_version(void);

/* Context from a JSON/TOML config file (model block required); pass a NULL
 * or empty calibration path to run without a table (commands needing one
 * will fail with MK_CALIBRATION). */
MK_API mk_status mk_context_create(const char* config_path, char** error,
                                   mk_context** out);

/* Convenience context: size n, flag pattern, default types and tolerances. */
MK_API mk_status mk_context_create_default(int32_t n, const int32_t* pattern,
                                           int32_t pattern_len, char** error,
                                           mk_context** out);

MK_API void mk_context_destroy(mk_context* ctx);

MK_API mk_status mk_context_load_calibration(mk_context* ctx, const char* path,
                                             char** error);

/* Runs the calibration sweep and writes the table to out_path (also loaded
 * into the context).  stage_max <= 0 uses the default. */
MK_API mk_status mk_calibrate(mk_context* ctx, int32_t stage_max,
                              uint64_t seed, const char* out_path,
                              char** error);

/* Certify a sampled path (JSON file) against a Morse datum.  datum_json may
 * be NULL for the stage-1-style default read from the config.  local > 0
 * runs the windowed local check at that scale instead of the global one.
 * promote != 0 applies the calibrated local-to-global promotion.  The
 * certificate JSON lands in *result. */
MK_API mk_status mk_certify_path(mk_context* ctx, const char* path_file,
                                 const char* datum_json, int32_t local_scale,
                                 int32_t promote, char** result, char** error);

/* Schottky pipeline: generic pair -> power search -> word verification.
 * generators_file holds {"alpha": matrix, "beta": matrix}.  budget bounds
 * the power search, max_word_length the verification depth.  A margins CSV
 * (power sweep) is returned via *sweep_csv when non-NULL. */
MK_API mk_status mk_schottky(mk_context* ctx, const char* generators_file,
                             int32_t budget, int32_t max_word_length,
                             int32_t independent_powers, char** result,
                             char** sweep_csv, char** error);

/* Stagewise recognition of a free-group representation
 * ({"rank", "generators", "basepoint"}). */
MK_API mk_status mk_recognize(mk_context* ctx, const char* representation_file,
                              int32_t budget_stages, int64_t max_paths,
                              char** result, char** error);

/* Re-run the check recorded in a certificate file and compare verdicts. */
MK_API mk_status mk_replay(mk_context* ctx, const char* certificate_file,
                           char** result, char** error);

MK_API void mk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MORSEKIT_H */
