/* C interface to the sgw library. All functions return an sgw_status; the
 * message of the last failure on the calling thread is sgw_last_error(). */
#ifndef SGW_H
#define SGW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SGW_API __declspec(dllexport)
#else
#define SGW_API __attribute__((visibility("default")))
#endif

typedef enum sgw_status {
  SGW_OK = 0,
  SGW_DOMAIN_ERROR = 1,
  SGW_POLE_PROXIMITY = 2,
  SGW_NOT_A_SIMPLE_POLE = 3,
  SGW_ORACLE_MISMATCH = 4,
  SGW_AXIOM_VIOLATION = 5,
  SGW_POSITIVITY_VIOLATION = 6,
  SGW_NOT_FOUND = 7,
  SGW_STRIP_VIOLATION = 8,
  SGW_QUADRATURE_WARNING = 9,
  SGW_BUDGET_EXCEEDED = 10,
  SGW_TRUNCATION_OVERFLOW = 11,
  SGW_DOMAIN_VIOLATION = 12,
  SGW_NEGATIVE_RESIDUE = 13,
  SGW_FIT_INCONSISTENT = 14,
  SGW_HYPOTHESIS_VIOLATION = 15,
  SGW_POLE_ON_PATH = 16,
  SGW_CONFIG_ERROR = 17,
  SGW_PARSE_ERROR = 18,
  SGW_IO_ERROR = 19,
  SGW_INVALID_ARGUMENT = 20,
  SGW_INTERPOLATION_WARNING = 21,
  SGW_TAIL_WARNING = 22,
  SGW_INTERNAL = 99
} sgw_status;

typedef enum sgw_mode { SGW_MODE_RUN = 0, SGW_MODE_SCAN = 1, SGW_MODE_FIND_CDD = 2 } sgw_mode;

typedef struct sgw_session sgw_session;
typedef struct sgw_model sgw_model;

/* Unset fields: has_* = 0. */
typedef struct sgw_overrides {
  int has_tol_scale;
  double tol_scale;
  int has_grid_nodes;
  int grid_nodes;
  int has_seed;
  uint64_t seed;
} sgw_overrides;

SGW_API const char* sgw_version(void);
SGW_API const char* sgw_status_name(int status);
SGW_API const char* sgw_last_error(void);

/* Sessions: parsed config -> executed tasks -> report text. */
SGW_API int sgw_session_open(const char* config_path, const sgw_overrides* ov, sgw_session** out);
SGW_API int sgw_session_open_text(const char* config_json, const sgw_overrides* ov, sgw_session** out);
/* exit_code: 0 pass, 2 check failure, 4 oracle mismatch. */
SGW_API int sgw_session_run(sgw_session* s, sgw_mode mode, int* exit_code);
/* Valid until the next run or close; NULL before a run. scan_csv is NULL
 * when no scan ran. */
SGW_API const char* sgw_session_report(const sgw_session* s);
SGW_API const char* sgw_session_scan_csv(const sgw_session* s);
SGW_API const char* sgw_session_message(const sgw_session* s);
SGW_API int sgw_session_write(const sgw_session* s, const char* out_dir);
SGW_API void sgw_session_close(sgw_session* s);

/* Models. cdd: "auto", "trivial" or "S11=1.5;S12=1.5". */
SGW_API int sgw_model_build(double nu, double m1, const char* cdd, sgw_model** out);
SGW_API int sgw_model_species(const sgw_model* m, int* count);
SGW_API int sgw_model_mass(const sgw_model* m, int k, double* mass);
/* S_kl(re + i im), one-based indices. */
SGW_API int sgw_model_eval(const sgw_model* m, int k, int l, double re, double im, double* out_re, double* out_im);
SGW_API int sgw_model_residue(const sgw_model* m, int k, int l, double im, double* out_re, double* out_im);
/* Writes a NUL-terminated description of the CDD factors into buf. */
SGW_API int sgw_model_cdd(const sgw_model* m, char* buf, size_t len);
SGW_API void sgw_model_free(sgw_model* m);

#ifdef __cplusplus
}
#endif

#endif /* SGW_H */
