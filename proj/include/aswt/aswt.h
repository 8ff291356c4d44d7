#ifndef ASWT_H
#define ASWT_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define ASWT_API __attribute__((visibility("default")))
#else
#define ASWT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  ASWT_OK = 0,
  ASWT_E_INVALID = 1,      /* bad argument or unsupported input */
  ASWT_E_PARSE = 2,        /* malformed spec or record text */
  ASWT_E_DOMAIN = 3,       /* mathematically undefined request */
  ASWT_E_CONSISTENCY = 4,  /* an internal invariant failed */
  ASWT_E_IO = 5,
  ASWT_E_INTERNAL = 6      /* anything else, e.g. allocation failure */
} aswt_status;

typedef struct aswt_tower aswt_tower;

ASWT_API const char* aswt_version(void);
/* Message for the last failing call on this thread; "" if none. */
ASWT_API const char* aswt_last_error(void);
/* Frees strings returned through char** out parameters. */
ASWT_API void aswt_string_free(char* s);

ASWT_API aswt_status aswt_tower_from_spec_text(const char* text, aswt_tower** out);
ASWT_API aswt_status aswt_tower_from_spec_file(const char* path, aswt_tower** out);
ASWT_API void aswt_tower_free(aswt_tower* t);
/* Cartier tables and Witt polynomials are cached under dir (NULL disables caching). */
ASWT_API aswt_status aswt_tower_set_cache_dir(aswt_tower* t, const char* dir);

ASWT_API aswt_status aswt_tower_spec_hash(const aswt_tower* t, char** out);
/* JSON array of parse warnings. */
ASWT_API aswt_status aswt_tower_warnings_json(const aswt_tower* t, char** out);
/* Breaks, genera, closed forms, monodromy and the ramification hypothesis through level n. */
ASWT_API aswt_status aswt_tower_info_json(const aswt_tower* t, unsigned n, char** out);
ASWT_API aswt_status aswt_tower_genus(const aswt_tower* t, unsigned n, uint64_t* out);
/* a^(1..R) at one level, written to a_out[0..R-1]. */
ASWT_API aswt_status aswt_tower_kernel_profile(aswt_tower* t, unsigned level, unsigned R, uint64_t* a_out,
                                      uint64_t* genus_out);
/* JSON array of result records for levels from..n. */
ASWT_API aswt_status aswt_tower_compute_json(aswt_tower* t, unsigned from, unsigned n, unsigned R, char** out);
/* Trace bound on ker V for the cover T(level) -> T(level-1), as a JSON object. */
ASWT_API aswt_status aswt_tower_trace_check_json(aswt_tower* t, unsigned level, char** out);

ASWT_API aswt_status aswt_constants(unsigned r, unsigned p, int64_t* alpha_num, int64_t* alpha_den, unsigned* m);
/* Fit of a^(r) at levels first_level.. ; JSON object. */
ASWT_API aswt_status aswt_fit_json(const int64_t* a, size_t len, unsigned first_level, int64_t d, unsigned p, unsigned r,
                          char** out);
/* m_n(i) for a kernel sequence reaching stable_value; JSON array. */
ASWT_API aswt_status aswt_elementary_divisors_json(const int64_t* a, size_t len, int64_t stable_value, char** out);

ASWT_API aswt_status aswt_suite_names_json(char** out);
/* passed is set to 1 when every check matched.  report is a JSON object. */
ASWT_API aswt_status aswt_verify_suite(const char* name, const char* cache_dir, int* passed, char** report);

/* Line-delimited result store.  record_json is one record as produced by compute. */
ASWT_API aswt_status aswt_store_append(const char* path, const char* record_json);
/* spec_hash may be NULL; level < 0 matches every level. */
ASWT_API aswt_status aswt_store_query_json(const char* path, const char* spec_hash, int level, char** out);

#ifdef __cplusplus
}
#endif

#endif
