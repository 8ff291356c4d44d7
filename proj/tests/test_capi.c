/* Exercises the shared library through its C header only. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "aswt/aswt.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);   \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static aswt_tower* tower(const char* text) {
  aswt_tower* t = NULL;
  aswt_status s = aswt_tower_from_spec_text(text, &t);
  if (s != ASWT_OK) {
    fprintf(stderr, "spec failed: %s\n", aswt_last_error());
    exit(1);
  }
  return t;
}

static void profiles(void) {
  aswt_tower* t = tower("{\"p\": 3, \"k\": 1, \"name\": \"x7\", \"terms\": [[0, 1, 7]]}");
  uint64_t g = 0, a[1] = {0};
  EXPECT(aswt_tower_genus(t, 3, &g) == ASWT_OK && g == 624);
  EXPECT(aswt_tower_kernel_profile(t, 2, 1, a, &g) == ASWT_OK);
  EXPECT(g == 66 && a[0] == 25);

  char* hash = NULL;
  EXPECT(aswt_tower_spec_hash(t, &hash) == ASWT_OK && hash && strlen(hash) == 16);
  aswt_string_free(hash);

  char* js = NULL;
  EXPECT(aswt_tower_compute_json(t, 0, 2, 1, &js) == ASWT_OK);
  EXPECT(js && strstr(js, "\"genus\":66") && strstr(js, "\"a\":[25]") && strstr(js, "\"level\":0"));
  aswt_string_free(js);

  js = NULL;
  EXPECT(aswt_tower_trace_check_json(t, 1, &js) == ASWT_OK && js && strstr(js, "\"pass\":true"));
  aswt_string_free(js);
  aswt_tower_free(t);

  t = tower("{\"p\": 2, \"k\": 1, \"terms\": [[0,1,21],[0,1,19],[0,1,15],[0,1,13],[0,1,9]]}");
  uint64_t a5[5];
  EXPECT(aswt_tower_kernel_profile(t, 2, 5, a5, NULL) == ASWT_OK);
  EXPECT(a5[0] == 16 && a5[1] == 25 && a5[2] == 31 && a5[3] == 36 && a5[4] == 40);
  js = NULL;
  EXPECT(aswt_tower_info_json(t, 3, &js) == ASWT_OK && js && strstr(js, "\"basic_d\":21"));
  aswt_string_free(js);
  aswt_tower_free(t);
}

static void errors(void) {
  aswt_tower* t = NULL;
  EXPECT(aswt_tower_from_spec_text("{\"p\": 4, \"terms\": [[0,1,3]]}", &t) != ASWT_OK);
  EXPECT(t == NULL);
  EXPECT(strlen(aswt_last_error()) > 0);
  EXPECT(aswt_tower_from_spec_text("p = ", &t) == ASWT_E_PARSE);
  EXPECT(aswt_tower_from_spec_text(NULL, &t) == ASWT_E_INVALID);
  EXPECT(aswt_tower_from_spec_file("/nonexistent/x.spec", &t) != ASWT_OK);
  EXPECT(aswt_constants(0, 2, NULL, NULL, NULL) != ASWT_OK);
  EXPECT(aswt_constants(1, 4, NULL, NULL, NULL) != ASWT_OK);

  int passed = 1;
  EXPECT(aswt_verify_suite("no-such-suite", NULL, &passed, NULL) == ASWT_E_INVALID);

  /* a successful call clears the message */
  EXPECT(aswt_constants(1, 2, NULL, NULL, NULL) == ASWT_OK);
  EXPECT(strcmp(aswt_last_error(), "") == 0);
}

static void analysis(void) {
  int64_t num = 0, den = 0;
  unsigned m = 0;
  EXPECT(aswt_constants(1, 3, &num, &den, &m) == ASWT_OK);
  EXPECT(num == 1 && den == 24);
  EXPECT(aswt_constants(1, 2, &num, &den, &m) == ASWT_OK);
  EXPECT(num == 1 && den == 24 && m == 1);

  const int64_t a[] = {2, 5, 19, 75, 299, 1195};
  char* js = NULL;
  EXPECT(aswt_fit_json(a, 6, 1, 7, 2, 1, &js) == ASWT_OK);
  EXPECT(js && strstr(js, "\"fitted\":true") && strstr(js, "\"leading\":\"7/24\""));
  aswt_string_free(js);

  const int64_t k[] = {16, 25, 31, 36, 40};
  js = NULL;
  EXPECT(aswt_elementary_divisors_json(k, 5, 40, &js) == ASWT_OK);
  EXPECT(js && js[0] == '[');
  aswt_string_free(js);
}

static void store(const char* dir) {
  char path[512];
  snprintf(path, sizeof path, "%s/capi_store.jsonl", dir);
  remove(path);
  const char* rec =
      "{\"schema\":1,\"spec_hash\":\"00000000000000aa\",\"spec_name\":\"s\",\"p\":2,\"k\":1,\"d\":7,"
      "\"level\":1,\"genus\":3,\"a\":[2],\"wall_time\":0.0,\"tool_version\":\"t\",\"timestamp\":\"x\"}";
  EXPECT(aswt_store_append(path, rec) == ASWT_OK);
  char* js = NULL;
  EXPECT(aswt_store_query_json(path, "00000000000000aa", -1, &js) == ASWT_OK);
  EXPECT(js && strstr(js, "\"genus\":3"));
  aswt_string_free(js);
  js = NULL;
  EXPECT(aswt_store_query_json(path, "ffffffffffffffff", -1, &js) == ASWT_OK);
  EXPECT(js && strcmp(js, "[]") == 0);
  aswt_string_free(js);
  EXPECT(aswt_store_append(path, "{\"schema\":99}") == ASWT_E_PARSE);
  remove(path);
}

static void suites(void) {
  char* js = NULL;
  EXPECT(aswt_suite_names_json(&js) == ASWT_OK && js && strstr(js, "constants"));
  aswt_string_free(js);
  int passed = 0;
  char* rep = NULL;
  EXPECT(aswt_verify_suite("constants", NULL, &passed, &rep) == ASWT_OK);
  EXPECT(passed == 1 && rep && strstr(rep, "\"pass\":true"));
  aswt_string_free(rep);
}

int main(int argc, char** argv) {
  EXPECT(strlen(aswt_version()) > 0);
  profiles();
  errors();
  analysis();
  store(argc > 1 ? argv[1] : ".");
  suites();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("C API: all checks passed\n");
  return 0;
}
