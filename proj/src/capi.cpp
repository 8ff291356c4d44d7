#include "aswt/aswt.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "aswt/analysis.hpp"
#include "aswt/cartier.hpp"
#include "aswt/error.hpp"
#include "aswt/pipeline.hpp"
#include "aswt/spec_io.hpp"
#include "aswt/store.hpp"
#include "aswt/version.hpp"
#include "json.hpp"

using nlohmann::json;

struct aswt_tower {
  aswt::TowerSpec spec;
  std::vector<std::string> warnings;
  std::optional<std::filesystem::path> cache_dir;
  std::unique_ptr<aswt::TowerState> ts;
  std::unique_ptr<aswt::CartierOperator> V;

  aswt::CartierOperator& op(unsigned n) {
    if (!V) {
      ts = std::make_unique<aswt::TowerState>(spec, cache_dir);
      V = std::make_unique<aswt::CartierOperator>(*ts, cache_dir);
    }
    V->build(n);
    return *V;
  }
};

namespace {

thread_local std::string g_last_error;

aswt_status status_of(aswt::ErrorCode c) {
  switch (c) {
    case aswt::ErrorCode::invalid_argument: return ASWT_E_INVALID;
    case aswt::ErrorCode::parse: return ASWT_E_PARSE;
    case aswt::ErrorCode::domain: return ASWT_E_DOMAIN;
    case aswt::ErrorCode::consistency: return ASWT_E_CONSISTENCY;
    case aswt::ErrorCode::io: return ASWT_E_IO;
  }
  return ASWT_E_INTERNAL;
}

template <class F>
aswt_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return ASWT_OK;
  } catch (const aswt::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASWT_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ASWT_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) aswt::fail(aswt::ErrorCode::invalid_argument, std::string(what) + " is null");
}

void put(char** out, const std::string& s) {
  need(out, "output pointer");
  char* c = static_cast<char*>(std::malloc(s.size() + 1));
  if (!c) throw std::bad_alloc();
  std::memcpy(c, s.c_str(), s.size() + 1);
  *out = c;
}

json rational_json(const aswt::Rational& r) { return aswt::to_string(r); }

json rationals_json(const std::vector<aswt::Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rational_json(x));
  return a;
}

aswt_tower* make_tower(aswt::ParsedSpec ps) {
  auto t = std::make_unique<aswt_tower>();
  t->spec = std::move(ps.spec);
  t->warnings = std::move(ps.warnings);
  return t.release();
}

}  // namespace

extern "C" {

const char* aswt_version(void) { return ASWT_VERSION; }

const char* aswt_last_error(void) { return g_last_error.c_str(); }

void aswt_string_free(char* s) { std::free(s); }

aswt_status aswt_tower_from_spec_text(const char* text, aswt_tower** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = make_tower(aswt::parse_spec_text(text));
  });
}

aswt_status aswt_tower_from_spec_file(const char* path, aswt_tower** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = make_tower(aswt::parse_spec_file(path));
  });
}

void aswt_tower_free(aswt_tower* t) { delete t; }

aswt_status aswt_tower_set_cache_dir(aswt_tower* t, const char* dir) {
  return guarded([&] {
    need(t, "tower");
    t->V.reset();
    t->ts.reset();
    if (dir) {
      std::filesystem::create_directories(dir);
      t->cache_dir = std::filesystem::path(dir);
    } else {
      t->cache_dir.reset();
    }
  });
}

aswt_status aswt_tower_spec_hash(const aswt_tower* t, char** out) {
  return guarded([&] {
    need(t, "tower");
    put(out, aswt::spec_hash(t->spec));
  });
}

aswt_status aswt_tower_warnings_json(const aswt_tower* t, char** out) {
  return guarded([&] {
    need(t, "tower");
    put(out, json(t->warnings).dump());
  });
}

aswt_status aswt_tower_info_json(const aswt_tower* t, unsigned n, char** out) {
  return guarded([&] {
    need(t, "tower");
    const aswt::TowerSpec norm = aswt::normalize_rhs(t->spec);
    const aswt::FieldCtx& F = *norm.field;
    json j;
    j["name"] = t->spec.name;
    j["spec_hash"] = aswt::spec_hash(t->spec);
    j["p"] = F.p();
    j["k"] = F.k();
    j["modulus"] = F.modulus();
    json terms = json::array();
    for (const auto& term : norm.terms)
      terms.push_back(json::array({term.v, F.k() == 1 ? json(term.c) : json(F.digits(term.c)), term.i}));
    j["normalized_terms"] = terms;
    const auto d = aswt::basic_invariant(norm);
    j["basic_d"] = d ? json(*d) : json(nullptr);
    j["warnings"] = t->warnings;
    json levels = json::array();
    if (n > 0) {
      auto ram = aswt::ramification(norm, n);
      for (unsigned m = 1; m <= n; ++m)
        levels.push_back({{"level", m},
                          {"s", ram.s[m - 1]},
                          {"u", ram.u[m - 1]},
                          {"d", ram.d[m - 1]},
                          {"genus", ram.g[m - 1]}});
      json hyp = json::array();
      for (const auto& h : aswt::ramification_hypothesis(ram))
        hyp.push_back({{"n", h.n}, {"delta", h.delta}, {"holds", h.holds}, {"trace_vanishes", h.trace_vanishes}});
      j["ramification_hypothesis"] = hyp;
      j["monodromy"] = aswt::to_string(aswt::classify_monodromy(F.p(), ram.s));
      if (d) {
        json cf = json::array();
        for (unsigned m = 1; m <= n; ++m) {
          auto c = aswt::closed_form_basic(F.p(), *d, m);
          json row = {{"level", m}, {"genus", c.g}, {"d", c.d_lower}, {"s", c.s}};
          if (F.p() == 2) row["a"] = aswt::anumber_basic_p2(static_cast<std::int64_t>(*d), m);
          cf.push_back(row);
        }
        j["closed_forms"] = cf;
      }
    }
    j["levels"] = levels;
    put(out, j.dump());
  });
}

aswt_status aswt_tower_genus(const aswt_tower* t, unsigned n, uint64_t* out) {
  return guarded([&] {
    need(t, "tower");
    need(out, "out");
    *out = aswt::genus(t->spec, n);
  });
}

aswt_status aswt_tower_kernel_profile(aswt_tower* t, unsigned level, unsigned R, uint64_t* a_out,
                                      uint64_t* genus_out) {
  return guarded([&] {
    need(t, "tower");
    if (R > 0) need(a_out, "a_out");
    auto& V = t->op(level);
    auto lp = aswt::kernel_profiles(V, level, level, R).at(0);
    for (unsigned r = 0; r < R; ++r) a_out[r] = lp.a[r];
    if (genus_out) *genus_out = lp.genus;
  });
}

aswt_status aswt_tower_compute_json(aswt_tower* t, unsigned from, unsigned n, unsigned R, char** out) {
  return guarded([&] {
    need(t, "tower");
    auto recs = aswt::run_compute(t->spec, {from, n, R, t->cache_dir});
    json arr = json::array();
    for (const auto& r : recs) arr.push_back(json::parse(aswt::to_json(r)));
    put(out, arr.dump());
  });
}

aswt_status aswt_tower_trace_check_json(aswt_tower* t, unsigned level, char** out) {
  return guarded([&] {
    need(t, "tower");
    auto& V = t->op(level);
    auto c = aswt::trace_bound_check(V, level);
    json j = {{"level", c.level},
              {"d", c.d},
              {"bound", c.bound},
              {"strict", c.strict},
              {"vanishing_expected", c.vanishing_expected},
              {"kernel_dim", c.kernel_dim},
              {"violations", c.violations},
              {"min_order", c.min_order == aswt::kInfiniteValuation ? json("inf") : json(c.min_order)},
              {"pass", c.pass()}};
    put(out, j.dump());
  });
}

aswt_status aswt_constants(unsigned r, unsigned p, int64_t* alpha_num, int64_t* alpha_den, unsigned* m) {
  return guarded([&] {
    auto c = aswt::constants(r, p);
    if (alpha_num) *alpha_num = c.alpha.numerator();
    if (alpha_den) *alpha_den = c.alpha.denominator();
    if (m) *m = c.m;
  });
}

aswt_status aswt_fit_json(const int64_t* a, size_t len, unsigned first_level, int64_t d, unsigned p, unsigned r,
                          char** out) {
  return guarded([&] {
    need(a, "a");
    std::vector<std::int64_t> v(a, a + len);
    auto f = aswt::fit_periodic(v, d, p, r, first_level);
    auto k = aswt::constants(r, p);
    json j = {{"r", r},
              {"p", p},
              {"d", d},
              {"alpha", rational_json(k.alpha)},
              {"m", k.m},
              {"fitted", f.fitted},
              {"leading", rational_json(f.leading)},
              {"lambda", rational_json(f.lambda)},
              {"period", f.period},
              {"trial_period", f.trial_period},
              {"c", rationals_json(f.c)},
              {"c_delta", rationals_json(f.c_delta)},
              {"discrepancies", f.discrepancies},
              {"valid_from", f.valid_from},
              {"last_level", f.last_level},
              {"formula", aswt::describe(f)}};
    put(out, j.dump());
  });
}

aswt_status aswt_elementary_divisors_json(const int64_t* a, size_t len, int64_t stable_value, char** out) {
  return guarded([&] {
    need(a, "a");
    std::vector<std::int64_t> v(a, a + len);
    put(out, json(aswt::elementary_divisors(v, stable_value)).dump());
  });
}

aswt_status aswt_suite_names_json(char** out) {
  return guarded([&] { put(out, json(aswt::suite_names()).dump()); });
}

aswt_status aswt_verify_suite(const char* name, const char* cache_dir, int* passed, char** report) {
  return guarded([&] {
    need(name, "name");
    std::optional<std::filesystem::path> cache;
    if (cache_dir) cache = std::filesystem::path(cache_dir);
    auto rep = aswt::verify_suite(name, cache);
    if (passed) *passed = rep.pass() ? 1 : 0;
    if (report) {
      json checks = json::array();
      for (const auto& c : rep.checks)
        checks.push_back({{"what", c.what}, {"expected", c.expected}, {"actual", c.actual}, {"ok", c.ok}});
      json j = {{"suite", rep.name},
                {"pass", rep.pass()},
                {"failures", rep.failures()},
                {"seconds", rep.seconds},
                {"checks", checks}};
      put(report, j.dump());
    }
  });
}

aswt_status aswt_store_append(const char* path, const char* record_json) {
  return guarded([&] {
    need(path, "path");
    need(record_json, "record");
    aswt::ResultStore(path).append(aswt::record_from_json(record_json));
  });
}

aswt_status aswt_store_query_json(const char* path, const char* spec_hash, int level, char** out) {
  return guarded([&] {
    need(path, "path");
    std::optional<std::string> h;
    if (spec_hash) h = spec_hash;
    std::optional<unsigned> lv;
    if (level >= 0) lv = static_cast<unsigned>(level);
    json arr = json::array();
    for (const auto& r : aswt::ResultStore(path).query(h, lv)) arr.push_back(json::parse(aswt::to_json(r)));
    put(out, arr.dump());
  });
}

}  // extern "C"
