#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "aswt/aswt.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kInternal = 3 };

struct ApiError : std::runtime_error {
  aswt_status status;
  ApiError(aswt_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

int exit_code(aswt_status s) {
  switch (s) {
    case ASWT_OK: return kOk;
    case ASWT_E_INVALID:
    case ASWT_E_PARSE:
    case ASWT_E_DOMAIN:
    case ASWT_E_IO: return kUsage;
    case ASWT_E_CONSISTENCY:
    case ASWT_E_INTERNAL: return kInternal;
  }
  return kInternal;
}

void check(aswt_status s) {
  if (s != ASWT_OK) throw ApiError(s, aswt_last_error());
}

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  aswt_string_free(s);
  return out;
}

template <class F>
json call_json(F&& f) {
  char* out = nullptr;
  check(f(&out));
  return json::parse(take(out));
}

using TowerPtr = std::unique_ptr<aswt_tower, decltype(&aswt_tower_free)>;

TowerPtr open_tower(const std::string& path, const std::optional<fs::path>& cache) {
  aswt_tower* t = nullptr;
  check(aswt_tower_from_spec_file(path.c_str(), &t));
  TowerPtr p(t, &aswt_tower_free);
  if (cache) check(aswt_tower_set_cache_dir(t, cache->string().c_str()));
  return p;
}

void print_warnings(const aswt_tower* t, const std::string& label) {
  auto w = call_json([&](char** o) { return aswt_tower_warnings_json(t, o); });
  for (const auto& s : w) std::cerr << "warning: " << label << ": " << s.get<std::string>() << "\n";
}

struct Paths {
  fs::path data_dir;
  bool use_cache = true;
  bool use_store = true;

  fs::path store() const { return data_dir / "results.jsonl"; }
  std::optional<fs::path> cache() const {
    if (!use_cache) return std::nullopt;
    return data_dir / "cache";
  }
};

std::string join(const json& a, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? sep : "") + a[i].dump();
  return s;
}

std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string record_row(const json& r) {
  std::ostringstream os;
  os << "level " << r["level"] << "  genus " << r["genus"] << "  a = (" << join(r["a"], ", ") << ")  ";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", r["wall_time"].get<double>());
  return os.str() + buf;
}

void append_records(const Paths& paths, const json& records) {
  if (!paths.use_store) return;
  fs::create_directories(paths.data_dir);
  for (const auto& r : records) check(aswt_store_append(paths.store().string().c_str(), r.dump().c_str()));
}

// ---------------------------------------------------------------- info

struct InfoArgs {
  std::string spec;
  unsigned n = 3;
  bool as_json = false;
};

int cmd_info(const InfoArgs& a, const Paths&) {
  auto t = open_tower(a.spec, std::nullopt);
  auto j = call_json([&](char** o) { return aswt_tower_info_json(t.get(), a.n, o); });
  if (a.as_json) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  print_warnings(t.get(), a.spec);
  std::cout << "name      " << j["name"].get<std::string>() << "\n"
            << "hash      " << j["spec_hash"].get<std::string>() << "\n"
            << "field     GF(" << j["p"] << "^" << j["k"] << ")\n"
            << "terms     " << j["normalized_terms"].dump() << "  [v, c, i]\n"
            << "basic d   " << (j["basic_d"].is_null() ? "-" : j["basic_d"].dump()) << "\n";
  if (j.contains("monodromy")) std::cout << "monodromy " << j["monodromy"].get<std::string>() << "\n";
  std::map<unsigned, json> closed;
  if (j.contains("closed_forms"))
    for (const auto& c : j["closed_forms"]) closed[c["level"].get<unsigned>()] = c;
  std::cout << "\nlevel  upper  conductor  lower  genus";
  if (!closed.empty() && closed.begin()->second.contains("a")) std::cout << "  a (closed form)";
  std::cout << "\n";
  for (const auto& l : j["levels"]) {
    std::printf("%5u  %5s  %9s  %5s  %5s", l["level"].get<unsigned>(), l["s"].dump().c_str(), l["u"].dump().c_str(),
                l["d"].dump().c_str(), l["genus"].dump().c_str());
    auto it = closed.find(l["level"].get<unsigned>());
    if (it != closed.end() && it->second.contains("a")) std::printf("  %s", it->second["a"].dump().c_str());
    std::printf("\n");
  }
  if (j.contains("ramification_hypothesis")) {
    std::cout << "\nbreak hypothesis by level:";
    for (const auto& h : j["ramification_hypothesis"])
      std::cout << " " << h["n"] << (h["holds"].get<bool>() ? "+" : "-");
    std::cout << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- compute

struct ComputeArgs {
  std::string spec;
  unsigned from = 1, n = 1, R = 1;
  bool as_json = false;
  bool trace = false;
};

int cmd_compute(const ComputeArgs& a, const Paths& paths) {
  if (a.from > a.n) throw CLI::ValidationError("--from", "first level exceeds -n");
  auto t = open_tower(a.spec, paths.cache());
  print_warnings(t.get(), a.spec);
  auto recs = call_json([&](char** o) { return aswt_tower_compute_json(t.get(), a.from, a.n, a.R, o); });
  append_records(paths, recs);
  json traces = json::array();
  if (a.trace)
    for (unsigned m = std::max(1u, a.from); m <= a.n; ++m)
      traces.push_back(call_json([&](char** o) { return aswt_tower_trace_check_json(t.get(), m, o); }));
  if (a.as_json) {
    if (a.trace) std::cout << json{{"records", recs}, {"trace_checks", traces}}.dump(2) << "\n";
    else std::cout << recs.dump(2) << "\n";
  } else {
    for (const auto& r : recs) std::cout << record_row(r) << "\n";
    for (const auto& c : traces)
      std::cout << "trace level " << c["level"] << ": bound " << c["bound"] << (c["strict"].get<bool>() ? " (strict)" : "")
                << ", kernel " << c["kernel_dim"] << ", min ord " << scalar(c["min_order"]) << ", violations "
                << c["violations"] << (c["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
  }
  for (const auto& c : traces)
    if (!c["pass"].get<bool>()) return kMismatch;
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string spec;
  std::vector<std::int64_t> values;
  unsigned first_level = 1;
  std::int64_t d = 0;
  unsigned p = 0, r = 1;
  bool as_json = false;
};

int cmd_fit(FitArgs a, const Paths& paths) {
  if (a.r == 0) throw CLI::ValidationError("--r", "must be >= 1");
  if (!a.spec.empty()) {
    auto t = open_tower(a.spec, std::nullopt);
    auto info = call_json([&](char** o) { return aswt_tower_info_json(t.get(), 0, o); });
    if (info["basic_d"].is_null()) throw ApiError(ASWT_E_DOMAIN, "fits need a basic tower");
    a.p = info["p"].get<unsigned>();
    a.d = info["basic_d"].get<std::int64_t>();
    const std::string hash = info["spec_hash"].get<std::string>();
    auto recs = call_json([&](char** o) { return aswt_store_query_json(paths.store().string().c_str(), hash.c_str(), -1, o); });
    std::map<unsigned, std::int64_t> by_level;
    for (const auto& rec : recs)
      if (rec["a"].size() >= a.r) by_level[rec["level"].get<unsigned>()] = rec["a"][a.r - 1].get<std::int64_t>();
    by_level.erase(0);
    if (by_level.empty())
      throw ApiError(ASWT_E_INVALID, "no stored a^(" + std::to_string(a.r) + ") for " + hash + "; run compute with -R");
    a.first_level = by_level.begin()->first;
    a.values.clear();
    for (unsigned m = a.first_level; by_level.count(m); ++m) a.values.push_back(by_level[m]);
  } else if (a.values.empty() || a.p == 0 || a.d == 0) {
    throw CLI::ValidationError("fit", "give either --spec or --values with --p and --d");
  }
  auto f = call_json([&](char** o) {
    return aswt_fit_json(a.values.data(), a.values.size(), a.first_level, a.d, a.p, a.r, o);
  });
  f["values"] = a.values;
  f["first_level"] = a.first_level;
  if (a.as_json) {
    std::cout << f.dump(2) << "\n";
    return kOk;
  }
  std::cout << "a^(" << a.r << ") levels " << a.first_level << ".." << a.first_level + a.values.size() - 1 << ": ("
            << join(f["values"], ", ") << ")\n"
            << "alpha " << f["alpha"].get<std::string>() << ", m " << f["m"] << ", leading " << f["leading"].get<std::string>()
            << "\n";
  if (!f["fitted"].get<bool>()) {
    std::cout << "not enough stable levels for a fit (period " << f["trial_period"] << ")\n";
    return kOk;
  }
  std::cout << f["formula"].get<std::string>() << "\n"
            << "valid from level " << f["valid_from"] << ", discrepancies at " << f["discrepancies"].dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- scan

struct ScanArgs {
  std::string dir;
  unsigned from = 1, n = 1, R = 1, jobs = 1;
};

bool is_spec_file(const fs::path& p) {
  const auto e = p.extension().string();
  return fs::is_regular_file(p) && (e == ".spec" || e == ".json");
}

int cmd_scan(const ScanArgs& a, const Paths& paths) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.dir))
    if (is_spec_file(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .spec or .json files in " << a.dir << "\n";
    return kUsage;
  }
  std::vector<std::string> lines(files.size());
  std::vector<int> codes(files.size(), kOk);
  std::atomic<std::size_t> next{0};
  std::mutex out_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();) {
      std::ostringstream os;
      os << files[i].filename().string() << ": ";
      try {
        auto t = open_tower(files[i].string(), paths.cache());
        auto recs = call_json([&](char** o) { return aswt_tower_compute_json(t.get(), a.from, a.n, a.R, o); });
        append_records(paths, recs);
        for (const auto& r : recs) os << "[" << r["level"] << ": g " << r["genus"] << ", a " << join(r["a"], ",") << "] ";
      } catch (const ApiError& e) {
        codes[i] = exit_code(e.status);
        os << "error: " << e.what();
      } catch (const std::exception& e) {
        codes[i] = kInternal;
        os << "error: " << e.what();
      }
      std::lock_guard lock(out_mu);
      std::cout << os.str() << std::endl;
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(files.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return *std::max_element(codes.begin(), codes.end());
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> names;
  bool list = false;
  bool as_json = false;
};

int cmd_verify(const VerifyArgs& a, const Paths& paths) {
  auto all = call_json([](char** o) { return aswt_suite_names_json(o); });
  if (a.list) {
    for (const auto& s : all) std::cout << s.get<std::string>() << "\n";
    return kOk;
  }
  std::vector<std::string> names = a.names;
  if (names.empty())
    for (const auto& s : all) names.push_back(s.get<std::string>());
  const auto cache = paths.cache();
  const std::string cache_s = cache ? cache->string() : "";
  int code = kOk;
  json reports = json::array();
  for (const auto& name : names) {
    int passed = 0;
    char* rep = nullptr;
    check(aswt_verify_suite(name.c_str(), cache ? cache_s.c_str() : nullptr, &passed, &rep));
    auto r = json::parse(take(rep));
    if (!passed) code = kMismatch;
    if (a.as_json) {
      reports.push_back(r);
      continue;
    }
    std::printf("%s %-22s %3zu checks  %.1fs\n", passed ? "PASS" : "FAIL", name.c_str(), r["checks"].size(),
                r["seconds"].get<double>());
    for (const auto& c : r["checks"])
      if (!c["ok"].get<bool>())
        std::cout << "     mismatch " << c["what"].get<std::string>() << ": expected " << c["expected"].get<std::string>()
                  << ", got " << c["actual"].get<std::string>() << "\n";
  }
  if (a.as_json) std::cout << reports.dump(2) << "\n";
  return code;
}

// ---------------------------------------------------------------- export

struct ExportArgs {
  std::string format = "csv";
  std::string hash;
  int level = -1;
  std::string out;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_export(const ExportArgs& a, const Paths& paths) {
  auto recs = call_json([&](char** o) {
    return aswt_store_query_json(paths.store().string().c_str(), a.hash.empty() ? nullptr : a.hash.c_str(), a.level, o);
  });
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw ApiError(ASWT_E_IO, "cannot write " + a.out);
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  if (a.format == "json") {
    os << recs.dump(2) << "\n";
    return kOk;
  }
  static const char* cols[] = {"spec_hash", "spec_name", "p",          "k",            "d",        "level",
                               "genus",     "a",         "wall_time", "tool_version", "timestamp"};
  for (std::size_t i = 0; i < std::size(cols); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& r : recs) {
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      const json& v = r[cols[i]];
      std::string s;
      if (v.is_null()) s = "";
      else if (v.is_string()) s = v.get<std::string>();
      else if (v.is_array()) s = join(v, ";");
      else s = v.dump();
      os << (i ? "," : "") << csv_field(s);
    }
    os << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cartier kernels and a-numbers of Artin-Schreier-Witt towers"};
  app.set_version_flag("--version", std::string(aswt_version()));
  app.require_subcommand(1);
  std::string data_dir = "aswt-data";
  app.add_option("--data-dir", data_dir, "results and caches")->envname("ASWT_DATA_DIR")->capture_default_str();
  bool no_cache = false;
  app.add_flag("--no-cache", no_cache, "do not read or write table caches");

  InfoArgs info;
  auto* c_info = app.add_subcommand("info", "breaks, genera and closed forms");
  c_info->add_option("spec", info.spec)->required()->check(CLI::ExistingFile);
  c_info->add_option("-n,--levels", info.n, "last level")->capture_default_str();
  c_info->add_flag("--json", info.as_json);

  ComputeArgs comp;
  bool comp_no_store = false;
  auto* c_comp = app.add_subcommand("compute", "Cartier matrices and kernel dimensions a^(1..R)");
  c_comp->add_option("spec", comp.spec)->required()->check(CLI::ExistingFile);
  c_comp->add_option("-n,--levels", comp.n, "last level")->required();
  c_comp->add_option("--from", comp.from, "first reported level")->capture_default_str();
  c_comp->add_option("-R", comp.R, "kernel dimensions of V^1..V^R")->capture_default_str()->check(CLI::PositiveNumber);
  c_comp->add_flag("--trace", comp.trace, "check the trace bound on the kernel at each level");
  c_comp->add_flag("--no-store", comp_no_store, "do not append to the result store");
  c_comp->add_flag("--json", comp.as_json);

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "fit the periodic growth model to a^(r)");
  auto* o_spec = c_fit->add_option("--spec", fit.spec, "read values for this spec from the store")->check(CLI::ExistingFile);
  c_fit->add_option("--values", fit.values, "a^(r) at consecutive levels")->delimiter(',')->excludes(o_spec);
  c_fit->add_option("--first-level", fit.first_level)->capture_default_str()->excludes(o_spec);
  c_fit->add_option("--d", fit.d, "ramification invariant")->excludes(o_spec);
  c_fit->add_option("--p", fit.p)->excludes(o_spec);
  c_fit->add_option("--r", fit.r)->capture_default_str();
  c_fit->add_flag("--json", fit.as_json);

  ScanArgs scan;
  bool scan_no_store = false;
  auto* c_scan = app.add_subcommand("scan", "compute every .spec/.json file in a directory");
  c_scan->add_option("dir", scan.dir)->required()->check(CLI::ExistingDirectory);
  c_scan->add_option("-n,--levels", scan.n)->required();
  c_scan->add_option("--from", scan.from)->capture_default_str();
  c_scan->add_option("-R", scan.R)->capture_default_str()->check(CLI::PositiveNumber);
  c_scan->add_option("-j,--jobs", scan.jobs, "specs processed in parallel")->capture_default_str();
  c_scan->add_flag("--no-store", scan_no_store);

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "recompute bundled fixtures and compare exactly");
  c_ver->add_option("suites", ver.names, "suite names (default: all)");
  c_ver->add_flag("--list", ver.list);
  c_ver->add_flag("--json", ver.as_json);

  ExportArgs exp;
  auto* c_exp = app.add_subcommand("export", "dump stored results");
  c_exp->add_option("--format", exp.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  c_exp->add_option("--spec-hash", exp.hash);
  c_exp->add_option("--level", exp.level, "only this level");
  c_exp->add_option("-o,--output", exp.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  Paths paths{data_dir, !no_cache, true};
  try {
    if (*c_info) return cmd_info(info, paths);
    if (*c_comp) {
      paths.use_store = !comp_no_store;
      if (!c_comp->count("--from")) comp.from = std::min(comp.from, comp.n);
      return cmd_compute(comp, paths);
    }
    if (*c_fit) return cmd_fit(fit, paths);
    if (*c_scan) {
      paths.use_store = !scan_no_store;
      return cmd_scan(scan, paths);
    }
    if (*c_ver) return cmd_verify(ver, paths);
    if (*c_exp) return cmd_export(exp, paths);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.status);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
