#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aswt/store.hpp"
#include "aswt/tower.hpp"

namespace aswt {

struct ComputeOptions {
  unsigned from = 1;
  unsigned n = 1;
  unsigned R = 1;
  std::optional<std::filesystem::path> cache_dir;
};

// Builds levels through n (reusing cached tables) and returns one record per level.
std::vector<ResultRecord> run_compute(const TowerSpec& spec, const ComputeOptions& opt);

struct SuiteCheck {
  std::string what, expected, actual;
  bool ok = false;
};

struct SuiteReport {
  std::string name;
  std::vector<SuiteCheck> checks;
  double seconds = 0;

  bool pass() const;
  std::size_t failures() const;
};

std::vector<std::string> suite_names();
// Recomputes the fixtures of a suite and compares exactly.  Unknown names throw.
SuiteReport verify_suite(const std::string& name, const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

}  // namespace aswt
