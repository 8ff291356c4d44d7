#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aswt/tower.hpp"

namespace aswt {

// Spec files are either a JSON object or lines of `key = <JSON value>` with # comments:
//
//   name = "T1"
//   p = 3
//   k = 1
//   modulus = [1, 0]        # optional, c_0..c_{k-1} of a monic irreducible
//   terms = [[0, 1, 5], {"v": 0, "c": 2, "i": 2}]
//
// A term (v, c, i) stands for p^v [c x^i].  c is an integer (reduced mod p) or a list
// of base-p digits c_0..c_{k-1}.
struct ParsedSpec {
  TowerSpec spec;
  std::vector<std::string> warnings;
};

ParsedSpec parse_spec_text(const std::string& text);
ParsedSpec parse_spec_file(const std::filesystem::path& file);
std::string spec_to_json(const TowerSpec& spec);

}  // namespace aswt
