#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aswt/gf.hpp"
#include "aswt/poly.hpp"
#include "aswt/rational.hpp"
#include "aswt/witt.hpp"

namespace aswt {

// The tower y^F - y = sum p^v [c x^i] over GF(q)(x), y a Witt vector.
struct TowerSpec {
  FieldPtr field;
  std::vector<Term> terms;
  std::string name;
};

// Normalized terms sorted, field data included, name excluded.
std::string canonical_text(const TowerSpec& spec);
// FNV-1a 64 of canonical_text, 16 lowercase hex digits.
std::string spec_hash(const TowerSpec& spec);

// Checks c != 0 and i >= 1 for every term.
void validate_spec(const TowerSpec& spec);

// Replaces p^v [c x^{pm}] by p^v [sigma^{-1}(c) x^m] until every exponent is prime to p.
TowerSpec normalize_rhs(const TowerSpec& spec);

// Exponent -> index of the first nonzero component of sum_{terms with that exponent} p^v [c]
// in W_n(GF(q)); n when the sum vanishes.
std::map<std::uint64_t, unsigned> coefficient_valuations(const TowerSpec& normalized, unsigned n);

struct RamificationData {
  unsigned p = 0;
  // index m-1 holds the value for level m
  std::vector<std::uint64_t> s;  // upper breaks
  std::vector<std::uint64_t> u;  // conductor exponents s+1
  std::vector<std::uint64_t> d;  // lower breaks
  std::vector<std::uint64_t> g;  // genera

  unsigned levels() const { return static_cast<unsigned>(s.size()); }
};

// Upper breaks s(1..n) of a normalized spec.
std::vector<std::uint64_t> upper_breaks(const TowerSpec& normalized, unsigned n);
std::vector<std::uint64_t> lower_breaks(unsigned p, const std::vector<std::uint64_t>& s);
std::uint64_t genus_from_breaks(unsigned p, const std::vector<std::uint64_t>& s, unsigned n);
RamificationData ramification(const TowerSpec& normalized, unsigned n);

std::uint64_t genus(const TowerSpec& spec, unsigned n);
inline std::uint64_t p_rank(const TowerSpec&, unsigned) { return 0; }

struct BasicClosedForm {
  std::uint64_t g, d_lower, s;
};
BasicClosedForm closed_form_basic(unsigned p, std::uint64_t d, unsigned n);

// d for a basic tower (single Teichmueller term per exponent, all v = 0), else nullopt.
std::optional<std::uint64_t> basic_invariant(const TowerSpec& normalized);

struct Monodromy {
  enum class Kind { stable, periodic, unclassified };
  Kind kind = Kind::unclassified;
  unsigned period = 0;       // 1 for stable
  std::vector<Rational> c;   // c[n mod period]
  Rational d = 0;
  unsigned from_level = 0;   // first level of the fitted window
};
Monodromy classify_monodromy(unsigned p, const std::vector<std::uint64_t>& s);
Monodromy classify_monodromy(const TowerSpec& spec, unsigned N);
std::string to_string(const Monodromy& m);

// Layer equations built level by level, each put in standard form before the next.
class TowerState {
 public:
  explicit TowerState(const TowerSpec& spec,
                      std::optional<std::filesystem::path> cache_dir = std::nullopt);

  const TowerSpec& spec() const { return spec_; }
  const FieldCtx& field() const { return *spec_.field; }
  unsigned p() const { return spec_.field->p(); }

  void build(unsigned n);
  unsigned built() const { return static_cast<unsigned>(layers_.size()); }

  const TowerRing& ring() const { return ring_; }
  // f_m in standard form (a reduced polynomial of level m-1)
  const ReducedPoly& layer(unsigned m) const { return ring_.layer(static_cast<int>(m)); }
  // f_m before its own standard-form pass (earlier levels already standard)
  const ReducedPoly& raw_layer(unsigned m) const { return raw_layers_.at(m - 1); }
  // Z_m with y_m(original) = y_m + Z_m
  const ReducedPoly& shift(unsigned m) const { return shifts_.at(m - 1); }
  const RamificationData& ramification_data() const { return ram_; }
  PoleProfile profile() const;

 private:
  ReducedPoly evaluate_carry(unsigned m, const WittPolys& W, const WittVector<UPolyRing>& w);
  const ReducedPoly& original_y_power(unsigned j, unsigned e);

  TowerSpec spec_;
  std::optional<std::filesystem::path> cache_dir_;
  TowerRing ring_;
  RamificationData ram_;
  std::vector<ReducedPoly> layers_, raw_layers_, shifts_;
  std::vector<std::vector<ReducedPoly>> ypow_;  // ypow_[j-1][e] = (y_j + Z_j)^e
};

// f_1..f_n before standard form, as sparse polynomials.
std::vector<SparsePoly> layer_equations(const TowerSpec& spec, unsigned n);

}  // namespace aswt
