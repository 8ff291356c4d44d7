#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aswt/linalg.hpp"
#include "aswt/poly.hpp"
#include "aswt/tower.hpp"

namespace aswt {

// V(sum a_i x^i dx) = sum sigma^{-1}(a_{pj-1}) x^{j-1} dx on the projective line.
UPoly base_cartier(const FieldCtx& F, const UPoly& f);

// Differentials x^nu y^a dx with
//   p^n nu <= sum_j p^{n-j} d_j (p-1-a_j) - p^n - 1,
// ordered by slot (a_1 least significant), then nu.
class MaddenBasis {
 public:
  MaddenBasis(const PoleProfile& prof, int level);

  unsigned p() const { return p_; }
  int level() const { return level_; }
  std::size_t size() const { return size_; }
  std::size_t slot_count() const { return nu_max_.size(); }
  // -1 when the slot holds no basis element
  std::int64_t nu_max(std::size_t slot) const { return nu_max_[slot]; }
  std::size_t offset(std::size_t slot) const { return offset_[slot]; }
  bool contains(std::uint64_t nu, std::size_t slot) const {
    return static_cast<std::int64_t>(nu) <= nu_max_[slot];
  }

  Monomial monomial(std::size_t index) const;
  std::pair<std::uint64_t, std::size_t> locate(std::size_t index) const;  // (nu, slot)
  bool is_regular(const ReducedPoly& h) const;
  // Coordinates of h dx; internal-consistency error when h dx is not in the span.
  std::vector<std::pair<std::uint32_t, Elem>> coordinates(const ReducedPoly& h) const;
  ReducedPoly form(const TowerRing& ring, std::span<const Elem> coords) const;

 private:
  unsigned p_;
  int level_;
  std::size_t size_ = 0;
  std::vector<std::int64_t> nu_max_;
  std::vector<std::size_t> offset_;
};

// Checks the size against the genus of the tower at level n.
MaddenBasis madden_basis(const TowerState& ts, unsigned n);

// The Cartier operator on the tower, through precomputed tables
//   T_m(r, a) = V(x^r y^a dx),  r < p, a in [0,p)^m.
class CartierOperator {
 public:
  // With a cache directory the tables are stored per (spec hash, level).
  explicit CartierOperator(TowerState& ts, std::optional<std::filesystem::path> cache_dir = std::nullopt);

  // Builds the tower and the tables through level n.
  void build(unsigned n);
  unsigned levels() const { return static_cast<unsigned>(tables_.size()) - 1; }
  const TowerState& tower() const { return ts_; }

  const ReducedPoly& table(unsigned m, unsigned r, std::size_t slot) const;
  // V(h dx) for h of level <= levels(); the result has h's level.
  ReducedPoly apply(const ReducedPoly& h) const;
  // Column s holds the coordinates of V(omega_s) in the basis.
  SparseColumns matrix(const MaddenBasis& basis) const;

  // Number of tables loaded from the cache rather than computed.
  unsigned cache_hits() const { return cache_hits_; }

 private:
  std::vector<ReducedPoly> compute_level(unsigned m) const;
  ReducedPoly apply_shifted(const ReducedPoly& h, std::size_t r) const;
  std::optional<std::vector<ReducedPoly>> load_level(unsigned m) const;
  void store_level(unsigned m, const std::vector<ReducedPoly>& t) const;
  std::filesystem::path cache_file(unsigned m) const;

  TowerState& ts_;
  std::optional<std::filesystem::path> cache_dir_;
  std::string hash_;
  std::vector<std::vector<ReducedPoly>> tables_;  // tables_[m][slot * p + r]
  unsigned cache_hits_ = 0;
};

struct LevelProfile {
  unsigned level = 0;
  std::uint64_t genus = 0;
  std::vector<std::size_t> a;  // a^(1..R)
  double seconds = 0;          // basis, matrix and kernels at this level
};

// a^(1..R) at levels from..n, building V through n first.  Level 0 gives genus 0.
std::vector<LevelProfile> kernel_profiles(CartierOperator& V, unsigned from, unsigned n, unsigned R);

// Forms spanning ker V at `level` (V must be built that far).
std::vector<ReducedPoly> kernel_forms(const CartierOperator& V, unsigned level);

// Trace to the level below: sum_i w_i y_n^i -> -w_{p-1}.
ReducedPoly trace_form(const TowerRing& ring, const ReducedPoly& w);

// ord at the point above infinity of h dx on the curve of level h.level:
// -(pole order of h) + 2g - 2.  kInfiniteValuation for h = 0.
std::int64_t differential_order(const ReducedPoly& h, const TowerRing& ring, const PoleProfile& prof,
                                std::uint64_t genus);

}  // namespace aswt
