#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "aswt/gf.hpp"
#include "aswt/upoly.hpp"

namespace aswt {

// x^nu * y_1^{a[0]} * ... * y_n^{a[n-1]}
struct Monomial {
  std::uint64_t nu = 0;
  std::vector<std::uint32_t> a;

  bool operator==(const Monomial&) const = default;
};

// Canonical order: lexicographic on (a_n, ..., a_1, nu).
struct MonomialLess {
  bool operator()(const Monomial& l, const Monomial& r) const;
};

// Break data used to measure pole orders at the point over infinity.
struct PoleProfile {
  unsigned p = 0;
  std::vector<std::uint64_t> d;  // d[j-1] = d_j

  int level() const { return static_cast<int>(d.size()); }
  // pole order of x^nu y^a at level `level` (a may be shorter than level)
  std::uint64_t pole_order(std::uint64_t nu, const std::vector<std::uint32_t>& a, int level) const;
  std::uint64_t pole_order(const Monomial& m, int level) const { return pole_order(m.nu, m.a, level); }
};

// Sparse polynomial in x, y_1..y_level over GF(q).  Not necessarily reduced.
class SparsePoly {
 public:
  SparsePoly() = default;
  SparsePoly(FieldPtr F, int level) : F_(std::move(F)), level_(level) {}

  static SparsePoly parse(FieldPtr F, const std::string& text, int level = -1);

  const FieldPtr& field() const { return F_; }
  int level() const { return level_; }
  const std::map<Monomial, Elem, MonomialLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, Elem c);
  Elem coeff(const Monomial& m) const;

  SparsePoly operator+(const SparsePoly& o) const;
  SparsePoly operator-(const SparsePoly& o) const;
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly scaled(Elem c) const;
  bool operator==(const SparsePoly& o) const { return level_ == o.level_ && terms_ == o.terms_; }

  // -(max pole order) over monomials, or +infinity (max int64) for zero.
  std::int64_t infinity_valuation(const PoleProfile& prof) const;
  // true if all exponents a_j < p
  bool is_reduced() const;

  std::string to_string() const;

 private:
  SparsePoly lifted(int level) const;

  FieldPtr F_;
  int level_ = 0;
  std::map<Monomial, Elem, MonomialLess> terms_;
};

constexpr std::int64_t kInfiniteValuation = std::numeric_limits<std::int64_t>::max();

// Element of GF(q)[x, y_1..y_L] reduced to y-exponents < p, stored densely in y:
// slot index sum_j a_j p^{j-1}, each slot a univariate polynomial in x.
struct ReducedPoly {
  int level = 0;
  std::vector<UPoly> slots;

  bool is_zero() const;
  std::size_t term_count() const;
  bool operator==(const ReducedPoly& o) const { return level == o.level && slots == o.slots; }
};

// Arithmetic modulo the layer relations y_j^p = y_j + f_j (f_j a reduced poly of level j-1).
class TowerRing {
 public:
  explicit TowerRing(FieldPtr F);

  const FieldCtx& field() const { return *F_; }
  const FieldPtr& field_ptr() const { return F_; }
  unsigned p() const { return F_->p(); }
  int levels() const { return static_cast<int>(layers_.size()); }
  void push_layer(ReducedPoly f);
  const ReducedPoly& layer(int j) const { return layers_.at(j - 1); }
  std::size_t slot_count(int level) const;

  ReducedPoly zero(int level) const;
  ReducedPoly constant(UPoly u, int level) const;
  ReducedPoly monomial(const Monomial& m, Elem c, int level) const;  // requires a_j < p
  ReducedPoly y(int j, int level) const;                              // the variable y_j
  ReducedPoly lift(const ReducedPoly& a, int level) const;

  ReducedPoly add(const ReducedPoly& a, const ReducedPoly& b) const;
  ReducedPoly sub(const ReducedPoly& a, const ReducedPoly& b) const;
  void axpy(ReducedPoly& a, Elem c, const ReducedPoly& b) const;  // a += c*b, b.level <= a.level
  ReducedPoly scale(const ReducedPoly& a, Elem c) const;
  ReducedPoly mul(const ReducedPoly& a, const ReducedPoly& b) const;
  ReducedPoly pow(const ReducedPoly& a, std::uint64_t e) const;
  // a * x^shift * u for a univariate u (no reduction needed)
  ReducedPoly mul_upoly(const ReducedPoly& a, const UPoly& u, std::size_t shift = 0) const;
  // d/dx, using dy_j/dx = -d f_j/dx
  ReducedPoly derivative(const ReducedPoly& a) const;

  ReducedPoly from_sparse(const SparsePoly& f, int level) const;
  SparsePoly to_sparse(const ReducedPoly& a) const;

  std::uint64_t max_pole(const ReducedPoly& a, const PoleProfile& prof) const;

 private:
  void mul_rec(int level, const UPoly* A, const UPoly* B, UPoly* out) const;
  void add_block(UPoly* dst, const UPoly* src, std::size_t n) const;

  FieldPtr F_;
  std::vector<ReducedPoly> layers_;
  mutable std::vector<ReducedPoly> layer_derivs_;  // d f_j / dx, filled lazily
};

// Reduce an arbitrary sparse polynomial to the monomial basis x^nu y^a with a_j < p.
SparsePoly reduce_to_monomial_basis(const TowerRing& ring, const SparsePoly& f);

}  // namespace aswt
