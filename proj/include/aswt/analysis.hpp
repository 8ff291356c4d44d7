#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aswt/cartier.hpp"
#include "aswt/rational.hpp"
#include "aswt/tower.hpp"

namespace aswt {

// alpha(r,p) = r(p-1) / (2(p+1)((p-1)r + (p+1))), D its denominator, D' the
// prime-to-p part of D, m the order of p^2 mod D' (0 when D' = 1).
struct GrowthConstants {
  unsigned r = 0, p = 0;
  Rational alpha;
  std::int64_t D = 0, D_prime = 0;
  unsigned m = 0;
};
GrowthConstants constants(unsigned r, unsigned p);

// r(p-1) / ((p-1)r + (p+1)), the limit of a^(r)/g.
Rational asymptotic_ratio(unsigned r, unsigned p);

// Series below are indexed by level, a[0] being level first_level.

// a(n) - alpha(1,p) d (p^{2n} - p^2)
std::vector<Rational> delta_basic(std::span<const std::int64_t> a, std::int64_t d, unsigned p,
                                  unsigned first_level = 1);
// a^(r)(n) - (alpha(r,p) d p^{2n} + lambda n)
std::vector<Rational> delta_power(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                                  const Rational& lambda, unsigned first_level = 1);

// Levels n > m (and n - m >= first_level) with delta(n) != delta(n - m).
std::vector<unsigned> discrepancies(std::span<const Rational> delta, unsigned m, unsigned first_level = 1);

// Difference quotient over the last m(r,p) levels.  Needs m(r,p) >= 1.
Rational estimate_lambda(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                         unsigned first_level = 1);

// a^(r)(n) = leading p^{2n} + lambda n + c[n mod period] for n >= valid_from.
struct FitReport {
  bool fitted = false;
  Rational leading;  // alpha(r,p) d
  Rational lambda;
  unsigned period = 0;
  bool trial_period = false;       // m(r,p) = 0, period chosen among 1..3
  std::vector<Rational> c;         // indexed by n mod period
  std::vector<Rational> c_delta;   // same with leading (p^{2n} - p^2): c + leading p^2
  std::vector<unsigned> discrepancies;
  unsigned valid_from = 0;         // first level from which every input is reproduced
  unsigned last_level = 0;
};
// fitted means the window [valid_from, last_level] covers each residue class twice.
FitReport fit_periodic(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                       unsigned first_level = 1);
Rational fit_value(const FitReport& f, unsigned p, unsigned n);
std::string describe(const FitReport& f);

// m(i) = 2a^(i) - a^(i-1) - a^(i+1), a^(0) = 0, trailing zeros dropped.  The list must
// reach stable_value (the V-nilpotent dimension).
std::vector<std::int64_t> elementary_divisors(std::span<const std::int64_t> a, std::int64_t stable_value);

// ---- proven formulas in characteristic two

// a(Y) for a Z/2-cover with invariants d_Q under the hypothesis of the cover formula.
std::int64_t anumber_cover_p2(std::span<const std::int64_t> dQ);
// a(T(n)) for a basic Z_2-tower with invariant d, n >= 1.
std::int64_t anumber_basic_p2(std::int64_t d, unsigned n);
// The one-line version d/24 (4^n - 4) + a(T(1)) - 1/2.
Rational anumber_basic_p2_concise(std::int64_t d, unsigned n);
// a^(r)(T(1)) = deg D - sum ceil((d_Q+1)/2^{r+1}) over P^1.
std::int64_t higher_anumber_level1_p2(std::span<const std::int64_t> dQ, unsigned r);
// a^(2)(T(2)) from level-1 invariants; requires d_Q(2) = 3 d_Q(1) and sum (d_Q - 3)/2 > -4.
std::int64_t second_anumber_level2_p2(std::span<const std::int64_t> d1, std::span<const std::int64_t> d2);

// ---- ramification hypothesis and trace bounds (single branch point over infinity)

struct RamHypothesis {
  unsigned n = 0;
  std::int64_t delta = 0;  // (d(n+1) - ceil(d(n+1)/p)) - (2g(n) - 2)
  bool holds = false;      // delta > 0
  bool trace_vanishes = false;  // trace on ker V vanishes for T(n+1) -> T(n)
};
// Levels n = 0 .. levels-1 of the ramification data.
std::vector<RamHypothesis> ramification_hypothesis(const RamificationData& ram);

struct TraceCheck {
  unsigned level = 0;  // cover T(level) -> T(level-1)
  std::int64_t d = 0;
  std::int64_t bound = 0;  // d - ceil(d/p)
  bool strict = false;     // d = floor(d/p) mod p
  bool vanishing_expected = false;
  std::size_t kernel_dim = 0;
  std::size_t violations = 0;
  std::int64_t min_order = 0;  // over nonzero traces; kInfiniteValuation if all vanish
  bool pass() const { return violations == 0; }
};
// Checks ord(trace) on a basis of ker V at `level`.  The bound is preserved under sums,
// so a basis suffices.
TraceCheck trace_bound_check(const CartierOperator& V, unsigned level);

}  // namespace aswt
