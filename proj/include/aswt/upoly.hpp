#pragma once

#include <cstdint>
#include <vector>

#include "aswt/gf.hpp"

namespace aswt {

// Dense univariate polynomial in x over GF(q); entry i is the coefficient of x^i.
// Canonical form has no trailing zeros, so the zero polynomial is empty.
using UPoly = std::vector<Elem>;

inline void utrim(UPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline long long udeg(const UPoly& a) { return static_cast<long long>(a.size()) - 1; }

// a += c * x^shift * b
void uaxpy(const FieldCtx& F, UPoly& a, Elem c, const UPoly& b, std::size_t shift = 0);
inline void uadd_to(const FieldCtx& F, UPoly& a, const UPoly& b) { uaxpy(F, a, 1, b); }
UPoly umul(const FieldCtx& F, const UPoly& a, const UPoly& b);
// acc += a * b, for accumulating several products before one reduction (prime fields)
void umul_acc(const FieldCtx& F, const UPoly& a, const UPoly& b, std::vector<std::uint64_t>& acc);
// reduce an accumulator into a (a += acc mod p), clearing acc
void uflush(const FieldCtx& F, UPoly& a, std::vector<std::uint64_t>& acc);
UPoly uscale(const FieldCtx& F, const UPoly& a, Elem c);
UPoly upow(const FieldCtx& F, const UPoly& a, std::uint64_t e);
// coefficient-wise sigma^e followed by x -> x^{stretch}
UPoly utwist(const FieldCtx& F, const UPoly& a, long long frob_exp, std::size_t stretch = 1);

}  // namespace aswt
