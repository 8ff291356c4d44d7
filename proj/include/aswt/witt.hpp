#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aswt/error.hpp"
#include "aswt/gf.hpp"
#include "aswt/poly.hpp"
#include "aswt/upoly.hpp"

namespace aswt {

// Universal Witt addition polynomials S_0..S_{len-1} over GF(p), in the
// variables X_0..X_{len-1}, Y_0..Y_{len-1}.
class WittPolys {
 public:
  struct Term {
    std::vector<std::uint16_t> e;  // 2*len exponents, X first
    unsigned c;                    // coefficient in [1, p)
  };

  static unsigned max_len(unsigned p);
  // Loads from cache_dir when a matching file exists, otherwise computes and writes it.
  static std::shared_ptr<const WittPolys> get(unsigned p, unsigned len,
                                              const std::optional<std::filesystem::path>& cache_dir = std::nullopt);
  static std::shared_ptr<const WittPolys> compute(unsigned p, unsigned len);

  unsigned p() const { return p_; }
  unsigned len() const { return len_; }
  const std::vector<Term>& S(unsigned m) const { return polys_.at(m); }
  std::string to_string(unsigned m) const;

  std::string serialize() const;
  static std::shared_ptr<const WittPolys> deserialize(const std::string& text);

 private:
  WittPolys(unsigned p, unsigned len) : p_(p), len_(len), polys_(len) {}
  unsigned p_, len_;
  std::vector<std::vector<Term>> polys_;
};

std::filesystem::path witt_cache_file(const std::filesystem::path& dir, unsigned p, unsigned len);

// ---------------------------------------------------------------- coefficient rings

// Elements of GF(q).
struct ScalarRing {
  using Value = Elem;
  const FieldCtx* F;
  Value zero() const { return 0; }
  Value one() const { return 1; }
  bool is_zero(const Value& a) const { return a == 0; }
  Value add(const Value& a, const Value& b) const { return F->add(a, b); }
  Value neg(const Value& a) const { return F->neg(a); }
  Value mul(const Value& a, const Value& b) const { return F->mul(a, b); }
  Value scale(const Value& a, Elem c) const { return F->mul(a, c); }
  Value frob(const Value& a) const { return F->frob(a); }
};

// GF(q)[x], dense.
struct UPolyRing {
  using Value = UPoly;
  const FieldCtx* F;
  Value zero() const { return {}; }
  Value one() const { return {1}; }
  bool is_zero(const Value& a) const { return a.empty(); }
  Value add(const Value& a, const Value& b) const {
    Value r = a;
    uaxpy(*F, r, 1, b);
    return r;
  }
  Value neg(const Value& a) const { return uscale(*F, a, F->neg(1)); }
  Value mul(const Value& a, const Value& b) const { return umul(*F, a, b); }
  Value scale(const Value& a, Elem c) const { return uscale(*F, a, c); }
  Value frob(const Value& a) const { return utwist(*F, a, 1, F->p()); }
};

// GF(q)[x, y_1, ...] without any reduction; useful for symbolic checks.
struct SparseRing {
  using Value = SparsePoly;
  FieldPtr F;
  int level = 0;
  Value zero() const { return SparsePoly(F, level); }
  Value one() const {
    SparsePoly r(F, level);
    r.add_term(Monomial{0, {}}, 1);
    return r;
  }
  bool is_zero(const Value& a) const { return a.is_zero(); }
  Value add(const Value& a, const Value& b) const { return a + b; }
  Value neg(const Value& a) const { return a.scaled(F->neg(1)); }
  Value mul(const Value& a, const Value& b) const { return a * b; }
  Value scale(const Value& a, Elem c) const { return a.scaled(c); }
  Value frob(const Value& a) const {
    SparsePoly r(F, level);
    for (auto& [m, c] : a.terms()) {
      Monomial mm = m;
      mm.nu *= F->p();
      for (auto& e : mm.a) e *= F->p();
      r.add_term(mm, F->frob(c));
    }
    return r;
  }
};

template <class Ring>
using WittVector = std::vector<typename Ring::Value>;

namespace detail {

// Evaluates S_m(X, Y); when drop_top is set the X_m and Y_m terms are skipped.
template <class Ring>
typename Ring::Value eval_addition(const WittPolys& W, unsigned m, const Ring& R,
                                   const std::vector<typename Ring::Value>& X,
                                   const std::vector<typename Ring::Value>& Y, bool drop_top = false) {
  using V = typename Ring::Value;
  const unsigned len = W.len();
  std::vector<const V*> vars(2 * len, nullptr);
  for (unsigned i = 0; i < len; ++i) {
    if (i < X.size()) vars[i] = &X[i];
    if (i < Y.size()) vars[len + i] = &Y[i];
  }
  std::map<std::pair<unsigned, unsigned>, V> powcache;
  auto power = [&](unsigned var, unsigned e) -> const V& {
    auto it = powcache.find({var, e});
    if (it != powcache.end()) return it->second;
    unsigned have = 1;
    if (!powcache.count({var, 1})) powcache.emplace(std::make_pair(var, 1u), *vars[var]);
    while (powcache.count({var, have + 1})) ++have;
    for (unsigned j = have + 1; j <= e; ++j)
      powcache.emplace(std::make_pair(var, j), R.mul(powcache.at({var, j - 1}), *vars[var]));
    return powcache.at({var, e});
  };
  V acc = R.zero();
  for (const auto& t : W.S(m)) {
    bool skip = false;
    for (unsigned v = 0; v < 2 * len && !skip; ++v) {
      if (t.e[v] == 0) continue;
      if (drop_top && (v == m || v == len + m)) skip = true;
      else if (vars[v] == nullptr || R.is_zero(*vars[v])) skip = true;
    }
    if (skip) continue;
    V prod = R.one();
    bool first = true;
    for (unsigned v = 0; v < 2 * len; ++v) {
      if (t.e[v] == 0) continue;
      if (first) {
        prod = power(v, t.e[v]);
        first = false;
      } else {
        prod = R.mul(prod, power(v, t.e[v]));
      }
    }
    acc = R.add(acc, R.scale(prod, t.c));
  }
  return acc;
}

}  // namespace detail

template <class Ring>
WittVector<Ring> witt_add(const WittPolys& W, const Ring& R, const WittVector<Ring>& a, const WittVector<Ring>& b) {
  if (a.size() != W.len() || b.size() != W.len()) fail(ErrorCode::invalid_argument, "Witt vector length mismatch");
  WittVector<Ring> r(W.len());
  for (unsigned m = 0; m < W.len(); ++m) r[m] = detail::eval_addition(W, m, R, a, b);
  return r;
}

template <class Ring>
WittVector<Ring> witt_negate(const WittPolys& W, const Ring& R, const WittVector<Ring>& a) {
  if (a.size() != W.len()) fail(ErrorCode::invalid_argument, "Witt vector length mismatch");
  WittVector<Ring> u(W.len(), R.zero());
  if (W.p() != 2) {
    // (-1) is a Teichmueller representative and multiplication by it is componentwise
    for (unsigned m = 0; m < W.len(); ++m) u[m] = R.neg(a[m]);
    return u;
  }
  // solve S_m(a, u) = 0 for u_m component by component
  for (unsigned m = 0; m < W.len(); ++m) {
    typename Ring::Value rest = detail::eval_addition(W, m, R, a, u, true);
    u[m] = R.neg(R.add(a[m], rest));
  }
  return u;
}

template <class Ring>
WittVector<Ring> teichmuller(unsigned len, const Ring& R, const typename Ring::Value& c) {
  WittVector<Ring> r(len, R.zero());
  if (len) r[0] = c;
  return r;
}

// p * (a_0, a_1, ...) = (0, a_0^p, a_1^p, ...) in characteristic p
template <class Ring>
WittVector<Ring> witt_mul_by_p(const Ring& R, const WittVector<Ring>& a) {
  WittVector<Ring> r(a.size(), R.zero());
  for (std::size_t i = 1; i < a.size(); ++i) r[i] = R.frob(a[i - 1]);
  return r;
}

template <class Ring>
WittVector<Ring> witt_frobenius(const Ring& R, const WittVector<Ring>& a) {
  WittVector<Ring> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = R.frob(a[i]);
  return r;
}

// One summand p^v [c x^i] of a tower right-hand side.
struct Term {
  unsigned v = 0;
  Elem c = 0;
  std::uint64_t i = 0;
  bool operator==(const Term&) const = default;
};

// sum of p^v [c x^i] in W_len(GF(q)[x])
WittVector<UPolyRing> rhs_assemble(const WittPolys& W, const FieldCtx& F, const std::vector<Term>& terms);

}  // namespace aswt
