#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aswt {

// Field elements are packed base-p digit vectors: sum c_i p^i, c_0 least significant.
using Elem = std::uint32_t;

class FieldCtx;
using FieldPtr = std::shared_ptr<const FieldCtx>;

// GF(p^k) = GF(p)[t]/(m(t)).  Supported: p in {2,3,5,7,11,13}, 1 <= k <= 8.
class FieldCtx {
 public:
  // Uses the lexicographically least monic irreducible of degree k, comparing
  // coefficients from t^{k-1} down to t^0.
  static FieldPtr make(unsigned p, unsigned k);
  // modulus holds c_0..c_{k-1} of the monic polynomial t^k + sum c_i t^i.
  static FieldPtr make(unsigned p, unsigned k, const std::vector<unsigned>& modulus);

  unsigned p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint32_t q() const { return q_; }
  bool is_prime() const { return k_ == 1; }
  // c_0..c_{k-1} (monic leading term implicit)
  const std::vector<unsigned>& modulus() const { return modulus_; }

  Elem add(Elem a, Elem b) const {
    if (k_ == 1) {
      Elem s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    if (p_ == 2) return a ^ b;
    return add_digits(a, b);
  }
  Elem neg(Elem a) const {
    if (k_ == 1) return a == 0 ? 0 : p_ - a;
    if (p_ == 2) return a;
    return neg_digits(a);
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const {
    if (k_ == 1) return static_cast<Elem>((static_cast<std::uint64_t>(a) * b) % p_);
    if (a == 0 || b == 0) return 0;
    if (!log_.empty()) return exp_[log_[a] + log_[b]];
    return mul_slow(a, b);
  }
  Elem inv(Elem a) const;  // throws domain error on 0
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;
  Elem frob(Elem a) const;      // a^p
  Elem frob_inv(Elem a) const;  // a^{1/p}
  // sigma^e for any integer e (sigma = Frobenius)
  Elem frob_pow(Elem a, long long e) const;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(long long v) const;  // image of an integer in the prime field
  std::vector<unsigned> digits(Elem a) const;
  Elem from_digits(std::span<const unsigned> c) const;

  // "[c0,c1,...]" for k > 1, bare integer for k = 1.
  std::string to_string(Elem a) const;
  // Accepts a bare integer (prime-field image) or a bracketed digit list.
  Elem parse(std::string_view s) const;

 private:
  FieldCtx(unsigned p, unsigned k, std::vector<unsigned> modulus);
  Elem add_digits(Elem a, Elem b) const;
  Elem neg_digits(Elem a) const;
  Elem mul_slow(Elem a, Elem b) const;
  void build_tables();

  unsigned p_, k_;
  std::uint32_t q_;
  std::vector<unsigned> modulus_;
  std::vector<std::uint32_t> log_;  // empty when the field is too large for tables
  std::vector<Elem> exp_;           // length 2(q-1) so log sums need no reduction
  std::vector<Elem> frob_, frob_inv_;
  std::vector<Elem> inv_prime_;     // inverses in the prime field
};

bool is_supported_prime(unsigned p);

// Value type used at API boundaries.  Hot loops work on raw Elem with a FieldCtx.
struct FieldElement {
  const FieldCtx* ctx = nullptr;
  Elem v = 0;

  FieldElement operator+(FieldElement o) const { return {ctx, ctx->add(v, o.v)}; }
  FieldElement operator-(FieldElement o) const { return {ctx, ctx->sub(v, o.v)}; }
  FieldElement operator-() const { return {ctx, ctx->neg(v)}; }
  FieldElement operator*(FieldElement o) const { return {ctx, ctx->mul(v, o.v)}; }
  FieldElement operator/(FieldElement o) const { return {ctx, ctx->div(v, o.v)}; }
  bool operator==(const FieldElement& o) const { return v == o.v; }
  bool is_zero() const { return v == 0; }
  std::string to_string() const { return ctx->to_string(v); }
};

}  // namespace aswt
