#include "aswt/gf.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <mutex>
#include <tuple>

#include "aswt/error.hpp"

namespace aswt {

namespace {

constexpr std::uint32_t kTableLimit = 1u << 22;

// Polynomials over GF(p) as coefficient vectors, low degree first.
using ZpPoly = std::vector<unsigned>;

void trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ZpPoly zp_mulmod(const ZpPoly& a, const ZpPoly& b, const ZpPoly& m, unsigned p) {
  if (a.empty() || b.empty()) return {};
  ZpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  // m is monic
  std::size_t dm = m.size() - 1;
  for (std::size_t i = r.size(); i-- > dm;) {
    unsigned c = r[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= dm; ++j) r[i - dm + j] = (r[i - dm + j] + (p - c) * m[j]) % p;
  }
  trim(r);
  return r;
}

ZpPoly zp_powmod(ZpPoly base, std::uint64_t e, const ZpPoly& m, unsigned p) {
  ZpPoly r{1};
  while (e) {
    if (e & 1) r = zp_mulmod(r, base, m, p);
    base = zp_mulmod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

unsigned inv_mod(unsigned a, unsigned p) {
  for (unsigned x = 1; x < p; ++x)
    if (a * x % p == 1) return x;
  fail(ErrorCode::domain, "no inverse");
}

ZpPoly zp_gcd(ZpPoly a, ZpPoly b, unsigned p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    // a mod b
    unsigned li = inv_mod(b.back(), p);
    while (a.size() >= b.size()) {
      unsigned c = a.back() * li % p;
      std::size_t sh = a.size() - b.size();
      for (std::size_t j = 0; j < b.size(); ++j) a[sh + j] = (a[sh + j] + (p - c) * b[j]) % p;
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

std::vector<unsigned> prime_factors(std::uint64_t n) {
  std::vector<unsigned> f;
  for (unsigned d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) {
      f.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) f.push_back(static_cast<unsigned>(n));
  return f;
}

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// Rabin's test.
bool is_irreducible(const ZpPoly& f, unsigned p) {
  unsigned k = static_cast<unsigned>(f.size() - 1);
  if (k == 1) return true;
  ZpPoly x{0, 1};
  auto x_pow_pj = [&](unsigned j) { return zp_powmod(x, ipow(p, j), f, p); };
  ZpPoly xk = x_pow_pj(k);
  ZpPoly diff = xk;
  diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
  diff[1] = (diff[1] + p - 1) % p;
  trim(diff);
  if (!diff.empty()) return false;
  for (unsigned r : prime_factors(k)) {
    ZpPoly h = x_pow_pj(k / r);
    h.resize(std::max<std::size_t>(h.size(), 2), 0);
    h[1] = (h[1] + p - 1) % p;
    trim(h);
    ZpPoly g = zp_gcd(f, h, p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<unsigned> least_irreducible(unsigned p, unsigned k) {
  std::uint64_t count = ipow(p, k);
  for (std::uint64_t code = 0; code < count; ++code) {
    // code's most significant base-p digit is c_{k-1}
    std::vector<unsigned> c(k);
    std::uint64_t t = code;
    for (unsigned i = 0; i < k; ++i) {
      c[i] = static_cast<unsigned>(t % p);
      t /= p;
    }
    ZpPoly f(c.begin(), c.end());
    f.push_back(1);
    if (k > 1 && c[0] == 0) continue;
    if (is_irreducible(f, p)) return c;
  }
  fail(ErrorCode::consistency, "no irreducible polynomial found");
}

}  // namespace

bool is_supported_prime(unsigned p) {
  return p == 2 || p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
}

FieldPtr FieldCtx::make(unsigned p, unsigned k) {
  if (!is_supported_prime(p)) fail(ErrorCode::invalid_argument, "unsupported prime p=" + std::to_string(p));
  if (k < 1 || k > 8) fail(ErrorCode::invalid_argument, "unsupported extension degree k=" + std::to_string(k));
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, FieldPtr> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({p, k});
  if (it != cache.end()) return it->second;
  std::vector<unsigned> m = k == 1 ? std::vector<unsigned>{0} : least_irreducible(p, k);
  FieldPtr f(new FieldCtx(p, k, std::move(m)));
  cache[{p, k}] = f;
  return f;
}

FieldPtr FieldCtx::make(unsigned p, unsigned k, const std::vector<unsigned>& modulus) {
  if (!is_supported_prime(p)) fail(ErrorCode::invalid_argument, "unsupported prime p=" + std::to_string(p));
  if (k < 1 || k > 8) fail(ErrorCode::invalid_argument, "unsupported extension degree k=" + std::to_string(k));
  if (modulus.size() != k) fail(ErrorCode::invalid_argument, "modulus must list k coefficients c_0..c_{k-1}");
  for (unsigned c : modulus)
    if (c >= p) fail(ErrorCode::invalid_argument, "modulus coefficient out of range");
  ZpPoly f(modulus.begin(), modulus.end());
  f.push_back(1);
  if (!is_irreducible(f, p)) fail(ErrorCode::invalid_argument, "modulus is not irreducible");
  if (k == 1) return make(p, 1);
  return FieldPtr(new FieldCtx(p, k, modulus));
}

FieldCtx::FieldCtx(unsigned p, unsigned k, std::vector<unsigned> modulus)
    : p_(p), k_(k), q_(static_cast<std::uint32_t>(ipow(p, k))), modulus_(std::move(modulus)) {
  inv_prime_.assign(p_, 0);
  for (unsigned a = 1; a < p_; ++a) inv_prime_[a] = inv_mod(a, p_);
  if (k_ > 1) build_tables();
}

void FieldCtx::build_tables() {
  if (q_ > kTableLimit) return;
  // find a generator of the multiplicative group
  std::vector<unsigned> fac = prime_factors(q_ - 1);
  Elem g = 0;
  for (Elem cand = 2; cand < q_; ++cand) {
    bool ok = true;
    for (unsigned r : fac) {
      Elem t = 1, b = cand;
      std::uint64_t e = (q_ - 1) / r;
      while (e) {
        if (e & 1) t = mul_slow(t, b);
        b = mul_slow(b, b);
        e >>= 1;
      }
      if (t == 1) {
        ok = false;
        break;
      }
    }
    if (ok) {
      g = cand;
      break;
    }
  }
  check_consistency(g != 0, "no primitive element");
  exp_.assign(2 * (q_ - 1), 0);
  log_.assign(q_, 0);
  Elem cur = 1;
  for (std::uint32_t i = 0; i < q_ - 1; ++i) {
    exp_[i] = cur;
    exp_[i + q_ - 1] = cur;
    log_[cur] = i;
    cur = mul_slow(cur, g);
  }
  frob_.assign(q_, 0);
  frob_inv_.assign(q_, 0);
  for (Elem a = 0; a < q_; ++a) {
    Elem f = pow(a, p_);
    frob_[a] = f;
    frob_inv_[f] = a;
  }
}

Elem FieldCtx::add_digits(Elem a, Elem b) const {
  Elem r = 0, scale = 1;
  while (a || b) {
    unsigned s = a % p_ + b % p_;
    if (s >= p_) s -= p_;
    r += s * scale;
    scale *= p_;
    a /= p_;
    b /= p_;
  }
  return r;
}

Elem FieldCtx::neg_digits(Elem a) const {
  Elem r = 0, scale = 1;
  while (a) {
    unsigned d = a % p_;
    r += (d == 0 ? 0 : p_ - d) * scale;
    scale *= p_;
    a /= p_;
  }
  return r;
}

Elem FieldCtx::mul_slow(Elem a, Elem b) const {
  ZpPoly m(modulus_.begin(), modulus_.end());
  m.push_back(1);
  auto da = digits(a), db = digits(b);
  ZpPoly r = zp_mulmod(ZpPoly(da.begin(), da.end()), ZpPoly(db.begin(), db.end()), m, p_);
  return from_digits(r);
}

Elem FieldCtx::inv(Elem a) const {
  if (a == 0) fail(ErrorCode::domain, "division by zero in GF(" + std::to_string(q_) + ")");
  if (k_ == 1) return inv_prime_[a];
  if (!log_.empty()) return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  return pow(a, q_ - 2);
}

Elem FieldCtx::pow(Elem a, std::uint64_t e) const {
  Elem r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Elem FieldCtx::frob(Elem a) const {
  if (k_ == 1) return a;
  if (!frob_.empty()) return frob_[a];
  return pow(a, p_);
}

Elem FieldCtx::frob_inv(Elem a) const {
  if (k_ == 1) return a;
  if (!frob_inv_.empty()) return frob_inv_[a];
  return pow(a, q_ / p_);
}

Elem FieldCtx::frob_pow(Elem a, long long e) const {
  if (k_ == 1) return a;
  long long r = ((e % k_) + k_) % k_;
  for (long long i = 0; i < r; ++i) a = frob(a);
  return a;
}

Elem FieldCtx::from_int(long long v) const {
  long long r = v % static_cast<long long>(p_);
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

std::vector<unsigned> FieldCtx::digits(Elem a) const {
  std::vector<unsigned> d(k_, 0);
  for (unsigned i = 0; i < k_; ++i) {
    d[i] = a % p_;
    a /= p_;
  }
  return d;
}

Elem FieldCtx::from_digits(std::span<const unsigned> c) const {
  if (c.size() > k_) {
    for (std::size_t i = k_; i < c.size(); ++i)
      if (c[i] % p_ != 0) fail(ErrorCode::invalid_argument, "too many digits for GF(" + std::to_string(q_) + ")");
  }
  Elem r = 0, scale = 1;
  for (std::size_t i = 0; i < std::min<std::size_t>(c.size(), k_); ++i) {
    r += (c[i] % p_) * scale;
    scale *= p_;
  }
  return r;
}

std::string FieldCtx::to_string(Elem a) const {
  if (k_ == 1) return std::to_string(a);
  std::string s = "[";
  auto d = digits(a);
  for (unsigned i = 0; i < k_; ++i) {
    if (i) s += ",";
    s += std::to_string(d[i]);
  }
  return s + "]";
}

namespace {

long long parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::parse, "bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

Elem FieldCtx::parse(std::string_view s) const {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') fail(ErrorCode::parse, "unterminated field element '" + std::string(s) + "'");
    s = s.substr(1, s.size() - 2);
    std::vector<unsigned> c;
    while (!s.empty()) {
      auto pos = s.find(',');
      long long v = parse_int(s.substr(0, pos));
      c.push_back(static_cast<unsigned>(((v % p_) + p_) % p_));
      if (pos == std::string_view::npos) break;
      s.remove_prefix(pos + 1);
    }
    return from_digits(c);
  }
  return from_int(parse_int(s));
}

}  // namespace aswt
