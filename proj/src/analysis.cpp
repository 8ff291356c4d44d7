#include "aswt/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "aswt/error.hpp"

namespace aswt {

namespace {

std::int64_t ipow64(std::int64_t b, unsigned e) {
  std::int64_t r = 1;
  while (e--) {
    if (r > std::numeric_limits<std::int64_t>::max() / b) fail(ErrorCode::domain, "integer overflow in p^e");
    r *= b;
  }
  return r;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

void check_p2_invariant(std::int64_t d) {
  if (d <= 0 || d % 2 == 0) fail(ErrorCode::domain, "ramification invariant must be odd and positive for p=2");
}

// r_n = a(n) - leading p^{2n}
std::vector<Rational> residuals(std::span<const std::int64_t> a, const Rational& leading, unsigned p,
                                unsigned first_level) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    unsigned n = first_level + static_cast<unsigned>(i);
    out.push_back(Rational(a[i]) - leading * Rational(ipow64(p, 2 * n)));
  }
  return out;
}

}  // namespace

GrowthConstants constants(unsigned r, unsigned p) {
  if (r == 0) fail(ErrorCode::invalid_argument, "constants need r >= 1");
  bool prime = p >= 2;
  for (unsigned q = 2; q * q <= p; ++q) prime = prime && p % q != 0;
  if (!prime) fail(ErrorCode::invalid_argument, "p must be prime");
  GrowthConstants c;
  c.r = r;
  c.p = p;
  const std::int64_t R = r, P = p;
  c.alpha = Rational(R * (P - 1), 2 * (P + 1) * ((P - 1) * R + (P + 1)));
  c.D = c.alpha.denominator();
  c.D_prime = c.D;
  while (c.D_prime % P == 0) c.D_prime /= P;
  if (c.D_prime > 1) {
    const std::int64_t q = (P * P) % c.D_prime;
    std::int64_t x = q;
    c.m = 1;
    while (x != 1 % c.D_prime) {
      x = x * q % c.D_prime;
      ++c.m;
    }
  }
  return c;
}

Rational asymptotic_ratio(unsigned r, unsigned p) {
  const std::int64_t R = r, P = p;
  return Rational(R * (P - 1), (P - 1) * R + (P + 1));
}

std::vector<Rational> delta_basic(std::span<const std::int64_t> a, std::int64_t d, unsigned p,
                                  unsigned first_level) {
  const Rational L = constants(1, p).alpha * d;
  std::vector<Rational> out = residuals(a, L, p, first_level);
  for (auto& x : out) x += L * Rational(ipow64(p, 2));
  return out;
}

std::vector<Rational> delta_power(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                                  const Rational& lambda, unsigned first_level) {
  std::vector<Rational> out = residuals(a, constants(r, p).alpha * d, p, first_level);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= lambda * Rational(first_level + static_cast<long long>(i));
  return out;
}

std::vector<unsigned> discrepancies(std::span<const Rational> delta, unsigned m, unsigned first_level) {
  if (m == 0) fail(ErrorCode::invalid_argument, "discrepancies need a period m >= 1");
  std::vector<unsigned> out;
  for (std::size_t i = m; i < delta.size(); ++i) {
    unsigned n = first_level + static_cast<unsigned>(i);
    if (n > m && delta[i] != delta[i - m]) out.push_back(n);
  }
  return out;
}

Rational estimate_lambda(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                         unsigned first_level) {
  const GrowthConstants k = constants(r, p);
  if (k.m == 0) fail(ErrorCode::domain, "lambda estimate needs m(r,p) >= 1");
  if (a.size() < k.m + 1) fail(ErrorCode::invalid_argument, "not enough levels to estimate lambda");
  auto res = residuals(a, k.alpha * d, p, first_level);
  const std::size_t N = res.size() - 1;
  return (res[N] - res[N - k.m]) / Rational(k.m);
}

namespace {

FitReport fit_with_period(const std::vector<Rational>& res, const Rational& leading, unsigned P,
                          unsigned first_level) {
  FitReport f;
  f.leading = leading;
  f.period = P;
  const std::size_t N = res.size() - 1;
  const unsigned last = first_level + static_cast<unsigned>(N);
  f.last_level = last;
  f.lambda = (res[N] - res[N - P]) / Rational(P);
  std::vector<Rational> c(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) c[i] = res[i] - f.lambda * Rational(first_level + static_cast<long long>(i));
  f.c.assign(P, Rational(0));
  for (std::size_t i = N + 1 - P; i <= N; ++i) f.c[(first_level + i) % P] = c[i];
  std::size_t start = N + 1;
  while (start > 0 && c[start - 1] == f.c[(first_level + start - 1) % P]) --start;
  f.valid_from = first_level + static_cast<unsigned>(start);
  f.discrepancies = discrepancies(c, P, first_level);
  // Every level in the window is reproduced; require at least one level beyond the
  // P constants and lambda that the window itself determines.
  const std::size_t window = N + 1 - start;
  const std::size_t params = P + (f.lambda != Rational(0) ? 1 : 0);
  f.fitted = window >= params + 1;
  return f;
}

}  // namespace

FitReport fit_periodic(std::span<const std::int64_t> a, std::int64_t d, unsigned p, unsigned r,
                       unsigned first_level) {
  const GrowthConstants k = constants(r, p);
  const Rational leading = k.alpha * d;
  if (a.size() < 2) fail(ErrorCode::invalid_argument, "fit needs at least two levels");
  auto res = residuals(a, leading, p, first_level);
  std::vector<unsigned> periods;
  if (k.m >= 1)
    periods = {k.m};
  else
    periods = {1, 2, 3};
  std::optional<FitReport> first;
  for (unsigned P : periods) {
    if (res.size() < P + 1) break;
    FitReport f = fit_with_period(res, leading, P, first_level);
    f.trial_period = k.m == 0;
    if (!first) first = f;
    if (f.fitted) {
      first = f;
      break;
    }
  }
  if (!first) {
    FitReport f;
    f.leading = leading;
    f.period = k.m ? k.m : 1;
    f.trial_period = k.m == 0;
    f.last_level = first_level + static_cast<unsigned>(a.size()) - 1;
    return f;
  }
  FitReport f = *first;
  const Rational shift = leading * Rational(ipow64(p, 2));
  for (const auto& x : f.c) f.c_delta.push_back(x + shift);
  return f;
}

Rational fit_value(const FitReport& f, unsigned p, unsigned n) {
  return f.leading * Rational(ipow64(p, 2 * n)) + f.lambda * Rational(n) + f.c.at(n % f.period);
}

std::string describe(const FitReport& f) {
  std::ostringstream os;
  if (f.c.empty()) return "unfit";
  os << to_string(f.leading) << "*p^(2n)";
  if (f.lambda != Rational(0)) os << " + " << to_string(f.lambda) << "*n";
  if (f.period == 1) {
    os << " + " << to_string(f.c[0]);
  } else {
    os << " + c(n mod " << f.period << "), c = [";
    for (std::size_t i = 0; i < f.c.size(); ++i) os << (i ? ", " : "") << to_string(f.c[i]);
    os << "]";
  }
  os << " for " << f.valid_from << " <= n <= " << f.last_level;
  if (!f.fitted) os << " (unconfirmed)";
  return os.str();
}

std::vector<std::int64_t> elementary_divisors(std::span<const std::int64_t> a, std::int64_t stable_value) {
  if (a.empty() || a.back() != stable_value)
    fail(ErrorCode::invalid_argument, "kernel dimensions have not reached the stable value");
  auto at = [&](std::size_t i) -> std::int64_t {
    if (i == 0) return 0;
    return a[std::min(i, a.size()) - 1];
  };
  std::vector<std::int64_t> m;
  std::int64_t weighted = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::int64_t v = 2 * at(i) - at(i - 1) - at(i + 1);
    check_consistency(v >= 0, "negative elementary divisor multiplicity");
    m.push_back(v);
    weighted += static_cast<std::int64_t>(i) * v;
  }
  check_consistency(weighted == stable_value, "elementary divisors do not sum to the nilpotent dimension");
  while (!m.empty() && m.back() == 0) m.pop_back();
  return m;
}

std::int64_t anumber_cover_p2(std::span<const std::int64_t> dQ) {
  std::int64_t a = 0;
  for (auto d : dQ) {
    check_p2_invariant(d);
    a += d % 4 == 1 ? (d - 1) / 4 : (d + 1) / 4;
  }
  return a;
}

std::int64_t anumber_basic_p2(std::int64_t d, unsigned n) {
  check_p2_invariant(d);
  if (n == 0) return 0;
  if (n == 1) return anumber_cover_p2(std::span<const std::int64_t>(&d, 1));
  std::int64_t num = d * ipow64(4, n) + 2 * (d % 4 == 1 ? d + 3 : d - 3);
  check_consistency(num % 24 == 0, "non-integral a-number");
  return num / 24;
}

Rational anumber_basic_p2_concise(std::int64_t d, unsigned n) {
  return Rational(d, 24) * Rational(ipow64(4, n) - 4) + Rational(anumber_basic_p2(d, 1)) - Rational(1, 2);
}

std::int64_t higher_anumber_level1_p2(std::span<const std::int64_t> dQ, unsigned r) {
  if (r == 0) fail(ErrorCode::invalid_argument, "r must be >= 1");
  std::int64_t a = 0;
  for (auto d : dQ) {
    check_p2_invariant(d);
    a += (d + 1) / 2 - ceil_div(d + 1, ipow64(2, r + 1));
  }
  return a;
}

std::int64_t second_anumber_level2_p2(std::span<const std::int64_t> d1, std::span<const std::int64_t> d2) {
  if (d1.size() != d2.size() || d1.empty()) fail(ErrorCode::invalid_argument, "mismatched branch data");
  std::int64_t slack = 0, a = 0;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    check_p2_invariant(d1[i]);
    if (d2[i] != 3 * d1[i]) fail(ErrorCode::domain, "level-2 invariant is not 3 d_Q(1)");
    slack += d1[i] - 3;
    a += (3 * d1[i] + 1) / 4 + (7 * d1[i] + 7) / 16;
  }
  if (slack <= -8) fail(ErrorCode::domain, "sum (d_Q - 3)/2 > -4 fails");
  return a;
}

std::vector<RamHypothesis> ramification_hypothesis(const RamificationData& ram) {
  std::vector<RamHypothesis> out;
  const std::int64_t p = ram.p;
  for (unsigned n = 0; n < ram.levels(); ++n) {
    const std::int64_t d = static_cast<std::int64_t>(ram.d[n]);
    const std::int64_t g = n == 0 ? 0 : static_cast<std::int64_t>(ram.g[n - 1]);
    RamHypothesis h;
    h.n = n;
    h.delta = d - ceil_div(d, p) - (2 * g - 2);
    h.holds = h.delta > 0;
    h.trace_vanishes = h.delta > 0 || (h.delta == 0 && d % p == (d / p) % p);
    out.push_back(h);
  }
  return out;
}

TraceCheck trace_bound_check(const CartierOperator& V, unsigned level) {
  const TowerState& ts = V.tower();
  const RamificationData& ram = ts.ramification_data();
  if (level == 0 || level > V.levels()) fail(ErrorCode::invalid_argument, "trace check: level not built");
  const std::int64_t p = ts.p();
  TraceCheck t;
  t.level = level;
  t.d = static_cast<std::int64_t>(ram.d[level - 1]);
  t.bound = t.d - ceil_div(t.d, p);
  t.strict = t.d % p == (t.d / p) % p;
  t.vanishing_expected = ramification_hypothesis(ram).at(level - 1).trace_vanishes;
  const std::uint64_t g_below = level > 1 ? ram.g[level - 2] : 0;
  const PoleProfile prof = ts.profile();
  t.min_order = kInfiniteValuation;
  auto forms = kernel_forms(V, level);
  t.kernel_dim = forms.size();
  for (const auto& eta : forms) {
    ReducedPoly tr = trace_form(ts.ring(), eta);
    std::int64_t ord = differential_order(tr, ts.ring(), prof, g_below);
    t.min_order = std::min(t.min_order, ord);
    bool bad = ord < 0 || ord < t.bound || (t.strict && ord == t.bound) ||
               (t.vanishing_expected && ord != kInfiniteValuation);
    if (bad) ++t.violations;
  }
  return t;
}

}  // namespace aswt
