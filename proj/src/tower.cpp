#include "aswt/tower.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "aswt/error.hpp"
#include "aswt/standard_form.hpp"

namespace aswt {

namespace {

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

std::string canonical_text(const TowerSpec& spec) {
  TowerSpec n = normalize_rhs(spec);
  std::sort(n.terms.begin(), n.terms.end(), [](const Term& a, const Term& b) {
    return std::tie(a.i, a.v, a.c) < std::tie(b.i, b.v, b.c);
  });
  std::ostringstream os;
  os << "p=" << n.field->p() << ";k=" << n.field->k() << ";modulus=";
  for (std::size_t j = 0; j < n.field->modulus().size(); ++j) os << (j ? "," : "") << n.field->modulus()[j];
  os << ";terms=";
  for (std::size_t j = 0; j < n.terms.size(); ++j)
    os << (j ? "," : "") << n.terms[j].v << ":" << n.field->to_string(n.terms[j].c) << ":" << n.terms[j].i;
  return os.str();
}

std::string spec_hash(const TowerSpec& spec) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_text(spec)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_spec(const TowerSpec& spec) {
  if (!spec.field) fail(ErrorCode::invalid_argument, "tower spec has no field");
  if (spec.terms.empty()) fail(ErrorCode::invalid_argument, "tower spec has no terms");
  for (const Term& t : spec.terms) {
    if (t.c == 0) fail(ErrorCode::invalid_argument, "term coefficient must be nonzero");
    if (t.c >= spec.field->q()) fail(ErrorCode::invalid_argument, "term coefficient outside the field");
    if (t.i == 0) fail(ErrorCode::invalid_argument, "term exponents must be >= 1 (branching only over infinity)");
  }
}

TowerSpec normalize_rhs(const TowerSpec& spec) {
  validate_spec(spec);
  TowerSpec out = spec;
  const unsigned p = spec.field->p();
  for (Term& t : out.terms) {
    while (t.i % p == 0) {
      t.i /= p;
      t.c = spec.field->frob_inv(t.c);
    }
  }
  return out;
}

std::map<std::uint64_t, unsigned> coefficient_valuations(const TowerSpec& normalized, unsigned n) {
  const FieldCtx& F = *normalized.field;
  std::map<std::uint64_t, std::vector<const Term*>> groups;
  for (const Term& t : normalized.terms) groups[t.i].push_back(&t);
  std::map<std::uint64_t, unsigned> out;
  for (auto& [i, ts] : groups) {
    if (ts.size() == 1) {
      out[i] = std::min(ts[0]->v, n);
      continue;
    }
    unsigned len = std::min(n, WittPolys::max_len(F.p()));
    auto W = WittPolys::get(F.p(), len);
    ScalarRing R{&F};
    WittVector<ScalarRing> acc(len, 0);
    for (const Term* t : ts) {
      if (t->v >= len) continue;
      WittVector<ScalarRing> w(len, 0);
      w[t->v] = F.frob_pow(t->c, t->v);
      acc = witt_add(*W, R, acc, w);
    }
    unsigned v = len;
    for (unsigned j = 0; j < len; ++j)
      if (acc[j] != 0) {
        v = j;
        break;
      }
    if (v == len && len < n)
      fail(ErrorCode::invalid_argument, "coinciding exponents need Witt vectors longer than supported for p=" +
                                            std::to_string(F.p()));
    out[i] = v;
  }
  return out;
}

std::vector<std::uint64_t> upper_breaks(const TowerSpec& normalized, unsigned n) {
  auto vals = coefficient_valuations(normalized, n);
  const unsigned p = normalized.field->p();
  std::vector<std::uint64_t> s;
  for (unsigned m = 1; m <= n; ++m) {
    std::uint64_t best = 0;
    bool any = false;
    for (auto& [i, v] : vals) {
      if (v >= m) continue;
      any = true;
      best = std::max(best, i * ipow(p, m - 1 - v));
    }
    if (!any) fail(ErrorCode::invalid_argument, "tower not totally ramified at level " + std::to_string(m));
    s.push_back(best);
  }
  return s;
}

std::vector<std::uint64_t> lower_breaks(unsigned p, const std::vector<std::uint64_t>& s) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] == 0) fail(ErrorCode::invalid_argument, "malformed break sequence: zero break");
    if (j + 1 < s.size() && s[j + 1] < p * s[j]) fail(ErrorCode::invalid_argument, "malformed break sequence: s(n+1) < p s(n)");
  }
  std::vector<std::uint64_t> d;
  for (std::size_t n = 1; n <= s.size(); ++n) {
    long long v = static_cast<long long>(ipow(p, n - 1) * s[n - 1]);
    for (std::size_t j = 1; j < n; ++j) v -= static_cast<long long>((ipow(p, j) - ipow(p, j - 1)) * s[j - 1]);
    if (v <= 0) fail(ErrorCode::invalid_argument, "malformed break sequence: nonpositive lower break");
    d.push_back(static_cast<std::uint64_t>(v));
  }
  return d;
}

std::uint64_t genus_from_breaks(unsigned p, const std::vector<std::uint64_t>& s, unsigned n) {
  if (n > s.size()) fail(ErrorCode::invalid_argument, "not enough breaks for the requested level");
  long long twice = -2 * static_cast<long long>(ipow(p, n));
  for (unsigned i = 1; i <= n; ++i) twice += static_cast<long long>((ipow(p, i) - ipow(p, i - 1)) * (s[i - 1] + 1));
  twice += 2;
  check_consistency(twice >= 0 && twice % 2 == 0, "genus formula gave a non-integer");
  return static_cast<std::uint64_t>(twice / 2);
}

RamificationData ramification(const TowerSpec& normalized, unsigned n) {
  RamificationData r;
  r.p = normalized.field->p();
  r.s = upper_breaks(normalized, n);
  for (auto v : r.s) r.u.push_back(v + 1);
  r.d = lower_breaks(r.p, r.s);
  for (unsigned m = 1; m <= n; ++m) r.g.push_back(genus_from_breaks(r.p, r.s, m));
  return r;
}

std::uint64_t genus(const TowerSpec& spec, unsigned n) {
  if (n == 0) return 0;
  return genus_from_breaks(spec.field->p(), upper_breaks(normalize_rhs(spec), n), n);
}

BasicClosedForm closed_form_basic(unsigned p, std::uint64_t d, unsigned n) {
  if (d % p == 0) fail(ErrorCode::domain, "closed forms need p not dividing d");
  if (n == 0) fail(ErrorCode::invalid_argument, "level must be >= 1");
  const long long P = p, D = static_cast<long long>(d);
  Rational g = Rational(D * static_cast<long long>(ipow(p, 2 * n)), 2 * (P + 1)) -
               Rational(static_cast<long long>(ipow(p, n)), 2) + Rational(P + 1 - D, 2 * (P + 1));
  Rational dl(D * (static_cast<long long>(ipow(p, 2 * n - 1)) + 1), P + 1);
  check_consistency(g.denominator() == 1 && dl.denominator() == 1, "closed forms are not integral");
  return {static_cast<std::uint64_t>(g.numerator()), static_cast<std::uint64_t>(dl.numerator()), d * ipow(p, n - 1)};
}

std::optional<std::uint64_t> basic_invariant(const TowerSpec& normalized) {
  std::map<std::uint64_t, int> seen;
  std::uint64_t d = 0;
  for (const Term& t : normalized.terms) {
    if (t.v != 0) return std::nullopt;
    if (seen[t.i]++) return std::nullopt;
    if (t.i % normalized.field->p() == 0) return std::nullopt;
    d = std::max(d, t.i);
  }
  return d;
}

Monodromy classify_monodromy(unsigned p, const std::vector<std::uint64_t>& s) {
  Monodromy out;
  const unsigned N = static_cast<unsigned>(s.size());
  for (unsigned j = 1; j < N; ++j)
    if (s[j] <= s[j - 1]) fail(ErrorCode::invalid_argument, "break sequence must be strictly increasing");
  auto S = [&](unsigned n) { return Rational(static_cast<long long>(s[n - 1])); };
  auto P = [&](unsigned e) { return Rational(static_cast<long long>(ipow(p, e))); };
  for (unsigned m = 1; m <= std::max(1u, N / 2); ++m) {
    if (N < m + 1) break;
    // d from the last pair of the same residue, then extend the window backwards
    Rational d = (S(N) - S(N - m)) / (P(N - 1) - P(N - m - 1));
    unsigned start = N - m;
    while (start > 1) {
      unsigned n = start - 1;
      if (S(n + m) - S(n) != d * (P(n + m - 1) - P(n - 1))) break;
      start = n;
    }
    unsigned window = N - start + 1;
    if (window < 3 || window < 2 * m) continue;
    out.kind = m == 1 ? Monodromy::Kind::stable : Monodromy::Kind::periodic;
    out.period = m;
    out.d = d;
    out.c.assign(m, Rational(0));
    for (unsigned n = N - m + 1; n <= N; ++n) out.c[n % m] = S(n) - d * P(n - 1);
    out.from_level = start;
    return out;
  }
  return out;
}

Monodromy classify_monodromy(const TowerSpec& spec, unsigned N) {
  return classify_monodromy(spec.field->p(), upper_breaks(normalize_rhs(spec), N));
}

std::string to_string(const Monodromy& m) {
  std::ostringstream os;
  switch (m.kind) {
    case Monodromy::Kind::stable:
      os << "stable(c=" << to_string(m.c[0]) << ", d=" << to_string(m.d) << ")";
      break;
    case Monodromy::Kind::periodic:
      os << "periodic(m=" << m.period << ", c=[";
      for (std::size_t i = 0; i < m.c.size(); ++i) os << (i ? "," : "") << to_string(m.c[i]);
      os << "], d=" << to_string(m.d) << ")";
      break;
    case Monodromy::Kind::unclassified:
      os << "unclassified";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------- TowerState

TowerState::TowerState(const TowerSpec& spec, std::optional<std::filesystem::path> cache_dir)
    : spec_(normalize_rhs(spec)), cache_dir_(std::move(cache_dir)), ring_(spec_.field) {
  ram_.p = spec_.field->p();
}

PoleProfile TowerState::profile() const {
  PoleProfile prof{p(), {}};
  prof.d.assign(ram_.d.begin(), ram_.d.begin() + std::min<std::size_t>(ram_.d.size(), built()));
  return prof;
}

const ReducedPoly& TowerState::original_y_power(unsigned j, unsigned e) {
  auto& v = ypow_.at(j - 1);
  while (v.size() <= e) v.push_back(ring_.mul(v.back(), v[1]));
  return v[e];
}

// T_{m-1}(y, w) = S_{m-1}(y, w) - X_{m-1} - Y_{m-1}, evaluated at the original Witt
// coordinates y_j + Z_j, grouped by y-monomial and summed Horner-style from the top variable.
ReducedPoly TowerState::evaluate_carry(unsigned m, const WittPolys& W, const WittVector<UPolyRing>& w) {
  const FieldCtx& F = field();
  const unsigned len = W.len();
  const unsigned L = m - 1;
  std::map<std::vector<std::uint16_t>, UPoly> leaves;
  std::map<std::pair<unsigned, unsigned>, UPoly> wpow;
  auto wpower = [&](unsigned i, unsigned e) -> const UPoly& {
    auto key = std::make_pair(i, e);
    auto it = wpow.find(key);
    if (it != wpow.end()) return it->second;
    return wpow.emplace(key, upow(F, w[i], e)).first->second;
  };
  for (const auto& t : W.S(m - 1)) {
    if (t.e[m - 1] || t.e[len + m - 1]) continue;
    bool zero = false;
    for (unsigned i = 0; i < L && !zero; ++i)
      if (t.e[len + i] && w[i].empty()) zero = true;
    if (zero) continue;
    UPoly leaf{static_cast<Elem>(t.c)};
    for (unsigned i = 0; i < L; ++i)
      if (t.e[len + i]) leaf = umul(F, leaf, wpower(i, t.e[len + i]));
    std::vector<std::uint16_t> key(t.e.begin(), t.e.begin() + L);
    uaxpy(F, leaves[key], 1, leaf);
  }
  using Item = std::pair<const std::vector<std::uint16_t>*, const UPoly*>;
  std::vector<Item> items;
  for (auto& [k, v] : leaves)
    if (!v.empty()) items.emplace_back(&k, &v);

  auto node = [&](auto&& self, unsigned j, const std::vector<Item>& its) -> ReducedPoly {
    if (j == 0) {
      UPoly sum;
      for (auto& it : its) uaxpy(F, sum, 1, *it.second);
      return ring_.constant(std::move(sum), 0);
    }
    std::map<unsigned, std::vector<Item>> groups;
    for (auto& it : its) groups[(*it.first)[j - 1]].push_back(it);
    ReducedPoly acc = ring_.zero(static_cast<int>(j));
    for (auto& [e, g] : groups) {
      ReducedPoly child = self(self, j - 1, g);
      if (e == 0) ring_.axpy(acc, 1, child);
      else ring_.axpy(acc, 1, ring_.mul(original_y_power(j, e), child));
    }
    return acc;
  };
  return node(node, L, items);
}

void TowerState::build(unsigned n) {
  if (n <= built()) return;
  const unsigned p = this->p();
  if (n > WittPolys::max_len(p))
    fail(ErrorCode::invalid_argument, "level " + std::to_string(n) + " exceeds the supported Witt length for p=" +
                                          std::to_string(p));
  ram_ = ramification(spec_, n);
  auto W = WittPolys::get(p, n, cache_dir_);
  auto w = rhs_assemble(*W, field(), spec_.terms);
  for (unsigned m = built() + 1; m <= n; ++m) {
    const int L = static_cast<int>(m) - 1;
    ReducedPoly raw = ring_.constant(w[m - 1], L);
    if (m > 1) ring_.axpy(raw, 1, evaluate_carry(m, *W, w));
    PoleProfile prof{p, std::vector<std::uint64_t>(ram_.d.begin(), ram_.d.begin() + m)};
    StandardForm sf = to_standard_form(ring_, raw, prof, ram_.d[m - 1]);
    ring_.push_layer(sf.f);
    layers_.push_back(sf.f);
    raw_layers_.push_back(std::move(raw));
    // original coordinate y_m + Z_m
    ReducedPoly Ym = ring_.add(ring_.y(static_cast<int>(m), static_cast<int>(m)), ring_.lift(sf.shift, static_cast<int>(m)));
    shifts_.push_back(std::move(sf.shift));
    ypow_.push_back({ring_.constant(UPoly{1}, static_cast<int>(m)), std::move(Ym)});
  }
}

std::vector<SparsePoly> layer_equations(const TowerSpec& spec, unsigned n) {
  TowerState ts(spec);
  ts.build(n);
  std::vector<SparsePoly> out;
  for (unsigned m = 1; m <= n; ++m) out.push_back(ts.ring().to_sparse(ts.raw_layer(m)));
  return out;
}

}  // namespace aswt
