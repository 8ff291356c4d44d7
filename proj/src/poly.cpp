#include "aswt/poly.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "aswt/error.hpp"

namespace aswt {

bool MonomialLess::operator()(const Monomial& l, const Monomial& r) const {
  std::size_t n = std::max(l.a.size(), r.a.size());
  for (std::size_t j = n; j-- > 0;) {
    std::uint32_t x = j < l.a.size() ? l.a[j] : 0;
    std::uint32_t y = j < r.a.size() ? r.a[j] : 0;
    if (x != y) return x < y;
  }
  return l.nu < r.nu;
}

std::uint64_t PoleProfile::pole_order(std::uint64_t nu, const std::vector<std::uint32_t>& a, int level) const {
  if (level > this->level()) fail(ErrorCode::invalid_argument, "pole profile shorter than requested level");
  std::uint64_t pl = 1;
  for (int i = 0; i < level; ++i) pl *= p;
  std::uint64_t v = nu * pl;
  std::uint64_t pw = pl;
  for (int j = 1; j <= level; ++j) {
    pw /= p;  // p^{level-j}
    std::uint64_t aj = static_cast<std::size_t>(j - 1) < a.size() ? a[j - 1] : 0;
    v += aj * d[j - 1] * pw;
  }
  for (std::size_t j = level; j < a.size(); ++j)
    if (a[j] != 0) fail(ErrorCode::invalid_argument, "monomial uses a variable above the requested level");
  return v;
}

// ---------------------------------------------------------------- SparsePoly

void SparsePoly::add_term(const Monomial& m, Elem c) {
  if (c == 0) return;
  Monomial mm = m;
  if (static_cast<int>(mm.a.size()) > level_) {
    for (std::size_t j = level_; j < mm.a.size(); ++j)
      if (mm.a[j] != 0) fail(ErrorCode::invalid_argument, "monomial exceeds polynomial level");
  }
  mm.a.resize(level_, 0);
  auto [it, inserted] = terms_.try_emplace(mm, c);
  if (!inserted) {
    it->second = F_->add(it->second, c);
    if (it->second == 0) terms_.erase(it);
  }
}

Elem SparsePoly::coeff(const Monomial& m) const {
  Monomial mm = m;
  mm.a.resize(level_, 0);
  auto it = terms_.find(mm);
  return it == terms_.end() ? 0 : it->second;
}

SparsePoly SparsePoly::lifted(int level) const {
  SparsePoly r(F_, std::max(level, level_));
  for (auto& [m, c] : terms_) r.add_term(m, c);
  return r;
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
  SparsePoly r = lifted(o.level_);
  for (auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const {
  SparsePoly r = lifted(o.level_);
  for (auto& [m, c] : o.terms_) r.add_term(m, F_->neg(c));
  return r;
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  SparsePoly r(F_, std::max(level_, o.level_));
  for (auto& [m1, c1] : terms_) {
    for (auto& [m2, c2] : o.terms_) {
      Monomial m;
      m.nu = m1.nu + m2.nu;
      m.a.assign(r.level_, 0);
      for (std::size_t j = 0; j < m1.a.size(); ++j) m.a[j] += m1.a[j];
      for (std::size_t j = 0; j < m2.a.size(); ++j) m.a[j] += m2.a[j];
      r.add_term(m, F_->mul(c1, c2));
    }
  }
  return r;
}

SparsePoly SparsePoly::scaled(Elem c) const {
  SparsePoly r(F_, level_);
  for (auto& [m, v] : terms_) r.add_term(m, F_->mul(v, c));
  return r;
}

std::int64_t SparsePoly::infinity_valuation(const PoleProfile& prof) const {
  if (terms_.empty()) return kInfiniteValuation;
  std::uint64_t best = 0;
  for (auto& [m, c] : terms_) best = std::max(best, prof.pole_order(m, level_));
  return -static_cast<std::int64_t>(best);
}

bool SparsePoly::is_reduced() const {
  for (auto& [m, c] : terms_)
    for (auto e : m.a)
      if (e >= F_->p()) return false;
  return true;
}

std::string SparsePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << F_->to_string(c);
    if (m.nu == 1) os << " * x";
    else if (m.nu > 1) os << " * x^" << m.nu;
    for (std::size_t j = 0; j < m.a.size(); ++j) {
      if (m.a[j] == 0) continue;
      os << " * y" << (j + 1);
      if (m.a[j] > 1) os << "^" << m.a[j];
    }
  }
  return os.str();
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_exp(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail(ErrorCode::parse, "bad exponent '" + s + "'");
  return v;
}

// split on `sep` outside brackets
std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

SparsePoly SparsePoly::parse(FieldPtr F, const std::string& text, int level) {
  struct Parsed {
    Monomial m;
    Elem c;
  };
  std::vector<Parsed> items;
  int max_level = 0;
  std::string t = strip(text);
  if (t.empty()) fail(ErrorCode::parse, "empty polynomial text");
  if (t != "0") {
    for (const std::string& raw_term : split_top(t, '+')) {
      std::string term = strip(raw_term);
      if (term.empty()) fail(ErrorCode::parse, "empty term in '" + text + "'");
      Parsed it{{}, 1};
      for (const std::string& raw_f : split_top(term, '*')) {
        std::string f = strip(raw_f);
        if (f.empty()) fail(ErrorCode::parse, "empty factor in '" + term + "'");
        std::string base = f, exps;
        auto caret = f.find('^');
        if (caret != std::string::npos) {
          base = strip(f.substr(0, caret));
          exps = strip(f.substr(caret + 1));
          if (exps.empty()) fail(ErrorCode::parse, "missing exponent in '" + f + "'");
        }
        std::uint64_t e = exps.empty() ? 1 : parse_exp(exps);
        if (base == "x") {
          it.m.nu += e;
        } else if (base.size() > 1 && base[0] == 'y') {
          std::uint64_t j = parse_exp(base.substr(1));
          if (j == 0) fail(ErrorCode::parse, "variables are y1, y2, ...");
          if (it.m.a.size() < j) it.m.a.resize(j, 0);
          it.m.a[j - 1] += static_cast<std::uint32_t>(e);
          max_level = std::max<int>(max_level, static_cast<int>(j));
        } else {
          if (caret != std::string::npos) fail(ErrorCode::parse, "exponent on a coefficient: '" + f + "'");
          it.c = F->mul(it.c, F->parse(f));
        }
      }
      items.push_back(std::move(it));
    }
  }
  if (level < 0) level = max_level;
  if (max_level > level) fail(ErrorCode::parse, "polynomial mentions y" + std::to_string(max_level) + " above level");
  SparsePoly r(F, level);
  for (auto& it : items) r.add_term(it.m, it.c);
  return r;
}

// ---------------------------------------------------------------- ReducedPoly

bool ReducedPoly::is_zero() const {
  for (auto& s : slots)
    if (!s.empty()) return false;
  return true;
}

std::size_t ReducedPoly::term_count() const {
  std::size_t n = 0;
  for (auto& s : slots)
    for (Elem c : s) n += c != 0;
  return n;
}

// ---------------------------------------------------------------- TowerRing

TowerRing::TowerRing(FieldPtr F) : F_(std::move(F)) {}

void TowerRing::push_layer(ReducedPoly f) {
  if (f.level != levels()) fail(ErrorCode::invalid_argument, "layer must live one level below its variable");
  layers_.push_back(std::move(f));
}

std::size_t TowerRing::slot_count(int level) const {
  std::size_t n = 1;
  for (int i = 0; i < level; ++i) n *= p();
  return n;
}

ReducedPoly TowerRing::zero(int level) const { return ReducedPoly{level, std::vector<UPoly>(slot_count(level))}; }

ReducedPoly TowerRing::constant(UPoly u, int level) const {
  ReducedPoly r = zero(level);
  utrim(u);
  r.slots[0] = std::move(u);
  return r;
}

ReducedPoly TowerRing::monomial(const Monomial& m, Elem c, int level) const {
  ReducedPoly r = zero(level);
  std::size_t idx = 0, w = 1;
  for (std::size_t j = 0; j < m.a.size(); ++j) {
    if (m.a[j] >= p()) fail(ErrorCode::invalid_argument, "monomial is not reduced");
    if (static_cast<int>(j) >= level && m.a[j] != 0) fail(ErrorCode::invalid_argument, "monomial above level");
    idx += m.a[j] * w;
    w *= p();
  }
  if (c != 0) {
    r.slots[idx].assign(m.nu + 1, 0);
    r.slots[idx][m.nu] = c;
  }
  return r;
}

ReducedPoly TowerRing::y(int j, int level) const {
  Monomial m;
  m.a.assign(j, 0);
  m.a[j - 1] = 1;
  return monomial(m, 1, level);
}

ReducedPoly TowerRing::lift(const ReducedPoly& a, int level) const {
  if (level < a.level) fail(ErrorCode::invalid_argument, "cannot lift to a lower level");
  if (level == a.level) return a;
  ReducedPoly r = zero(level);
  for (std::size_t i = 0; i < a.slots.size(); ++i) r.slots[i] = a.slots[i];
  return r;
}

void TowerRing::axpy(ReducedPoly& a, Elem c, const ReducedPoly& b) const {
  if (b.level > a.level) a = lift(a, b.level);
  for (std::size_t i = 0; i < b.slots.size(); ++i) uaxpy(*F_, a.slots[i], c, b.slots[i]);
}

ReducedPoly TowerRing::add(const ReducedPoly& a, const ReducedPoly& b) const {
  ReducedPoly r = lift(a, std::max(a.level, b.level));
  axpy(r, 1, b);
  return r;
}

ReducedPoly TowerRing::sub(const ReducedPoly& a, const ReducedPoly& b) const {
  ReducedPoly r = lift(a, std::max(a.level, b.level));
  axpy(r, F_->neg(1), b);
  return r;
}

ReducedPoly TowerRing::scale(const ReducedPoly& a, Elem c) const {
  ReducedPoly r = zero(a.level);
  for (std::size_t i = 0; i < a.slots.size(); ++i) r.slots[i] = uscale(*F_, a.slots[i], c);
  return r;
}

void TowerRing::add_block(UPoly* dst, const UPoly* src, std::size_t n) const {
  for (std::size_t i = 0; i < n; ++i)
    if (!src[i].empty()) uaxpy(*F_, dst[i], 1, src[i]);
}

namespace {

bool block_zero(const UPoly* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!b[i].empty()) return false;
  return true;
}

}  // namespace

// out (p^level slots, assumed empty) = A * B reduced.
void TowerRing::mul_rec(int level, const UPoly* A, const UPoly* B, UPoly* out) const {
  if (level == 0) {
    out[0] = umul(*F_, A[0], B[0]);
    return;
  }
  const unsigned P = p();
  const std::size_t blk = slot_count(level - 1);
  std::vector<char> az(P), bz(P);
  for (unsigned i = 0; i < P; ++i) {
    az[i] = block_zero(A + i * blk, blk);
    bz[i] = block_zero(B + i * blk, blk);
  }
  std::vector<UPoly> C((2 * P - 1) * blk);
  std::vector<UPoly> tmp(blk);
  for (unsigned i = 0; i < P; ++i) {
    if (az[i]) continue;
    for (unsigned j = 0; j < P; ++j) {
      if (bz[j]) continue;
      for (auto& t : tmp) t.clear();
      mul_rec(level - 1, A + i * blk, B + j * blk, tmp.data());
      add_block(C.data() + (i + j) * blk, tmp.data(), blk);
    }
  }
  // y^k = y^{k-p} (y + f) for k >= p, folding from the top
  const UPoly* f = layers_.at(level - 1).slots.data();
  for (unsigned k = 2 * P - 2; k >= P; --k) {
    UPoly* ck = C.data() + k * blk;
    if (block_zero(ck, blk)) continue;
    add_block(C.data() + (k - P + 1) * blk, ck, blk);
    for (auto& t : tmp) t.clear();
    mul_rec(level - 1, ck, f, tmp.data());
    add_block(C.data() + (k - P) * blk, tmp.data(), blk);
  }
  for (std::size_t i = 0; i < P * blk; ++i) out[i] = std::move(C[i]);
}

ReducedPoly TowerRing::mul(const ReducedPoly& a, const ReducedPoly& b) const {
  int level = std::max(a.level, b.level);
  if (level > levels()) fail(ErrorCode::invalid_argument, "multiplication above the known layers");
  ReducedPoly r = zero(level);
  if (a.is_zero() || b.is_zero()) return r;
  if (a.level == level && b.level == level) {
    mul_rec(level, a.slots.data(), b.slots.data(), r.slots.data());
  } else {
    ReducedPoly la = lift(a, level), lb = lift(b, level);
    mul_rec(level, la.slots.data(), lb.slots.data(), r.slots.data());
  }
  return r;
}

ReducedPoly TowerRing::pow(const ReducedPoly& a, std::uint64_t e) const {
  ReducedPoly r = constant(UPoly{1}, a.level);
  ReducedPoly b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

ReducedPoly TowerRing::mul_upoly(const ReducedPoly& a, const UPoly& u, std::size_t shift) const {
  ReducedPoly r = zero(a.level);
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    if (a.slots[i].empty()) continue;
    UPoly prod = umul(*F_, a.slots[i], u);
    if (shift && !prod.empty()) prod.insert(prod.begin(), shift, 0);
    r.slots[i] = std::move(prod);
  }
  return r;
}

ReducedPoly TowerRing::derivative(const ReducedPoly& a) const {
  const int L = a.level;
  ReducedPoly r = zero(L);
  if (L == 0) {
    const UPoly& u = a.slots[0];
    UPoly d(u.empty() ? 0 : u.size() - 1, 0);
    for (std::size_t i = 1; i < u.size(); ++i) d[i - 1] = F_->mul(F_->from_int(static_cast<long long>(i)), u[i]);
    utrim(d);
    r.slots[0] = std::move(d);
    return r;
  }
  if (layer_derivs_.size() < static_cast<std::size_t>(L)) {
    for (int j = static_cast<int>(layer_derivs_.size()) + 1; j <= L; ++j) layer_derivs_.push_back(derivative(layer(j)));
  }
  const ReducedPoly minus_df = scale(layer_derivs_[L - 1], F_->neg(1));
  const std::size_t blk = slot_count(L - 1);
  for (unsigned i = 0; i < p(); ++i) {
    ReducedPoly Hi{L - 1, std::vector<UPoly>(a.slots.begin() + i * blk, a.slots.begin() + (i + 1) * blk)};
    if (Hi.is_zero()) continue;
    ReducedPoly dHi = derivative(Hi);
    for (std::size_t s = 0; s < blk; ++s) uaxpy(*F_, r.slots[i * blk + s], 1, dHi.slots[s]);
    if (i > 0) {
      ReducedPoly t = mul(Hi, minus_df);
      Elem ci = F_->from_int(i);
      for (std::size_t s = 0; s < blk; ++s) uaxpy(*F_, r.slots[(i - 1) * blk + s], ci, t.slots[s]);
    }
  }
  return r;
}

ReducedPoly TowerRing::from_sparse(const SparsePoly& f, int level) const {
  if (f.level() > level) fail(ErrorCode::invalid_argument, "polynomial above requested level");
  ReducedPoly r = zero(level);
  const unsigned P = p();
  // cache of y_j^e for exponents >= p
  std::map<std::pair<int, std::uint32_t>, ReducedPoly> ypow;
  for (auto& [m, c] : f.terms()) {
    bool reduced = true;
    std::size_t idx = 0, w = 1;
    for (std::size_t j = 0; j < m.a.size(); ++j) {
      if (m.a[j] >= P) reduced = false;
      idx += m.a[j] * w;
      w *= P;
    }
    if (reduced) {
      UPoly& s = r.slots[idx];
      if (s.size() <= m.nu) s.resize(m.nu + 1, 0);
      s[m.nu] = F_->add(s[m.nu], c);
      utrim(s);
      continue;
    }
    ReducedPoly term = monomial(Monomial{m.nu, {}}, c, level);
    for (std::size_t j = 0; j < m.a.size(); ++j) {
      if (m.a[j] == 0) continue;
      auto key = std::make_pair(static_cast<int>(j + 1), m.a[j]);
      auto it = ypow.find(key);
      if (it == ypow.end()) it = ypow.emplace(key, pow(y(static_cast<int>(j + 1), static_cast<int>(j + 1)), m.a[j])).first;
      term = mul(term, it->second);
    }
    axpy(r, 1, term);
  }
  return r;
}

SparsePoly TowerRing::to_sparse(const ReducedPoly& a) const {
  SparsePoly r(F_, a.level);
  for (std::size_t idx = 0; idx < a.slots.size(); ++idx) {
    Monomial m;
    m.a.assign(a.level, 0);
    std::size_t t = idx;
    for (int j = 0; j < a.level; ++j) {
      m.a[j] = static_cast<std::uint32_t>(t % p());
      t /= p();
    }
    for (std::size_t nu = 0; nu < a.slots[idx].size(); ++nu) {
      if (a.slots[idx][nu] == 0) continue;
      m.nu = nu;
      r.add_term(m, a.slots[idx][nu]);
    }
  }
  return r;
}

std::uint64_t TowerRing::max_pole(const ReducedPoly& a, const PoleProfile& prof) const {
  std::uint64_t best = 0;
  std::vector<std::uint32_t> digits(a.level);
  for (std::size_t idx = 0; idx < a.slots.size(); ++idx) {
    if (a.slots[idx].empty()) continue;
    std::size_t t = idx;
    for (int j = 0; j < a.level; ++j) {
      digits[j] = static_cast<std::uint32_t>(t % p());
      t /= p();
    }
    best = std::max(best, prof.pole_order(a.slots[idx].size() - 1, digits, a.level));
  }
  return best;
}

SparsePoly reduce_to_monomial_basis(const TowerRing& ring, const SparsePoly& f) {
  return ring.to_sparse(ring.from_sparse(f, f.level()));
}

}  // namespace aswt
