#include "aswt/cartier.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "aswt/error.hpp"
#include "aswt/fsutil.hpp"

namespace aswt {

namespace {

std::size_t ipow(std::size_t b, unsigned e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

std::vector<std::uint32_t> slot_digits(std::size_t slot, unsigned p, int level) {
  std::vector<std::uint32_t> a(level);
  for (int j = 0; j < level; ++j) {
    a[j] = static_cast<std::uint32_t>(slot % p);
    slot /= p;
  }
  return a;
}

constexpr const char* kTableHeader = "cartier-tables 1";

}  // namespace

UPoly base_cartier(const FieldCtx& F, const UPoly& f) {
  const unsigned p = F.p();
  UPoly r;
  for (std::size_t i = p - 1; i < f.size(); i += p) {
    if (f[i] == 0) continue;
    std::size_t j = (i + 1) / p - 1;
    if (r.size() <= j) r.resize(j + 1, 0);
    r[j] = F.frob_inv(f[i]);
  }
  utrim(r);
  return r;
}

// ---------------------------------------------------------------- MaddenBasis

MaddenBasis::MaddenBasis(const PoleProfile& prof, int level) : p_(prof.p), level_(level) {
  if (level > prof.level()) fail(ErrorCode::invalid_argument, "pole profile shorter than level");
  const std::size_t slots = ipow(p_, level);
  const long long pn = static_cast<long long>(ipow(p_, level));
  for (std::size_t s = 0; s < slots; ++s) {
    auto a = slot_digits(s, p_, level);
    long long bound = -pn - 1;
    for (int j = 1; j <= level; ++j)
      bound += static_cast<long long>(ipow(p_, level - j)) * static_cast<long long>(prof.d[j - 1]) *
               static_cast<long long>(p_ - 1 - a[j - 1]);
    std::int64_t nm = bound >= 0 ? bound / pn : -1;
    nu_max_.push_back(nm);
    offset_.push_back(size_);
    size_ += static_cast<std::size_t>(nm + 1);
  }
}

std::pair<std::uint64_t, std::size_t> MaddenBasis::locate(std::size_t index) const {
  if (index >= size_) fail(ErrorCode::invalid_argument, "basis index out of range");
  auto it = std::upper_bound(offset_.begin(), offset_.end(), index);
  std::size_t slot = static_cast<std::size_t>(it - offset_.begin()) - 1;
  return {index - offset_[slot], slot};
}

Monomial MaddenBasis::monomial(std::size_t index) const {
  auto [nu, slot] = locate(index);
  return Monomial{nu, slot_digits(slot, p_, level_)};
}

bool MaddenBasis::is_regular(const ReducedPoly& h) const {
  if (h.level != level_) fail(ErrorCode::invalid_argument, "form level does not match the basis");
  for (std::size_t s = 0; s < h.slots.size(); ++s)
    if (!h.slots[s].empty() && static_cast<std::int64_t>(h.slots[s].size()) - 1 > nu_max_[s]) return false;
  return true;
}

std::vector<std::pair<std::uint32_t, Elem>> MaddenBasis::coordinates(const ReducedPoly& h) const {
  if (h.level != level_) fail(ErrorCode::invalid_argument, "form level does not match the basis");
  std::vector<std::pair<std::uint32_t, Elem>> out;
  for (std::size_t s = 0; s < h.slots.size(); ++s) {
    const UPoly& u = h.slots[s];
    if (u.empty()) continue;
    check_consistency(static_cast<std::int64_t>(u.size()) - 1 <= nu_max_[s], "differential is not regular");
    for (std::size_t nu = 0; nu < u.size(); ++nu)
      if (u[nu]) out.push_back({static_cast<std::uint32_t>(offset_[s] + nu), u[nu]});
  }
  return out;
}

ReducedPoly MaddenBasis::form(const TowerRing& ring, std::span<const Elem> coords) const {
  if (coords.size() != size_) fail(ErrorCode::invalid_argument, "coordinate vector has the wrong length");
  ReducedPoly h = ring.zero(level_);
  for (std::size_t s = 0; s < nu_max_.size(); ++s) {
    if (nu_max_[s] < 0) continue;
    UPoly u(coords.begin() + offset_[s], coords.begin() + offset_[s] + nu_max_[s] + 1);
    utrim(u);
    h.slots[s] = std::move(u);
  }
  return h;
}

MaddenBasis madden_basis(const TowerState& ts, unsigned n) {
  if (n > ts.built()) fail(ErrorCode::invalid_argument, "tower not built to the requested level");
  MaddenBasis B(ts.profile(), static_cast<int>(n));
  const std::uint64_t g = n == 0 ? 0 : ts.ramification_data().g[n - 1];
  check_consistency(B.size() == g, "basis size " + std::to_string(B.size()) + " differs from genus " + std::to_string(g));
  return B;
}

// ---------------------------------------------------------------- CartierOperator

CartierOperator::CartierOperator(TowerState& ts, std::optional<std::filesystem::path> cache_dir)
    : ts_(ts), cache_dir_(std::move(cache_dir)), hash_(spec_hash(ts.spec())) {
  const unsigned p = ts_.p();
  std::vector<ReducedPoly> t0(p, ts_.ring().zero(0));
  t0[p - 1] = ts_.ring().constant(UPoly{1}, 0);
  tables_.push_back(std::move(t0));
}

const ReducedPoly& CartierOperator::table(unsigned m, unsigned r, std::size_t slot) const {
  return tables_.at(m).at(slot * ts_.p() + r);
}

void CartierOperator::build(unsigned n) {
  ts_.build(n);
  for (unsigned m = levels() + 1; m <= n; ++m) {
    if (auto t = load_level(m)) {
      ++cache_hits_;
      tables_.push_back(std::move(*t));
      continue;
    }
    tables_.push_back(compute_level(m));
    store_level(m, tables_.back());
  }
}

// V(x^r h dx) with h of level L, through the level-L tables.
ReducedPoly CartierOperator::apply_shifted(const ReducedPoly& h, std::size_t r) const {
  const TowerRing& ring = ts_.ring();
  const FieldCtx& F = ring.field();
  const unsigned p = F.p();
  const int L = h.level;
  if (L > static_cast<int>(levels())) fail(ErrorCode::invalid_argument, "Cartier tables not built for this level");
  ReducedPoly out = ring.zero(L);
  const bool prime = F.is_prime();
  std::vector<std::vector<std::uint64_t>> acc(prime ? out.slots.size() : 0);
  std::vector<UPoly> u(p);
  for (std::size_t b = 0; b < h.slots.size(); ++b) {
    const UPoly& hs = h.slots[b];
    if (hs.empty()) continue;
    for (auto& v : u) v.clear();
    // x^{N+r} = (x^q)^p x^s
    for (std::size_t N = 0; N < hs.size(); ++N) {
      if (!hs[N]) continue;
      std::size_t e = N + r, q = e / p, s = e % p;
      if (u[s].size() <= q) u[s].resize(q + 1, 0);
      u[s][q] = F.frob_inv(hs[N]);
    }
    for (unsigned s = 0; s < p; ++s) {
      if (u[s].empty()) continue;
      const ReducedPoly& T = table(static_cast<unsigned>(L), s, b);
      if (T.is_zero()) continue;
      for (std::size_t c = 0; c < T.slots.size(); ++c) {
        if (T.slots[c].empty()) continue;
        if (prime) umul_acc(F, T.slots[c], u[s], acc[c]);
        else uaxpy(F, out.slots[c], 1, umul(F, T.slots[c], u[s]));
      }
    }
  }
  for (std::size_t c = 0; c < acc.size(); ++c) uflush(F, out.slots[c], acc[c]);
  return out;
}

ReducedPoly CartierOperator::apply(const ReducedPoly& h) const { return apply_shifted(h, 0); }

std::vector<ReducedPoly> CartierOperator::compute_level(unsigned m) const {
  const TowerRing& ring = ts_.ring();
  const FieldCtx& F = ring.field();
  const unsigned p = F.p();
  const int L = static_cast<int>(m) - 1;
  const std::size_t P1 = ipow(p, L);
  // (-f_m)^j
  std::vector<ReducedPoly> negpow{ring.constant(UPoly{1}, L)};
  ReducedPoly negf = ring.scale(ring.layer(static_cast<int>(m)), F.neg(1));
  for (unsigned j = 1; j < p; ++j) negpow.push_back(ring.mul(negpow.back(), negf));
  // binomials mod p
  std::vector<std::vector<Elem>> binom(p, std::vector<Elem>(p, 0));
  for (unsigned a = 0; a < p; ++a) {
    binom[a][0] = 1;
    for (unsigned i = 1; i <= a; ++i) binom[a][i] = F.add(binom[a - 1][i - 1], i < a ? binom[a - 1][i] : 0);
  }

  std::vector<ReducedPoly> out(P1 * p * p, ring.zero(static_cast<int>(m)));
  std::vector<std::vector<ReducedPoly>> lower(p);  // lower[j][r] = V(x^r y'^a' (-f_m)^j dx)
  for (std::size_t ap = 0; ap < P1; ++ap) {
    ReducedPoly ya = ring.monomial(Monomial{0, slot_digits(ap, p, L)}, 1, L);
    for (unsigned j = 0; j < p; ++j) {
      ReducedPoly H = ring.mul(ya, negpow[j]);
      lower[j].clear();
      for (unsigned r = 0; r < p; ++r) lower[j].push_back(apply_shifted(H, r));
    }
    // y_m^{a_m} = (y_m^p - f_m)^{a_m}, and V(y_m^{pi} w) = y_m^i V(w)
    for (unsigned am = 0; am < p; ++am)
      for (unsigned r = 0; r < p; ++r) {
        ReducedPoly& dst = out[(ap + am * P1) * p + r];
        for (unsigned i = 0; i <= am; ++i) {
          const ReducedPoly& src = lower[am - i][r];
          for (std::size_t b = 0; b < P1; ++b)
            if (!src.slots[b].empty()) uaxpy(F, dst.slots[b + i * P1], binom[am][i], src.slots[b]);
        }
      }
  }
  return out;
}

SparseColumns CartierOperator::matrix(const MaddenBasis& basis) const {
  const unsigned p = ts_.p();
  const unsigned n = static_cast<unsigned>(basis.level());
  if (n > levels()) fail(ErrorCode::invalid_argument, "Cartier tables not built for this level");
  SparseColumns M{ts_.spec().field, basis.size(), {}};
  M.cols.resize(basis.size());
  for (std::size_t s = 0; s < basis.size(); ++s) {
    auto [nu, slot] = basis.locate(s);
    const std::size_t q = nu / p;
    const ReducedPoly& T = table(n, static_cast<unsigned>(nu % p), slot);
    auto& col = M.cols[s];
    for (std::size_t b = 0; b < T.slots.size(); ++b) {
      const UPoly& u = T.slots[b];
      if (u.empty()) continue;
      check_consistency(static_cast<std::int64_t>(u.size() - 1 + q) <= basis.nu_max(b),
                        "Cartier image of a basis differential is not regular");
      for (std::size_t e = 0; e < u.size(); ++e)
        if (u[e]) col.push_back({static_cast<std::uint32_t>(basis.offset(b) + e + q), u[e]});
    }
  }
  return M;
}

// ---------------------------------------------------------------- table cache

std::filesystem::path CartierOperator::cache_file(unsigned m) const {
  return *cache_dir_ / ("cartier_" + hash_ + "_L" + std::to_string(m) + ".txt");
}

std::optional<std::vector<ReducedPoly>> CartierOperator::load_level(unsigned m) const {
  if (!cache_dir_) return std::nullopt;
  std::ifstream in(cache_file(m));
  if (!in) return std::nullopt;
  const TowerRing& ring = ts_.ring();
  const FieldCtx& F = ring.field();
  const unsigned p = F.p();
  const std::size_t slots = ipow(p, m);
  std::string line;
  auto expect = [&](const std::string& want) { return std::getline(in, line) && line == want; };
  std::ostringstream mod;
  for (std::size_t j = 0; j < F.modulus().size(); ++j) mod << (j ? "," : "") << F.modulus()[j];
  if (!expect(kTableHeader) || !expect("p " + std::to_string(p)) || !expect("k " + std::to_string(F.k())) ||
      !expect("modulus " + mod.str()) || !expect("spec_hash " + hash_) || !expect("level " + std::to_string(m)) ||
      !expect("entries " + std::to_string(slots * p)))
    return std::nullopt;
  std::vector<ReducedPoly> out(slots * p, ring.zero(static_cast<int>(m)));
  for (std::size_t e = 0; e < slots * p; ++e) {
    if (!std::getline(in, line)) return std::nullopt;
    std::istringstream hs(line);
    std::string tag;
    std::size_t r = 0, count = 0;
    hs >> tag >> r;
    std::size_t slot = 0, w = 1;
    for (unsigned j = 0; j < m; ++j) {
      std::size_t a = 0;
      hs >> a;
      if (a >= p) return std::nullopt;
      slot += a * w;
      w *= p;
    }
    hs >> count;
    if (!hs || tag != "entry" || r >= p || slot * p + r != e) return std::nullopt;
    ReducedPoly& T = out[e];
    for (std::size_t t = 0; t < count; ++t) {
      if (!std::getline(in, line)) return std::nullopt;
      std::istringstream ts(line);
      std::size_t nu = 0, b = 0;
      ts >> nu;
      w = 1;
      for (unsigned j = 0; j < m; ++j) {
        std::size_t a = 0;
        ts >> a;
        if (a >= p) return std::nullopt;
        b += a * w;
        w *= p;
      }
      std::string cs;
      ts >> cs;
      if (!ts || nu > (1u << 30)) return std::nullopt;
      Elem c = 0;
      try {
        c = F.parse(cs);
      } catch (const Error&) {
        return std::nullopt;
      }
      if (c == 0) return std::nullopt;
      if (T.slots[b].size() <= nu) T.slots[b].resize(nu + 1, 0);
      T.slots[b][nu] = c;
    }
    for (auto& s : T.slots)
      if (!s.empty() && s.back() == 0) return std::nullopt;
  }
  if (!expect("end")) return std::nullopt;
  return out;
}

void CartierOperator::store_level(unsigned m, const std::vector<ReducedPoly>& t) const {
  if (!cache_dir_) return;
  std::error_code ec;
  std::filesystem::create_directories(*cache_dir_, ec);
  const FieldCtx& F = ts_.field();
  const unsigned p = F.p();
  auto path = cache_file(m);
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp);
    if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
    out << kTableHeader << "\np " << p << "\nk " << F.k() << "\nmodulus ";
    for (std::size_t j = 0; j < F.modulus().size(); ++j) out << (j ? "," : "") << F.modulus()[j];
    out << "\nspec_hash " << hash_ << "\nlevel " << m << "\nentries " << t.size() << "\n";
    for (std::size_t e = 0; e < t.size(); ++e) {
      out << "entry " << e % p;
      for (auto a : slot_digits(e / p, p, static_cast<int>(m))) out << ' ' << a;
      out << ' ' << t[e].term_count() << "\n";
      for (std::size_t b = 0; b < t[e].slots.size(); ++b) {
        const UPoly& u = t[e].slots[b];
        auto digits = slot_digits(b, p, static_cast<int>(m));
        for (std::size_t nu = 0; nu < u.size(); ++nu) {
          if (!u[nu]) continue;
          out << nu;
          for (auto a : digits) out << ' ' << a;
          out << ' ' << F.to_string(u[nu]) << "\n";
        }
      }
    }
    out << "end\n";
    if (!out) fail(ErrorCode::io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::io, "cannot move table cache into place: " + ec.message());
}

// ---------------------------------------------------------------- trace

std::vector<LevelProfile> kernel_profiles(CartierOperator& V, unsigned from, unsigned n, unsigned R) {
  V.build(n);
  std::vector<LevelProfile> out;
  for (unsigned m = from; m <= n; ++m) {
    auto t0 = std::chrono::steady_clock::now();
    LevelProfile lp;
    lp.level = m;
    if (m == 0) {
      lp.a.assign(R, 0);
    } else {
      MaddenBasis B = madden_basis(V.tower(), m);
      lp.genus = B.size();
      if (B.size() == 0)
        lp.a.assign(R, 0);
      else
        lp.a = kernel_profile(V.matrix(B), R, true);
    }
    lp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(lp));
  }
  return out;
}

std::vector<ReducedPoly> kernel_forms(const CartierOperator& V, unsigned level) {
  if (level == 0 || level > V.levels()) fail(ErrorCode::invalid_argument, "kernel_forms: level not built");
  MaddenBasis B = madden_basis(V.tower(), level);
  if (B.size() == 0) return {};
  // V(sum c_s w_s) = M sigma^{-1}(c), so ker V = sigma(ker M).
  DenseMatrix K = kernel_basis(V.matrix(B).dense()).frobenius_pow(1);
  std::vector<ReducedPoly> out;
  for (std::size_t i = 0; i < K.rows(); ++i)
    out.push_back(B.form(V.tower().ring(), std::span<const Elem>(K.row(i), K.cols())));
  return out;
}

ReducedPoly trace_form(const TowerRing& ring, const ReducedPoly& w) {
  if (w.level < 1) fail(ErrorCode::invalid_argument, "trace needs a form of level >= 1");
  const FieldCtx& F = ring.field();
  const unsigned p = F.p();
  const std::size_t P1 = ipow(p, w.level - 1);
  ReducedPoly out = ring.zero(w.level - 1);
  for (std::size_t b = 0; b < P1; ++b) out.slots[b] = uscale(F, w.slots[b + (p - 1) * P1], F.neg(1));
  return out;
}

std::int64_t differential_order(const ReducedPoly& h, const TowerRing& ring, const PoleProfile& prof,
                                std::uint64_t genus) {
  if (h.is_zero()) return kInfiniteValuation;
  return -static_cast<std::int64_t>(ring.max_pole(h, prof)) + 2 * static_cast<std::int64_t>(genus) - 2;
}

}  // namespace aswt
