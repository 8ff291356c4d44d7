#include <filesystem>
#include <fstream>
#include <random>

#include "aswt/cartier.hpp"
#include "aswt/error.hpp"
#include "doctest.h"

using namespace aswt;

namespace {

TowerSpec make_spec(unsigned p, unsigned k, std::vector<Term> terms) {
  return TowerSpec{FieldCtx::make(p, k), std::move(terms), "t"};
}

ReducedPoly random_poly(const TowerRing& ring, int level, std::size_t deg, std::mt19937_64& rng, unsigned density = 3) {
  ReducedPoly h = ring.zero(level);
  const unsigned q = ring.field().q();
  for (auto& s : h.slots) {
    if (rng() % 2) continue;
    s.assign(deg + 1, 0);
    for (auto& c : s)
      if (rng() % density == 0) c = static_cast<Elem>(rng() % q);
    utrim(s);
  }
  return h;
}

ReducedPoly poly(const TowerRing& ring, const std::string& text, int level) {
  return ring.from_sparse(SparsePoly::parse(ring.field_ptr(), text, level), level);
}

std::size_t a_number(CartierOperator& V, unsigned n) {
  V.build(n);
  auto B = madden_basis(V.tower(), n);
  return kernel_dim(V.matrix(B).dense());
}

}  // namespace

TEST_CASE("Cartier operator on the line") {
  for (unsigned p : {2u, 3u, 5u}) {
    auto F = FieldCtx::make(p, 1);
    CHECK(base_cartier(*F, UPoly{1}).empty());
    UPoly xp1(p, 0);
    xp1[p - 1] = 1;
    CHECK(base_cartier(*F, xp1) == UPoly{1});
  }
  auto F3 = FieldCtx::make(3, 1);
  CHECK(base_cartier(*F3, UPoly{0, 0, 1, 0, 0, 1}) == UPoly{1, 1});
  auto F9 = FieldCtx::make(3, 2);
  CHECK(base_cartier(*F9, UPoly{0, 0, 5}) == UPoly{F9->frob_inv(5)});
}

TEST_CASE("Madden basis") {
  MaddenBasis b1({2, {7}}, 1);
  CHECK(b1.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(b1.monomial(i) == Monomial{i, {0}});
  MaddenBasis b2({2, {7, 21}}, 2);
  CHECK(b2.size() == 16);
  CHECK(b2.nu_max(0) + 1 == 8);
  CHECK(b2.nu_max(1) + 1 == 5);
  CHECK(b2.nu_max(2) + 1 == 3);
  CHECK(b2.nu_max(3) == -1);
  MaddenBasis b3({2, {3}}, 1);
  CHECK(b3.size() == 1);
  CHECK(b3.monomial(0) == Monomial{0, {0}});
  CHECK_THROWS_AS(b3.locate(1), Error);
}

TEST_CASE("basis differentials are the monomials with ord >= 0") {
  // ord(x^nu y^a dx) = 2g - 2 - pole(x^nu y^a) at the point above infinity
  for (auto [spec, n] : std::vector<std::pair<TowerSpec, unsigned>>{
           {make_spec(2, 1, {{0, 1, 7}}), 4}, {make_spec(3, 1, {{0, 1, 5}, {0, 2, 2}}), 3}, {make_spec(5, 1, {{0, 1, 3}}), 2},
           {make_spec(2, 1, {{0, 1, 3}, {1, 1, 5}}), 3}}) {
    TowerState ts(spec);
    ts.build(n);
    PoleProfile prof = ts.profile();
    for (unsigned m = 1; m <= n; ++m) {
      auto B = madden_basis(ts, m);
      const std::int64_t canon = 2 * static_cast<std::int64_t>(ts.ramification_data().g[m - 1]) - 2;
      std::size_t count = 0;
      for (std::size_t slot = 0; slot < B.slot_count(); ++slot) {
        std::vector<std::uint32_t> a(m);
        std::size_t t = slot;
        for (auto& e : a) {
          e = static_cast<std::uint32_t>(t % ts.p());
          t /= ts.p();
        }
        for (std::uint64_t nu = 0; nu < 4000; ++nu) {
          bool reg = static_cast<std::int64_t>(prof.pole_order(nu, a, static_cast<int>(m))) <= canon;
          CHECK(reg == B.contains(nu, slot));
          count += reg;
        }
      }
      CHECK(count == B.size());
    }
  }
}

TEST_CASE("precomputed tables") {
  TowerState ts(make_spec(2, 1, {{0, 1, 3}}));
  CartierOperator V(ts);
  V.build(1);
  CHECK(V.table(1, 0, 0).is_zero());
  CHECK(V.table(1, 1, 1) == poly(ts.ring(), "y1", 1));
  CHECK(V.table(0, 1, 0) == poly(ts.ring(), "1", 0));
  TowerState t3(make_spec(3, 1, {{0, 1, 7}}));
  CartierOperator V3(t3);
  V3.build(1);
  CHECK(V3.table(1, 0, 0).is_zero());
  CHECK_THROWS_AS(V3.apply(t3.ring().zero(2)), Error);
}

TEST_CASE("Cartier on level one for p = 2, d = 7") {
  TowerState ts(make_spec(2, 1, {{0, 1, 7}}));
  CartierOperator V(ts);
  V.build(1);
  const TowerRing& R = ts.ring();
  CHECK(V.apply(poly(R, "x", 1)) == poly(R, "1", 1));
  CHECK(V.apply(poly(R, "1", 1)).is_zero());
  CHECK(V.apply(poly(R, "x^2", 1)).is_zero());
}

TEST_CASE("defining identities of the Cartier operator") {
  std::mt19937_64 rng(21);
  for (auto [spec, n] : std::vector<std::pair<TowerSpec, unsigned>>{{make_spec(2, 1, {{0, 1, 7}}), 3},
                                                                    {make_spec(2, 1, {{0, 1, 3}, {1, 1, 5}}), 3},
                                                                    {make_spec(2, 2, {{0, 2, 5}, {0, 3, 1}}), 3},
                                                                    {make_spec(3, 1, {{0, 1, 5}, {0, 2, 2}}), 3},
                                                                    {make_spec(3, 2, {{0, 4, 4}}), 2},
                                                                    {make_spec(5, 1, {{0, 1, 3}}), 2}}) {
    TowerState ts(spec);
    CartierOperator V(ts);
    V.build(n);
    const TowerRing& R = ts.ring();
    const FieldCtx& F = R.field();
    const unsigned p = F.p();
    for (unsigned m = 0; m <= n; ++m) {
      const int L = static_cast<int>(m);
      const int trials = m < 3 ? 100 : 25;
      for (int t = 0; t < trials; ++t) {
        auto h = random_poly(R, L, m < 2 ? 6 : 2, rng);
        auto dh = R.derivative(h);
        CHECK(V.apply(dh).is_zero());
        CHECK(V.apply(R.mul(R.pow(h, p - 1), dh)) == dh);
        auto w = random_poly(R, L, 4, rng);
        CHECK(V.apply(R.mul(R.pow(h, p), w)) == R.mul(h, V.apply(w)));
        Elem c = static_cast<Elem>(1 + rng() % (F.q() - 1));
        CHECK(V.apply(R.scale(w, c)) == R.scale(V.apply(w), F.frob_inv(c)));
        CHECK(V.apply(R.add(h, w)) == R.add(V.apply(h), V.apply(w)));
      }
    }
  }
}

TEST_CASE("Cartier matrices and a-numbers") {
  TowerState t23(make_spec(2, 1, {{0, 1, 3}}));
  CartierOperator V23(t23);
  V23.build(1);
  auto M = V23.matrix(madden_basis(t23, 1)).dense();
  CHECK(M.rows() == 1);
  CHECK(M.nonzeros() == 0);

  TowerState t27(make_spec(2, 1, {{0, 1, 7}}));
  CartierOperator V27(t27);
  V27.build(1);
  M = V27.matrix(madden_basis(t27, 1)).dense();
  CHECK(M.rows() == 3);
  CHECK(kernel_dim(M) == 2);
  std::vector<std::size_t> a;
  for (unsigned n = 1; n <= 4; ++n) a.push_back(a_number(V27, n));
  CHECK(a == std::vector<std::size_t>{2, 5, 19, 75});

  TowerState t37(make_spec(3, 1, {{0, 1, 7}}));
  CartierOperator V37(t37);
  V37.build(1);
  M = V37.matrix(madden_basis(t37, 1)).dense();
  CHECK(M.rows() == 6);
  CHECK(kernel_dim(M) == 4);
  CHECK(a_number(V37, 2) == 25);
}

TEST_CASE("matrix columns are images of basis differentials and stay regular") {
  std::mt19937_64 rng(9);
  TowerState ts(make_spec(3, 2, {{0, 4, 5}, {0, 1, 2}}));
  CartierOperator V(ts);
  V.build(2);
  const TowerRing& R = ts.ring();
  for (unsigned n = 1; n <= 2; ++n) {
    auto B = madden_basis(ts, n);
    auto M = V.matrix(B);
    for (std::size_t s = 0; s < B.size(); ++s) {
      auto img = V.apply(R.monomial(B.monomial(s), 1, static_cast<int>(n)));
      CHECK(B.coordinates(img) == M.cols[s]);
    }
    for (int t = 0; t < 20; ++t) {
      std::vector<Elem> c(B.size());
      for (auto& e : c) e = static_cast<Elem>(rng() % ts.field().q());
      auto w = B.form(R, c);
      CHECK(B.is_regular(w));
      CHECK(B.is_regular(V.apply(w)));
    }
  }
}

TEST_CASE("trace") {
  auto F2 = FieldCtx::make(2, 1);
  TowerState ts(make_spec(2, 1, {{0, 1, 7}}));
  ts.build(1);
  const TowerRing& R = ts.ring();
  CHECK(trace_form(R, poly(R, "x^2 + x * y1 + y1", 1)) == poly(R, "x + 1", 0));
  CHECK(trace_form(R, R.lift(poly(R, "x^5 + 1", 0), 1)).is_zero());
  TowerState t3(make_spec(3, 1, {{0, 1, 7}}));
  t3.build(1);
  CHECK(trace_form(t3.ring(), poly(t3.ring(), "y1^2", 1)) == poly(t3.ring(), "2", 0));
  CHECK_THROWS_AS(trace_form(R, R.zero(0)), Error);
}

TEST_CASE("trace commutes with the Cartier operator") {
  std::mt19937_64 rng(12);
  for (auto [spec, n] : std::vector<std::pair<TowerSpec, unsigned>>{{make_spec(2, 1, {{0, 1, 7}, {0, 1, 3}}), 3},
                                                                    {make_spec(3, 1, {{0, 2, 5}}), 3},
                                                                    {make_spec(5, 2, {{0, 7, 3}}), 2}}) {
    TowerState ts(spec);
    CartierOperator V(ts);
    V.build(n);
    const TowerRing& R = ts.ring();
    for (unsigned m = 1; m <= n; ++m) {
      auto B = madden_basis(ts, m);
      for (int t = 0; t < 30; ++t) {
        std::vector<Elem> c(B.size());
        for (auto& e : c) e = static_cast<Elem>(rng() % ts.field().q());
        auto w = B.form(R, c);
        CHECK(trace_form(R, V.apply(w)) == V.apply(trace_form(R, w)));
        auto h = random_poly(R, static_cast<int>(m), 5, rng);
        CHECK(trace_form(R, V.apply(h)) == V.apply(trace_form(R, h)));
      }
    }
  }
}

TEST_CASE("table cache") {
  auto dir = std::filesystem::temp_directory_path() / "aswt_test_cartier_cache";
  std::filesystem::remove_all(dir);
  auto spec = make_spec(3, 1, {{0, 1, 5}, {0, 2, 2}});
  TowerState a(spec);
  CartierOperator Va(a, dir);
  Va.build(2);
  CHECK(Va.cache_hits() == 0);
  TowerState b(spec);
  CartierOperator Vb(b, dir);
  Vb.build(2);
  CHECK(Vb.cache_hits() == 2);
  for (unsigned m = 0, slots = 1; m <= 2; ++m, slots *= 3)
    for (std::size_t s = 0; s < slots; ++s)
      for (unsigned r = 0; r < 3; ++r) CHECK(Va.table(m, r, s) == Vb.table(m, r, s));
  // truncated file is recomputed
  auto file = dir / ("cartier_" + spec_hash(spec) + "_L2.txt");
  REQUIRE(std::filesystem::exists(file));
  std::filesystem::resize_file(file, std::filesystem::file_size(file) / 2);
  TowerState c(spec);
  CartierOperator Vc(c, dir);
  Vc.build(2);
  CHECK(Vc.cache_hits() == 1);
  CHECK(Vc.table(2, 1, 4) == Va.table(2, 1, 4));
  TowerState d(spec);
  CartierOperator Vd(d, dir);
  Vd.build(2);
  CHECK(Vd.cache_hits() == 2);
  std::filesystem::remove_all(dir);
}
