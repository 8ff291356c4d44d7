#include "aswt/standard_form.hpp"

#include <map>

#include "aswt/error.hpp"

namespace aswt {

Monomial monomial_with_pole_order(std::uint64_t w, const PoleProfile& prof, int level) {
  if (level > prof.level()) fail(ErrorCode::invalid_argument, "pole profile shorter than level");
  const unsigned p = prof.p;
  Monomial m;
  m.a.assign(level, 0);
  std::uint64_t rest = w;
  for (int j = level; j >= 1; --j) {
    std::uint64_t dj = prof.d[j - 1] % p;
    if (dj == 0) fail(ErrorCode::invalid_argument, "lower break divisible by p");
    // a_j d_j = rest (mod p)
    std::uint32_t aj = 0;
    while ((aj * dj) % p != rest % p) ++aj;
    std::uint64_t used = aj * prof.d[j - 1];
    if (used > rest) fail(ErrorCode::domain, "pole order " + std::to_string(w) + " is not attained by a monomial");
    m.a[j - 1] = aj;
    rest = (rest - used) / p;
  }
  m.nu = rest;
  return m;
}

StandardForm to_standard_form(const TowerRing& ring, const ReducedPoly& f, const PoleProfile& prof,
                              std::uint64_t target) {
  const FieldCtx& F = ring.field();
  const unsigned p = ring.p();
  const int L = f.level;
  StandardForm out{f, ring.zero(L), 0};
  std::map<std::size_t, ReducedPoly> ypow;  // (y^a)^p by slot index
  std::vector<std::uint32_t> digits(L);

  for (;;) {
    if (out.f.is_zero()) fail(ErrorCode::consistency, "layer equation vanished during standard-form reduction");
    // locate the leading monomial (distinct pole orders make it unique)
    std::uint64_t best = 0;
    std::size_t best_slot = 0;
    for (std::size_t idx = 0; idx < out.f.slots.size(); ++idx) {
      const UPoly& s = out.f.slots[idx];
      if (s.empty()) continue;
      std::size_t t = idx;
      for (int j = 0; j < L; ++j) {
        digits[j] = static_cast<std::uint32_t>(t % p);
        t /= p;
      }
      std::uint64_t po = prof.pole_order(s.size() - 1, digits, L);
      if (po > best) {
        best = po;
        best_slot = idx;
      }
    }
    if (best == target) {
      check_consistency(best % p != 0, "standard-form target divisible by p");
      return out;
    }
    if (best < target)
      fail(ErrorCode::consistency, "pole order " + std::to_string(best) + " fell below the lower break " +
                                       std::to_string(target));
    if (best % p != 0)
      fail(ErrorCode::consistency, "standard-form reduction stuck at pole order " + std::to_string(best) +
                                       " (expected " + std::to_string(target) + ")");
    const std::size_t lead_deg = out.f.slots[best_slot].size() - 1;
    const Elem lead = out.f.slots[best_slot][lead_deg];

    Monomial z = monomial_with_pole_order(best / p, prof, L);
    std::size_t zslot = 0, w = 1;
    for (int j = 0; j < L; ++j) {
      zslot += z.a[j] * w;
      w *= p;
    }
    auto it = ypow.find(zslot);
    if (it == ypow.end()) {
      Monomial ya{0, z.a};
      it = ypow.emplace(zslot, ring.pow(ring.monomial(ya, 1, L), p)).first;
    }
    // z^p = x^{p nu} (y^a)^p
    const std::size_t xs = static_cast<std::size_t>(z.nu) * p;
    const UPoly& ls = it->second.slots[best_slot];
    check_consistency(ls.size() + xs == lead_deg + 1 && !ls.empty(), "leading monomial of z^p mismatch");
    const Elem zp_lead = ls.back();
    const Elem c = F.div(lead, zp_lead);   // coefficient of z^p to subtract
    const Elem cz = F.frob_inv(c);         // (cz z)^p = c z^p
    // f <- f - c z^p + cz z
    for (std::size_t idx = 0; idx < it->second.slots.size(); ++idx)
      uaxpy(F, out.f.slots[idx], F.neg(c), it->second.slots[idx], xs);
    UPoly zmono(z.nu + 1, 0);
    zmono[z.nu] = cz;
    uaxpy(F, out.f.slots[zslot], 1, zmono);
    uaxpy(F, out.shift.slots[zslot], 1, zmono);
    ++out.steps;
    check_consistency(ring.max_pole(out.f, prof) < best || out.f.is_zero(), "standard-form step did not lower the pole");
  }
}

}  // namespace aswt
