#include "aswt/upoly.hpp"

#include <algorithm>

namespace aswt {

void uaxpy(const FieldCtx& F, UPoly& a, Elem c, const UPoly& b, std::size_t shift) {
  if (c == 0 || b.empty()) return;
  if (a.size() < b.size() + shift) a.resize(b.size() + shift, 0);
  Elem* dst = a.data() + shift;
  if (F.is_prime()) {
    const unsigned p = F.p();
    for (std::size_t i = 0; i < b.size(); ++i) dst[i] = static_cast<Elem>((dst[i] + c * b[i]) % p);
  } else if (c == 1) {
    for (std::size_t i = 0; i < b.size(); ++i) dst[i] = F.add(dst[i], b[i]);
  } else {
    for (std::size_t i = 0; i < b.size(); ++i) dst[i] = F.add(dst[i], F.mul(c, b[i]));
  }
  utrim(a);
}

void umul_acc(const FieldCtx& F, const UPoly& a, const UPoly& b, std::vector<std::uint64_t>& acc) {
  if (a.empty() || b.empty()) return;
  if (acc.size() < a.size() + b.size() - 1) acc.resize(a.size() + b.size() - 1, 0);
  (void)F;
  const UPoly& s = a.size() < b.size() ? a : b;
  const UPoly& l = a.size() < b.size() ? b : a;
  std::uint64_t* out = acc.data();
  const Elem* lp = l.data();
  const std::size_t ln = l.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint64_t c = s[i];
    if (c == 0) continue;
    std::uint64_t* o = out + i;
    for (std::size_t j = 0; j < ln; ++j) o[j] += c * lp[j];
  }
}

void uflush(const FieldCtx& F, UPoly& a, std::vector<std::uint64_t>& acc) {
  const unsigned p = F.p();
  if (a.size() < acc.size()) a.resize(acc.size(), 0);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i]) a[i] = static_cast<Elem>((a[i] + acc[i]) % p);
  }
  acc.clear();
  utrim(a);
}

UPoly umul(const FieldCtx& F, const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  if (F.is_prime()) {
    std::vector<std::uint64_t> acc;
    umul_acc(F, a, b, acc);
    UPoly r;
    uflush(F, r, acc);
    return r;
  }
  UPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
  }
  utrim(r);
  return r;
}

UPoly uscale(const FieldCtx& F, const UPoly& a, Elem c) {
  if (c == 0) return {};
  UPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], c);
  return r;
}

UPoly upow(const FieldCtx& F, const UPoly& a, std::uint64_t e) {
  UPoly r{1};
  UPoly b = a;
  while (e) {
    if (e & 1) r = umul(F, r, b);
    e >>= 1;
    if (e) b = umul(F, b, b);
  }
  return r;
}

UPoly utwist(const FieldCtx& F, const UPoly& a, long long frob_exp, std::size_t stretch) {
  if (a.empty()) return {};
  UPoly r((a.size() - 1) * stretch + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i * stretch] = F.frob_pow(a[i], frob_exp);
  return r;
}

}  // namespace aswt
