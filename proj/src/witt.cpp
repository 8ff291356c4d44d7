#include "aswt/witt.hpp"

#include <array>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "aswt/fsutil.hpp"

namespace aswt {

namespace {

constexpr int kFormatVersion = 1;
constexpr unsigned kMaxVars = 16;

using Key = std::array<std::uint8_t, kMaxVars>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : k) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// integer polynomial with coefficients modulo some power of p
using ZPoly = std::unordered_map<Key, std::uint64_t, KeyHash>;

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

ZPoly zmul(const ZPoly& a, const ZPoly& b, std::uint64_t mod) {
  ZPoly r;
  r.reserve(a.size() * 2);
  for (auto& [ka, ca] : a) {
    for (auto& [kb, cb] : b) {
      Key k;
      for (unsigned i = 0; i < kMaxVars; ++i) {
        unsigned s = ka[i] + kb[i];
        if (s > 255) fail(ErrorCode::invalid_argument, "Witt polynomial exponent overflow");
        k[i] = static_cast<std::uint8_t>(s);
      }
      std::uint64_t& slot = r[k];
      slot = (slot + (ca * cb) % mod) % mod;
    }
  }
  for (auto it = r.begin(); it != r.end();) {
    if (it->second == 0) it = r.erase(it);
    else ++it;
  }
  return r;
}

ZPoly zpow(const ZPoly& a, std::uint64_t e, std::uint64_t mod) {
  ZPoly r;
  r[Key{}] = 1 % mod;
  ZPoly b = a;
  while (e) {
    if (e & 1) r = zmul(r, b, mod);
    e >>= 1;
    if (e) b = zmul(b, b, mod);
  }
  return r;
}

void zadd_scaled(ZPoly& acc, const ZPoly& a, std::uint64_t scale, std::uint64_t mod, bool subtract) {
  for (auto& [k, c] : a) {
    std::uint64_t v = (c % mod) * (scale % mod) % mod;
    if (subtract) v = (mod - v) % mod;
    std::uint64_t& slot = acc[k];
    slot = (slot + v) % mod;
  }
}

std::string term_text(const WittPolys::Term& t, unsigned len) {
  std::string s = std::to_string(t.c);
  for (unsigned v = 0; v < 2 * len; ++v) {
    if (t.e[v] == 0) continue;
    s += " * ";
    s += (v < len ? "X" : "Y");
    s += std::to_string(v < len ? v : v - len);
    if (t.e[v] > 1) s += "^" + std::to_string(t.e[v]);
  }
  return s;
}

}  // namespace

unsigned WittPolys::max_len(unsigned p) {
  switch (p) {
    case 2: return 8;
    case 3: return 6;
    case 5: return 4;
    default: return 2;
  }
}

std::shared_ptr<const WittPolys> WittPolys::compute(unsigned p, unsigned len) {
  if (!is_supported_prime(p)) fail(ErrorCode::invalid_argument, "unsupported prime for Witt vectors");
  if (len == 0 || len > max_len(p))
    fail(ErrorCode::invalid_argument,
         "Witt length " + std::to_string(len) + " unsupported for p=" + std::to_string(p) +
             " (max " + std::to_string(max_len(p)) + ")");
  std::shared_ptr<WittPolys> W(new WittPolys(p, len));
  auto var = [&](unsigned idx) {
    ZPoly z;
    Key k{};
    k[idx] = 1;
    z[k] = 1;
    return z;
  };
  for (unsigned m = 0; m < len; ++m) {
    // Work modulo p^{m+1}.  Since S_i is only known mod p, we use that
    // a = b mod p implies a^{p^k} = b^{p^k} mod p^{k+1}, so p^i S_i^{p^{m-i}}
    // is determined mod p^{m+1}.
    const std::uint64_t mod = ipow(p, m + 1);
    ZPoly N;
    for (unsigned i = 0; i <= m; ++i) {
      std::uint64_t e = ipow(p, m - i);
      std::uint64_t sub_mod = ipow(p, m - i + 1);
      std::uint64_t pi = ipow(p, i);
      zadd_scaled(N, zpow(var(i), e, sub_mod), pi, mod, false);
      zadd_scaled(N, zpow(var(len + i), e, sub_mod), pi, mod, false);
      if (i < m) {
        ZPoly Si;
        for (auto& t : W->polys_[i]) {
          Key k{};
          for (unsigned v = 0; v < 2 * len; ++v) k[v] = static_cast<std::uint8_t>(t.e[v]);
          Si[k] = t.c;
        }
        zadd_scaled(N, zpow(Si, e, sub_mod), pi, mod, true);
      }
    }
    const std::uint64_t pm = ipow(p, m);
    std::vector<Term> terms;
    for (auto& [k, c] : N) {
      if (c == 0) continue;
      check_consistency(c % pm == 0, "Witt addition polynomial is not integral");
      unsigned cc = static_cast<unsigned>((c / pm) % p);
      if (cc == 0) continue;
      Term t;
      t.e.assign(k.begin(), k.begin() + 2 * len);
      t.c = cc;
      terms.push_back(std::move(t));
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.e < b.e; });
    W->polys_[m] = std::move(terms);
  }
  return W;
}

std::string WittPolys::to_string(unsigned m) const {
  const auto& terms = S(m);
  if (terms.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += " + ";
    s += term_text(terms[i], len_);
  }
  return s;
}

std::string WittPolys::serialize() const {
  std::ostringstream os;
  os << "witt-addition-polynomials " << kFormatVersion << "\n";
  os << "p " << p_ << "\n";
  os << "len " << len_ << "\n";
  for (unsigned m = 0; m < len_; ++m) os << "S" << m << ": " << to_string(m) << "\n";
  return os.str();
}

std::shared_ptr<const WittPolys> WittPolys::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int version = 0;
  unsigned p = 0, len = 0;
  std::string ptag, ltag;
  if (!(is >> tag >> version) || tag != "witt-addition-polynomials") fail(ErrorCode::parse, "not a Witt polynomial cache");
  if (version != kFormatVersion) fail(ErrorCode::parse, "Witt cache format version mismatch");
  if (!(is >> ptag >> p >> ltag >> len) || ptag != "p" || ltag != "len") fail(ErrorCode::parse, "bad Witt cache header");
  if (!is_supported_prime(p) || len == 0 || len > max_len(p)) fail(ErrorCode::parse, "bad Witt cache parameters");
  std::shared_ptr<WittPolys> W(new WittPolys(p, len));
  std::string line;
  std::getline(is, line);
  for (unsigned m = 0; m < len; ++m) {
    if (!std::getline(is, line)) fail(ErrorCode::parse, "truncated Witt cache");
    std::string head = "S" + std::to_string(m) + ": ";
    if (line.rfind(head, 0) != 0) fail(ErrorCode::parse, "bad Witt cache line");
    std::string body = line.substr(head.size());
    std::vector<Term> terms;
    if (body != "0") {
      std::istringstream ts(body);
      std::string chunk;
      // terms separated by " + ", factors by " * "
      std::size_t pos = 0;
      while (pos <= body.size()) {
        std::size_t next = body.find(" + ", pos);
        std::string t = body.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        Term term;
        term.e.assign(2 * len, 0);
        std::size_t fpos = 0;
        bool first = true;
        while (fpos <= t.size()) {
          std::size_t fn = t.find(" * ", fpos);
          std::string f = t.substr(fpos, fn == std::string::npos ? std::string::npos : fn - fpos);
          if (first) {
            term.c = static_cast<unsigned>(std::stoul(f));
            first = false;
          } else {
            if (f.size() < 2 || (f[0] != 'X' && f[0] != 'Y')) fail(ErrorCode::parse, "bad Witt cache factor");
            auto caret = f.find('^');
            unsigned idx = static_cast<unsigned>(std::stoul(f.substr(1, caret == std::string::npos ? std::string::npos : caret - 1)));
            unsigned e = caret == std::string::npos ? 1 : static_cast<unsigned>(std::stoul(f.substr(caret + 1)));
            if (idx >= len) fail(ErrorCode::parse, "bad Witt cache variable");
            term.e[(f[0] == 'X' ? 0 : len) + idx] = static_cast<std::uint16_t>(e);
          }
          if (fn == std::string::npos) break;
          fpos = fn + 3;
        }
        if (term.c == 0 || term.c >= p) fail(ErrorCode::parse, "bad Witt cache coefficient");
        terms.push_back(std::move(term));
        if (next == std::string::npos) break;
        pos = next + 3;
      }
    }
    W->polys_[m] = std::move(terms);
  }
  return W;
}

std::filesystem::path witt_cache_file(const std::filesystem::path& dir, unsigned p, unsigned len) {
  return dir / ("witt_add_p" + std::to_string(p) + "_len" + std::to_string(len) + ".txt");
}

std::shared_ptr<const WittPolys> WittPolys::get(unsigned p, unsigned len,
                                                const std::optional<std::filesystem::path>& cache_dir) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const WittPolys>> registry;
  std::lock_guard lock(mu);
  auto it = registry.find({p, len});
  if (it != registry.end()) return it->second;

  std::shared_ptr<const WittPolys> W;
  if (cache_dir) {
    auto file = witt_cache_file(*cache_dir, p, len);
    std::ifstream in(file);
    if (in) {
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        W = deserialize(ss.str());
        if (W->p() != p || W->len() != len) W.reset();
      } catch (const Error&) {
        W.reset();  // stale or corrupt: recompute below
      }
    }
  }
  if (!W) {
    W = compute(p, len);
    if (cache_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*cache_dir, ec);
      auto file = witt_cache_file(*cache_dir, p, len);
      const auto tmp = temp_sibling(file);
      {
        std::ofstream out(tmp);
        out << W->serialize();
      }
      std::filesystem::rename(tmp, file, ec);
    }
  }
  registry[{p, len}] = W;
  return W;
}

WittVector<UPolyRing> rhs_assemble(const WittPolys& W, const FieldCtx& F, const std::vector<Term>& terms) {
  UPolyRing R{&F};
  const unsigned len = W.len();
  WittVector<UPolyRing> acc(len, UPoly{});
  bool first = true;
  for (const Term& t : terms) {
    if (t.c == 0 || t.v >= len) continue;
    // p^v [c x^i] = (0,..,0, (c x^i)^{p^v}, 0, ..) with the entry at index v
    WittVector<UPolyRing> w(len, UPoly{});
    UPoly mono(t.i + 1, 0);
    mono[t.i] = t.c;
    std::size_t stretch = 1;
    for (unsigned j = 0; j < t.v; ++j) stretch *= F.p();
    w[t.v] = utwist(F, mono, t.v, stretch);
    if (first) {
      acc = std::move(w);
      first = false;
    } else {
      acc = witt_add(W, R, acc, w);
    }
  }
  return acc;
}

}  // namespace aswt
