#include "aswt/linalg.hpp"

#include <algorithm>
#include <array>

#include "aswt/error.hpp"

namespace aswt {

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(FieldPtr F, std::size_t rows, std::size_t cols)
    : F_(std::move(F)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

DenseMatrix DenseMatrix::identity(FieldPtr F, std::size_t n) {
  DenseMatrix I(std::move(F), n, n);
  for (std::size_t i = 0; i < n; ++i) I.set(i, i, 1);
  return I;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
  if (cols_ != o.rows_) fail(ErrorCode::invalid_argument, "matrix dimension mismatch");
  const FieldCtx& F = *F_;
  DenseMatrix r(F_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      Elem a = get(i, k);
      if (!a) continue;
      const Elem* src = o.row(k);
      Elem* dst = r.data_.data() + i * o.cols_;
      for (std::size_t j = 0; j < o.cols_; ++j)
        if (src[j]) dst[j] = F.add(dst[j], F.mul(a, src[j]));
    }
  return r;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(F_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t.set(j, i, get(i, j));
  return t;
}

DenseMatrix DenseMatrix::frobenius_pow(long long e) const {
  DenseMatrix r = *this;
  if (F_->is_prime()) return r;
  for (auto& v : r.data_) v = F_->frob_pow(v, e);
  return r;
}

bool DenseMatrix::operator==(const DenseMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

std::size_t DenseMatrix::nonzeros() const {
  return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](Elem v) { return v != 0; }));
}

std::size_t SparseColumns::nonzeros() const {
  std::size_t n = 0;
  for (auto& c : cols) n += c.size();
  return n;
}

DenseMatrix SparseColumns::dense() const {
  DenseMatrix M(F, rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (auto [i, v] : cols[j]) M.set(i, j, v);
  return M;
}

// ---------------------------------------------------------------- row backends

namespace {

// GF(2): 64 entries per word, row ops are XOR.
struct Gf2Rows {
  using Word = std::uint64_t;
  const FieldCtx* F;
  std::size_t width(std::size_t n) const { return (n + 63) / 64; }
  Elem get(const Word* r, std::size_t j) const { return (r[j >> 6] >> (j & 63)) & 1u; }
  void set(Word* r, std::size_t j, Elem v) const {
    Word bit = Word{1} << (j & 63);
    if (v) r[j >> 6] |= bit;
    else r[j >> 6] &= ~bit;
  }
  void add_entry(Word* r, std::size_t j, Elem v) const { r[j >> 6] ^= static_cast<Word>(v & 1u) << (j & 63); }
  void axpy(Word* dst, Elem, const Word* src, std::size_t from, std::size_t n) const {
    for (std::size_t w = from >> 6, e = width(n); w < e; ++w) dst[w] ^= src[w];
  }
  void scale(Word*, Elem, std::size_t) const {}
  Elem neg(Elem a) const { return a; }
  Elem inv(Elem) const { return 1; }
  Elem mul(Elem a, Elem b) const { return a & b; }
  Elem frob_inv(Elem a) const { return a; }
};

// GF(p), p <= 13: one byte per entry, reduction by a multiply-high so the inner
// loop vectorizes.
struct PrimeByteRows {
  using Word = std::uint8_t;
  const FieldCtx* F;
  std::uint16_t p, m;
  explicit PrimeByteRows(const FieldCtx* F_) : F(F_), p(static_cast<std::uint16_t>(F_->p())) {
    m = static_cast<std::uint16_t>(65536 / p + 1);
    for (unsigned t = 0; t < 256; ++t) check_consistency(reduce(static_cast<std::uint16_t>(t)) == t % p, "byte reduction");
  }
  std::uint16_t reduce(std::uint16_t t) const {
    std::uint16_t q = static_cast<std::uint16_t>((static_cast<std::uint32_t>(t) * m) >> 16);
    return static_cast<std::uint16_t>(t - q * p);
  }
  std::size_t width(std::size_t n) const { return n; }
  Elem get(const Word* r, std::size_t j) const { return r[j]; }
  void set(Word* r, std::size_t j, Elem v) const { r[j] = static_cast<Word>(v); }
  void add_entry(Word* r, std::size_t j, Elem v) const { r[j] = static_cast<Word>(reduce(static_cast<std::uint16_t>(r[j] + v))); }
  void axpy(Word* __restrict dst, Elem c, const Word* __restrict src, std::size_t from, std::size_t n) const {
    const std::uint16_t cc = static_cast<std::uint16_t>(c), pp = p, mm = m;
    for (std::size_t i = from; i < n; ++i) {
      std::uint16_t t = static_cast<std::uint16_t>(dst[i] + cc * src[i]);
      std::uint16_t q = static_cast<std::uint16_t>((static_cast<std::uint32_t>(t) * mm) >> 16);
      dst[i] = static_cast<Word>(t - q * pp);
    }
  }
  void scale(Word* r, Elem c, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<Word>(reduce(static_cast<std::uint16_t>(c * r[i])));
  }
  Elem neg(Elem a) const { return F->neg(a); }
  Elem inv(Elem a) const { return F->inv(a); }
  Elem mul(Elem a, Elem b) const { return F->mul(a, b); }
  Elem frob_inv(Elem a) const { return a; }
};

// Extension fields with q <= 256: byte entries, table lookups.
struct TableByteRows {
  using Word = std::uint8_t;
  const FieldCtx* F;
  std::vector<std::uint8_t> add_, mul_;
  explicit TableByteRows(const FieldCtx* F_) : F(F_), add_(65536, 0), mul_(65536, 0) {
    const unsigned q = F->q();
    for (unsigned a = 0; a < q; ++a)
      for (unsigned b = 0; b < q; ++b) {
        add_[a << 8 | b] = static_cast<std::uint8_t>(F->add(a, b));
        mul_[a << 8 | b] = static_cast<std::uint8_t>(F->mul(a, b));
      }
  }
  std::size_t width(std::size_t n) const { return n; }
  Elem get(const Word* r, std::size_t j) const { return r[j]; }
  void set(Word* r, std::size_t j, Elem v) const { r[j] = static_cast<Word>(v); }
  void add_entry(Word* r, std::size_t j, Elem v) const { r[j] = add_[r[j] << 8 | v]; }
  void axpy(Word* dst, Elem c, const Word* src, std::size_t from, std::size_t n) const {
    const std::uint8_t* mrow = &mul_[c << 8];
    if (F->p() == 2) {
      for (std::size_t i = from; i < n; ++i) dst[i] ^= mrow[src[i]];
      return;
    }
    for (std::size_t i = from; i < n; ++i)
      if (src[i]) dst[i] = add_[dst[i] << 8 | mrow[src[i]]];
  }
  void scale(Word* r, Elem c, std::size_t n) const {
    const std::uint8_t* mrow = &mul_[c << 8];
    for (std::size_t i = 0; i < n; ++i) r[i] = mrow[r[i]];
  }
  Elem neg(Elem a) const { return F->neg(a); }
  Elem inv(Elem a) const { return F->inv(a); }
  Elem mul(Elem a, Elem b) const { return mul_[a << 8 | b]; }
  Elem frob_inv(Elem a) const { return F->frob_inv(a); }
};

struct GenericRows {
  using Word = Elem;
  const FieldCtx* F;
  std::size_t width(std::size_t n) const { return n; }
  Elem get(const Word* r, std::size_t j) const { return r[j]; }
  void set(Word* r, std::size_t j, Elem v) const { r[j] = v; }
  void add_entry(Word* r, std::size_t j, Elem v) const { r[j] = F->add(r[j], v); }
  void axpy(Word* dst, Elem c, const Word* src, std::size_t from, std::size_t n) const {
    for (std::size_t i = from; i < n; ++i)
      if (src[i]) dst[i] = F->add(dst[i], F->mul(c, src[i]));
  }
  void scale(Word* r, Elem c, std::size_t n) const {
    for (std::size_t i = 0; i < n; ++i) r[i] = F->mul(c, r[i]);
  }
  Elem neg(Elem a) const { return F->neg(a); }
  Elem inv(Elem a) const { return F->inv(a); }
  Elem mul(Elem a, Elem b) const { return F->mul(a, b); }
  Elem frob_inv(Elem a) const { return F->frob_inv(a); }
};

template <class B>
struct Rows {
  using Word = typename B::Word;
  const B& b;
  std::size_t cols, width;
  std::vector<Word> data;
  std::vector<Word*> ptr;

  Rows(const B& b_, std::size_t nrows, std::size_t ncols) : b(b_), cols(ncols), width(b_.width(ncols)) {
    data.assign(nrows * width, 0);
    for (std::size_t i = 0; i < nrows; ++i) ptr.push_back(data.data() + i * width);
  }
  std::size_t size() const { return ptr.size(); }
};

template <class B>
Rows<B> load(const B& b, const DenseMatrix& M) {
  Rows<B> R(b, M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j)
      if (Elem v = M.get(i, j)) b.set(R.ptr[i], j, v);
  return R;
}

// Gaussian elimination in place.  Returns the pivot columns; rows [0, rank) are the
// pivot rows.  With `reduced` the pivots are 1 and their columns are cleared above too.
template <class B>
std::vector<std::size_t> eliminate(Rows<B>& R, bool reduced) {
  const B& b = R.b;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t col = 0; col < R.cols && r < R.size(); ++col) {
    std::size_t sel = r;
    while (sel < R.size() && b.get(R.ptr[sel], col) == 0) ++sel;
    if (sel == R.size()) continue;
    std::swap(R.ptr[r], R.ptr[sel]);
    auto* prow = R.ptr[r];
    Elem pv = b.get(prow, col);
    if (reduced && pv != 1) {
      b.scale(prow, b.inv(pv), R.width);
      pv = 1;
    }
    const Elem ninv = b.neg(b.inv(pv));
    for (std::size_t i = reduced ? 0 : r + 1; i < R.size(); ++i) {
      if (i == r) continue;
      Elem a = b.get(R.ptr[i], col);
      if (a) b.axpy(R.ptr[i], b.mul(a, ninv), prow, col, R.cols);
    }
    pivots.push_back(col);
    ++r;
  }
  return pivots;
}

template <class Fn>
decltype(auto) dispatch(const FieldCtx& F, Fn&& fn) {
  if (F.p() == 2 && F.k() == 1) return fn(Gf2Rows{&F});
  if (F.is_prime()) return fn(PrimeByteRows(&F));
  if (F.q() <= 256) return fn(TableByteRows(&F));
  return fn(GenericRows{&F});
}

template <class B>
DenseMatrix unload(const Rows<B>& R, std::size_t nrows, const FieldPtr& F) {
  DenseMatrix M(F, nrows, R.cols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < R.cols; ++j) M.set(i, j, R.b.get(R.ptr[i], j));
  return M;
}

}  // namespace

std::size_t rank(const DenseMatrix& M) {
  return dispatch(M.field(), [&](const auto& b) {
    auto R = load(b, M);
    return eliminate(R, false).size();
  });
}

std::size_t kernel_dim(const DenseMatrix& M) { return M.cols() - rank(M); }

DenseMatrix row_basis(const DenseMatrix& M) {
  return dispatch(M.field(), [&](const auto& b) {
    auto R = load(b, M);
    auto piv = eliminate(R, false);
    return unload(R, piv.size(), M.field_ptr());
  });
}

DenseMatrix kernel_basis(const DenseMatrix& M) {
  const FieldCtx& F = M.field();
  DenseMatrix rref = dispatch(F, [&](const auto& b) {
    auto R = load(b, M);
    auto piv = eliminate(R, true);
    return unload(R, piv.size(), M.field_ptr());
  });
  std::vector<std::size_t> piv;
  std::vector<char> is_piv(M.cols(), 0);
  for (std::size_t i = 0; i < rref.rows(); ++i) {
    std::size_t j = 0;
    while (rref.get(i, j) == 0) ++j;
    piv.push_back(j);
    is_piv[j] = 1;
  }
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < M.cols(); ++j)
    if (!is_piv[j]) free.push_back(j);
  DenseMatrix K(M.field_ptr(), free.size(), M.cols());
  for (std::size_t t = 0; t < free.size(); ++t) {
    K.set(t, free[t], 1);
    for (std::size_t i = 0; i < piv.size(); ++i) K.set(t, piv[i], F.neg(rref.get(i, free[t])));
  }
  return K;
}

std::vector<std::size_t> twisted_power_kernels(const DenseMatrix& M, unsigned R) {
  if (M.rows() != M.cols()) fail(ErrorCode::invalid_argument, "twisted powers need a square matrix");
  std::vector<std::size_t> out;
  DenseMatrix N = M;
  for (unsigned r = 1; r <= R; ++r) {
    if (r > 1) N = N * M.frobenius_pow(-static_cast<long long>(r - 1));
    out.push_back(kernel_dim(N));
  }
  return out;
}

std::vector<std::size_t> kernel_profile(const SparseColumns& M, unsigned R, bool fill) {
  const std::size_t g = M.cols.size();
  if (M.rows != g) fail(ErrorCode::invalid_argument, "kernel profile needs a square matrix");
  std::vector<std::size_t> out;
  if (R == 0) return out;
  dispatch(*M.F, [&](const auto& b) {
    using B = std::decay_t<decltype(b)>;
    // U_1: the columns of M as row vectors
    Rows<B> U(b, g, g);
    for (std::size_t j = 0; j < g; ++j)
      for (auto [i, v] : M.cols[j]) b.add_entry(U.ptr[j], i, v);
    std::size_t dim = eliminate(U, false).size();
    out.push_back(g - dim);
    while (out.size() < R) {
      if (dim == 0) break;
      Rows<B> next(b, dim, g);
      for (std::size_t t = 0; t < dim; ++t) {
        const auto* u = U.ptr[t];
        auto* w = next.ptr[t];
        for (std::size_t s = 0; s < g; ++s) {
          Elem c = b.get(u, s);
          if (!c) continue;
          c = b.frob_inv(c);
          for (auto [i, v] : M.cols[s]) b.add_entry(w, i, b.mul(c, v));
        }
      }
      std::size_t nd = eliminate(next, false).size();
      U.data.swap(next.data);
      U.ptr.swap(next.ptr);
      if (nd == dim) {
        out.push_back(g - nd);
        break;
      }
      dim = nd;
      out.push_back(g - dim);
    }
    return 0;
  });
  if (fill)
    while (out.size() < R) out.push_back(out.back());
  return out;
}

}  // namespace aswt
