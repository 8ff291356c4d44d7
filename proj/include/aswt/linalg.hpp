#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "aswt/gf.hpp"

namespace aswt {

// Row-major matrix over GF(q).  Elimination routines repack into a compact row
// format (bits for GF(2), bytes for q <= 256).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(FieldPtr F, std::size_t rows, std::size_t cols);
  static DenseMatrix identity(FieldPtr F, std::size_t n);

  const FieldCtx& field() const { return *F_; }
  const FieldPtr& field_ptr() const { return F_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Elem get(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, Elem v) { data_[i * cols_ + j] = v; }
  const Elem* row(std::size_t i) const { return data_.data() + i * cols_; }

  DenseMatrix operator*(const DenseMatrix& o) const;
  DenseMatrix transpose() const;
  // entrywise sigma^e
  DenseMatrix frobenius_pow(long long e) const;
  bool operator==(const DenseMatrix& o) const;
  std::size_t nonzeros() const;

 private:
  FieldPtr F_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Elem> data_;
};

std::size_t rank(const DenseMatrix& M);
std::size_t kernel_dim(const DenseMatrix& M);
// Rows form a basis of {c : M c = 0}, in reduced form (free coordinates an identity block).
DenseMatrix kernel_basis(const DenseMatrix& M);
// Nonzero rows of a row echelon form of M.
DenseMatrix row_basis(const DenseMatrix& M);

// a^(r) = dim ker(M M^{s} M^{s^2} ... M^{s^{r-1}}), s = sigma^{-1}, r = 1..R,
// by successive dense products.
std::vector<std::size_t> twisted_power_kernels(const DenseMatrix& M, unsigned R);

// Matrix of a sigma^{-1}-semilinear operator: column j holds the image of the j-th
// basis vector, stored sparsely as (row, value).
struct SparseColumns {
  FieldPtr F;
  std::size_t rows = 0;
  std::vector<std::vector<std::pair<std::uint32_t, Elem>>> cols;

  std::size_t nonzeros() const;
  DenseMatrix dense() const;
};

// Same sequence as twisted_power_kernels, by iterating images:
// U_1 = im V, U_{r+1} = V(U_r), a^(r) = g - dim U_r.  Stops early once dim U_r
// repeats (the remaining values are then constant) unless `fill` is set, in which
// case the returned vector always has R entries.
std::vector<std::size_t> kernel_profile(const SparseColumns& M, unsigned R, bool fill = true);

}  // namespace aswt
