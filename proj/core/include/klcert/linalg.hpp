#pragma once

// Dense symmetric linear algebra for desk-scale dimensions (p <= ~64).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace klcert {

using Vec = std::vector<double>;

/// Sorted, duplicate-free subset of {0, ..., dim-1}.
class SupportSet {
 public:
  SupportSet() = default;
  /// Throws ArgumentError unless `indices` is strictly increasing and < dim.
  SupportSet(std::vector<std::size_t> indices, std::size_t dim);

  /// Indices i with x[i] != 0 (exact comparison).
  static SupportSet of(std::span<const double> x);
  static SupportSet all(std::size_t dim);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t ambient_dim() const noexcept { return dim_; }
  bool contains(std::size_t i) const;
  bool includes(const SupportSet& other) const;
  SupportSet complement() const;

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t dim_ = 0;
};

/// Row-major dense matrix; used for eigenbases and small linear systems.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vec column(std::size_t c) const;
  Vec apply(std::span<const double> v) const;
  Matrix transpose() const;
  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric p x p matrix. Asymmetry above 1e-12 is rejected on construction.
class SymMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);  // zero matrix
  static SymMatrix from_rows(const std::vector<Vec>& rows);
  static SymMatrix from_dense(const Matrix& m);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix scaled_identity(std::size_t dim, double gamma);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value);

  Vec apply(std::span<const double> v) const;
  double quadratic_form(std::span<const double> v) const;
  /// Principal submatrix A_JJ.
  SymMatrix principal(const SupportSet& rows) const;
  /// P A P^T for the permutation sending coordinate i to perm[i].
  SymMatrix permuted(std::span<const std::size_t> perm) const;
  double max_abs() const;
  Matrix dense() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct EigDecomposition {
  Vec eigenvalues;  // non-increasing
  Matrix basis;     // column k pairs with eigenvalues[k]
};

/// Cyclic threshold Jacobi. Eigenvector signs are fixed so the first entry
/// whose magnitude exceeds 1e-14 is positive. Throws NumericalFailure after
/// 100 sweeps without convergence.
EigDecomposition sym_eig(const SymMatrix& m);

double spectral_norm(const SymMatrix& m);

/// The k indices of largest |v_i|, ties to the smaller index, returned sorted.
SupportSet top_k_indices(std::span<const double> v, std::size_t k);

/// Same selection rule on signed values (largest v_i first).
SupportSet top_k_values(std::span<const double> v, std::size_t k);

/// Gaussian elimination with partial pivoting; nullopt when a pivot falls
/// below 1e-12 times the largest entry of `a`.
std::optional<Vec> solve_linear(Matrix a, Vec b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Vec restrict_to(std::span<const double> x, const SupportSet& s);
Vec embed(std::span<const double> z, const SupportSet& s);
std::size_t zero_norm(std::span<const double> x);

}  // namespace klcert
