#include "klcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "klcert/errors.hpp"

namespace klcert {

// ---------------------------------------------------------------------------
// SupportSet

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t dim)
    : indices_(std::move(indices)), dim_(dim) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= dim_) throw ArgumentError("SupportSet: index out of range");
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw ArgumentError("SupportSet: indices must be strictly increasing");
  }
}

SupportSet SupportSet::of(std::span<const double> x) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) idx.push_back(i);
  return SupportSet(std::move(idx), x.size());
}

SupportSet SupportSet::all(std::size_t dim) {
  std::vector<std::size_t> idx(dim);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return SupportSet(std::move(idx), dim);
}

bool SupportSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool SupportSet::includes(const SupportSet& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

SupportSet SupportSet::complement() const {
  std::vector<std::size_t> idx;
  idx.reserve(dim_ - indices_.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (k < indices_.size() && indices_[k] == i) {
      ++k;
    } else {
      idx.push_back(i);
    }
  }
  return SupportSet(std::move(idx), dim_);
}

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::column(std::size_t c) const {
  Vec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Vec Matrix::apply(std::span<const double> v) const {
  if (v.size() != cols_) throw ArgumentError("Matrix::apply: dimension mismatch");
  Vec out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("Matrix product: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw ArgumentError("SymMatrix: dimension must be at least 1");
}

SymMatrix SymMatrix::from_rows(const std::vector<Vec>& rows) {
  const std::size_t n = rows.size();
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      std::ostringstream msg;
      msg << "SymMatrix: row " << i << " has " << rows[i].size() << " entries, expected " << n;
      throw ArgumentError(msg.str());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(rows[i][j] - rows[j][i]) > kSymmetryTol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "SymMatrix: symmetry violation at (" << i << "," << j << "): " << rows[i][j]
            << " vs " << rows[j][i];
        throw ArgumentError(msg.str());
      }
      m.data_[i * n + j] = rows[i][j];
      m.data_[j * n + i] = rows[i][j];
    }
  }
  return m;
}

SymMatrix SymMatrix::from_dense(const Matrix& d) {
  if (d.rows() != d.cols()) throw ArgumentError("SymMatrix: matrix is not square");
  std::vector<Vec> rows(d.rows(), Vec(d.cols()));
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) rows[i][j] = d(i, j);
  // Products like Q D Q^T are symmetric only up to rounding; symmetrize first.
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = i + 1; j < d.cols(); ++j) {
      const double avg = 0.5 * (rows[i][j] + rows[j][i]);
      rows[i][j] = rows[j][i] = avg;
    }
  return from_rows(rows);
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.data_[i * d.size() + i] = d[i];
  return m;
}

SymMatrix SymMatrix::scaled_identity(std::size_t dim, double gamma) {
  return diagonal(Vec(dim, gamma));
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] = value;
  data_[j * dim_ + i] = value;
}

Vec SymMatrix::apply(std::span<const double> v) const {
  if (v.size() != dim_) throw ArgumentError("SymMatrix::apply: dimension mismatch");
  Vec out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * v[j];
    out[i] = s;
  }
  return out;
}

double SymMatrix::quadratic_form(std::span<const double> v) const {
  const Vec av = apply(v);
  return dot(v, av);
}

SymMatrix SymMatrix::principal(const SupportSet& rows) const {
  if (rows.ambient_dim() != dim_) throw ArgumentError("principal: dimension mismatch");
  if (rows.empty()) throw ArgumentError("principal: empty index set");
  const std::size_t m = rows.size();
  SymMatrix out(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) out.data_[a * m + b] = (*this)(rows[a], rows[b]);
  return out;
}

SymMatrix SymMatrix::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != dim_) throw ArgumentError("permuted: dimension mismatch");
  SymMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out.data_[perm[i] * dim_ + perm[j]] = (*this)(i, j);
  return out;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix SymMatrix::dense() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

// ---------------------------------------------------------------------------
// Eigensolver

namespace {

constexpr int kMaxSweeps = 100;

inline void rotate(Matrix& a, double s, double tau, std::size_t i, std::size_t j, std::size_t k,
                   std::size_t l) {
  const double g = a(i, j);
  const double h = a(k, l);
  a(i, j) = g - s * (h + g * tau);
  a(k, l) = h + s * (g - h * tau);
}

}  // namespace

EigDecomposition sym_eig(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix a = m.dense();
  Matrix v = Matrix::identity(n);
  Vec d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i] = d[i] = a(i, i);

  bool converged = false;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) {
      converged = true;
      break;
    }
    const double thresh = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 4 && std::abs(d[p]) + g == std::abs(d[p]) &&
            std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = 0.0;
          continue;
        }
        if (std::abs(a(p, q)) <= thresh) continue;
        double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = a(p, q) / h;
        } else {
          const double theta = 0.5 * h / a(p, q);
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        h = t * a(p, q);
        z[p] -= h;
        z[q] += h;
        d[p] -= h;
        d[q] += h;
        a(p, q) = 0.0;
        for (std::size_t j = 0; j < p; ++j) rotate(a, s, tau, j, p, j, q);
        for (std::size_t j = p + 1; j < q; ++j) rotate(a, s, tau, p, j, j, q);
        for (std::size_t j = q + 1; j < n; ++j) rotate(a, s, tau, p, j, q, j);
        for (std::size_t j = 0; j < n; ++j) rotate(v, s, tau, j, p, j, q);
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "sym_eig: no convergence after " << kMaxSweeps << " sweeps (dim " << n << ")";
    throw NumericalFailure(msg.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });

  EigDecomposition out{Vec(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = d[src];
    double sign = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (std::abs(v(r, src)) > 1e-14) {
        sign = v(r, src) < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t r = 0; r < n; ++r) out.basis(r, k) = sign * v(r, src);
  }
  return out;
}

double spectral_norm(const SymMatrix& m) {
  const auto eig = sym_eig(m);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

// ---------------------------------------------------------------------------
// Index selection

namespace {

template <class Key>
SupportSet select_top(std::span<const double> v, std::size_t k, Key key) {
  if (k == 0 || k > v.size()) {
    std::ostringstream msg;
    msg << "top-k selection: k=" << k << " outside [1, " << v.size() << "]";
    throw ArgumentError(msg.str());
  }
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return key(v[i]) > key(v[j]); });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return SupportSet(std::move(order), v.size());
}

}  // namespace

SupportSet top_k_indices(std::span<const double> v, std::size_t k) {
  return select_top(v, k, [](double x) { return std::abs(x); });
}

SupportSet top_k_values(std::span<const double> v, std::size_t k) {
  return select_top(v, k, [](double x) { return x; });
}

std::optional<Vec> solve_linear(Matrix a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ArgumentError("solve_linear: dimension mismatch");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
  if (scale == 0.0) return std::nullopt;
  const double tiny = 1e-12 * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tiny) return std::nullopt;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
    x[i] = s / a(i, i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Vector helpers

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Vec restrict_to(std::span<const double> x, const SupportSet& s) {
  Vec out;
  out.reserve(s.size());
  for (std::size_t i : s) out.push_back(x[i]);
  return out;
}

Vec embed(std::span<const double> z, const SupportSet& s) {
  if (z.size() != s.size()) throw ArgumentError("embed: dimension mismatch");
  Vec out(s.ambient_dim(), 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) out[s[k]] = z[k];
  return out;
}

std::size_t zero_norm(std::span<const double> x) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
}

}  // namespace klcert
