#include "revmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "revmc/error.hpp"
#include "revmc/simd/kernels.hpp"

namespace revmc {

// ---- Matrix ----------------------------------------------------------------

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::trace() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c = a;
  simd::axpy(1.0, b.data(), c.data());
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c = a;
  simd::axpy(-1.0, b.data(), c.data());
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  simd::scale(s, c.data());
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) simd::axpy(aik, b.row(k), c.row(i));
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = simd::dot(a.row(i), x);
  return y;
}

double max_abs(const Matrix& a) noexcept {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

// ---- Jacobi eigensolver ----------------------------------------------------

SymmetricEigen symmetric_eigen(Matrix a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "eigensolver needs a square matrix");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);

  // Rows of vt are the accumulated eigenvectors (V transposed), so both
  // updates below are row rotations on contiguous memory.
  Matrix vt = Matrix::identity(n);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        if (std::isinf(theta * theta)) t = 0.5 / theta;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        simd::rotate(a.row(p), a.row(q), c, s);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          a(i, p) = a(p, i);
          a(i, q) = a(q, i);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        simd::rotate(vt.row(p), vt.row(q), c, s);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    auto src = vt.row(order[k]);
    std::copy(src.begin(), src.end(), out.vectors.row(k).begin());
  }
  return out;
}

// ---- Linear solves ---------------------------------------------------------

namespace {

struct Lu {
  Matrix lu;
  std::vector<std::size_t> perm;
};

Lu factor(Matrix a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
  const std::size_t n = a.rows();
  const double scale = std::max(max_abs(a), 1e-300);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= 1e-14 * scale)
      throw Error(ErrorCode::SingularSystem, "pivot " + std::to_string(k) + " is numerically zero");
    if (piv != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(piv).begin());
      std::swap(perm[k], perm[piv]);
    }
    const double inv = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a(i, k) * inv;
      a(i, k) = m;
      if (m != 0.0)
        simd::axpy(-m, a.row(k).subspan(k + 1), a.row(i).subspan(k + 1));
    }
  }
  return {std::move(a), std::move(perm)};
}

Vector substitute(const Lu& f, std::span<const double> b) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < n; ++i)
    x[i] -= simd::dot(f.lu.row(i).first(i), std::span<const double>(x).first(i));
  for (std::size_t i = n; i-- > 0;) {
    auto tail = f.lu.row(i).subspan(i + 1);
    x[i] = (x[i] - simd::dot(tail, std::span<const double>(x).subspan(i + 1))) / f.lu(i, i);
  }
  return x;
}

}  // namespace

Vector solve(Matrix a, Vector b) {
  if (a.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "solve: rhs length");
  const Lu f = factor(std::move(a));
  return substitute(f, b);
}

Matrix inverse(Matrix a) {
  const std::size_t n = a.rows();
  const Lu f = factor(std::move(a));
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = substitute(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

// ---- Weighted self-adjoint operators ---------------------------------------

double self_adjoint_violation(const Matrix& a, std::span<const double> w) {
  if (!a.square() || a.rows() != w.size())
    throw Error(ErrorCode::DimensionMismatch, "operator and weights differ in size");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      m = std::max(m, std::abs(w[i] * a(i, j) - w[j] * a(j, i)));
  return m;
}

Matrix symmetrize(const Matrix& a, std::span<const double> w) {
  if (!a.square() || a.rows() != w.size())
    throw Error(ErrorCode::DimensionMismatch, "operator and weights differ in size");
  const std::size_t n = a.rows();
  Vector root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(w[i]);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = a(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double upper = root[i] * a(i, j) / root[j];
      const double lower = root[j] * a(j, i) / root[i];
      s(i, j) = s(j, i) = 0.5 * (upper + lower);
    }
  }
  return s;
}

SymmetricEigen self_adjoint_eigen(const Matrix& a, std::span<const double> w) {
  SymmetricEigen eig = symmetric_eigen(symmetrize(a, w));
  const std::size_t n = w.size();
  Vector inv_root(n);
  for (std::size_t i = 0; i < n; ++i) inv_root[i] = 1.0 / std::sqrt(w[i]);

  for (std::size_t k = 0; k < n; ++k) {
    auto v = eig.vectors.row(k);
    for (std::size_t i = 0; i < n; ++i) v[i] *= inv_root[i];
    const double norm = std::sqrt(simd::weighted_dot(v, v, w));
    double largest = 0.0;
    for (double x : v) largest = std::max(largest, std::abs(x));
    double sign = 1.0;
    for (double x : v)
      if (std::abs(x) > 1e-10 * largest) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    simd::scale(sign / norm, v);
  }
  return eig;
}

}  // namespace revmc
