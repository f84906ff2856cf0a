#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/gf.hpp"

namespace grc {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError() : std::runtime_error("singular matrix") {}
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix over a binary extension field.
template <class F>
class Matrix {
 public:
  using field = F;
  using value_type = typename F::value_type;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<value_type> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix data size mismatch");
  }
  Matrix(std::initializer_list<std::initializer_list<value_type>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  value_type& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  value_type operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<value_type> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const value_type> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<value_type>& data() const { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r) {
      auto dst = out.row(r);
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const value_type s = a(r, k);
        if (s == 0) continue;
        auto src = b.row(k);
        for (std::size_t c = 0; c < b.cols_; ++c) dst[c] ^= F::mul(s, src[c]);
      }
    }
    return out;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix sum dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] ^= b.data_[i];
    return out;
  }

  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) std::ranges::copy(row(idx[i]), out.row(i).begin());
    return out;
  }

  Matrix select_cols(std::span<const std::size_t> idx) const {
    Matrix out(rows_, idx.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t i = 0; i < idx.size(); ++i) out(r, i) = (*this)(r, idx[i]);
    return out;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix out(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
      for (std::size_t c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
    return out;
  }

  void append_row(std::span<const value_type> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("row length mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  static Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.rows_ == 0) return bottom;
    if (bottom.rows_ == 0) return top;
    if (top.cols_ != bottom.cols_) throw std::invalid_argument("vstack column mismatch");
    Matrix out = top;
    out.data_.insert(out.data_.end(), bottom.data_.begin(), bottom.data_.end());
    out.rows_ += bottom.rows_;
    return out;
  }

  static Matrix hstack(const Matrix& left, const Matrix& right) {
    if (left.rows_ != right.rows_) throw std::invalid_argument("hstack row mismatch");
    Matrix out(left.rows_, left.cols_ + right.cols_);
    for (std::size_t r = 0; r < left.rows_; ++r) {
      std::ranges::copy(left.row(r), out.row(r).begin());
      std::ranges::copy(right.row(r), out.row(r).begin() + left.cols_);
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> data_;
};

template <class F>
using Vector = std::vector<typename F::value_type>;

namespace detail {

// Forward elimination to reduced row echelon form, applied to `m` and mirrored
// onto `aug`. Pivot search walks columns left to right and takes the lowest
// row index with a nonzero entry. Returns the pivot columns in order.
template <class F>
std::vector<std::size_t> reduce(Matrix<F>& m, Matrix<F>* aug) {
  std::vector<std::size_t> pivots;
  std::size_t prow = 0;
  for (std::size_t col = 0; col < m.cols() && prow < m.rows(); ++col) {
    std::size_t sel = prow;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != prow) {
      std::swap_ranges(m.row(sel).begin(), m.row(sel).end(), m.row(prow).begin());
      if (aug) std::swap_ranges(aug->row(sel).begin(), aug->row(sel).end(), aug->row(prow).begin());
    }
    const auto scale = F::inv(m(prow, col));
    for (auto& v : m.row(prow)) v = F::mul(v, scale);
    if (aug)
      for (auto& v : aug->row(prow)) v = F::mul(v, scale);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == prow) continue;
      const auto f = m(r, col);
      if (f == 0) continue;
      auto src = m.row(prow);
      auto dst = m.row(r);
      for (std::size_t c = col; c < m.cols(); ++c) dst[c] ^= F::mul(f, src[c]);
      if (aug) {
        auto asrc = aug->row(prow);
        auto adst = aug->row(r);
        for (std::size_t c = 0; c < aug->cols(); ++c) adst[c] ^= F::mul(f, asrc[c]);
      }
    }
    pivots.push_back(col);
    ++prow;
  }
  return pivots;
}

}  // namespace detail

/// Rank via Gaussian elimination.
template <class F>
std::size_t rank(Matrix<F> m) {
  // Forward-only elimination is enough for rank; this is the simulator's hot path.
  std::size_t prow = 0;
  for (std::size_t col = 0; col < m.cols() && prow < m.rows(); ++col) {
    std::size_t sel = prow;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != prow) std::swap_ranges(m.row(sel).begin(), m.row(sel).end(), m.row(prow).begin());
    const auto scale = F::inv(m(prow, col));
    auto src = m.row(prow);
    for (std::size_t c = col; c < m.cols(); ++c) src[c] = F::mul(src[c], scale);
    for (std::size_t r = prow + 1; r < m.rows(); ++r) {
      const auto f = m(r, col);
      if (f == 0) continue;
      auto dst = m.row(r);
      for (std::size_t c = col; c < m.cols(); ++c) dst[c] ^= F::mul(f, src[c]);
    }
    ++prow;
  }
  return prow;
}

template <class F>
Matrix<F> invert(const Matrix<F>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("invert requires a square matrix");
  Matrix<F> work = m;
  Matrix<F> inv = Matrix<F>::identity(m.rows());
  if (detail::reduce(work, &inv).size() != m.rows()) throw SingularMatrixError();
  return inv;
}

/// Solves A X = B for X when A has full column rank. Throws if A is rank
/// deficient or the system is inconsistent.
template <class F>
Matrix<F> solve(const Matrix<F>& a, const Matrix<F>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve dimension mismatch");
  Matrix<F> work = a;
  Matrix<F> rhs = b;
  auto pivots = detail::reduce(work, &rhs);
  if (pivots.size() != a.cols()) throw SingularMatrixError("rank deficient system");
  for (std::size_t r = a.cols(); r < rhs.rows(); ++r)
    for (auto v : rhs.row(r))
      if (v != 0) throw SingularMatrixError("inconsistent system");
  return rhs.block(0, 0, a.cols(), b.cols());
}

/// Entry (i, j) = points[j]^i for i in [0, rows).
template <class F>
Matrix<F> vandermonde(std::span<const typename F::value_type> points, std::size_t rows) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] == 0) throw std::invalid_argument("vandermonde points must be nonzero");
    for (std::size_t j = 0; j < i; ++j)
      if (points[i] == points[j]) throw std::invalid_argument("vandermonde points must be distinct");
  }
  Matrix<F> v(rows, points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    typename F::value_type x = 1;
    for (std::size_t i = 0; i < rows; ++i) {
      v(i, j) = x;
      x = F::mul(x, points[j]);
    }
  }
  return v;
}

/// Evaluation points 1..count, the canonical choice used by every code in the library.
template <class F>
std::vector<typename F::value_type> default_points(std::size_t count) {
  if (count >= F::order) throw std::invalid_argument("evaluation points exhausted for field width");
  std::vector<typename F::value_type> pts(count);
  for (std::size_t i = 0; i < count; ++i) pts[i] = static_cast<typename F::value_type>(i + 1);
  return pts;
}

/// y = x * M for a row vector x.
template <class F>
Vector<F> row_times(std::span<const typename F::value_type> x, const Matrix<F>& m) {
  if (x.size() != m.rows()) throw std::invalid_argument("row vector length mismatch");
  Vector<F> y(m.cols(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (x[r] == 0) continue;
    auto src = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) y[c] ^= F::mul(x[r], src[c]);
  }
  return y;
}

/// y = M * x for a column vector x.
template <class F>
Vector<F> times_col(const Matrix<F>& m, std::span<const typename F::value_type> x) {
  if (x.size() != m.cols()) throw std::invalid_argument("column vector length mismatch");
  Vector<F> y(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(r);
    typename F::value_type acc = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc ^= F::mul(src[c], x[c]);
    y[r] = acc;
  }
  return y;
}

/// dst += scale * src, elementwise.
template <class F>
void axpy(std::span<typename F::value_type> dst, typename F::value_type scale,
          std::span<const typename F::value_type> src) {
  if (scale == 0) return;
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= F::mul(scale, src[i]);
}

}  // namespace grc
