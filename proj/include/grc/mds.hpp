#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "grc/matrix.hpp"
#include "grc/params.hpp"

namespace grc {

template <class F>
using NodeVector = Vector<F>;

template <class F>
using NodeSet = std::vector<NodeVector<F>>;

/// [n, k] MDS array code over F^alpha: Reed-Solomon applied independently at
/// each of the alpha symbol positions.
///
/// The generator is V_k^{-1} V for the k x n Vandermonde V on points 1..n, so
/// node i < k stores data[i*alpha .. (i+1)*alpha) verbatim.
template <class F>
class MDSCode {
 public:
  using value_type = typename F::value_type;

  MDSCode(std::size_t n, std::size_t k, std::size_t alpha) : n_(n), k_(k), alpha_(alpha) {
    if (k < 1 || k > n) throw ParamError("MDS code requires 1 <= k <= n");
    if (alpha < 1) throw ParamError("MDS code requires alpha >= 1");
    if (n > F::order - 1) throw ParamError("MDS code length exceeds field size: evaluation points exhausted");
    const auto pts = default_points<F>(n);
    vander_ = vandermonde<F>(std::span<const value_type>(pts), k);
    std::vector<std::size_t> first(k);
    for (std::size_t i = 0; i < k; ++i) first[i] = i;
    gen_ = invert(vander_.select_cols(first)) * vander_;
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t alpha() const { return alpha_; }
  std::size_t file_size() const { return k_ * alpha_; }

  /// k x n systematic generator.
  const Matrix<F>& generator() const { return gen_; }
  /// k x n Vandermonde the generator was derived from.
  const Matrix<F>& vandermonde_matrix() const { return vander_; }

  NodeSet<F> encode(std::span<const value_type> data) const {
    if (data.size() != file_size()) throw std::invalid_argument("MDS encode: data length must be k*alpha");
    NodeSet<F> nodes(n_, NodeVector<F>(alpha_, 0));
    for (std::size_t s = 0; s < alpha_; ++s) {
      for (std::size_t i = 0; i < k_; ++i) {
        const value_type x = data[i * alpha_ + s];
        if (x == 0) continue;
        auto g = gen_.row(i);
        for (std::size_t j = 0; j < n_; ++j) nodes[j][s] ^= F::mul(x, g[j]);
      }
    }
    return nodes;
  }

  /// Recovers the data from any k distinct nodes.
  Vector<F> decode(std::span<const std::size_t> idx, const NodeSet<F>& contents) const {
    if (idx.size() != k_ || contents.size() != k_) throw std::invalid_argument("MDS decode needs exactly k nodes");
    const Matrix<F> inv = invert(gen_.select_cols(idx));
    Vector<F> data(file_size(), 0);
    for (std::size_t s = 0; s < alpha_; ++s) {
      for (std::size_t c = 0; c < k_; ++c) {
        if (contents[c].size() != alpha_) throw std::invalid_argument("MDS decode: node length must be alpha");
        const value_type y = contents[c][s];
        if (y == 0) continue;
        auto r = inv.row(c);
        for (std::size_t i = 0; i < k_; ++i) data[i * alpha_ + s] ^= F::mul(y, r[i]);
      }
    }
    return data;
  }

 private:
  std::size_t n_, k_, alpha_;
  Matrix<F> vander_;
  Matrix<F> gen_;
};

}  // namespace grc
