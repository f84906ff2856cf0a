#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/matrix.hpp"
#include "grc/mds.hpp"
#include "grc/params.hpp"

namespace grc {

enum class ComponentKind { mbr, msr };

struct PMCodeSpec {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;  // classical repair degree
  ComponentKind kind = ComponentKind::mbr;
  std::size_t stripes = 1;  // beta; each stripe is an independent beta = 1 instance

  void validate() const {
    if (stripes < 1) throw ParamError("product-matrix code needs at least one stripe");
    if (kind == ComponentKind::mbr) {
      if (k < 1 || k > d || d > n - 1) throw ParamError("product-matrix MBR requires k <= d <= n-1");
    } else {
      if (k < 2 || d != 2 * k - 2) throw ParamError("MSR supported only at d = 2k-2");
      if (d > n - 1) throw ParamError("product-matrix MSR requires d <= n-1");
    }
  }

  /// Symbols per node in one stripe.
  std::size_t stripe_alpha() const { return kind == ComponentKind::mbr ? d : k - 1; }
  /// Message symbols in one stripe.
  std::size_t stripe_file_size() const {
    return kind == ComponentKind::mbr ? k * d - k * (k - 1) / 2 : k * (k - 1);
  }
  std::size_t alpha() const { return stripe_alpha() * stripes; }
  std::size_t beta() const { return stripes; }
  std::size_t file_size() const { return stripe_file_size() * stripes; }
};

/// Exact-repair product-matrix regenerating code (MBR for any k <= d <= n-1,
/// MSR at d = 2k-2).
///
/// Per stripe, node i stores psi_i^T M with psi_i the i-th row of the n x d
/// Vandermonde matrix on points 1..n. MBR uses M = [[S, T], [T^T, 0]] with S
/// symmetric k x k; MSR uses M = [S1; S2] with both blocks symmetric
/// (k-1) x (k-1), so psi_i = [phi_i, lambda_i phi_i] where lambda_i = x_i^(k-1).
///
/// Stripe data is laid out as the upper triangle of S (row-major) then T for
/// MBR, or the upper triangles of S1 then S2 for MSR. Stripe t occupies
/// node symbols [t*stripe_alpha, (t+1)*stripe_alpha).
template <class F>
class ProductMatrixCode {
 public:
  using value_type = typename F::value_type;

  explicit ProductMatrixCode(PMCodeSpec spec) : spec_(spec) {
    spec_.validate();
    if (spec_.n > F::order - 1) throw ParamError("product-matrix code length exceeds field size");
    const auto pts = default_points<F>(spec_.n);
    psi_ = vandermonde<F>(std::span<const value_type>(pts), spec_.d).transpose();
    if (spec_.kind == ComponentKind::msr) {
      const std::size_t a = spec_.stripe_alpha();
      lambda_.resize(spec_.n);
      for (std::size_t i = 0; i < spec_.n; ++i) {
        lambda_[i] = F::pow(pts[i], a);
        for (std::size_t j = 0; j < i; ++j)
          if (lambda_[j] == lambda_[i])
            throw ParamError("product-matrix MSR: lambda values collide for n=" + std::to_string(spec_.n) +
                             " in this field");
      }
    }
    build_generator();
  }

  const PMCodeSpec& spec() const { return spec_; }
  std::size_t n() const { return spec_.n; }
  std::size_t k() const { return spec_.k; }
  std::size_t d() const { return spec_.d; }
  std::size_t alpha() const { return spec_.alpha(); }
  std::size_t beta() const { return spec_.beta(); }
  std::size_t file_size() const { return spec_.file_size(); }

  /// n x d encoding matrix Psi.
  const Matrix<F>& psi() const { return psi_; }

  /// file_size x (n*alpha); column i*alpha + s is node i's symbol s.
  const Matrix<F>& generator() const { return gen_; }

  NodeSet<F> encode(std::span<const value_type> data) const {
    if (data.size() != file_size()) throw std::invalid_argument("product-matrix encode: wrong data length");
    const std::size_t sa = spec_.stripe_alpha();
    const std::size_t sb = spec_.stripe_file_size();
    NodeSet<F> nodes(spec_.n, NodeVector<F>(alpha(), 0));
    for (std::size_t t = 0; t < spec_.stripes; ++t) {
      const Matrix<F> msg = message_matrix(data.subspan(t * sb, sb));
      const Matrix<F> coded = psi_ * msg;
      for (std::size_t i = 0; i < spec_.n; ++i)
        for (std::size_t s = 0; s < sa; ++s) nodes[i][t * sa + s] = coded(i, s);
    }
    return nodes;
  }

  /// The beta symbols helper node `helper` sends toward the repair of `failed`.
  Vector<F> helper_data(const NodeVector<F>& helper_content, std::size_t failed) const {
    if (failed >= spec_.n) throw std::invalid_argument("failed node index out of range");
    if (helper_content.size() != alpha()) throw std::invalid_argument("helper content must have alpha symbols");
    const std::size_t sa = spec_.stripe_alpha();
    Vector<F> out(spec_.stripes, 0);
    for (std::size_t t = 0; t < spec_.stripes; ++t) {
      value_type acc = 0;
      for (std::size_t s = 0; s < sa; ++s) acc ^= F::mul(helper_content[t * sa + s], psi_(failed, s));
      out[t] = acc;
    }
    return out;
  }

  /// Rebuilds node `failed` from the payloads of d distinct helpers.
  NodeVector<F> repair(std::size_t failed, std::span<const std::size_t> helpers,
                       const std::vector<Vector<F>>& payloads) const {
    if (failed >= spec_.n) throw std::invalid_argument("failed node index out of range");
    if (helpers.size() < spec_.d || payloads.size() != helpers.size())
      throw std::invalid_argument("product-matrix repair needs payloads from d helpers");
    for (std::size_t h : helpers)
      if (h == failed || h >= spec_.n) throw std::invalid_argument("invalid helper index");
    std::vector<std::size_t> used(helpers.begin(), helpers.begin() + static_cast<std::ptrdiff_t>(spec_.d));
    const Matrix<F> inv = invert(psi_.select_rows(used));
    const std::size_t sa = spec_.stripe_alpha();
    NodeVector<F> node(alpha(), 0);
    for (std::size_t t = 0; t < spec_.stripes; ++t) {
      Vector<F> y(spec_.d);
      for (std::size_t h = 0; h < spec_.d; ++h) {
        if (payloads[h].size() != spec_.stripes) throw std::invalid_argument("helper payload must have beta symbols");
        y[h] = payloads[h][t];
      }
      const Vector<F> x = times_col(inv, std::span<const value_type>(y));
      for (std::size_t s = 0; s < sa; ++s) {
        value_type v = x[s];
        if (spec_.kind == ComponentKind::msr) v ^= F::mul(lambda_[failed], x[sa + s]);
        node[t * sa + s] = v;
      }
    }
    return node;
  }

  /// Recovers the data from any k distinct nodes.
  Vector<F> decode(std::span<const std::size_t> idx, const NodeSet<F>& contents) const {
    if (idx.size() != spec_.k || contents.size() != spec_.k)
      throw std::invalid_argument("product-matrix decode needs exactly k nodes");
    std::vector<std::size_t> cols;
    Matrix<F> y(1, spec_.k * alpha());
    for (std::size_t c = 0; c < spec_.k; ++c) {
      if (contents[c].size() != alpha()) throw std::invalid_argument("node content must have alpha symbols");
      for (std::size_t s = 0; s < alpha(); ++s) {
        cols.push_back(idx[c] * alpha() + s);
        y(0, c * alpha() + s) = contents[c][s];
      }
    }
    const Matrix<F> x = solve(gen_.select_cols(cols).transpose(), y.transpose());
    return Vector<F>(x.data().begin(), x.data().end());
  }

  /// Stripe-local data indices whose message-matrix entries sit in the first
  /// e rows (and, by symmetry, columns) of M. MBR only.
  std::vector<std::size_t> leading_positions(std::size_t e) const {
    if (spec_.kind != ComponentKind::mbr) throw ParamError("leading positions are defined for MBR only");
    if (e > spec_.k) throw ParamError("e must not exceed k");
    std::vector<std::size_t> out;
    const std::size_t k = spec_.k, d = spec_.d;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j, ++idx)
        if (i < e) out.push_back(idx);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d - k; ++j, ++idx)
        if (i < e) out.push_back(idx);
    return out;
  }

 private:
  Matrix<F> message_matrix(std::span<const value_type> sd) const {
    const std::size_t k = spec_.k, d = spec_.d;
    std::size_t idx = 0;
    if (spec_.kind == ComponentKind::mbr) {
      Matrix<F> m(d, d);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j, ++idx) m(i, j) = m(j, i) = sd[idx];
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d - k; ++j, ++idx) m(i, k + j) = m(k + j, i) = sd[idx];
      return m;
    }
    const std::size_t a = k - 1;
    Matrix<F> m(2 * a, a);
    for (std::size_t blk = 0; blk < 2; ++blk)
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = i; j < a; ++j, ++idx) m(blk * a + i, j) = m(blk * a + j, i) = sd[idx];
    return m;
  }

  void build_generator() {
    const std::size_t b = file_size();
    gen_ = Matrix<F>(b, spec_.n * alpha());
    Vector<F> unit(b, 0);
    for (std::size_t r = 0; r < b; ++r) {
      unit[r] = 1;
      const auto nodes = encode(std::span<const value_type>(unit));
      unit[r] = 0;
      for (std::size_t i = 0; i < spec_.n; ++i)
        for (std::size_t s = 0; s < alpha(); ++s) gen_(r, i * alpha() + s) = nodes[i][s];
    }
  }

  PMCodeSpec spec_;
  Matrix<F> psi_;
  Vector<F> lambda_;
  Matrix<F> gen_;
};

}  // namespace grc
