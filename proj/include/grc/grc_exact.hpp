#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/bounds.hpp"
#include "grc/matrix.hpp"
#include "grc/mds.hpp"
#include "grc/params.hpp"
#include "grc/product_matrix.hpp"

namespace grc {

/// Coded state: n clusters of m nodes, alpha symbols per node.
template <class F>
struct ClusterArray {
  std::vector<std::vector<NodeVector<F>>> nodes;

  ClusterArray() = default;
  ClusterArray(std::size_t n, std::size_t m, std::size_t alpha)
      : nodes(n, std::vector<NodeVector<F>>(m, NodeVector<F>(alpha, 0))) {}

  std::size_t clusters() const { return nodes.size(); }
  std::size_t cluster_size() const { return nodes.empty() ? 0 : nodes[0].size(); }
  std::size_t alpha() const { return nodes.empty() || nodes[0].empty() ? 0 : nodes[0][0].size(); }

  NodeVector<F>& at(std::size_t i, std::size_t j) { return nodes.at(i).at(j); }
  const NodeVector<F>& at(std::size_t i, std::size_t j) const { return nodes.at(i).at(j); }

  friend bool operator==(const ClusterArray&, const ClusterArray&) = default;
};

namespace detail {

template <class F>
bool top_block_is_mds(const Matrix<F>& a, std::size_t ell) {
  if (ell == 0) return true;
  const std::size_t m = a.cols();
  std::vector<std::size_t> top(ell);
  for (std::size_t r = 0; r < ell; ++r) top[r] = r;
  const Matrix<F> e = a.select_rows(top);
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(ell), true);
  do {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < m; ++c)
      if (mask[c]) cols.push_back(c);
    if (rank(e.select_cols(cols)) != ell) return false;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return true;
}

}  // namespace detail

/// Exact-repair generalized regenerating code: ell [n, k] MDS array codes and
/// m-ell identical product-matrix codes, mixed inside every cluster by an
/// invertible m x m matrix A = [E; F].
///
/// The file is split into m stripes (ell of k*alpha symbols, then m-ell of B'
/// symbols). Cluster i holds the i-th codeword symbol c_t of every stripe and
/// stores [Y_0 .. Y_{m-1}] = [c_0 .. c_{m-1}] A.
template <class F>
class GRCExactCode {
 public:
  using value_type = typename F::value_type;

  /// Builds the code at the MBR or MSR point. When `custom_a` is empty, A is
  /// the m x m Vandermonde matrix on points 1..m (identity when ell = 0).
  GRCExactCode(const SystemParams& p, PointKind point, std::optional<Matrix<F>> custom_a = std::nullopt)
      : params_(p), point_(point) {
    p.validate();
    if (p.field_width != F::width) throw ParamError("field width does not match the code's field");
    if (p.d < p.k) throw ParamError("exact-repair construction requires d >= k");
    const auto n = static_cast<std::size_t>(p.n);
    const auto k = static_cast<std::size_t>(p.k);
    const auto d = static_cast<std::size_t>(p.d);
    const auto beta = static_cast<std::size_t>(p.beta);
    PMCodeSpec spec{n, k, d, ComponentKind::mbr, beta};
    if (point == PointKind::mbr) {
      if (p.alpha != p.d * p.beta) throw ParamError("MBR point requires alpha = d*beta");
    } else if (point == PointKind::msr) {
      if (p.alpha != (p.d - p.k + 1) * p.beta) throw ParamError("MSR point requires alpha = (d-k+1)*beta");
      if (p.d != 2 * p.k - 2) throw ParamError("MSR supported only at d = 2k-2");
      spec.kind = ComponentKind::msr;
    } else {
      throw ParamError("exact-repair construction supports only the MBR and MSR points");
    }
    component_.emplace(spec);
    if (p.ell > 0) mds_.emplace(n, k, static_cast<std::size_t>(p.alpha));

    const auto m = static_cast<std::size_t>(p.m);
    if (custom_a) {
      if (custom_a->rows() != m || custom_a->cols() != m) throw ParamError("A must be m x m");
      a_ = *custom_a;
    } else if (p.ell == 0) {
      a_ = Matrix<F>::identity(m);
    } else {
      if (m >= F::order) throw ParamError("m exceeds the number of Vandermonde points");
      const auto pts = default_points<F>(m);
      a_ = vandermonde<F>(std::span<const value_type>(pts), m);
    }
    try {
      a_inv_ = invert(a_);
    } catch (const SingularMatrixError&) {
      throw ParamError("A must be invertible");
    }
    if (!detail::top_block_is_mds(a_, ell())) throw ParamError("top ell rows of A must generate an [m, ell] MDS code");
  }

  const SystemParams& params() const { return params_; }
  PointKind point() const { return point_; }
  const Matrix<F>& a() const { return a_; }
  const ProductMatrixCode<F>& component() const { return *component_; }
  const std::optional<MDSCode<F>>& mds() const { return mds_; }

  std::size_t n() const { return static_cast<std::size_t>(params_.n); }
  std::size_t k() const { return static_cast<std::size_t>(params_.k); }
  std::size_t d() const { return static_cast<std::size_t>(params_.d); }
  std::size_t m() const { return static_cast<std::size_t>(params_.m); }
  std::size_t ell() const { return static_cast<std::size_t>(params_.ell); }
  std::size_t alpha() const { return static_cast<std::size_t>(params_.alpha); }
  std::size_t beta() const { return static_cast<std::size_t>(params_.beta); }

  std::size_t mds_stripe_size() const { return k() * alpha(); }
  std::size_t component_stripe_size() const { return component_->file_size(); }
  std::size_t file_size() const { return ell() * mds_stripe_size() + (m() - ell()) * component_stripe_size(); }

  ClusterArray<F> encode(std::span<const value_type> file) const {
    if (file.size() != file_size())
      throw std::invalid_argument("encode: file length " + std::to_string(file.size()) + " != " +
                                  std::to_string(file_size()));
    std::vector<NodeSet<F>> stripes;
    std::size_t off = 0;
    for (std::size_t t = 0; t < ell(); ++t, off += mds_stripe_size())
      stripes.push_back(mds_->encode(file.subspan(off, mds_stripe_size())));
    for (std::size_t t = ell(); t < m(); ++t, off += component_stripe_size())
      stripes.push_back(component_->encode(file.subspan(off, component_stripe_size())));
    return assemble(stripes);
  }

  /// Mixes per-stripe codewords into cluster contents.
  ClusterArray<F> assemble(const std::vector<NodeSet<F>>& stripes) const {
    ClusterArray<F> state(n(), m(), alpha());
    for (std::size_t i = 0; i < n(); ++i)
      for (std::size_t j = 0; j < m(); ++j)
        for (std::size_t t = 0; t < m(); ++t)
          axpy<F>(state.at(i, j), a_(t, j), stripes[t][i]);
    return state;
  }

  /// Per-stripe codeword symbols [c_0 .. c_{m-1}] of one cluster: Y A^{-1}.
  NodeSet<F> unmix(const std::vector<NodeVector<F>>& cluster) const {
    if (cluster.size() != m()) throw std::invalid_argument("cluster must have m nodes");
    NodeSet<F> c(m(), NodeVector<F>(alpha(), 0));
    for (std::size_t t = 0; t < m(); ++t)
      for (std::size_t j = 0; j < m(); ++j) axpy<F>(c[t], a_inv_(j, t), cluster[j]);
    return c;
  }

  /// Coefficients on the m-ell component stripes that a remote helper combines
  /// for the repair of node j from local helpers L: f_j - F_L E_L^{-1} e_j.
  Vector<F> remote_coefficients(std::size_t j, std::span<const std::size_t> local) const {
    const auto w = local_weights(j, local);
    Vector<F> coeff(m() - ell(), 0);
    for (std::size_t u = 0; u < m() - ell(); ++u) {
      value_type v = a_(ell() + u, j);
      for (std::size_t l = 0; l < ell(); ++l) v ^= F::mul(a_(ell() + u, local[l]), w[l]);
      coeff[u] = v;
    }
    if (std::ranges::all_of(coeff, [](value_type x) { return x == 0; }))
      throw ArithmeticError("remote coefficients vanish: node is a combination of its local helpers");
    return coeff;
  }

  /// The beta symbols remote cluster `helper` sends toward the repair of node
  /// (cluster, node) that uses local helpers `local`.
  Vector<F> remote_helper_data(const ClusterArray<F>& state, std::size_t helper, std::size_t cluster,
                               std::size_t node, std::span<const std::size_t> local) const {
    if (helper == cluster) throw std::invalid_argument("remote helper must differ from the failed cluster");
    check_local(cluster, node, local);
    const auto coeff = remote_coefficients(node, local);
    const auto c = unmix(state.nodes.at(helper));
    NodeVector<F> combined(alpha(), 0);
    for (std::size_t u = 0; u < coeff.size(); ++u) axpy<F>(combined, coeff[u], c[ell() + u]);
    return component_->helper_data(combined, cluster);
  }

  /// Rebuilds node (cluster, node) from the full contents of ell local helpers
  /// and one payload from each of d remote clusters.
  NodeVector<F> repair(std::size_t cluster, std::size_t node, std::span<const std::size_t> local,
                       const NodeSet<F>& local_contents, std::span<const std::size_t> remote,
                       const std::vector<Vector<F>>& payloads) const {
    check_local(cluster, node, local);
    if (local_contents.size() != ell()) throw std::invalid_argument("repair needs ell local helper contents");
    if (remote.size() != d() || payloads.size() != d()) throw std::invalid_argument("repair needs d remote payloads");
    for (std::size_t h : remote)
      if (h == cluster || h >= n()) throw std::invalid_argument("invalid remote helper cluster");
    NodeVector<F> out = component_->repair(cluster, remote, payloads);
    const auto w = local_weights(node, local);
    for (std::size_t l = 0; l < ell(); ++l) axpy<F>(out, w[l], local_contents[l]);
    return out;
  }

  /// Repairs (cluster, node) in `state` by gathering helper data from it.
  NodeVector<F> repair_from_state(const ClusterArray<F>& state, std::size_t cluster, std::size_t node,
                                  std::span<const std::size_t> local, std::span<const std::size_t> remote) const {
    NodeSet<F> lc;
    for (std::size_t l : local) lc.push_back(state.at(cluster, l));
    std::vector<Vector<F>> payloads;
    for (std::size_t h : remote) payloads.push_back(remote_helper_data(state, h, cluster, node, local));
    return repair(cluster, node, local, lc, remote, payloads);
  }

  /// Recovers the file from the full contents of k distinct clusters.
  Vector<F> decode(std::span<const std::size_t> clusters, const std::vector<std::vector<NodeVector<F>>>& contents) const {
    if (clusters.size() != k() || contents.size() != k()) throw std::invalid_argument("decode needs exactly k clusters");
    std::vector<NodeSet<F>> per_stripe(m());
    for (std::size_t c = 0; c < k(); ++c) {
      const auto sym = unmix(contents[c]);
      for (std::size_t t = 0; t < m(); ++t) per_stripe[t].push_back(sym[t]);
    }
    Vector<F> file;
    file.reserve(file_size());
    for (std::size_t t = 0; t < m(); ++t) {
      const auto part = t < ell() ? mds_->decode(clusters, per_stripe[t]) : component_->decode(clusters, per_stripe[t]);
      file.insert(file.end(), part.begin(), part.end());
    }
    return file;
  }

  Vector<F> decode(const ClusterArray<F>& state, std::span<const std::size_t> clusters) const {
    std::vector<std::vector<NodeVector<F>>> contents;
    for (std::size_t c : clusters) contents.push_back(state.nodes.at(c));
    return decode(clusters, contents);
  }

 private:
  void check_local(std::size_t cluster, std::size_t node, std::span<const std::size_t> local) const {
    if (cluster >= n() || node >= m()) throw std::invalid_argument("failed node outside the system");
    if (local.size() != ell()) throw std::invalid_argument("repair needs exactly ell local helpers");
    for (std::size_t a = 0; a < local.size(); ++a) {
      if (local[a] == node || local[a] >= m()) throw std::invalid_argument("invalid local helper");
      for (std::size_t b = 0; b < a; ++b)
        if (local[a] == local[b]) throw std::invalid_argument("duplicate local helper");
    }
  }

  // E_L^{-1} e_j: weights expressing the MDS part of node j through the local helpers.
  Vector<F> local_weights(std::size_t j, std::span<const std::size_t> local) const {
    if (ell() == 0) return {};
    Matrix<F> el(ell(), ell());
    Vector<F> ej(ell());
    for (std::size_t r = 0; r < ell(); ++r) {
      for (std::size_t c = 0; c < ell(); ++c) el(r, c) = a_(r, local[c]);
      ej[r] = a_(r, j);
    }
    return times_col(invert(el), std::span<const value_type>(ej));
  }

  SystemParams params_;
  PointKind point_;
  std::optional<ProductMatrixCode<F>> component_;
  std::optional<MDSCode<F>> mds_;
  Matrix<F> a_;
  Matrix<F> a_inv_;
};

}  // namespace grc
