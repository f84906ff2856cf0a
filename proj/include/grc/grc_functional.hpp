#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/bounds.hpp"
#include "grc/grc_exact.hpp"
#include "grc/matrix.hpp"
#include "grc/mds.hpp"
#include "grc/params.hpp"
#include "grc/rng.hpp"

namespace grc {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RepairRecord {
  std::uint64_t t = 0;  // 1-based repair counter
  std::size_t cluster = 0;
  std::size_t node = 0;
  std::vector<std::size_t> helpers;
  std::uint64_t seed = 0;  // coefficient seed actually used

  friend bool operator==(const RepairRecord&, const RepairRecord&) = default;
};

template <class F>
struct FunctionalState {
  ClusterArray<F> nodes;
  std::uint64_t t = 0;
  std::vector<RepairRecord> history;
};

/// Functional-repair generalized regenerating code for ell = m-1, d >= k.
///
/// Nodes 0..m-2 of cluster i hold the i-th symbols of m-1 MDS stripes; node
/// m-1 holds their sum plus the i-th node of a classical functional-repair
/// code C, so the column sum of every cluster is a C-node. C is a seeded
/// random linear code: initial and repair coefficients are pure functions of
/// (seed, t, helper), and a repair redraws (bumping an attempt counter into
/// the recorded seed) until every k-subset containing the repaired cluster
/// keeps full rank.
template <class F>
class FunctionalCode {
 public:
  using value_type = typename F::value_type;

  /// `full_degree` selects the component repair degree d' = d instead of min(d, k).
  FunctionalCode(const SystemParams& p, std::uint64_t init_seed, bool full_degree = false,
                 std::size_t max_attempts = 64)
      : params_(p), init_seed_(init_seed), max_attempts_(max_attempts) {
    p.validate();
    if (p.field_width != F::width) throw ParamError("field width does not match the code's field");
    if (p.ell != p.m - 1) throw ParamError("functional construction requires ell = m-1");
    if (p.d < p.k) throw ParamError("functional construction requires d >= k");
    d_prime_ = static_cast<std::size_t>(full_degree ? p.d : std::min(p.d, p.k));
    // Classical capacity at degree d'. With d' < d the node may hold more than
    // d' beta symbols, so this is summed directly rather than through a
    // validated SystemParams.
    component_size_ = 0;
    for (std::int64_t i = 0; i < p.k; ++i)
      component_size_ += static_cast<std::size_t>(
          std::min(p.alpha, positive_part(static_cast<std::int64_t>(d_prime_) - i) * p.beta));
    if (p.m > 1) mds_.emplace(n(), k(), alpha());
    bool ok = false;
    for (std::size_t attempt = 0; attempt < max_attempts_ && !ok; ++attempt) {
      initial_.clear();
      for (std::size_t i = 0; i < n(); ++i) {
        KeyedStream s{init_seed_, 0x494E4954ull, attempt, i};
        initial_.push_back(s.matrix<F>(alpha(), component_size_));
      }
      ok = subsets_full_rank(initial_, n());
    }
    if (!ok) throw DecodeError("component decode failed: no full-rank initial coefficients found");
  }

  const SystemParams& params() const { return params_; }
  std::size_t n() const { return static_cast<std::size_t>(params_.n); }
  std::size_t k() const { return static_cast<std::size_t>(params_.k); }
  std::size_t m() const { return static_cast<std::size_t>(params_.m); }
  std::size_t alpha() const { return static_cast<std::size_t>(params_.alpha); }
  std::size_t beta() const { return static_cast<std::size_t>(params_.beta); }
  std::size_t d_prime() const { return d_prime_; }
  std::size_t component_size() const { return component_size_; }
  std::size_t file_size() const { return (m() - 1) * k() * alpha() + component_size_; }

  /// Component coefficient matrices (alpha x B') of every cluster at t = 0.
  const std::vector<Matrix<F>>& initial_coefficients() const { return initial_; }

  FunctionalState<F> encode(std::span<const value_type> file) const {
    if (file.size() != file_size()) throw std::invalid_argument("functional encode: wrong file length");
    FunctionalState<F> st;
    st.nodes = ClusterArray<F>(n(), m(), alpha());
    const std::size_t stripe = k() * alpha();
    for (std::size_t t = 0; t + 1 < m(); ++t) {
      const auto cw = mds_->encode(file.subspan(t * stripe, stripe));
      for (std::size_t i = 0; i < n(); ++i) {
        st.nodes.at(i, t) = cw[i];
        axpy<F>(st.nodes.at(i, m() - 1), 1, cw[i]);
      }
    }
    const auto msg = file.subspan((m() - 1) * stripe, component_size_);
    const auto coeffs = initial_coefficients();
    for (std::size_t i = 0; i < n(); ++i) {
      const auto z = times_col(coeffs[i], msg);
      axpy<F>(st.nodes.at(i, m() - 1), 1, z);
    }
    return st;
  }

  /// Sum of all node vectors of a cluster.
  NodeVector<F> column_sum(const FunctionalState<F>& st, std::size_t cluster) const {
    NodeVector<F> z(alpha(), 0);
    for (std::size_t j = 0; j < m(); ++j) axpy<F>(z, 1, st.nodes.at(cluster, j));
    return z;
  }

  /// Replays `history` on coefficients only. Returns the coefficients after
  /// the last record; `before` (if given) receives the repaired cluster's
  /// coefficients just before each record.
  std::vector<Matrix<F>> replay(std::span<const RepairRecord> history, std::vector<Matrix<F>>* before = nullptr) const {
    auto coeffs = initial_coefficients();
    for (const auto& rec : history) {
      if (before) before->push_back(coeffs[rec.cluster]);
      coeffs[rec.cluster] = repaired_coefficients(coeffs, rec);
    }
    return coeffs;
  }

  /// beta symbols helper cluster `helper` sends for repair record `rec`.
  Vector<F> helper_payload(const FunctionalState<F>& st, std::size_t helper, const RepairRecord& rec) const {
    const auto z = column_sum(st, helper);
    return times_col(helper_matrix(rec, helper), std::span<const value_type>(z));
  }

  /// Repairs node (cluster, node) from helper clusters `helpers` (the first d'
  /// are used). Returns the record appended to the history.
  RepairRecord repair(FunctionalState<F>& st, std::size_t cluster, std::size_t node,
                      std::span<const std::size_t> helpers, std::uint64_t seed) const {
    if (cluster >= n() || node >= m()) throw std::invalid_argument("failed node outside the system");
    if (helpers.size() < d_prime_) throw std::invalid_argument("functional repair needs at least d' helper clusters");
    for (std::size_t a = 0; a < helpers.size(); ++a) {
      if (helpers[a] == cluster || helpers[a] >= n()) throw std::invalid_argument("invalid helper cluster");
      for (std::size_t b = 0; b < a; ++b)
        if (helpers[a] == helpers[b]) throw std::invalid_argument("duplicate helper cluster");
    }
    RepairRecord rec;
    rec.t = st.t + 1;
    rec.cluster = cluster;
    rec.node = node;
    rec.helpers.assign(helpers.begin(), helpers.begin() + static_cast<std::ptrdiff_t>(d_prime_));

    auto coeffs = replay(st.history);
    bool ok = false;
    for (std::size_t attempt = 0; attempt < max_attempts_ && !ok; ++attempt) {
      rec.seed = attempt == 0 ? seed : mix64(seed ^ mix64(attempt));
      auto trial = coeffs;
      trial[cluster] = repaired_coefficients(coeffs, rec);
      ok = subsets_full_rank(trial, cluster);
    }
    if (!ok) throw DecodeError("component decode failed: no rank-preserving repair coefficients found");

    NodeVector<F> y_hat(alpha(), 0);
    for (std::size_t h = 0; h < d_prime_; ++h) {
      const auto payload = helper_payload(st, rec.helpers[h], rec);
      const auto part = times_col(receiver_matrix(rec, h), std::span<const value_type>(payload));
      axpy<F>(y_hat, 1, part);
    }
    NodeVector<F> fresh = y_hat;
    for (std::size_t j = 0; j < m(); ++j)
      if (j != node) axpy<F>(fresh, 1, st.nodes.at(cluster, j));
    st.nodes.at(cluster, node) = std::move(fresh);
    st.t = rec.t;
    st.history.push_back(rec);
    return rec;
  }

  /// Decodes the component from k column sums, rewinds every repair that
  /// touched the chosen clusters, then decodes the MDS stripes.
  Vector<F> collect(const FunctionalState<F>& st, std::span<const std::size_t> clusters) const {
    if (clusters.size() != k()) throw std::invalid_argument("collect needs exactly k clusters");
    std::vector<Matrix<F>> before;
    const auto coeffs = replay(st.history, &before);

    Matrix<F> g(0, component_size_);
    Matrix<F> y(0, 1);
    for (std::size_t c : clusters) {
      if (c >= n()) throw std::invalid_argument("collector cluster out of range");
      const auto z = column_sum(st, c);
      for (std::size_t r = 0; r < alpha(); ++r) {
        g.append_row(coeffs[c].row(r));
        value_type v = z[r];
        y.append_row(std::span<const value_type>(&v, 1));
      }
    }
    Matrix<F> msg;
    try {
      msg = solve(g, y);
    } catch (const SingularMatrixError&) {
      throw DecodeError("component decode failed");
    }
    const Vector<F> x(msg.data().begin(), msg.data().end());

    std::vector<std::vector<NodeVector<F>>> y_now;
    for (std::size_t c : clusters) y_now.push_back(st.nodes.nodes.at(c));
    for (std::size_t r = st.history.size(); r-- > 0;) {
      const auto& rec = st.history[r];
      const auto pos = std::ranges::find(clusters, rec.cluster);
      if (pos == clusters.end()) continue;
      auto& cl = y_now[static_cast<std::size_t>(pos - clusters.begin())];
      NodeVector<F> prev = times_col(before[r], std::span<const value_type>(x));
      for (std::size_t j = 0; j < m(); ++j)
        if (j != rec.node) axpy<F>(prev, 1, cl[j]);
      cl[rec.node] = std::move(prev);
    }

    Vector<F> file;
    file.reserve(file_size());
    for (std::size_t t = 0; t + 1 < m(); ++t) {
      NodeSet<F> cw;
      for (auto& cl : y_now) cw.push_back(cl[t]);
      const auto part = mds_->decode(clusters, cw);
      file.insert(file.end(), part.begin(), part.end());
    }
    file.insert(file.end(), x.begin(), x.end());
    return file;
  }

  /// True when every cluster's column sum equals its tracked coefficients
  /// applied to the component message `msg`.
  bool column_sums_consistent(const FunctionalState<F>& st, std::span<const value_type> msg) const {
    const auto coeffs = replay(st.history);
    for (std::size_t i = 0; i < n(); ++i)
      if (times_col(coeffs[i], msg) != column_sum(st, i)) return false;
    return true;
  }

  /// True when every k-subset of clusters has full-rank component coefficients.
  bool all_subsets_full_rank(const FunctionalState<F>& st) const {
    return subsets_full_rank(replay(st.history), n());
  }

 private:
  Matrix<F> helper_matrix(const RepairRecord& rec, std::size_t helper) const {
    KeyedStream s{rec.seed, rec.t, 0x48454C50ull, helper};
    return s.matrix<F>(beta(), alpha());
  }

  Matrix<F> receiver_matrix(const RepairRecord& rec, std::size_t slot) const {
    KeyedStream s{rec.seed, rec.t, 0x52454356ull, slot};
    return s.matrix<F>(alpha(), beta());
  }

  Matrix<F> repaired_coefficients(const std::vector<Matrix<F>>& coeffs, const RepairRecord& rec) const {
    Matrix<F> out(alpha(), component_size_);
    for (std::size_t h = 0; h < rec.helpers.size(); ++h) {
      const auto mix = receiver_matrix(rec, h) * helper_matrix(rec, rec.helpers[h]);
      const auto contrib = mix * coeffs.at(rec.helpers[h]);
      out = out + contrib;
    }
    return out;
  }

  // Checks k-subsets containing `must` (every subset when must == n()).
  bool subsets_full_rank(const std::vector<Matrix<F>>& coeffs, std::size_t must) const {
    std::vector<bool> mask(n(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k()), true);
    do {
      if (must < n() && !mask[must]) continue;
      Matrix<F> g(0, component_size_);
      for (std::size_t i = 0; i < n(); ++i)
        if (mask[i]) g = Matrix<F>::vstack(g, coeffs[i]);
      if (rank(g) != component_size_) return false;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return true;
  }

  SystemParams params_;
  std::uint64_t init_seed_;
  std::size_t max_attempts_;
  std::size_t d_prime_ = 0;
  std::size_t component_size_ = 0;
  std::optional<MDSCode<F>> mds_;
  std::vector<Matrix<F>> initial_;
};

}  // namespace grc
