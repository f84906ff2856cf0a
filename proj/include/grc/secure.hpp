#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "grc/bounds.hpp"
#include "grc/grc_exact.hpp"
#include "grc/matrix.hpp"
#include "grc/mds.hpp"
#include "grc/params.hpp"
#include "grc/product_matrix.hpp"

namespace grc {

/// Coset (wiretap II) version of the [n, k] MDS array code: per symbol
/// position the message is [r | s] with e random and k-e secret symbols, and
/// node j stores [r | s] . v_j for the j-th column v_j of the k x n Vandermonde
/// matrix. Any e columns have an invertible top e x e block, so e nodes see a
/// uniformly random vector regardless of s.
template <class F>
class SecureMDSCode {
 public:
  using value_type = typename F::value_type;

  SecureMDSCode(std::size_t n, std::size_t k, std::size_t alpha, std::size_t e) : mds_(n, k, alpha), e_(e) {
    if (e > k) throw ParamError("secure MDS requires e <= k");
    std::vector<std::size_t> first(k);
    for (std::size_t i = 0; i < k; ++i) first[i] = i;
    vk_ = mds_.vandermonde_matrix().select_cols(first);
    vk_inv_ = invert(vk_);
  }

  const MDSCode<F>& base() const { return mds_; }
  std::size_t e() const { return e_; }
  std::size_t secret_size() const { return (mds_.k() - e_) * mds_.alpha(); }
  std::size_t random_size() const { return e_ * mds_.alpha(); }

  NodeSet<F> encode(std::span<const value_type> secret, std::span<const value_type> rand) const {
    if (secret.size() != secret_size() || rand.size() != random_size())
      throw std::invalid_argument("secure MDS encode: wrong secret or randomness length");
    return mds_.encode(std::span<const value_type>(precode(secret, rand)));
  }

  Vector<F> decode_secret(std::span<const std::size_t> idx, const NodeSet<F>& contents) const {
    return unprecode(mds_.decode(idx, contents));
  }

  /// Data fed to the plain MDS code: per position, [r | s] V_k. With e = 0
  /// the secret passes through unchanged.
  Vector<F> precode(std::span<const value_type> secret, std::span<const value_type> rand) const {
    if (e_ == 0) return Vector<F>(secret.begin(), secret.end());
    const std::size_t k = mds_.k(), a = mds_.alpha();
    Vector<F> data(k * a, 0);
    for (std::size_t s = 0; s < a; ++s) {
      Vector<F> u(k);
      for (std::size_t i = 0; i < e_; ++i) u[i] = rand[i * a + s];
      for (std::size_t i = e_; i < k; ++i) u[i] = secret[(i - e_) * a + s];
      const auto w = row_times(std::span<const value_type>(u), vk_);
      for (std::size_t i = 0; i < k; ++i) data[i * a + s] = w[i];
    }
    return data;
  }

  /// Secret part of the message behind precoded data.
  Vector<F> unprecode(std::span<const value_type> data) const {
    if (e_ == 0) return Vector<F>(data.begin(), data.end());
    const std::size_t k = mds_.k(), a = mds_.alpha();
    Vector<F> secret(secret_size(), 0);
    for (std::size_t s = 0; s < a; ++s) {
      Vector<F> w(k);
      for (std::size_t i = 0; i < k; ++i) w[i] = data[i * a + s];
      const auto u = row_times(std::span<const value_type>(w), vk_inv_);
      for (std::size_t i = e_; i < k; ++i) secret[(i - e_) * a + s] = u[i];
    }
    return secret;
  }

 private:
  MDSCode<F> mds_;
  std::size_t e_;
  Matrix<F> vk_;
  Matrix<F> vk_inv_;
};

/// Product-matrix MBR code whose message-matrix entries in the first e rows
/// (and columns) are random, the rest secret.
template <class F>
class SecureMBRCode {
 public:
  using value_type = typename F::value_type;

  SecureMBRCode(PMCodeSpec spec, std::size_t e) : code_(spec), e_(e) {
    if (spec.kind != ComponentKind::mbr) throw ParamError("secure product-matrix code requires the MBR point");
    random_pos_ = code_.leading_positions(e);
    std::vector<bool> is_rand(spec.stripe_file_size(), false);
    for (auto p : random_pos_) is_rand[p] = true;
    for (std::size_t i = 0; i < is_rand.size(); ++i)
      if (!is_rand[i]) secret_pos_.push_back(i);
  }

  const ProductMatrixCode<F>& base() const { return code_; }
  std::size_t e() const { return e_; }
  std::size_t secret_size() const { return secret_pos_.size() * code_.spec().stripes; }
  std::size_t random_size() const { return random_pos_.size() * code_.spec().stripes; }

  Vector<F> message(std::span<const value_type> secret, std::span<const value_type> rand) const {
    if (secret.size() != secret_size() || rand.size() != random_size())
      throw std::invalid_argument("secure MBR encode: wrong secret or randomness length");
    const std::size_t sb = code_.spec().stripe_file_size();
    Vector<F> data(code_.file_size(), 0);
    for (std::size_t t = 0; t < code_.spec().stripes; ++t) {
      for (std::size_t i = 0; i < secret_pos_.size(); ++i)
        data[t * sb + secret_pos_[i]] = secret[t * secret_pos_.size() + i];
      for (std::size_t i = 0; i < random_pos_.size(); ++i)
        data[t * sb + random_pos_[i]] = rand[t * random_pos_.size() + i];
    }
    return data;
  }

  Vector<F> extract_secret(std::span<const value_type> data) const {
    const std::size_t sb = code_.spec().stripe_file_size();
    Vector<F> secret;
    for (std::size_t t = 0; t < code_.spec().stripes; ++t)
      for (auto p : secret_pos_) secret.push_back(data[t * sb + p]);
    return secret;
  }

  NodeSet<F> encode(std::span<const value_type> secret, std::span<const value_type> rand) const {
    const auto data = message(secret, rand);
    return code_.encode(std::span<const value_type>(data));
  }

  Vector<F> decode_secret(std::span<const std::size_t> idx, const NodeSet<F>& contents) const {
    return extract_secret(code_.decode(idx, contents));
  }

 private:
  ProductMatrixCode<F> code_;
  std::size_t e_;
  std::vector<std::size_t> random_pos_;
  std::vector<std::size_t> secret_pos_;
};

/// Exact-repair GRC at the MBR point built from ell secure MDS codes and m-ell
/// secure product-matrix MBR codes.
template <class F>
class SecureGRCCode {
 public:
  using value_type = typename F::value_type;

  SecureGRCCode(const SystemParams& p, std::size_t e)
      : base_(p, PointKind::mbr),
        mds_(base_.n(), base_.k(), base_.alpha(), e),
        mbr_(base_.component().spec(), e),
        e_(e) {
    if (e > base_.k()) throw ParamError("eavesdropper size must satisfy 0 <= e <= k");
  }

  const GRCExactCode<F>& base() const { return base_; }
  std::size_t e() const { return e_; }
  std::size_t secret_size() const {
    return base_.ell() * mds_.secret_size() + (base_.m() - base_.ell()) * mbr_.secret_size();
  }
  std::size_t random_size() const {
    return base_.ell() * mds_.random_size() + (base_.m() - base_.ell()) * mbr_.random_size();
  }

  ClusterArray<F> encode(std::span<const value_type> secret, std::span<const value_type> rand) const {
    if (secret.size() != secret_size() || rand.size() != random_size())
      throw std::invalid_argument("secure encode: wrong secret or randomness length");
    std::vector<NodeSet<F>> stripes;
    std::size_t so = 0, ro = 0;
    for (std::size_t t = 0; t < base_.m(); ++t) {
      if (t < base_.ell()) {
        stripes.push_back(mds_.encode(secret.subspan(so, mds_.secret_size()), rand.subspan(ro, mds_.random_size())));
        so += mds_.secret_size();
        ro += mds_.random_size();
      } else {
        stripes.push_back(mbr_.encode(secret.subspan(so, mbr_.secret_size()), rand.subspan(ro, mbr_.random_size())));
        so += mbr_.secret_size();
        ro += mbr_.random_size();
      }
    }
    return base_.assemble(stripes);
  }

  Vector<F> decode_secret(const ClusterArray<F>& state, std::span<const std::size_t> clusters) const {
    const auto file = base_.decode(state, clusters);
    Vector<F> secret;
    std::size_t off = 0;
    for (std::size_t t = 0; t < base_.m(); ++t) {
      if (t < base_.ell()) {
        const auto part = mds_.unprecode(std::span<const value_type>(file).subspan(off, base_.mds_stripe_size()));
        secret.insert(secret.end(), part.begin(), part.end());
        off += base_.mds_stripe_size();
      } else {
        const auto part = mbr_.extract_secret(std::span<const value_type>(file).subspan(off, base_.component_stripe_size()));
        secret.insert(secret.end(), part.begin(), part.end());
        off += base_.component_stripe_size();
      }
    }
    return secret;
  }

 private:
  GRCExactCode<F> base_;
  SecureMDSCode<F> mds_;
  SecureMBRCode<F> mbr_;
  std::size_t e_;
};

/// Eavesdropper access: full contents of `clusters`, optionally every remote
/// payload delivered into them for any single-node repair.
struct EveView {
  std::vector<std::size_t> clusters;
  bool include_repairs = true;
};

/// Zero leakage for uniform sources and linear observations: the observation
/// rows (over [secret | randomness] coordinates) must have the same rank as
/// their restriction to the randomness coordinates.
template <class F>
bool leakage_free(const Matrix<F>& view, std::size_t secret_cols) {
  if (view.rows() == 0) return true;
  std::vector<std::size_t> rand_cols;
  for (std::size_t c = secret_cols; c < view.cols(); ++c) rand_cols.push_back(c);
  return rank(view) == rank(view.select_cols(rand_cols));
}

namespace detail {

inline std::vector<std::vector<std::size_t>> subsets_excluding(std::size_t m, std::size_t size, std::size_t skip) {
  std::vector<std::size_t> pool;
  for (std::size_t j = 0; j < m; ++j)
    if (j != skip) pool.push_back(j);
  std::vector<std::vector<std::size_t>> out;
  if (size > pool.size()) return out;
  std::vector<bool> mask(pool.size(), false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(size), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask[i]) s.push_back(pool[i]);
    out.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

// Every symbol Eve observes in `state`.
template <class F>
Vector<F> observe(const SecureGRCCode<F>& code, const ClusterArray<F>& state, const EveView& view) {
  const auto& b = code.base();
  Vector<F> obs;
  for (std::size_t i : view.clusters) {
    for (const auto& node : state.nodes.at(i)) obs.insert(obs.end(), node.begin(), node.end());
    if (!view.include_repairs) continue;
    for (std::size_t j = 0; j < b.m(); ++j)
      for (const auto& local : subsets_excluding(b.m(), b.ell(), j))
        for (std::size_t h = 0; h < b.n(); ++h) {
          if (h == i) continue;
          const auto payload = b.remote_helper_data(state, h, i, j, local);
          obs.insert(obs.end(), payload.begin(), payload.end());
        }
  }
  return obs;
}

}  // namespace detail

/// Observation matrix of `view`: one row per observed symbol, one column per
/// source symbol ([secret | randomness]), built by encoding unit inputs.
template <class F>
Matrix<F> view_matrix(const SecureGRCCode<F>& code, const EveView& view) {
  const std::size_t s = code.secret_size(), r = code.random_size();
  Vector<F> secret(s, 0), rand(r, 0);
  std::vector<Vector<F>> cols;
  for (std::size_t c = 0; c < s + r; ++c) {
    (c < s ? secret[c] : rand[c - s]) = 1;
    cols.push_back(detail::observe(code, code.encode(secret, rand), view));
    (c < s ? secret[c] : rand[c - s]) = 0;
  }
  const std::size_t rows = cols.empty() ? 0 : cols[0].size();
  Matrix<F> v(rows, s + r);
  for (std::size_t c = 0; c < s + r; ++c)
    for (std::size_t o = 0; o < rows; ++o) v(o, c) = cols[c][o];
  return v;
}

template <class F>
bool leakage_check(const SecureGRCCode<F>& code, const EveView& view) {
  return leakage_free(view_matrix(code, view), code.secret_size());
}

}  // namespace grc
