#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "grc/params.hpp"

namespace grc {

namespace detail {

// sum_{i=from}^{k-1} min(alpha, (d-i)^+ beta)
inline std::int64_t regen_sum(const SystemParams& p, std::int64_t from) {
  std::int64_t s = 0;
  for (std::int64_t i = from; i < p.k; ++i) s += std::min(p.alpha, positive_part(p.d - i) * p.beta);
  return s;
}

}  // namespace detail

/// Functional-repair storage capacity B* = ell*k*alpha + (m-ell) * sum_i min(alpha, (d-i)^+ beta).
/// With d = 0 every min-term vanishes and the value is the product-code bound ell*k*alpha.
inline std::int64_t file_size_bound(const SystemParams& p) {
  p.validate();
  return p.ell * p.k * p.alpha + (p.m - p.ell) * detail::regen_sum(p, 0);
}

/// Largest file that stays hidden from an eavesdropper holding any e clusters
/// (plus everything downloaded to repair them).
inline std::int64_t secure_file_size_bound(const SystemParams& p, std::int64_t e) {
  p.validate();
  if (e < 0 || e > p.k) throw ParamError("eavesdropper size must satisfy 0 <= e <= k");
  return p.ell * (p.k - e) * p.alpha + (p.m - p.ell) * detail::regen_sum(p, e);
}

/// Minimum per-local-helper download gamma* = alpha - (d-k+1)^+ beta.
inline std::int64_t gamma_star(const SystemParams& p) {
  p.validate();
  if (p.d == 0) throw ParamError("gamma undefined without remote help");
  return p.alpha - positive_part(p.d - p.k + 1) * p.beta;
}

struct GammaPrimeBound {
  Rational value;               // beta / (m - ell)
  std::int64_t ceiling = 0;     // smallest integer download meeting the bound
  std::int64_t ell_prime = 0;   // every node of a remote helper cluster must contribute
};

/// Remote-helper per-node bound gamma' >= beta/(m-ell), valid when d >= k and
/// alpha >= (d-k+2) beta. Also reports that all m nodes must contribute.
inline GammaPrimeBound gamma_prime_bound(const SystemParams& p) {
  p.validate();
  if (p.d < p.k) throw ParamError("gamma' bound requires d >= k");
  if (p.alpha < (p.d - p.k + 2) * p.beta) throw ParamError("gamma' bound requires alpha >= (d-k+2)*beta");
  const std::int64_t denom = p.m - p.ell;
  GammaPrimeBound b;
  b.value = Rational(p.beta, denom);
  b.ceiling = (p.beta + denom - 1) / denom;
  b.ell_prime = p.m;
  return b;
}

inline bool gamma_prime_bound_applies(const SystemParams& p) {
  return p.d >= p.k && p.alpha >= (p.d - p.k + 2) * p.beta;
}

/// Minimum-storage and minimum-bandwidth extremes for given (k, d, beta).
inline std::pair<OperatingPoint, OperatingPoint> operating_points(std::int64_t n, std::int64_t k, std::int64_t d,
                                                                 std::int64_t beta) {
  if (d < 1) throw ParamError("operating points require d >= 1");
  if (k < 1 || k > n || d > n - 1) throw ParamError("operating points require 1 <= k <= n and d <= n-1");
  OperatingPoint msr{PointKind::msr, d >= k ? (d - k + 1) * beta : beta, beta};
  OperatingPoint mbr{PointKind::mbr, d * beta, beta};
  return {msr, mbr};
}

struct TradeoffPoint {
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  Rational storage_overhead;  // n m alpha / B*
  Rational bw_overhead;       // d beta / alpha
};

/// Normalized storage vs inter-cluster repair bandwidth trade-off.
///
/// Every integer alpha in the admissible range is sampled. When that gives
/// fewer than `samples` points, (alpha, beta) are scaled by the smallest
/// integer factor that does, so each point stays realizable. A range holding
/// one alpha yields one point whatever `samples` asks for.
inline std::vector<TradeoffPoint> tradeoff_curve(std::int64_t n, std::int64_t k, std::int64_t d, std::int64_t m,
                                                 std::int64_t ell, std::int64_t beta, std::int64_t samples) {
  if (d < 1) throw ParamError("trade-off curve requires d >= 1");
  if (beta < 1) throw ParamError("trade-off curve requires beta >= 1");
  auto lo_of = [&](std::int64_t b) { return d >= k ? (d - k + 1) * b : b; };
  // A single admissible alpha (d = 1, or k = 1) stays single under scaling.
  std::int64_t scale = 1;
  if (d * beta > lo_of(beta))
    while (d * beta * scale - lo_of(beta * scale) + 1 < samples) ++scale;
  const std::int64_t b = beta * scale;
  std::vector<TradeoffPoint> out;
  for (std::int64_t a = lo_of(b); a <= d * b; ++a) {
    SystemParams p{n, k, d, a, b, m, ell, 8};
    const auto bstar = file_size_bound(p);
    out.push_back({a, b, Rational(n * m * a, bstar), Rational(d * b, a)});
  }
  return out;
}

/// Product code: an [n,k] MDS code across clusters times an [m,m-1] parity
/// code inside each cluster. No inter-cluster traffic on repair.
inline TradeoffPoint product_code_point(std::int64_t n, std::int64_t k, std::int64_t m) {
  if (m < 2) throw ParamError("product code needs m >= 2");
  SystemParams p{n, k, 0, 1, 0, m, m - 1, 8};
  return {1, 0, Rational(n * m, file_size_bound(p)), Rational(0)};
}

/// True when `p` sits strictly under the chord from `a` to `b` in the
/// (bw_overhead, storage_overhead) plane. Points outside the chord's
/// bandwidth range never count as below.
inline bool strictly_below_segment(const TradeoffPoint& p, const TradeoffPoint& a, const TradeoffPoint& b) {
  if (a.bw_overhead == b.bw_overhead) return false;
  const auto& lo = a.bw_overhead < b.bw_overhead ? a : b;
  const auto& hi = a.bw_overhead < b.bw_overhead ? b : a;
  if (p.bw_overhead < lo.bw_overhead || p.bw_overhead > hi.bw_overhead) return false;
  const Rational t = (p.bw_overhead - lo.bw_overhead) / (hi.bw_overhead - lo.bw_overhead);
  return p.storage_overhead < lo.storage_overhead + t * (hi.storage_overhead - lo.storage_overhead);
}

struct EllMetricsRow {
  std::int64_t ell = 0;
  Rational storage_overhead;
  std::int64_t inter_bw = 0;                      // d beta
  std::int64_t gamma_star = 0;                    // per local helper
  std::optional<Rational> helper_intra_bw;        // m * beta/(m-ell), when the bound applies
};

/// Storage and bandwidth metrics across every ell in [0, m-1] at a fixed point.
inline std::vector<EllMetricsRow> system_metrics_vs_ell(std::int64_t n, std::int64_t k, std::int64_t d,
                                                        std::int64_t beta, std::int64_t m,
                                                        const OperatingPoint& point) {
  std::vector<EllMetricsRow> rows;
  for (std::int64_t ell = 0; ell < m; ++ell) {
    SystemParams p{n, k, d, point.alpha, beta, m, ell, 8};
    EllMetricsRow row;
    row.ell = ell;
    row.storage_overhead = Rational(n * m * point.alpha, file_size_bound(p));
    row.inter_bw = d * beta;
    row.gamma_star = gamma_star(p);
    if (gamma_prime_bound_applies(p)) row.helper_intra_bw = Rational(m) * gamma_prime_bound(p).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace grc
