#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace grc {

using Rational = boost::rational<std::int64_t>;

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cluster/code geometry shared by every bound and construction.
///
/// n clusters of m nodes, each node holding alpha symbols. Any k clusters
/// recover the file. A repair downloads beta symbols from each of d remote
/// clusters plus content from ell surviving nodes of the host cluster.
struct SystemParams {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t d = 0;
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
  std::int64_t m = 1;
  std::int64_t ell = 0;
  unsigned field_width = 8;

  /// Throws ParamError naming the first violated invariant.
  void validate() const {
    auto fail = [this](const std::string& what) {
      throw ParamError("invalid parameters " + describe() + ": " + what);
    };
    if (n < 1) fail("n >= 1");
    if (k < 1 || k > n) fail("1 <= k <= n");
    if (d < 0 || d > n - 1) fail("0 <= d <= n-1");
    if (m < 1) fail("m >= 1");
    if (ell < 0 || ell > m - 1) fail("0 <= ell <= m-1");
    if (alpha < 1) fail("alpha >= 1");
    if (beta < 0) fail("beta >= 0");
    if (d > 0 && beta < 1) fail("beta >= 1 when d > 0");
    if (field_width != 8 && field_width != 16) fail("field width must be 8 or 16");
    if (d >= k && d > 0) {
      if (alpha < (d - k + 1) * beta || alpha > d * beta) fail("(d-k+1)*beta <= alpha <= d*beta");
    } else if (d >= 1) {
      if (alpha < beta || alpha > d * beta) fail("beta <= alpha <= d*beta");
    }
  }

  std::string describe() const {
    std::ostringstream os;
    os << "(n=" << n << ",k=" << k << ",d=" << d << ",alpha=" << alpha << ",beta=" << beta << ",m=" << m
       << ",ell=" << ell << ")";
    return os.str();
  }

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Intra-cluster bandwidth knobs: per-local-helper download gamma, number of
/// contributing nodes per remote cluster ell_prime, and per-contributor
/// download gamma_prime.
struct IntraParams {
  std::int64_t gamma = 0;
  std::int64_t ell_prime = 1;
  std::int64_t gamma_prime = 0;

  void validate(const SystemParams& p) const {
    if (gamma < 0 || gamma > p.alpha) throw ParamError("intra parameters: 0 <= gamma <= alpha");
    if (ell_prime < 1 || ell_prime > p.m) throw ParamError("intra parameters: 1 <= ell_prime <= m");
    if (gamma_prime < 0 || gamma_prime > p.alpha) throw ParamError("intra parameters: 0 <= gamma_prime <= alpha");
  }
};

enum class PointKind { msr, mbr, interior };

inline const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::msr:
      return "MSR";
    case PointKind::mbr:
      return "MBR";
    default:
      return "interior";
  }
}

struct OperatingPoint {
  PointKind kind = PointKind::interior;
  std::int64_t alpha = 0;
  std::int64_t beta = 0;
};

inline std::int64_t positive_part(std::int64_t a) { return a > 0 ? a : 0; }

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace grc
