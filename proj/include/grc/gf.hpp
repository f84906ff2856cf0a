#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace grc {

class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

template <unsigned W>
struct FieldTraits;

template <>
struct FieldTraits<8> {
  using value_type = std::uint8_t;
  // x^8 + x^4 + x^3 + x^2 + 1
  static constexpr std::uint32_t poly = 0x11D;
};

template <>
struct FieldTraits<16> {
  using value_type = std::uint16_t;
  // x^16 + x^12 + x^3 + x + 1
  static constexpr std::uint32_t poly = 0x1100B;
};

// Carry-less multiply followed by reduction modulo `poly`. Slow but table free.
template <unsigned W>
constexpr std::uint32_t clmul_reduce(std::uint32_t a, std::uint32_t b) {
  std::uint32_t acc = 0;
  for (unsigned bit = 0; bit < W; ++bit) {
    if (b & (1u << bit)) acc ^= a << bit;
  }
  for (int bit = 2 * W - 2; bit >= static_cast<int>(W); --bit) {
    if (acc & (1u << bit)) acc ^= FieldTraits<W>::poly << (bit - W);
  }
  return acc;
}

template <unsigned W>
struct LogTables {
  static constexpr std::uint32_t order = 1u << W;
  std::vector<std::uint32_t> log;  // log[0] unused
  std::vector<std::uint32_t> exp;  // doubled so exp[log a + log b] needs no modulo

  LogTables() : log(order, 0), exp(2 * order, 0) {
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < order - 1; ++i) {
      exp[i] = x;
      log[x] = i;
      x <<= 1;
      if (x & order) x ^= FieldTraits<W>::poly;
    }
    for (std::uint32_t i = order - 1; i < 2 * order; ++i) exp[i] = exp[i - (order - 1)];
  }

  static const LogTables& instance() {
    static const LogTables tables;
    return tables;
  }
};

}  // namespace detail

/// Binary extension field GF(2^W) with a fixed primitive reduction polynomial.
///
/// Elements are plain unsigned integers; addition is XOR. Multiplication goes
/// through log/antilog tables built once per width on first use.
template <unsigned W>
class GF2 {
 public:
  using value_type = typename detail::FieldTraits<W>::value_type;
  static constexpr unsigned width = W;
  static constexpr std::uint32_t order = 1u << W;
  static constexpr std::uint32_t poly = detail::FieldTraits<W>::poly;

  static constexpr value_type zero() { return 0; }
  static constexpr value_type one() { return 1; }

  static constexpr value_type add(value_type a, value_type b) { return a ^ b; }
  static constexpr value_type sub(value_type a, value_type b) { return a ^ b; }

  static value_type mul(value_type a, value_type b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = detail::LogTables<W>::instance();
    return static_cast<value_type>(t.exp[t.log[a] + t.log[b]]);
  }

  static value_type inv(value_type a) {
    if (a == 0) throw ArithmeticError("no inverse of zero");
    const auto& t = detail::LogTables<W>::instance();
    return static_cast<value_type>(t.exp[(order - 1) - t.log[a]]);
  }

  static value_type div(value_type a, value_type b) { return mul(a, inv(b)); }

  static value_type pow(value_type a, std::uint64_t e) {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const auto& t = detail::LogTables<W>::instance();
    const std::uint64_t l = (std::uint64_t{t.log[a]} * (e % (order - 1))) % (order - 1);
    return static_cast<value_type>(t.exp[l]);
  }

  /// Reference multiply without tables.
  static constexpr value_type mul_slow(value_type a, value_type b) {
    return static_cast<value_type>(detail::clmul_reduce<W>(a, b));
  }

  /// Reference inverse via the extended Euclidean algorithm over GF(2)[x].
  static value_type inv_slow(value_type a) {
    if (a == 0) throw ArithmeticError("no inverse of zero");
    auto degree = [](std::uint64_t p) {
      int d = -1;
      for (; p; p >>= 1) ++d;
      return d;
    };
    auto clmul = [](std::uint64_t x, std::uint64_t y) {
      std::uint64_t acc = 0;
      for (int bit = 0; y >> bit; ++bit) {
        if ((y >> bit) & 1u) acc ^= x << bit;
      }
      return acc;
    };
    std::uint64_t r0 = poly, r1 = a, t0 = 0, t1 = 1;
    while (r1 != 0) {
      std::uint64_t q = 0, r = r0;
      while (r != 0 && degree(r) >= degree(r1)) {
        int shift = degree(r) - degree(r1);
        q ^= std::uint64_t{1} << shift;
        r ^= r1 << shift;
      }
      r0 = r1;
      r1 = r;
      std::uint64_t t = t0 ^ clmul(q, t1);
      t0 = t1;
      t1 = t;
    }
    return static_cast<value_type>(t0);
  }
};

using GF256 = GF2<8>;
using GF65536 = GF2<16>;

}  // namespace grc
