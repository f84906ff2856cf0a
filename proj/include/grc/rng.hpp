#pragma once

#include <cstdint>
#include <initializer_list>

#include "grc/matrix.hpp"

namespace grc {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based generator: the stream is a pure function of its key, so any
/// (seed, trial, step, role, index) tuple can be regenerated in isolation.
class KeyedStream {
 public:
  KeyedStream(std::initializer_list<std::uint64_t> key) {
    for (auto k : key) key_ = mix64(key_ ^ k);
  }

  std::uint64_t next() { return mix64(key_ ^ mix64(++counter_)); }

  /// Uniform in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % bound;
  }

  template <class F>
  typename F::value_type element() {
    return static_cast<typename F::value_type>(next() & (F::order - 1));
  }

  template <class F>
  Matrix<F> matrix(std::size_t rows, std::size_t cols) {
    Matrix<F> m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = element<F>();
    return m;
  }

 private:
  std::uint64_t key_ = 0x6A09E667F3BCC908ull;
  std::uint64_t counter_ = 0;
};

}  // namespace grc
