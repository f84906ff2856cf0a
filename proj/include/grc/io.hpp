#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grc/grc_exact.hpp"
#include "grc/params.hpp"

namespace grc::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline void put_le(Bytes& out, std::uint64_t v, std::size_t width) {
  for (std::size_t b = 0; b < width; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t& pos, std::size_t width) {
  if (pos + width > in.size()) throw FormatError("truncated input");
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < width; ++b) v |= std::uint64_t{in[pos + b]} << (8 * b);
  pos += width;
  return v;
}

}  // namespace detail

template <class F>
constexpr std::size_t symbol_bytes() {
  return F::width / 8;
}

/// Symbols to little-endian bytes, 1 or 2 bytes each by field width.
template <class F>
void append_symbols(Bytes& out, std::span<const typename F::value_type> symbols) {
  for (auto s : symbols) detail::put_le(out, s, symbol_bytes<F>());
}

template <class F>
Vector<F> read_symbols(std::span<const std::uint8_t> in, std::size_t& pos, std::size_t count) {
  Vector<F> v(count);
  for (auto& s : v) s = static_cast<typename F::value_type>(detail::get_le(in, pos, symbol_bytes<F>()));
  return v;
}

/// Packs a byte string into symbols, zero-padding to a multiple of `chunk` symbols.
template <class F>
Vector<F> bytes_to_symbols(std::span<const std::uint8_t> data, std::size_t chunk) {
  const std::size_t sb = symbol_bytes<F>();
  std::size_t count = (data.size() + sb - 1) / sb;
  if (chunk > 0) count = ((count + chunk - 1) / chunk) * chunk;
  if (count == 0) count = chunk;
  Bytes padded(data.begin(), data.end());
  padded.resize(count * sb, 0);
  std::size_t pos = 0;
  return read_symbols<F>(padded, pos, count);
}

template <class F>
Bytes symbols_to_bytes(std::span<const typename F::value_type> symbols, std::size_t length) {
  Bytes out;
  append_symbols<F>(out, symbols);
  if (length > out.size()) throw FormatError("declared length exceeds decoded data");
  out.resize(length);
  return out;
}

/// Cluster array: cluster-major, then node, then symbol.
template <class F>
Bytes serialize(const ClusterArray<F>& a) {
  Bytes out;
  for (const auto& cluster : a.nodes)
    for (const auto& node : cluster) append_symbols<F>(out, node);
  return out;
}

template <class F>
ClusterArray<F> deserialize(std::span<const std::uint8_t> in, std::size_t n, std::size_t m, std::size_t alpha) {
  if (in.size() != n * m * alpha * symbol_bytes<F>()) throw FormatError("cluster array size mismatch");
  ClusterArray<F> a(n, m, alpha);
  std::size_t pos = 0;
  for (auto& cluster : a.nodes)
    for (auto& node : cluster) node = read_symbols<F>(in, pos, alpha);
  return a;
}

/// Helper payload: u32 symbol count followed by the symbols.
template <class F>
Bytes encode_payload(std::span<const typename F::value_type> symbols) {
  Bytes out;
  detail::put_le(out, symbols.size(), 4);
  append_symbols<F>(out, symbols);
  return out;
}

template <class F>
Vector<F> decode_payload(std::span<const std::uint8_t> in, std::size_t& pos) {
  const auto count = static_cast<std::size_t>(detail::get_le(in, pos, 4));
  if (count * symbol_bytes<F>() > in.size() - pos) throw FormatError("payload length exceeds buffer");
  return read_symbols<F>(in, pos, count);
}

inline constexpr std::array<std::uint8_t, 4> magic = {'G', 'R', 'C', '1'};
inline constexpr std::uint16_t format_version = 1;

/// Header of one stored node file. The body holds `generations` blocks of
/// alpha symbols.
struct NodeFileHeader {
  SystemParams params;
  PointKind point = PointKind::mbr;
  std::uint64_t file_length = 0;
  std::uint64_t generations = 0;
  std::uint32_t cluster = 0;
  std::uint32_t node = 0;

  static constexpr std::size_t size = 4 + 2 + 1 + 1 + 7 * 4 + 8 + 8 + 4 + 4;

  friend bool operator==(const NodeFileHeader&, const NodeFileHeader&) = default;
};

inline Bytes write_header(const NodeFileHeader& h) {
  Bytes out(magic.begin(), magic.end());
  detail::put_le(out, format_version, 2);
  detail::put_le(out, h.params.field_width, 1);
  detail::put_le(out, static_cast<std::uint64_t>(h.point), 1);
  for (auto v : {h.params.n, h.params.k, h.params.d, h.params.alpha, h.params.beta, h.params.m, h.params.ell})
    detail::put_le(out, static_cast<std::uint64_t>(v), 4);
  detail::put_le(out, h.file_length, 8);
  detail::put_le(out, h.generations, 8);
  detail::put_le(out, h.cluster, 4);
  detail::put_le(out, h.node, 4);
  return out;
}

inline NodeFileHeader read_header(std::span<const std::uint8_t> in) {
  if (in.size() < NodeFileHeader::size) throw FormatError("corrupt header: file too short");
  if (!std::equal(magic.begin(), magic.end(), in.begin())) throw FormatError("corrupt header: bad magic");
  std::size_t pos = 4;
  if (detail::get_le(in, pos, 2) != format_version) throw FormatError("corrupt header: unsupported version");
  NodeFileHeader h;
  h.params.field_width = static_cast<unsigned>(detail::get_le(in, pos, 1));
  const auto point = detail::get_le(in, pos, 1);
  if (point > static_cast<std::uint64_t>(PointKind::interior)) throw FormatError("corrupt header: bad operating point");
  h.point = static_cast<PointKind>(point);
  for (auto* v : {&h.params.n, &h.params.k, &h.params.d, &h.params.alpha, &h.params.beta, &h.params.m, &h.params.ell})
    *v = static_cast<std::int64_t>(detail::get_le(in, pos, 4));
  h.file_length = detail::get_le(in, pos, 8);
  h.generations = detail::get_le(in, pos, 8);
  h.cluster = static_cast<std::uint32_t>(detail::get_le(in, pos, 4));
  h.node = static_cast<std::uint32_t>(detail::get_le(in, pos, 4));
  try {
    h.params.validate();
  } catch (const ParamError& e) {
    throw FormatError(std::string("corrupt header: ") + e.what());
  }
  if (h.cluster >= h.params.n || h.node >= h.params.m) throw FormatError("corrupt header: node index out of range");
  return h;
}

/// Body size in bytes implied by a header.
inline std::size_t body_size(const NodeFileHeader& h) {
  return static_cast<std::size_t>(h.generations * static_cast<std::uint64_t>(h.params.alpha)) * (h.params.field_width / 8);
}

}  // namespace grc::io
