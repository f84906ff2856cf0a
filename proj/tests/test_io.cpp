#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "grc/history_json.hpp"
#include "grc/io.hpp"

using namespace grc;
using namespace grc::io;

namespace {

NodeFileHeader sample_header() {
  NodeFileHeader h;
  h.params = SystemParams{4, 3, 3, 3, 1, 4, 3, 16};
  h.point = PointKind::mbr;
  h.file_length = 1234;
  h.generations = 19;
  h.cluster = 2;
  h.node = 3;
  return h;
}

}  // namespace

TEST(Symbols, LittleEndianWideSymbols) {
  Bytes out;
  const std::vector<std::uint16_t> s{0x1234, 0xABCD};
  append_symbols<GF65536>(out, s);
  EXPECT_EQ(out, (Bytes{0x34, 0x12, 0xCD, 0xAB}));
  std::size_t pos = 0;
  EXPECT_EQ(read_symbols<GF65536>(out, pos, 2), s);
  EXPECT_EQ(pos, 4u);
}

TEST(Symbols, BytePackingPadsToChunk) {
  const Bytes data{1, 2, 3, 4, 5};
  const auto s8 = bytes_to_symbols<GF256>(data, 4);
  EXPECT_EQ(s8, (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 0, 0, 0}));
  const auto s16 = bytes_to_symbols<GF65536>(data, 2);
  EXPECT_EQ(s16, (std::vector<std::uint16_t>{0x0201, 0x0403, 0x0005, 0}));
  EXPECT_EQ(symbols_to_bytes<GF65536>(s16, 5), data);
  EXPECT_THROW(symbols_to_bytes<GF65536>(s16, 9), FormatError);
  EXPECT_EQ(bytes_to_symbols<GF256>(Bytes{}, 3).size(), 3u);
}

TEST(ClusterArrayIO, RoundTrip) {
  std::mt19937_64 rng(1);
  ClusterArray<GF65536> a(3, 2, 4);
  for (auto& c : a.nodes)
    for (auto& node : c)
      for (auto& x : node) x = static_cast<std::uint16_t>(rng());
  const auto bytes = serialize(a);
  EXPECT_EQ(bytes.size(), 3u * 2 * 4 * 2);
  EXPECT_EQ(deserialize<GF65536>(bytes, 3, 2, 4).nodes, a.nodes);
  EXPECT_THROW(deserialize<GF65536>(std::span<const std::uint8_t>(bytes).first(10), 3, 2, 4), FormatError);
}

TEST(Payload, RoundTripAndTruncation) {
  const std::vector<std::uint8_t> sym{9, 8, 7};
  const auto bytes = encode_payload<GF256>(sym);
  EXPECT_EQ(bytes.size(), 4u + 3);
  std::size_t pos = 0;
  EXPECT_EQ(decode_payload<GF256>(bytes, pos), sym);
  pos = 0;
  EXPECT_THROW(decode_payload<GF256>(std::span<const std::uint8_t>(bytes).first(5), pos), FormatError);
}

TEST(Header, RoundTrip) {
  const auto h = sample_header();
  const auto bytes = write_header(h);
  ASSERT_EQ(bytes.size(), NodeFileHeader::size);
  EXPECT_EQ(NodeFileHeader::size, 60u);
  EXPECT_EQ(read_header(bytes), h);
  EXPECT_EQ(body_size(h), 19u * 3 * 2);
}

TEST(Header, CorruptionDetected) {
  const auto good = write_header(sample_header());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(read_header(bad_magic), FormatError);

  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(read_header(bad_version), FormatError);

  EXPECT_THROW(read_header(std::span<const std::uint8_t>(good).first(20)), FormatError);

  auto bad_point = good;
  bad_point[7] = 7;
  EXPECT_THROW(read_header(bad_point), FormatError);

  auto bad_params = good;
  bad_params[12] = 9;  // k > n
  EXPECT_THROW(read_header(bad_params), FormatError);

  auto h = sample_header();
  h.node = 4;
  EXPECT_THROW(read_header(write_header(h)), FormatError);

  try {
    read_header(bad_magic);
  } catch (const FormatError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("corrupt header", 0), 0u);
  }
}

TEST(History, JsonLinesRoundTrip) {
  std::vector<RepairRecord> hist{{1, 0, 2, {1, 2, 3}, 77}, {2, 4, 0, {0, 1, 2}, 0xFFFFFFFFFFFFFFFFull}};
  std::stringstream ss;
  write_history(ss, hist);
  const auto text = ss.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  ss.seekg(0);
  EXPECT_EQ(read_history(ss), hist);
}
