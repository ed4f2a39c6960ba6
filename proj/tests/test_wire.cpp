#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "strideway/wire.hpp"
#include "support.hpp"

using namespace strideway;

namespace {

template <typename F>
WireErrorCode error_code(F&& f) {
  try {
    f();
  } catch (const WireError& e) {
    return e.code();
  }
  FAIL("no WireError");
  return WireErrorCode::bad_magic;
}

}  // namespace

TEST_CASE("single-tile frame is 3190 bytes with the documented header") {
  PressureFrame f(1, 0x01020304u, 0x1122334455667788ull);
  f.values[0] = 4095;
  f.values[1583] = 7;
  const auto b = encode_frame(f);
  REQUIRE(b.size() == 3190);
  CHECK(encoded_frame_size(1) == 3190);
  CHECK(b[0] == 'P');
  CHECK(b[3] == '1');
  CHECK(b[4] == 1);
  CHECK(b[5] == 1);
  CHECK(b[6] == 33);
  CHECK(b[7] == 0);
  CHECK(b[8] == 48);
  CHECK(b[10] == 0x04);
  CHECK(b[13] == 0x01);
  CHECK(b[14] == 0x88);
  CHECK(b[21] == 0x11);
  CHECK(b[22] == 0xff);
  CHECK(b[23] == 0x0f);
  CHECK(b[3188] == 7);
  CHECK(decode_frame(b) == f);
}

TEST_CASE("random frames round trip") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const int tiles = 1 + static_cast<int>(rng() % 8);
    const PressureFrame f = testing::random_frame(rng, tiles, 0.3, static_cast<std::uint32_t>(rng()), rng());
    CHECK(decode_frame(encode_frame(f)) == f);
  }
}

TEST_CASE("frame streams concatenate") {
  std::mt19937_64 rng(3);
  std::vector<PressureFrame> frames;
  std::vector<std::uint8_t> bytes;
  for (std::uint32_t i = 0; i < 5; ++i) {
    frames.push_back(testing::random_frame(rng, 2, 0.1, i, 10000ull * i));
    encode_frame(frames.back(), bytes);
  }
  CHECK(decode_frame_stream(bytes) == frames);
  bytes.pop_back();
  try {
    decode_frame_stream(bytes);
    FAIL("truncated stream accepted");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::truncated);
    CHECK(e.offset() == bytes.size());
  }
}

TEST_CASE("malformed frames are rejected with their offset") {
  PressureFrame f(1, 0, 0);
  const auto good = encode_frame(f);

  auto bad = good;
  bad[1] = 'X';
  CHECK(error_code([&] { decode_frame(bad); }) == WireErrorCode::bad_magic);

  bad = good;
  bad[4] = 2;
  CHECK(error_code([&] { decode_frame(bad); }) == WireErrorCode::unsupported_version);

  bad = good;
  bad[6] = 32;
  CHECK(error_code([&] { decode_frame(bad); }) == WireErrorCode::bad_geometry);

  bad = good;
  bad[5] = 0;
  CHECK(error_code([&] { decode_frame(bad); }) == WireErrorCode::bad_geometry);

  bad = good;
  bad[22 + 2 * 100 + 1] = 0x10;
  try {
    decode_frame(bad);
    FAIL("value above 4095 accepted");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::value_out_of_range);
    CHECK(e.offset() == 222);
  }

  bad = good;
  bad.push_back(0);
  CHECK(error_code([&] { decode_frame(bad); }) == WireErrorCode::trailing_bytes);

  CHECK(error_code([&] { decode_frame(std::span(good).first(10)); }) == WireErrorCode::truncated);

  PressureFrame hot(1, 0, 0);
  hot.values[5] = 4096;
  CHECK(error_code([&] { encode_frame(hot); }) == WireErrorCode::value_out_of_range);
}

TEST_CASE("fuzzed bytes never crash the decoders") {
  std::mt19937_64 rng(99);
  const auto good = encode_frame(PressureFrame(1, 1, 1));
  std::vector<std::uint8_t> pose_good;
  encode_pose({PoseStream::left_foot, 1, {0.5, {1, 2, 3}, 4}}, pose_good);
  int accepted = 0;
  for (int i = 0; i < 3000; ++i) {
    auto b = (i % 2 == 0) ? good : pose_good;
    const int flips = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < flips; ++k) b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
    if (rng() % 4 == 0) b.resize(rng() % (b.size() + 1));
    try {
      if (i % 2 == 0) {
        (void)decode_frame(b);
      } else {
        (void)decode_pose_stream(b);
      }
      ++accepted;
    } catch (const WireError& e) {
      CHECK(e.offset() <= b.size());
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("pose records round trip at microsecond resolution") {
  std::vector<std::uint8_t> bytes;
  std::vector<PoseSample> in{
      {PoseStream::head, 0, {0.0, {0.1, 0.2, 1.7}, 0.0}},
      {PoseStream::left_foot, 1, {1.234567, {2.5, 0.28, 0.12}, -7.5}},
      {PoseStream::right_foot, 4294967295u, {3600.000001, {-1e-3, 1e300, -0.0}, 359.0}},
  };
  for (const auto& p : in) encode_pose(p, bytes);
  CHECK(bytes.size() == 3 * kPoseRecordSize);
  CHECK(decode_pose_stream(bytes) == in);

  auto bad = bytes;
  bad[5] = 3;
  CHECK(error_code([&] { decode_pose_stream(bad); }) == WireErrorCode::bad_stream_id);
  bad = bytes;
  bad[kPoseRecordSize] = 'Q';
  try {
    decode_pose_stream(bad);
    FAIL("bad magic accepted");
  } catch (const WireError& e) {
    CHECK(e.code() == WireErrorCode::bad_magic);
    CHECK(e.offset() == kPoseRecordSize);
  }
}

TEST_CASE("timestamps are whole microseconds") {
  CHECK(to_timestamp_us(1.0000004) == 1000000);
  CHECK(to_timestamp_us(1.0000006) == 1000001);
  CHECK(to_timestamp_us(-1.0) == 0);
  for (std::uint64_t us : {0ull, 1ull, 999999ull, 123456789012ull}) {
    CHECK(to_timestamp_us(from_timestamp_us(us)) == us);
  }
}
