#include "strideway/wire.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace strideway {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return static_cast<T>(v);
}

void put_f64(std::vector<std::uint8_t>& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::span<const std::uint8_t> b, std::size_t at) {
  return std::bit_cast<double>(get_le<std::uint64_t>(b, at));
}

}  // namespace

const char* to_string(WireErrorCode c) {
  switch (c) {
    case WireErrorCode::bad_magic: return "bad_magic";
    case WireErrorCode::unsupported_version: return "unsupported_version";
    case WireErrorCode::bad_geometry: return "bad_geometry";
    case WireErrorCode::truncated: return "truncated";
    case WireErrorCode::trailing_bytes: return "trailing_bytes";
    case WireErrorCode::value_out_of_range: return "value_out_of_range";
    case WireErrorCode::bad_stream_id: return "bad_stream_id";
  }
  return "unknown";
}

WireError::WireError(WireErrorCode code, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + " at byte " + std::to_string(offset) +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code), offset_(offset) {}

std::uint64_t to_timestamp_us(double seconds) {
  return seconds <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(seconds * 1e6));
}

double from_timestamp_us(std::uint64_t us) { return static_cast<double>(us) / 1e6; }

std::size_t encoded_frame_size(int tile_count) {
  return kFrameHeaderSize + static_cast<std::size_t>(tile_count) * TileSpec::nodes * 2;
}

std::vector<std::uint8_t> encode_frame(const PressureFrame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(encoded_frame_size(frame.tile_count));
  encode_frame(frame, out);
  return out;
}

void encode_frame(const PressureFrame& frame, std::vector<std::uint8_t>& out) {
  if (frame.tile_count < 1 || frame.tile_count > 255 ||
      frame.values.size() != static_cast<std::size_t>(frame.tile_count) * TileSpec::nodes) {
    throw WireError(WireErrorCode::bad_geometry, 0,
                    "frame has " + std::to_string(frame.tile_count) + " tiles and " +
                        std::to_string(frame.values.size()) + " values");
  }
  out.insert(out.end(), kFrameMagic.begin(), kFrameMagic.end());
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(frame.tile_count));
  put_le<std::uint16_t>(out, TileSpec::rows);
  put_le<std::uint16_t>(out, TileSpec::cols);
  put_le<std::uint32_t>(out, frame.seq);
  put_le<std::uint64_t>(out, frame.timestamp_us);
  for (std::size_t i = 0; i < frame.values.size(); ++i) {
    const std::uint16_t v = frame.values[i];
    if (v > TileSpec::raw_max) {
      throw WireError(WireErrorCode::value_out_of_range, kFrameHeaderSize + 2 * i,
                      "raw value " + std::to_string(v));
    }
    put_le<std::uint16_t>(out, v);
  }
}

std::pair<PressureFrame, std::size_t> decode_frame_prefix(std::span<const std::uint8_t> b,
                                                          std::size_t base) {
  if (b.size() < kFrameHeaderSize) {
    throw WireError(WireErrorCode::truncated, base + b.size(),
                    "header needs 22 bytes, have " + std::to_string(b.size()));
  }
  if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), b.begin())) {
    throw WireError(WireErrorCode::bad_magic, base, "");
  }
  if (b[4] != kWireVersion) {
    throw WireError(WireErrorCode::unsupported_version, base + 4, "version " + std::to_string(b[4]));
  }
  const int tiles = b[5];
  const auto rows = get_le<std::uint16_t>(b, 6);
  const auto cols = get_le<std::uint16_t>(b, 8);
  if (tiles == 0) throw WireError(WireErrorCode::bad_geometry, base + 5, "zero tiles");
  if (rows != TileSpec::rows || cols != TileSpec::cols) {
    throw WireError(WireErrorCode::bad_geometry, base + 6,
                    std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
  const std::size_t total = encoded_frame_size(tiles);
  if (b.size() < total) {
    throw WireError(WireErrorCode::truncated, base + b.size(),
                    "frame needs " + std::to_string(total) + " bytes, have " + std::to_string(b.size()));
  }
  PressureFrame f(tiles, get_le<std::uint32_t>(b, 10), get_le<std::uint64_t>(b, 14));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const std::size_t at = kFrameHeaderSize + 2 * i;
    const auto v = get_le<std::uint16_t>(b, at);
    if (v > TileSpec::raw_max) {
      throw WireError(WireErrorCode::value_out_of_range, base + at, "raw value " + std::to_string(v));
    }
    f.values[i] = v;
  }
  return {std::move(f), total};
}

PressureFrame decode_frame(std::span<const std::uint8_t> bytes) {
  auto [frame, used] = decode_frame_prefix(bytes);
  if (used != bytes.size()) {
    throw WireError(WireErrorCode::trailing_bytes, used,
                    std::to_string(bytes.size() - used) + " bytes after the frame");
  }
  return std::move(frame);
}

std::vector<PressureFrame> decode_frame_stream(std::span<const std::uint8_t> bytes) {
  std::vector<PressureFrame> frames;
  std::size_t at = 0;
  while (at < bytes.size()) {
    auto [frame, used] = decode_frame_prefix(bytes.subspan(at), at);
    frames.push_back(std::move(frame));
    at += used;
  }
  return frames;
}

void encode_pose(const PoseSample& pose, std::vector<std::uint8_t>& out) {
  out.insert(out.end(), kPoseMagic.begin(), kPoseMagic.end());
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(pose.stream));
  put_le<std::uint16_t>(out, kPosePayloadSize);
  put_le<std::uint32_t>(out, pose.seq);
  put_le<std::uint64_t>(out, to_timestamp_us(pose.pose.time));
  put_f64(out, pose.pose.position.x);
  put_f64(out, pose.pose.position.y);
  put_f64(out, pose.pose.position.z);
  put_f64(out, pose.pose.yaw_deg);
}

PoseSample decode_pose(std::span<const std::uint8_t> b, std::size_t base) {
  if (b.size() < kPoseHeaderSize) {
    throw WireError(WireErrorCode::truncated, base + b.size(), "pose header needs 20 bytes");
  }
  if (!std::equal(kPoseMagic.begin(), kPoseMagic.end(), b.begin())) {
    throw WireError(WireErrorCode::bad_magic, base, "");
  }
  if (b[4] != kWireVersion) {
    throw WireError(WireErrorCode::unsupported_version, base + 4, "version " + std::to_string(b[4]));
  }
  if (b[5] > 2) throw WireError(WireErrorCode::bad_stream_id, base + 5, std::to_string(b[5]));
  if (get_le<std::uint16_t>(b, 6) != kPosePayloadSize) {
    throw WireError(WireErrorCode::bad_geometry, base + 6, "pose payload must be 32 bytes");
  }
  if (b.size() < kPoseRecordSize) {
    throw WireError(WireErrorCode::truncated, base + b.size(), "pose record needs 52 bytes");
  }
  PoseSample p;
  p.stream = static_cast<PoseStream>(b[5]);
  p.seq = get_le<std::uint32_t>(b, 8);
  p.pose.time = from_timestamp_us(get_le<std::uint64_t>(b, 12));
  p.pose.position = {get_f64(b, 20), get_f64(b, 28), get_f64(b, 36)};
  p.pose.yaw_deg = get_f64(b, 44);
  return p;
}

std::vector<PoseSample> decode_pose_stream(std::span<const std::uint8_t> bytes) {
  std::vector<PoseSample> out;
  for (std::size_t at = 0; at < bytes.size(); at += kPoseRecordSize) {
    out.push_back(decode_pose(bytes.subspan(at), at));
  }
  return out;
}

}  // namespace strideway

namespace strideway {

const char* to_string(PoseStream s) {
  switch (s) {
    case PoseStream::head: return "head";
    case PoseStream::left_foot: return "left_foot";
    case PoseStream::right_foot: return "right_foot";
  }
  return "unknown";
}

}  // namespace strideway
