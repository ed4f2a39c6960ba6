#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "strideway/pose.hpp"
#include "strideway/walkway.hpp"

namespace strideway {

// Pressure frame layout, all integers little-endian:
//   0  magic "PWK1"      4
//   4  version = 1       1
//   5  tile_count        1
//   6  rows = 33         2
//   8  cols = 48         2
//  10  seq               4
//  14  timestamp_us      8
//  22  payload: tile_count·rows·cols u16 raw values, top 4 bits zero
inline constexpr std::array<std::uint8_t, 4> kFrameMagic{'P', 'W', 'K', '1'};
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 22;

// Pose record layout, same discipline:
//   0  magic "PWP1"      4
//   4  version = 1       1
//   5  stream id         1   (0 head, 1 left ankle, 2 right ankle)
//   6  payload bytes     2   (= 32)
//   8  seq               4
//  12  timestamp_us      8
//  20  payload: x, y, z, yaw_deg as IEEE-754 binary64
inline constexpr std::array<std::uint8_t, 4> kPoseMagic{'P', 'W', 'P', '1'};
inline constexpr std::size_t kPoseHeaderSize = 20;
inline constexpr std::size_t kPosePayloadSize = 32;
inline constexpr std::size_t kPoseRecordSize = kPoseHeaderSize + kPosePayloadSize;

enum class WireErrorCode {
  bad_magic,
  unsupported_version,
  bad_geometry,
  truncated,
  trailing_bytes,
  value_out_of_range,
  bad_stream_id,
};

const char* to_string(WireErrorCode c);

class WireError : public std::runtime_error {
public:
  WireError(WireErrorCode code, std::size_t offset, const std::string& detail);

  WireErrorCode code() const noexcept { return code_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  WireErrorCode code_;
  std::size_t offset_;
};

/// Session timestamps travel as whole microseconds.
std::uint64_t to_timestamp_us(double seconds);
double from_timestamp_us(std::uint64_t us);

std::size_t encoded_frame_size(int tile_count);

std::vector<std::uint8_t> encode_frame(const PressureFrame& frame);
/// Appends to `out`. Throws WireError(value_out_of_range) for raw > 4095 and
/// WireError(bad_geometry) when the tile count does not fit in one byte.
void encode_frame(const PressureFrame& frame, std::vector<std::uint8_t>& out);

/// Decodes a buffer holding exactly one frame.
PressureFrame decode_frame(std::span<const std::uint8_t> bytes);
/// Decodes the frame at the start of `bytes`; returns it with its length.
/// Error offsets are relative to `base_offset`.
std::pair<PressureFrame, std::size_t> decode_frame_prefix(std::span<const std::uint8_t> bytes,
                                                          std::size_t base_offset = 0);
/// Decodes concatenated frames (the frames.bin layout).
std::vector<PressureFrame> decode_frame_stream(std::span<const std::uint8_t> bytes);

void encode_pose(const PoseSample& pose, std::vector<std::uint8_t>& out);
PoseSample decode_pose(std::span<const std::uint8_t> bytes, std::size_t base_offset = 0);
std::vector<PoseSample> decode_pose_stream(std::span<const std::uint8_t> bytes);

}  // namespace strideway
