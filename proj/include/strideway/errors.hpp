#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace strideway {

/// Invalid configuration. `field()` names the offending input so callers can
/// point the operator at it.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class OutOfRangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Failure while reading a persisted recording; `offset()` is the byte offset
/// in `file()` where parsing stopped.
class RecordingError : public std::runtime_error {
public:
  RecordingError(std::string file, std::size_t offset, const std::string& what)
      : std::runtime_error(file + " @" + std::to_string(offset) + ": " + what),
        file_(std::move(file)), offset_(offset) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::string file_;
  std::size_t offset_;
};

}  // namespace strideway
