#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace moments {

// Half-open frame interval [begin, end).
struct FrameSpan {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }
  bool valid() const { return begin >= 0 && end > begin; }
  bool operator==(const FrameSpan&) const = default;
};

// Half-open time interval [start, end) in seconds.
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool valid() const { return start >= 0.0 && end > start; }
  bool operator==(const TimeSpan&) const = default;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct VideoMeta {
  std::string path;
  Rational fps{25, 1};
  std::int64_t frame_count = 0;
  double duration = 0.0;  // seconds
  int width = 0;
  int height = 0;
};

// 8-bit single-channel frame, row-major.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  bool same_size(const GrayFrame& other) const { return width == other.width && height == other.height; }
};

struct TranscriptSegment {
  double start = 0.0;
  double end = 0.0;
  std::string text;
};

struct Transcript {
  std::vector<TranscriptSegment> segments;  // sorted by start
  bool has_overlaps = false;
};

// Error hierarchy. CLI maps these onto exit codes.
struct MomentsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : MomentsError { using MomentsError::MomentsError; };
struct DataError : MomentsError { using MomentsError::MomentsError; };
struct InternalError : MomentsError { using MomentsError::MomentsError; };

struct FileNotFound : DataError { using DataError::DataError; };
struct DecodeError : DataError { using DataError::DataError; };
struct PipeBroken : DataError { using DataError::DataError; };
struct ParseError : DataError { using DataError::DataError; };
struct SpanOutOfRange : DataError { using DataError::DataError; };
struct TranscodeError : DataError { using DataError::DataError; };
struct DimensionMismatch : DataError { using DataError::DataError; };
struct FrameTooSmall : DataError { using DataError::DataError; };
struct DegenerateData : DataError { using DataError::DataError; };
struct InvalidSpan : DataError { using DataError::DataError; };
struct EmptyInput : DataError { using DataError::DataError; };

}  // namespace moments
