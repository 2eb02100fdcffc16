#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ejb {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported GeoJSON. `byte_offset` is set for JSON syntax errors.
class GeoJsonError : public Error {
 public:
  explicit GeoJsonError(const std::string& what, std::size_t byte_offset = npos)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t byte_offset_;
};

/// Structural problems in tabular or layer inputs (missing columns, kind mismatch).
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration or request parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Class count cannot be honored for the given values.
class ClassifyError : public Error {
 public:
  using Error::Error;
};

/// Correlation is undefined (constant series or too few points).
class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace ejb
