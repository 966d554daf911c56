#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vlp {

enum class ErrorKind {
  DegenerateGeometry,
  InvalidHeight,
  InvalidGeometry,
  EmptyInput,
  InvalidQuantile,
  OutOfRange,
  OutOfFrame,
  IncompatibleHistogram,
  InvalidSimilarity,
  NumericalDegeneracy,
  InvalidConfig,
  Schema,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateGeometry: return "degenerate_geometry";
    case ErrorKind::InvalidHeight: return "invalid_height";
    case ErrorKind::InvalidGeometry: return "invalid_geometry";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::InvalidQuantile: return "invalid_quantile";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::OutOfFrame: return "out_of_frame";
    case ErrorKind::IncompatibleHistogram: return "incompatible_histogram";
    case ErrorKind::InvalidSimilarity: return "invalid_similarity";
    case ErrorKind::NumericalDegeneracy: return "numerical_degeneracy";
    case ErrorKind::InvalidConfig: return "invalid_config";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Configuration problems carry the offending key path, e.g. "lamps[0].position".
class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& message)
      : Error(ErrorKind::Schema, key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace vlp
