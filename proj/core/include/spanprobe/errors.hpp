#pragma once

#include <stdexcept>
#include <string>

namespace spanprobe {

/// Malformed input table: missing column, bad header, broken quoting.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A row or field violates a documented constraint (bad label, unknown
/// language, invalid UTF-8). The message names the offending row.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A word could not be matched to any subword piece.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input sequence does not fit the encoder's positional capacity.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested encoder backend cannot be constructed (unknown registry,
/// offline mode, unsupported trainable flag).
class EncoderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generic configuration problem: out-of-range layer, width mismatch,
/// missing data file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spanprobe
