#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace paraprobe {

// Base for every error the harness raises deliberately. The CLI maps each
// subclass onto its own exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input file is structurally unusable (missing header, bad canonical TSV).
class FormatError : public Error {
public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
  using Error::Error;
};

// An output file or directory could not be written.
class OutputError : public IoError {
public:
  using IoError::IoError;
};

// Invalid user configuration (threshold, bin edges, probe names...).
class ConfigError : public Error {
public:
  using Error::Error;
};

// A probe was handed data it cannot evaluate, e.g. unlabeled pairs.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// The external scorer broke the wire contract. pair_id() names the request
// that triggered it when one is known.
class ProtocolError : public Error {
public:
  explicit ProtocolError(const std::string& what, std::string pair_id = {})
      : Error(pair_id.empty() ? what : what + " (pair id '" + pair_id + "')"),
        pair_id_(std::move(pair_id)) {}

  const std::string& pair_id() const noexcept { return pair_id_; }

private:
  std::string pair_id_;
};

}  // namespace paraprobe
