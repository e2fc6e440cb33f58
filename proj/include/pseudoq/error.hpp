#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pseudoq {

/// Base class for every failure raised by the library. The CLI maps these
/// onto exit code 2 (data error); argument problems are reported separately.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed TREC document/topic/qrels/run input.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_ = 0;
};

/// Inputs that are well-formed but violate a precondition (duplicate docno,
/// empty query, renderer outside its candidate set, ...).
class DataError : public Error {
  public:
    using Error::Error;
};

/// A persisted artifact does not match the corpus or parameters it is
/// loaded against.
class ArtifactMismatch : public Error {
  public:
    using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace pseudoq
