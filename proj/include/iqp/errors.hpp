#pragma once

#include <stdexcept>
#include <string>

namespace iqp {

/// Thrown when a requested computation exceeds a configured size cap
/// (state-space, path-sum or codeword-enumeration limits).
class InfeasibleError : public std::runtime_error {
  public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed input files (bad header, ragged rows, stray characters).
class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iqp
