#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace entropykit {

enum class ErrorKind {
  Io,
  CorruptInput,
  InvalidArgument,
  InsufficientData,
  NoStationaryDistribution,
  ReducibleChain,
  InfiniteEntropyProduction,
  Diverged,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io error";
    case ErrorKind::CorruptInput: return "corrupt input";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::NoStationaryDistribution: return "no stationary distribution";
    case ErrorKind::ReducibleChain: return "reducible chain";
    case ErrorKind::InfiniteEntropyProduction: return "infinite entropy production";
    case ErrorKind::Diverged: return "diverged";
  }
  return "unknown";
}

// Every fallible library call throws this; `kind()` lets callers tell a
// missing feature (InsufficientData) apart from a hard failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace entropykit
