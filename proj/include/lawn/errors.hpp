#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lawn {

/// Invalid configuration document or parameter block. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (unknown node id, wrong role,
/// oversized brute-force instance, ...). Maps to CLI exit code 3.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical failure that is not a caller error (e.g. a singular GP system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the experiment runner; carries the seed whose engine call failed.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::uint64_t seed, const std::string& what)
      : std::runtime_error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace lawn
