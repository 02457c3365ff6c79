#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace haplodrift {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  KitMismatch,
  Supercritical,
  ZeroPosterior,
  Extinction,
  Io,
  Infeasible,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this type; `code()` is stable
/// and is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace haplodrift
