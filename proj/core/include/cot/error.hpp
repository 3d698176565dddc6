#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace cot {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kInfeasible,
  // Feasible in exact arithmetic, but a marginal sits on its capacity boundary so the
  // dual root is at infinity.
  kDegenerate,
  kDomain,
  kNewtonFailure,
  kKernelUnderflow,
  kSizeCap,
  kTimeBudget,
  kParse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  static constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

  Error(ErrorCode code, const std::string& what, std::size_t index = kNoIndex)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  // Row/column/cell the failure refers to, or kNoIndex.
  std::size_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::size_t index_;
};

}  // namespace cot
