#pragma once

#include <stdexcept>
#include <string>

namespace aggsim {

// Error taxonomy shared by the library and the C interface.
enum class ErrorCode {
  invalid_input = 1,
  parse = 2,
  design_violation = 3,
  infeasible_set = 4,
  solver_stall = 5,
  oracle_stall = 6,
  diverged = 7,
  io = 8,
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace aggsim
