#pragma once

#include <string>

#include "aggsim/errors.hpp"

namespace aggsim {

// Averaging step-size sequence for the forward-backward iteration. Two
// variants, both with divergent sum of alpha_t * (3/2 - alpha_t):
//   constant: alpha_t = abar in (0, 1]  (Krasnoselskij; required for the
//             logarithmic rate bound)
//   mann:     alpha_t = 1/(t+1)
class StepSchedule {
 public:
  static StepSchedule constant(double alpha_bar) {
    if (!(alpha_bar > 0.0) || !(alpha_bar <= 1.0))
      raise(ErrorCode::design_violation,
            "constant step size must lie in (0, 1]");
    StepSchedule s;
    s.constant_ = true;
    s.alpha_bar_ = alpha_bar;
    return s;
  }

  static StepSchedule mann() {
    StepSchedule s;
    s.constant_ = false;
    s.alpha_bar_ = 0.0;
    return s;
  }

  double alpha(long t) const {
    return constant_ ? alpha_bar_ : 1.0 / static_cast<double>(t + 1);
  }

  // Both variants satisfy sum alpha_t (3/2 - alpha_t) = inf by construction.
  bool divergent_sum() const { return true; }

  bool is_constant() const { return constant_; }
  double alpha_bar() const { return alpha_bar_; }

  std::string describe() const {
    return constant_ ? "constant(" + std::to_string(alpha_bar_) + ")"
                     : "mann";
  }

 private:
  StepSchedule() = default;
  bool constant_ = true;
  double alpha_bar_ = 1.0;
};

}  // namespace aggsim
