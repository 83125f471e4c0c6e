#pragma once

#include <functional>
#include <vector>

#include "ykrl/nn/param.hpp"

namespace ykrl::verify {

struct FdReport {
  double max_rel = 0.0;
  double max_abs = 0.0;
  long entries = 0;
};

/// Central finite-difference check of reverse-accumulation gradients.
/// `loss_and_grad` must zero and then fill every Param::grad and return the
/// loss; `loss_plain` must evaluate the same scalar without touching
/// gradients. Relative error uses max(|ad|, |fd|, denom_floor) in the
/// denominator.
FdReport finite_difference_check(const std::vector<nn::Param*>& params,
                                 const std::function<double()>& loss_plain,
                                 const std::function<double()>& loss_and_grad,
                                 double step = 1e-5,
                                 double denom_floor = 1e-2);

}  // namespace ykrl::verify
