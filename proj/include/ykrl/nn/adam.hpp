#pragma once

#include <Eigen/Core>
#include <vector>

#include "ykrl/nn/param.hpp"

namespace ykrl::nn {

/// Adam optimizer over a fixed parameter set. step() consumes the gradients
/// accumulated in each Param and applies the standard bias-corrected update
/// for minimization.
class Adam {
 public:
  explicit Adam(std::vector<Param*> params, double lr = 1e-3,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Returns false (and leaves parameters, moments and the step count
  /// untouched) if any gradient entry is non-finite.
  bool step();

  void zero_grad();

  long step_count() const { return step_count_; }
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }

 private:
  struct Moments {
    Eigen::MatrixXd m;
    Eigen::MatrixXd v;
  };

  std::vector<Param*> params_;
  std::vector<Moments> moments_;
  double lr_, beta1_, beta2_, eps_;
  long step_count_ = 0;
};

}  // namespace ykrl::nn
