#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>

namespace ykrl::nn {

/// A trainable array with its gradient accumulator. Gradients are accumulated
/// by Tape::backward and consumed by the optimizer; shapes never change after
/// construction.
struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Param() = default;
  Param(std::string n, Eigen::MatrixXd v)
      : name(std::move(n)),
        value(std::move(v)),
        grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

}  // namespace ykrl::nn
