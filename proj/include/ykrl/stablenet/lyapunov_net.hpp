#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ykrl/nn/tape.hpp"
#include "ykrl/rng.hpp"

namespace ykrl::stablenet {

/// Lyapunov candidate built from an input-convex network body g:
///
///   V(z) = smooth_relu(g(z) - g(0)) + eps * ||z||^2
///
/// The body follows the ICNN recipe: hidden-to-hidden weights are stored raw
/// and passed through softplus at evaluation (so they act nonnegatively while
/// the parameter space stays unconstrained), every hidden activation is convex
/// and nondecreasing, and each hidden layer gets a direct skip from the input.
/// By construction V(0) = 0 exactly, V(z) >= eps||z||^2, and V is convex,
/// which yields V(gamma z) <= gamma V(z) for gamma in [0,1].
class LyapunovNet {
 public:
  LyapunovNet(int input_dim, int hidden, double eps, std::string name = "V");

  void init(Rng& rng);

  double value(const Eigen::VectorXd& z) const;
  /// Column-wise values: n x B -> 1 x B.
  Eigen::RowVectorXd value(const Eigen::MatrixXd& z) const;
  nn::Tape::NodeId value(nn::Tape& tape, nn::Tape::NodeId z);

  int input_dim() const { return input_dim_; }
  double eps() const { return eps_; }
  std::vector<nn::Param*> params();
  std::vector<const nn::Param*> params() const;

 private:
  Eigen::RowVectorXd body(const Eigen::MatrixXd& z) const;
  void check_input(Eigen::Index rows) const;

  int input_dim_;
  int hidden_;
  double eps_;
  std::string name_;

  nn::Param wy0_, b0_;                    // input layer
  nn::Param wz1_raw_, wy1_, b1_;          // hidden layer with nonneg path
  nn::Param wz2_raw_, wy2_, b2_;          // scalar output layer
};

}  // namespace ykrl::stablenet
