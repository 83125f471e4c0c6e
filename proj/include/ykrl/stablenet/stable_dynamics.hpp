#pragma once

#include <Eigen/Core>

#include "ykrl/nn/dense_net.hpp"
#include "ykrl/stablenet/lyapunov_net.hpp"

namespace ykrl::stablenet {

/// Stable-by-design state transition: a smooth candidate map fhat (with
/// fhat(0) = 0 enforced by subtracting the network's value at the origin) is
/// corrected in closed form so that V decreases geometrically:
///
///   f(z) = fhat(z)                       if V(fhat(z)) <= beta V(z)
///        = (beta V(z) / V(fhat(z))) fhat(z)   otherwise
///
/// Convexity of V with V(0)=0 gives V(f(z)) <= beta V(z) for every weight
/// setting. The scale's dependence on the parameters is differentiated
/// through.
class StableDynamics {
 public:
  StableDynamics(int dim, int fhat_hidden, int v_hidden, double beta,
                 double eps, std::string name = "dyn");

  void init(Rng& rng);

  /// Candidate map with the origin pinned: net(z) - net(0).
  Eigen::MatrixXd candidate(const Eigen::MatrixXd& z) const;

  /// Corrected map. Plain evaluation; columns are independent states.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& z) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& z) const;

  nn::Tape::NodeId forward(nn::Tape& tape, nn::Tape::NodeId z);

  int dim() const { return dim_; }
  double beta() const { return beta_; }
  LyapunovNet& lyapunov() { return v_; }
  const LyapunovNet& lyapunov() const { return v_; }
  nn::DenseNet& candidate_net() { return fhat_; }

  std::vector<nn::Param*> params();

 private:
  int dim_;
  double beta_;
  nn::DenseNet fhat_;
  LyapunovNet v_;
};

}  // namespace ykrl::stablenet
