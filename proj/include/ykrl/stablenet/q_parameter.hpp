#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ykrl/stablenet/stable_dynamics.hpp"

namespace ykrl::stablenet {

/// Control-affine stable operator used as the policy: a state-space model
/// whose transition replaces the nominal A matrix with stable dynamics,
///
///   z'   = f(z) + B r
///   du_q = C z + D r
///
/// The internal state decays autonomously (V(z_t) <= beta^t V(z_0) with zero
/// input), so the operator is stable for every parameter setting.
class QParameter {
 public:
  struct Options {
    int state_dim = 4;
    int fhat_hidden = 16;
    int v_hidden = 16;
    double beta = 0.99;
    double eps = 1e-3;
    double io_scale = 0.1;  // init scale of B and C; D starts at zero
  };

  QParameter(const Options& opts, Rng& rng, std::string name = "q");

  /// Advance one step: returns du_q = C z + D r and replaces z by f(z) + B r.
  double step(double r_hat);
  void reset();

  const Eigen::VectorXd& state() const { return z_; }
  void set_state(const Eigen::VectorXd& z);

  /// Stateless evaluations at a given (z, r) pair; used for replayed
  /// minibatches and target computations.
  double action_at(const Eigen::VectorXd& z, double r_hat) const;
  Eigen::VectorXd next_state_at(const Eigen::VectorXd& z, double r_hat) const;

  /// Batched graph versions. z is state_dim x B, r_hat is 1 x B.
  nn::Tape::NodeId action(nn::Tape& tape, nn::Tape::NodeId z,
                          nn::Tape::NodeId r_hat);
  nn::Tape::NodeId next_state(nn::Tape& tape, nn::Tape::NodeId z,
                              nn::Tape::NodeId r_hat);

  int state_dim() const { return opts_.state_dim; }
  const Options& options() const { return opts_; }
  StableDynamics& dynamics() { return dyn_; }
  const StableDynamics& dynamics() const { return dyn_; }

  std::vector<nn::Param*> params();

  /// Checkpoint payload: every trainable array plus (beta, eps, n_q) metadata.
  void save(const std::string& path) const;
  void load(const std::string& path);

 private:
  Options opts_;
  std::string name_;
  StableDynamics dyn_;
  nn::Param b_in_;   // state_dim x 1
  nn::Param c_out_;  // 1 x state_dim
  nn::Param d_ff_;   // 1 x 1
  Eigen::VectorXd z_;
};

}  // namespace ykrl::stablenet
