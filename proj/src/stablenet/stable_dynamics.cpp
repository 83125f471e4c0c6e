#include "ykrl/stablenet/stable_dynamics.hpp"

#include <stdexcept>

namespace ykrl::stablenet {

using nn::Activation;
using nn::Tape;

StableDynamics::StableDynamics(int dim, int fhat_hidden, int v_hidden,
                               double beta, double eps, std::string name)
    : dim_(dim),
      beta_(beta),
      fhat_({dim, fhat_hidden, fhat_hidden, dim},
            {Activation::kTanh, Activation::kTanh, Activation::kIdentity},
            name + ".fhat"),
      v_(dim, v_hidden, eps, name + ".V") {
  if (beta <= 0.0 || beta >= 1.0)
    throw std::invalid_argument("StableDynamics: beta must lie in (0,1)");
}

void StableDynamics::init(Rng& rng) {
  fhat_.init(rng);
  v_.init(rng);
}

Eigen::MatrixXd StableDynamics::candidate(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd raw = fhat_.forward(z);
  Eigen::MatrixXd at0 = fhat_.forward(Eigen::MatrixXd(Eigen::MatrixXd::Zero(dim_, 1)));
  return raw.colwise() - at0.col(0);
}

Eigen::MatrixXd StableDynamics::forward(const Eigen::MatrixXd& z) const {
  if (!z.allFinite())
    throw std::invalid_argument("StableDynamics: non-finite state");
  Eigen::MatrixXd f = candidate(z);
  Eigen::RowVectorXd vz = v_.value(z);
  Eigen::RowVectorXd vf = v_.value(f);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    if (vf(j) <= beta_ * vz(j)) continue;  // pass through untouched
    f.col(j) *= beta_ * vz(j) / vf(j);
  }
  if (!f.allFinite())
    throw std::runtime_error(
        "StableDynamics: non-finite corrected state (V(fhat)=" +
        std::to_string(vf(0)) + ")");
  return f;
}

Eigen::VectorXd StableDynamics::forward(const Eigen::VectorXd& z) const {
  return forward(Eigen::MatrixXd(z)).col(0);
}

Tape::NodeId StableDynamics::forward(nn::Tape& tape, Tape::NodeId z) {
  Tape::NodeId raw = fhat_.forward(tape, z);
  Tape::NodeId at0 =
      fhat_.forward(tape, tape.leaf(Eigen::MatrixXd::Zero(dim_, 1)));
  Tape::NodeId f = tape.sub_broadcast(raw, at0);
  Tape::NodeId vz = v_.value(tape, z);
  Tape::NodeId vf = v_.value(tape, f);
  return tape.stable_scale(f, vz, vf, beta_);
}

std::vector<nn::Param*> StableDynamics::params() {
  std::vector<nn::Param*> out = fhat_.params();
  for (nn::Param* p : v_.params()) out.push_back(p);
  return out;
}

}  // namespace ykrl::stablenet
