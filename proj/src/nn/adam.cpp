#include "ykrl/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ykrl::nn {

Adam::Adam(std::vector<Param*> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (params_.empty()) throw std::invalid_argument("Adam: empty parameter set");
  moments_.reserve(params_.size());
  for (const Param* p : params_)
    moments_.push_back({Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()),
                        Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols())});
}

bool Adam::step() {
  for (const Param* p : params_)
    if (!p->grad.allFinite()) return false;

  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Param& p = *params_[i];
    Moments& mo = moments_[i];
    mo.m = beta1_ * mo.m + (1.0 - beta1_) * p.grad;
    mo.v.array() = beta2_ * mo.v.array() + (1.0 - beta2_) * p.grad.array().square();
    p.value.array() -=
        lr_ * (mo.m.array() / bc1) / ((mo.v.array() / bc2).sqrt() + eps_);
  }
  return true;
}

void Adam::zero_grad() {
  for (Param* p : params_) p->zero_grad();
}

}  // namespace ykrl::nn
