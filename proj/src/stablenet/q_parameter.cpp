#include "ykrl/stablenet/q_parameter.hpp"

#include <cmath>
#include <stdexcept>

#include "ykrl/nn/checkpoint.hpp"

namespace ykrl::stablenet {

using nn::Param;
using nn::Tape;

QParameter::QParameter(const Options& opts, Rng& rng, std::string name)
    : opts_(opts),
      name_(std::move(name)),
      dyn_(opts.state_dim, opts.fhat_hidden, opts.v_hidden, opts.beta,
           opts.eps, name_),
      z_(Eigen::VectorXd::Zero(opts.state_dim)) {
  dyn_.init(rng);
  b_in_ = Param(name_ + ".B", Eigen::MatrixXd::Zero(opts_.state_dim, 1));
  c_out_ = Param(name_ + ".C", Eigen::MatrixXd::Zero(1, opts_.state_dim));
  d_ff_ = Param(name_ + ".D", Eigen::MatrixXd::Zero(1, 1));
  for (Eigen::Index i = 0; i < opts_.state_dim; ++i) {
    b_in_.value(i, 0) = rng.uniform(-opts_.io_scale, opts_.io_scale);
    c_out_.value(0, i) = rng.uniform(-opts_.io_scale, opts_.io_scale);
  }
}

double QParameter::step(double r_hat) {
  if (!std::isfinite(r_hat))
    throw std::invalid_argument(name_ + ": non-finite input to Q parameter");
  const double du = action_at(z_, r_hat);
  z_ = next_state_at(z_, r_hat);
  return du;
}

void QParameter::reset() { z_.setZero(); }

void QParameter::set_state(const Eigen::VectorXd& z) {
  if (z.size() != opts_.state_dim)
    throw std::invalid_argument(name_ + ": state dimension mismatch");
  z_ = z;
}

double QParameter::action_at(const Eigen::VectorXd& z, double r_hat) const {
  return (c_out_.value * z)(0, 0) + d_ff_.value(0, 0) * r_hat;
}

Eigen::VectorXd QParameter::next_state_at(const Eigen::VectorXd& z,
                                          double r_hat) const {
  return dyn_.forward(z) + b_in_.value.col(0) * r_hat;
}

Tape::NodeId QParameter::action(nn::Tape& tape, Tape::NodeId z,
                                Tape::NodeId r_hat) {
  return tape.add(tape.matvec(c_out_, z), tape.matvec(d_ff_, r_hat));
}

Tape::NodeId QParameter::next_state(nn::Tape& tape, Tape::NodeId z,
                                    Tape::NodeId r_hat) {
  return tape.add(dyn_.forward(tape, z), tape.matvec(b_in_, r_hat));
}

std::vector<Param*> QParameter::params() {
  std::vector<Param*> out = dyn_.params();
  out.push_back(&b_in_);
  out.push_back(&c_out_);
  out.push_back(&d_ff_);
  return out;
}

void QParameter::save(const std::string& path) const {
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> arrays;
  auto* self = const_cast<QParameter*>(this);
  for (Param* p : self->params()) arrays.emplace_back(p->name, &p->value);
  nn::save_checkpoint(path, arrays,
                      {{"beta", opts_.beta},
                       {"eps", opts_.eps},
                       {"n_q", static_cast<double>(opts_.state_dim)}});
}

void QParameter::load(const std::string& path) {
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  if (static_cast<int>(ck.meta_value("n_q")) != opts_.state_dim)
    throw std::runtime_error(name_ + ": checkpoint state dimension mismatch");
  for (Param* p : params()) {
    const Eigen::MatrixXd& a = ck.array(p->name);
    if (a.rows() != p->value.rows() || a.cols() != p->value.cols())
      throw std::runtime_error(name_ + ": checkpoint shape mismatch for " +
                               p->name);
    p->value = a;
  }
  reset();
}

}  // namespace ykrl::stablenet
