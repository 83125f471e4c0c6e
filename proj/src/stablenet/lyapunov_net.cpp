#include "ykrl/stablenet/lyapunov_net.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ykrl::stablenet {

using nn::Activation;
using nn::Param;
using nn::Tape;

LyapunovNet::LyapunovNet(int input_dim, int hidden, double eps, std::string name)
    : input_dim_(input_dim), hidden_(hidden), eps_(eps), name_(std::move(name)) {
  if (input_dim <= 0 || hidden <= 0)
    throw std::invalid_argument("LyapunovNet: dimensions must be positive");
  if (eps <= 0.0)
    throw std::invalid_argument("LyapunovNet: eps must be positive");
  wy0_ = Param(name_ + ".Wy0", Eigen::MatrixXd::Zero(hidden, input_dim));
  b0_ = Param(name_ + ".b0", Eigen::MatrixXd::Zero(hidden, 1));
  wz1_raw_ = Param(name_ + ".Wz1", Eigen::MatrixXd::Zero(hidden, hidden));
  wy1_ = Param(name_ + ".Wy1", Eigen::MatrixXd::Zero(hidden, input_dim));
  b1_ = Param(name_ + ".b1", Eigen::MatrixXd::Zero(hidden, 1));
  wz2_raw_ = Param(name_ + ".Wz2", Eigen::MatrixXd::Zero(1, hidden));
  wy2_ = Param(name_ + ".Wy2", Eigen::MatrixXd::Zero(1, input_dim));
  b2_ = Param(name_ + ".b2", Eigen::MatrixXd::Zero(1, 1));
}

void LyapunovNet::init(Rng& rng) {
  auto fill = [&rng](Param& p, double bound) {
    for (Eigen::Index r = 0; r < p.value.rows(); ++r)
      for (Eigen::Index c = 0; c < p.value.cols(); ++c)
        p.value(r, c) = rng.uniform(-bound, bound);
  };
  const double b_in = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  const double b_h = 1.0 / std::sqrt(static_cast<double>(hidden_));
  fill(wy0_, b_in);
  fill(b0_, b_in);
  fill(wz1_raw_, b_h);
  fill(wy1_, b_in);
  fill(b1_, b_h);
  fill(wz2_raw_, b_h);
  fill(wy2_, b_in);
  fill(b2_, b_h);
}

void LyapunovNet::check_input(Eigen::Index rows) const {
  if (rows != input_dim_) {
    std::ostringstream os;
    os << name_ << ": input has " << rows << " rows, expected " << input_dim_;
    throw std::invalid_argument(os.str());
  }
}

// Operation order mirrors the tape path so plain and recorded evaluation
// agree bitwise.
Eigen::RowVectorXd LyapunovNet::body(const Eigen::MatrixXd& z) const {
  auto sr = [](double v) { return nn::smooth_relu(v); };
  auto sp = [](double v) { return nn::softplus(v); };
  Eigen::MatrixXd pre0 = (wy0_.value * z).colwise() + b0_.value.col(0);
  Eigen::MatrixXd h0 = pre0.unaryExpr(sr);
  Eigen::MatrixXd skip1 = (wy1_.value * z).colwise() + b1_.value.col(0);
  Eigen::MatrixXd pre1 = wz1_raw_.value.unaryExpr(sp) * h0 + skip1;
  Eigen::MatrixXd h1 = pre1.unaryExpr(sr);
  Eigen::MatrixXd skip2 = (wy2_.value * z).colwise() + b2_.value.col(0);
  Eigen::MatrixXd g = wz2_raw_.value.unaryExpr(sp) * h1 + skip2;
  return g.row(0);
}

double LyapunovNet::value(const Eigen::VectorXd& z) const {
  return value(Eigen::MatrixXd(z))(0);
}

Eigen::RowVectorXd LyapunovNet::value(const Eigen::MatrixXd& z) const {
  check_input(z.rows());
  if (!z.allFinite())
    throw std::invalid_argument(name_ + ": non-finite input");
  const Eigen::RowVectorXd g = body(z);
  const double g0 = body(Eigen::MatrixXd::Zero(input_dim_, 1))(0);
  Eigen::RowVectorXd out(z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    out(j) = nn::smooth_relu(g(j) - g0) + eps_ * z.col(j).squaredNorm();
  return out;
}

Tape::NodeId LyapunovNet::value(nn::Tape& tape, Tape::NodeId z) {
  check_input(tape.value(z).rows());
  auto body_of = [this, &tape](Tape::NodeId in) {
    Tape::NodeId h0 = tape.activation(Activation::kSmoothRelu,
                                      tape.affine(wy0_, b0_, in));
    Tape::NodeId pre1 = tape.add(tape.nonneg_matvec(wz1_raw_, h0),
                                 tape.affine(wy1_, b1_, in));
    Tape::NodeId h1 = tape.activation(Activation::kSmoothRelu, pre1);
    return tape.add(tape.nonneg_matvec(wz2_raw_, h1),
                    tape.affine(wy2_, b2_, in));
  };
  Tape::NodeId g = body_of(z);
  Tape::NodeId g0 =
      body_of(tape.leaf(Eigen::MatrixXd::Zero(input_dim_, 1)));
  Tape::NodeId centered = tape.sub_broadcast(g, g0);
  Tape::NodeId positive = tape.activation(Activation::kSmoothRelu, centered);
  return tape.add(positive, tape.scale(tape.col_sqnorm(z), eps_));
}

std::vector<Param*> LyapunovNet::params() {
  return {&wy0_, &b0_, &wz1_raw_, &wy1_, &b1_, &wz2_raw_, &wy2_, &b2_};
}

std::vector<const Param*> LyapunovNet::params() const {
  return {&wy0_, &b0_, &wz1_raw_, &wy1_, &b1_, &wz2_raw_, &wy2_, &b2_};
}

}  // namespace ykrl::stablenet
