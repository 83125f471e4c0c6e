#include "ykrl/nn/dense_net.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ykrl::nn {

DenseNet::DenseNet(std::vector<int> widths, std::vector<Activation> acts,
                   std::string name)
    : name_(std::move(name)), widths_(std::move(widths)), acts_(std::move(acts)) {
  if (widths_.size() < 2)
    throw std::invalid_argument("DenseNet: need at least input and output widths");
  if (acts_.size() != widths_.size() - 1)
    throw std::invalid_argument("DenseNet: one activation per layer required");
  for (int w : widths_)
    if (w <= 0) throw std::invalid_argument("DenseNet: widths must be positive");

  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    const int in = widths_[i];
    const int out = widths_[i + 1];
    weights_.emplace_back(name_ + ".W" + std::to_string(i),
                          Eigen::MatrixXd::Zero(out, in));
    biases_.emplace_back(name_ + ".b" + std::to_string(i),
                         Eigen::MatrixXd::Zero(out, 1));
  }
}

void DenseNet::init(Rng& rng) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[i]));
    for (Eigen::Index r = 0; r < weights_[i].value.rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[i].value.cols(); ++c)
        weights_[i].value(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < biases_[i].value.rows(); ++r)
      biases_[i].value(r, 0) = rng.uniform(-bound, bound);
  }
}

void DenseNet::check_input(Eigen::Index rows) const {
  if (rows != widths_.front()) {
    std::ostringstream os;
    os << name_ << ": input has " << rows << " rows, expected "
       << widths_.front();
    throw std::invalid_argument(os.str());
  }
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& x) const {
  check_input(x.rows());
  Eigen::MatrixXd h = x;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    Eigen::MatrixXd pre = (weights_[i].value * h).colwise() + biases_[i].value.col(0);
    const Activation act = acts_[i];
    h = pre.unaryExpr([act](double v) { return activate(act, v); });
  }
  return h;
}

Eigen::VectorXd DenseNet::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Tape::NodeId DenseNet::forward(Tape& tape, Tape::NodeId x) {
  check_input(tape.value(x).rows());
  Tape::NodeId h = x;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    h = tape.affine(weights_[i], biases_[i], h);
    h = tape.activation(acts_[i], h);
  }
  return h;
}

std::size_t DenseNet::param_count() const {
  std::size_t n = 0;
  for (const auto& w : weights_) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases_) n += static_cast<std::size_t>(b.size());
  return n;
}

std::vector<Param*> DenseNet::params() {
  std::vector<Param*> out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    out.push_back(&weights_[i]);
    out.push_back(&biases_[i]);
  }
  return out;
}

std::vector<const Param*> DenseNet::params() const {
  std::vector<const Param*> out;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    out.push_back(&weights_[i]);
    out.push_back(&biases_[i]);
  }
  return out;
}

}  // namespace ykrl::nn
