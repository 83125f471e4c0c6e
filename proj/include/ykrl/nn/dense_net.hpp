#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ykrl/nn/tape.hpp"
#include "ykrl/rng.hpp"

namespace ykrl::nn {

/// Fully connected network: per layer an affine map followed by an elementwise
/// activation. Batched evaluation treats columns as independent samples.
class DenseNet {
 public:
  /// widths = {in, h1, ..., out}; acts has widths.size()-1 entries.
  DenseNet(std::vector<int> widths, std::vector<Activation> acts,
           std::string name = "net");

  /// Uniform init scaled by 1/sqrt(fan_in).
  void init(Rng& rng);

  /// Plain evaluation (no tape). x is in_width x batch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  /// Recorded evaluation on a tape.
  Tape::NodeId forward(Tape& tape, Tape::NodeId x);

  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }
  int layer_count() const { return static_cast<int>(acts_.size()); }
  const std::vector<int>& widths() const { return widths_; }
  Activation layer_activation(int layer) const { return acts_.at(layer); }

  std::size_t param_count() const;
  std::vector<Param*> params();
  std::vector<const Param*> params() const;

  const std::string& name() const { return name_; }

 private:
  void check_input(Eigen::Index rows) const;

  std::string name_;
  std::vector<int> widths_;
  std::vector<Activation> acts_;
  std::vector<Param> weights_;
  std::vector<Param> biases_;
};

}  // namespace ykrl::nn
