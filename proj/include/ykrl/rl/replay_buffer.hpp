#pragma once

#include <Eigen/Core>
#include <vector>

#include "ykrl/rng.hpp"

namespace ykrl::rl {

struct Transition {
  Eigen::VectorXd s;
  double a = 0.0;
  double r = 0.0;
  Eigen::VectorXd s2;
  bool done = false;
};

/// Fixed-capacity ring buffer with uniform without-replacement minibatch
/// sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return data_[i]; }

  /// Batch of distinct indices drawn uniformly from the filled region.
  std::vector<const Transition*> sample(Rng& rng, std::size_t batch) const;
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t batch) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<Transition> data_;
};

}  // namespace ykrl::rl
