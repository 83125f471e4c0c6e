#include "ykrl/rl/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace ykrl::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0)
    throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  data_.resize(capacity);
}

void ReplayBuffer::add(Transition t) {
  if (!t.s.allFinite() || !t.s2.allFinite() || !std::isfinite(t.a) ||
      !std::isfinite(t.r))
    throw std::invalid_argument("ReplayBuffer: non-finite transition");
  data_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(Rng& rng,
                                                      std::size_t batch) const {
  if (batch > size_)
    throw std::invalid_argument("ReplayBuffer: batch exceeds stored samples");
  // Floyd's algorithm: distinct uniform indices.
  std::vector<std::size_t> out;
  out.reserve(batch);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    const std::size_t k = rng.uniform_index(j + 1);
    bool present = false;
    for (std::size_t v : out)
      if (v == k) {
        present = true;
        break;
      }
    out.push_back(present ? j : k);
  }
  return out;
}

std::vector<const Transition*> ReplayBuffer::sample(Rng& rng,
                                                    std::size_t batch) const {
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (std::size_t i : sample_indices(rng, batch)) out.push_back(&data_[i]);
  return out;
}

}  // namespace ykrl::rl
