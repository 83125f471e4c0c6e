#pragma once

#include "ykrl/lti/state_space.hpp"
#include "ykrl/stablenet/q_parameter.hpp"

namespace ykrl::youla {

/// Any stable operator the data-driven controller can wrap: one input,
/// one output, mutable internal state.
class QOperator {
 public:
  virtual ~QOperator() = default;
  virtual double step(double r_hat) = 0;
  virtual void reset() = 0;
};

/// LTI parameter, used for the equivalence verification against the classical
/// controller.
class LtiQ : public QOperator {
 public:
  explicit LtiQ(lti::StateSpace q) : q_(std::move(q)) {}
  double step(double r_hat) override { return q_.step(r_hat); }
  void reset() override { q_.reset(); }
  const lti::StateSpace& system() const { return q_; }

 private:
  lti::StateSpace q_;
};

/// Neural stable operator (non-owning view of the trained policy).
class NeuralQ : public QOperator {
 public:
  explicit NeuralQ(stablenet::QParameter& q) : q_(&q) {}
  double step(double r_hat) override { return q_->step(r_hat); }
  void reset() override { q_->reset(); }

 private:
  stablenet::QParameter* q_;
};

}  // namespace ykrl::youla
