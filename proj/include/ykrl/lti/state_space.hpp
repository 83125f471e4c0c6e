#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ykrl/rng.hpp"

namespace ykrl::lti {

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& a);

/// Discrete-time SISO state-space system
///   x' = A x + B u,   y = C x + D u
/// with a mutable internal state for step-by-step use.
class StateSpace {
 public:
  StateSpace(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::RowVectorXd c,
             double d);

  int order() const { return static_cast<int>(a_.rows()); }

  /// One recurrence step from the internal state.
  double step(double u);

  /// Exact rollout from x0; the internal state is left at its final value.
  std::vector<double> simulate(std::span<const double> u,
                               const Eigen::VectorXd& x0);

  void reset();
  void reset(const Eigen::VectorXd& x0);

  const Eigen::VectorXd& state() const { return x_; }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::RowVectorXd& c() const { return c_; }
  double d() const { return d_; }

  double spectral_radius() const { return lti::spectral_radius(a_); }
  bool is_stable() const { return spectral_radius() < 1.0; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::RowVectorXd c_;
  double d_;
  Eigen::VectorXd x_;
};

/// Random stable system for oracle tests: eigenvalues with moduli uniform in
/// [min_mod, max_mod] and random signs, conjugated by a random orthogonal
/// matrix; B and C are standard normal.
StateSpace random_stable_system(Rng& rng, int order, bool strictly_proper,
                                double min_mod = 0.1, double max_mod = 0.9);

/// Sum of |h_k| over the impulse response (truncated once the tail is
/// negligible); the induced l-infinity gain.
double l1_gain(const StateSpace& sys, int horizon = 4000);

/// Same dynamics with C and D scaled so the l1 gain equals `target`. Keeps
/// the interconnection of random test systems well-posed: a loop gain below
/// one makes bounded signals (and meaningful floating-point comparisons)
/// certain.
StateSpace scaled_to_l1_gain(const StateSpace& sys, double target);

/// Classical Youla-Kucera controller for a stable strictly proper plant P and
/// stable proper parameter Q, realized as u = Q(e + P u): the internal model's
/// current output is added to the tracking error, fed to Q, and both states
/// advance.
class YoulaControllerLti {
 public:
  YoulaControllerLti(StateSpace plant, StateSpace q);

  double step(double e);
  void reset();

  const StateSpace& plant() const { return plant_; }
  const StateSpace& q() const { return q_; }

 private:
  StateSpace plant_;
  StateSpace q_;
};

}  // namespace ykrl::lti
