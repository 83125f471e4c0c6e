#include "ykrl/lti/state_space.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ykrl::lti {

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

StateSpace::StateSpace(Eigen::MatrixXd a, Eigen::VectorXd b,
                       Eigen::RowVectorXd c, double d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d) {
  if (a_.rows() != a_.cols())
    throw std::invalid_argument("StateSpace: A must be square");
  if (b_.size() != a_.rows() || c_.size() != a_.rows()) {
    std::ostringstream os;
    os << "StateSpace: B (" << b_.size() << ") and C (" << c_.size()
       << ") must match order " << a_.rows();
    throw std::invalid_argument(os.str());
  }
  x_ = Eigen::VectorXd::Zero(a_.rows());
}

double StateSpace::step(double u) {
  if (!std::isfinite(u))
    throw std::invalid_argument("StateSpace: non-finite input");
  const double y = c_.dot(x_) + d_ * u;
  x_ = a_ * x_ + b_ * u;
  return y;
}

std::vector<double> StateSpace::simulate(std::span<const double> u,
                                         const Eigen::VectorXd& x0) {
  reset(x0);
  std::vector<double> y;
  y.reserve(u.size());
  for (double ut : u) y.push_back(step(ut));
  return y;
}

void StateSpace::reset() { x_.setZero(); }

void StateSpace::reset(const Eigen::VectorXd& x0) {
  if (x0.size() != a_.rows())
    throw std::invalid_argument("StateSpace: initial state dimension mismatch");
  x_ = x0;
}

StateSpace random_stable_system(Rng& rng, int order, bool strictly_proper,
                                double min_mod, double max_mod) {
  if (order <= 0) throw std::invalid_argument("random_stable_system: order must be positive");
  Eigen::VectorXd eigs(order);
  for (int i = 0; i < order; ++i) {
    const double mod = rng.uniform(min_mod, max_mod);
    eigs(i) = rng.uniform() < 0.5 ? -mod : mod;
  }
  Eigen::MatrixXd g(order, order);
  for (int r = 0; r < order; ++r)
    for (int c = 0; c < order; ++c) g(r, c) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd a = q * eigs.asDiagonal() * q.transpose();

  Eigen::VectorXd b(order);
  Eigen::RowVectorXd c(order);
  for (int i = 0; i < order; ++i) {
    b(i) = rng.gaussian();
    c(i) = rng.gaussian();
  }
  const double d = strictly_proper ? 0.0 : 0.5 * rng.gaussian();
  return StateSpace(std::move(a), std::move(b), std::move(c), d);
}

double l1_gain(const StateSpace& sys, int horizon) {
  double total = std::abs(sys.d());
  Eigen::VectorXd v = sys.b();
  for (int k = 1; k < horizon; ++k) {
    const double h = sys.c().dot(v);
    total += std::abs(h);
    v = sys.a() * v;
    if (v.lpNorm<Eigen::Infinity>() < 1e-300) break;
  }
  return total;
}

StateSpace scaled_to_l1_gain(const StateSpace& sys, double target) {
  const double gain = l1_gain(sys);
  if (gain <= 0.0)
    throw std::invalid_argument("scaled_to_l1_gain: zero-gain system");
  const double s = target / gain;
  return StateSpace(sys.a(), sys.b(), Eigen::RowVectorXd(s * sys.c()),
                    s * sys.d());
}

YoulaControllerLti::YoulaControllerLti(StateSpace plant, StateSpace q)
    : plant_(std::move(plant)), q_(std::move(q)) {
  if (plant_.d() != 0.0)
    throw std::invalid_argument(
        "YoulaControllerLti: plant must be strictly proper (D = 0)");
  if (!plant_.is_stable())
    throw std::invalid_argument("YoulaControllerLti: plant must be stable");
  if (!q_.is_stable())
    throw std::invalid_argument("YoulaControllerLti: Q must be stable");
}

double YoulaControllerLti::step(double e) {
  if (!std::isfinite(e))
    throw std::invalid_argument("YoulaControllerLti: non-finite error");
  // Internal model output before the current input is applied (P is strictly
  // proper, so y_p depends only on past u).
  const double y_model = plant_.c().dot(plant_.state());
  const double r_hat = e + y_model;
  const double u = q_.step(r_hat);
  plant_.step(u);  // advances the model state with the chosen input
  return u;
}

void YoulaControllerLti::reset() {
  plant_.reset();
  q_.reset();
}

}  // namespace ykrl::lti
