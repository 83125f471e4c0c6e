#include "ykrl/behavior/hankel.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ykrl::behavior {

Eigen::MatrixXd build_hankel(std::span<const double> z, int order) {
  const int n = static_cast<int>(z.size());
  if (order <= 0) throw std::invalid_argument("build_hankel: order must be positive");
  if (order > n) {
    std::ostringstream os;
    os << "build_hankel: order " << order << " exceeds sequence length " << n;
    throw std::invalid_argument(os.str());
  }
  const int cols = n - order + 1;
  Eigen::MatrixXd h(order, cols);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < cols; ++j) h(i, j) = z[static_cast<size_t>(i + j)];
  return h;
}

PeReport pe_report(std::span<const double> z, int order, double rel_tol) {
  const Eigen::MatrixXd h = build_hankel(z, order);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const Eigen::VectorXd& s = svd.singularValues();
  PeReport rep;
  rep.order = order;
  rep.sigma_max = s.size() > 0 ? s(0) : 0.0;
  const double thresh = rel_tol * rep.sigma_max;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thresh) ++rank;
  rep.rank = rank;
  rep.sigma_min = s(std::min<Eigen::Index>(order, s.size()) - 1);
  rep.pass = rank == order;
  return rep;
}

bool is_persistently_exciting(std::span<const double> z, int order,
                              double rel_tol) {
  return pe_report(z, order, rel_tol).pass;
}

HankelModel::HankelModel(const Trajectory& data, int order, double ridge)
    : order_(order), ridge_(ridge) {
  data.validate();
  const int n = static_cast<int>(data.size());
  if (order <= 0) throw std::invalid_argument("HankelModel: order must be positive");
  if (ridge < 0.0) throw std::invalid_argument("HankelModel: ridge must be nonnegative");
  // One extra sample is consumed by the shifted output matrix.
  if (n < 2 * order + 2)
    throw std::invalid_argument("HankelModel: record too short for order " +
                                std::to_string(order));

  // Corollary hypothesis with the order bound n := L.
  const int pe_order = 2 * order + 1;
  pe_ = pe_report(std::span<const double>(data.u), pe_order);
  if (!pe_.pass) {
    std::ostringstream os;
    os << "HankelModel: input not persistently exciting of order " << pe_order
       << " (rank " << pe_.rank << " of " << pe_order << ", sigma margin "
       << (pe_.sigma_max > 0 ? pe_.sigma_min / pe_.sigma_max : 0.0) << ")";
    throw std::invalid_argument(os.str());
  }

  std::span<const double> u(data.u);
  std::span<const double> y(data.y);
  input_hankel_ = build_hankel(u.subspan(0, n - 1), order);
  output_hankel_ = build_hankel(y.subspan(0, n - 1), order);
  shifted_output_hankel_ = build_hankel(y.subspan(1, n - 1), order);

  stacked_.resize(2 * order, input_hankel_.cols());
  stacked_.topRows(order) = input_hankel_;
  stacked_.bottomRows(order) = output_hankel_;

  if (ridge_ == 0.0) {
    min_norm_.setThreshold(1e-8);
    min_norm_.compute(stacked_);
  } else {
    Eigen::MatrixXd g = stacked_ * stacked_.transpose();
    g.diagonal().array() += ridge_;
    gram_.compute(g);
    if (gram_.info() != Eigen::Success)
      throw std::runtime_error("HankelModel: ridge Gram factorization failed");
  }
}

Eigen::VectorXd HankelModel::window_rhs(std::span<const double> u_window,
                                        std::span<const double> y_window) const {
  if (static_cast<int>(u_window.size()) != order_ ||
      static_cast<int>(y_window.size()) != order_) {
    std::ostringstream os;
    os << "HankelModel: window length (" << u_window.size() << ", "
       << y_window.size() << ") must equal order " << order_;
    throw std::invalid_argument(os.str());
  }
  Eigen::VectorXd rhs(2 * order_);
  for (int i = 0; i < order_; ++i) {
    if (!std::isfinite(u_window[i]) || !std::isfinite(y_window[i]))
      throw std::invalid_argument("HankelModel: non-finite window sample");
    rhs(i) = u_window[i];
    rhs(order_ + i) = y_window[i];
  }
  return rhs;
}

HankelModel::AlphaSolution HankelModel::solve_alpha(
    std::span<const double> u_window, std::span<const double> y_window) const {
  const Eigen::VectorXd rhs = window_rhs(u_window, y_window);
  AlphaSolution sol;
  if (ridge_ == 0.0) {
    sol.alpha = min_norm_.solve(rhs);
  } else {
    sol.alpha = stacked_.transpose() * gram_.solve(rhs);
  }
  sol.residual = (stacked_ * sol.alpha - rhs).norm();
  return sol;
}

double HankelModel::predict_next_output(std::span<const double> u_window,
                                        std::span<const double> y_window) const {
  const AlphaSolution sol = solve_alpha(u_window, y_window);
  return shifted_output_hankel_.row(order_ - 1).dot(sol.alpha);
}

}  // namespace ykrl::behavior
