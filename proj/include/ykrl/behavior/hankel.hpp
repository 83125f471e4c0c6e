#pragma once

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/Cholesky>
#include <span>

#include "ykrl/behavior/trajectory.hpp"

namespace ykrl::behavior {

/// Hankel matrix of order L: entry (i,j) = z[i+j], giving L rows and
/// len(z)-L+1 columns.
Eigen::MatrixXd build_hankel(std::span<const double> z, int order);

/// Numerical-rank report of a depth-L Hankel matrix; `pass` means the rank
/// equals L (SISO persistent excitation of order L).
struct PeReport {
  int order = 0;
  int rank = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;  // smallest of the first `order` singular values
  bool pass = false;
};

PeReport pe_report(std::span<const double> z, int order,
                   double rel_tol = 1e-8);

bool is_persistently_exciting(std::span<const double> z, int order,
                              double rel_tol = 1e-8);

/// Data-driven internal model over a recorded trajectory of N samples:
/// H_L(u) and H_L(y) are built from samples 0..N-2 and the shifted H'_L(y)
/// from samples 1..N-1, so all three share N-L columns and one coefficient
/// vector alpha relates a length-L window to its successor output.
///
/// Construction requires the input to be persistently exciting of order
/// L + n + 1 with the order bound n taken as L.
class HankelModel {
 public:
  HankelModel(const Trajectory& data, int order, double ridge = 0.0);

  struct AlphaSolution {
    Eigen::VectorXd alpha;
    double residual = 0.0;
  };

  /// Minimum-norm least-squares solve of [H_L(u); H_L(y)] alpha = [ubar; ybar]
  /// (Tikhonov-regularized when ridge > 0); residual is the 2-norm defect.
  AlphaSolution solve_alpha(std::span<const double> u_window,
                            std::span<const double> y_window) const;

  /// Next output of the window: the last entry of H'_L(y) alpha.
  double predict_next_output(std::span<const double> u_window,
                             std::span<const double> y_window) const;

  int order() const { return order_; }
  int columns() const { return static_cast<int>(input_hankel_.cols()); }
  double ridge() const { return ridge_; }
  const Eigen::MatrixXd& input_hankel() const { return input_hankel_; }
  const Eigen::MatrixXd& output_hankel() const { return output_hankel_; }
  const Eigen::MatrixXd& shifted_output_hankel() const { return shifted_output_hankel_; }
  const PeReport& excitation_report() const { return pe_; }

 private:
  Eigen::VectorXd window_rhs(std::span<const double> u_window,
                             std::span<const double> y_window) const;

  int order_;
  double ridge_;
  PeReport pe_;
  Eigen::MatrixXd input_hankel_, output_hankel_, shifted_output_hankel_;
  Eigen::MatrixXd stacked_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> min_norm_;  // ridge == 0
  Eigen::LLT<Eigen::MatrixXd> gram_;                                  // ridge > 0
};

}  // namespace ykrl::behavior
