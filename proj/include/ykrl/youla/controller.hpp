#pragma once

#include <span>
#include <vector>

#include "ykrl/behavior/hankel.hpp"
#include "ykrl/youla/q_operator.hpp"

namespace ykrl::youla {

struct ComposeResult {
  double u = 0.0;
  bool clamped = false;
};

/// Incremental actuation u = clamp(u_prev + du_q + du_pid); a clamping event
/// is reported to the caller.
ComposeResult compose_incremental(double du_q, double du_pid, double u_prev,
                                  double lo, double hi);

/// Data-driven stabilizing controller: keeps a rolling length-L window of its
/// own past inputs paired with internal-model outputs, predicts the next
/// output through the Hankel model, and feeds e + y_pred to the stable Q
/// operator. The plant measurement enters only through the tracking error.
class Controller {
 public:
  /// Window defaults to all zeros. A supplied window must have length L.
  Controller(const behavior::HankelModel& model, QOperator& q,
             std::vector<double> initial_u = {},
             std::vector<double> initial_y = {});

  /// Window bookkeeping only; the caller drives its own Q operator through
  /// prepare()/commit(). control_step() is unavailable in this mode.
  explicit Controller(const behavior::HankelModel& model,
                      std::vector<double> initial_u = {},
                      std::vector<double> initial_y = {});

  struct Prepared {
    double y_pred = 0.0;
    double r_hat = 0.0;
  };

  /// Prediction and Q input for the current window; no state is modified.
  Prepared prepare(double e) const;

  /// Record an applied input and the prediction it was based on: the window
  /// shifts by one and appends (applied_u, y_pred).
  void commit(double applied_u, double y_pred);

  /// One full step: prepare, drive Q, commit, return the Q output.
  double control_step(double e);

  const std::vector<double>& window_inputs() const { return win_u_; }
  const std::vector<double>& window_outputs() const { return win_y_; }
  double last_input() const { return win_u_.back(); }
  const behavior::HankelModel& model() const { return *model_; }

  /// Zero the window and reset the Q operator.
  void reset();

 private:
  const behavior::HankelModel* model_;
  QOperator* q_;
  std::vector<double> win_u_, win_y_;
};

}  // namespace ykrl::youla
