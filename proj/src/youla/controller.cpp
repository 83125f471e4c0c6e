#include "ykrl/youla/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ykrl::youla {

ComposeResult compose_incremental(double du_q, double du_pid, double u_prev,
                                  double lo, double hi) {
  if (!std::isfinite(du_q) || !std::isfinite(du_pid) || !std::isfinite(u_prev))
    throw std::invalid_argument("compose_incremental: non-finite input");
  ComposeResult res;
  const double raw = u_prev + du_q + du_pid;
  res.u = std::clamp(raw, lo, hi);
  res.clamped = res.u != raw;
  return res;
}

Controller::Controller(const behavior::HankelModel& model, QOperator& q,
                       std::vector<double> initial_u,
                       std::vector<double> initial_y)
    : Controller(model, std::move(initial_u), std::move(initial_y)) {
  q_ = &q;
  q_->reset();
}

Controller::Controller(const behavior::HankelModel& model,
                       std::vector<double> initial_u,
                       std::vector<double> initial_y)
    : model_(&model), q_(nullptr) {
  const auto order = static_cast<std::size_t>(model.order());
  if (initial_u.empty() && initial_y.empty()) {
    win_u_.assign(order, 0.0);
    win_y_.assign(order, 0.0);
  } else {
    if (initial_u.size() != order || initial_y.size() != order)
      throw std::invalid_argument(
          "Controller: initial window length must equal the model order");
    win_u_ = std::move(initial_u);
    win_y_ = std::move(initial_y);
  }
  for (std::size_t i = 0; i < order; ++i)
    if (!std::isfinite(win_u_[i]) || !std::isfinite(win_y_[i]))
      throw std::invalid_argument("Controller: non-finite initial window");
}

Controller::Prepared Controller::prepare(double e) const {
  if (!std::isfinite(e))
    throw std::invalid_argument("Controller: non-finite tracking error");
  Prepared p;
  p.y_pred = model_->predict_next_output(win_u_, win_y_);
  p.r_hat = e + p.y_pred;
  return p;
}

void Controller::commit(double applied_u, double y_pred) {
  if (!std::isfinite(applied_u) || !std::isfinite(y_pred))
    throw std::invalid_argument("Controller: non-finite window update");
  win_u_.erase(win_u_.begin());
  win_u_.push_back(applied_u);
  win_y_.erase(win_y_.begin());
  win_y_.push_back(y_pred);
}

double Controller::control_step(double e) {
  if (!q_)
    throw std::logic_error(
        "Controller: control_step requires a Q operator; this controller was "
        "built in window-only mode");
  const Prepared p = prepare(e);
  const double u = q_->step(p.r_hat);
  commit(u, p.y_pred);
  return u;
}

void Controller::reset() {
  std::fill(win_u_.begin(), win_u_.end(), 0.0);
  std::fill(win_y_.begin(), win_y_.end(), 0.0);
  if (q_) q_->reset();
}

}  // namespace ykrl::youla
