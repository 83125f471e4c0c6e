#include "ykrl/verify/fd_check.hpp"

#include <algorithm>
#include <cmath>

namespace ykrl::verify {

FdReport finite_difference_check(const std::vector<nn::Param*>& params,
                                 const std::function<double()>& loss_plain,
                                 const std::function<double()>& loss_and_grad,
                                 double step, double denom_floor) {
  loss_and_grad();
  std::vector<Eigen::MatrixXd> analytic;
  analytic.reserve(params.size());
  for (const nn::Param* p : params) analytic.push_back(p->grad);

  FdReport rep;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    nn::Param& p = *params[pi];
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        const double saved = p.value(r, c);
        p.value(r, c) = saved + step;
        const double up = loss_plain();
        p.value(r, c) = saved - step;
        const double down = loss_plain();
        p.value(r, c) = saved;
        const double fd = (up - down) / (2.0 * step);
        const double ad = analytic[pi](r, c);
        const double denom = std::max({std::abs(ad), std::abs(fd), denom_floor});
        rep.max_rel = std::max(rep.max_rel, std::abs(ad - fd) / denom);
        rep.max_abs = std::max(rep.max_abs, std::abs(ad - fd));
        ++rep.entries;
      }
    }
  }
  return rep;
}

}  // namespace ykrl::verify
