#pragma once

#include <string>
#include <vector>

namespace ykrl::behavior {

/// Paired input-output record with a fixed sample period; the raw material of
/// the behavioral model. Stored as CSV with header `t,u,y`.
struct Trajectory {
  std::vector<double> u;
  std::vector<double> y;
  double dt = 1.0;

  std::size_t size() const { return u.size(); }

  /// Throws unless lengths match, samples are finite and dt > 0.
  void validate() const;

  void save_csv(const std::string& path) const;
  static Trajectory load_csv(const std::string& path);
};

}  // namespace ykrl::behavior
