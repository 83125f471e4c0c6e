#include "ykrl/behavior/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ykrl::behavior {

void Trajectory::validate() const {
  if (u.size() != y.size())
    throw std::invalid_argument("trajectory: input/output length mismatch");
  if (!(dt > 0.0))
    throw std::invalid_argument("trajectory: sample period must be positive");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("trajectory: non-finite sample at index " +
                                  std::to_string(i));
}

void Trajectory::save_csv(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("trajectory: cannot open " + path);
  out << "t,u,y\n";
  char buf[96];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g",
                  static_cast<double>(i) * dt, u[i], y[i]);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("trajectory: write failed for " + path);
}

Trajectory Trajectory::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trajectory: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,u,y")
    throw std::runtime_error("trajectory: expected header 't,u,y' in " + path);

  Trajectory traj;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t, u, y;
    char c1, c2;
    if (!(ss >> t >> c1 >> u >> c2 >> y) || c1 != ',' || c2 != ',')
      throw std::runtime_error("trajectory: malformed row in " + path + ": " +
                               line);
    times.push_back(t);
    traj.u.push_back(u);
    traj.y.push_back(y);
  }
  if (times.size() < 2)
    throw std::runtime_error("trajectory: need at least two rows in " + path);

  traj.dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - traj.dt) > 1e-9)
      throw std::runtime_error("trajectory: non-uniform sample period in " +
                               path);
  traj.validate();
  return traj;
}

}  // namespace ykrl::behavior
