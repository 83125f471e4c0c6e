#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ykrl::nn {

/// Text checkpoint container: a versioned header, scalar metadata, then named
/// row-major arrays.
///
///   ykckpt 1
///   meta <key> <value>            (repeated)
///   array <name> <rows> <cols>    (followed by <rows> lines of <cols> values)
///   ...
///   end
struct Checkpoint {
  int version = 1;
  std::map<std::string, double> meta;
  std::map<std::string, Eigen::MatrixXd> arrays;

  const Eigen::MatrixXd& array(const std::string& name) const;
  double meta_value(const std::string& key) const;
};

void save_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, const Eigen::MatrixXd*>>& arrays,
    const std::map<std::string, double>& meta = {});

Checkpoint load_checkpoint(const std::string& path);

}  // namespace ykrl::nn
