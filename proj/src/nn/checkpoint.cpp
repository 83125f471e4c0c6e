#include "ykrl/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ykrl::nn {

const Eigen::MatrixXd& Checkpoint::array(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end())
    throw std::invalid_argument("checkpoint: missing array " + name);
  return it->second;
}

double Checkpoint::meta_value(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end())
    throw std::invalid_argument("checkpoint: missing meta key " + key);
  return it->second;
}

void save_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, const Eigen::MatrixXd*>>& arrays,
    const std::map<std::string, double>& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out << "ykckpt 1\n";
  char buf[32];
  for (const auto& [key, value] : meta) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << "meta " << key << " " << buf << "\n";
  }
  for (const auto& [name, mat] : arrays) {
    out << "array " << name << " " << mat->rows() << " " << mat->cols() << "\n";
    for (Eigen::Index r = 0; r < mat->rows(); ++r) {
      for (Eigen::Index c = 0; c < mat->cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", (*mat)(r, c));
        out << (c ? " " : "") << buf;
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string magic;
  Checkpoint ck;
  in >> magic >> ck.version;
  if (magic != "ykckpt")
    throw std::runtime_error("checkpoint: bad magic in " + path);
  if (ck.version != 1)
    throw std::runtime_error("checkpoint: unsupported version in " + path);

  std::string tag;
  while (in >> tag) {
    if (tag == "end") return ck;
    if (tag == "meta") {
      std::string key;
      double value;
      if (!(in >> key >> value))
        throw std::runtime_error("checkpoint: malformed meta line in " + path);
      ck.meta[key] = value;
    } else if (tag == "array") {
      std::string name;
      Eigen::Index rows, cols;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0)
        throw std::runtime_error("checkpoint: malformed array header in " + path);
      Eigen::MatrixXd mat(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          if (!(in >> mat(r, c)))
            throw std::runtime_error("checkpoint: truncated array " + name +
                                     " in " + path);
      ck.arrays[name] = std::move(mat);
    } else {
      throw std::runtime_error("checkpoint: unknown record '" + tag + "' in " +
                               path);
    }
  }
  throw std::runtime_error("checkpoint: missing end marker in " + path);
}

}  // namespace ykrl::nn
