#pragma once

#include <Eigen/Core>
#include <vector>

#include "ykrl/nn/activation.hpp"
#include "ykrl/nn/param.hpp"

namespace ykrl::nn {

/// Reverse-accumulation tape over matrix-valued nodes. Columns carry batch
/// elements, so a node is a feature-by-batch block; scalars are 1x1. Nodes are
/// recorded in evaluation order and backward() replays them in reverse,
/// scattering adjoints into parent nodes and Param::grad.
///
/// One forward recording admits one backward pass; recording new nodes re-arms
/// the tape.
class Tape {
 public:
  using NodeId = int;

  /// Constant or input node. Pass wants_grad=true to have backward() keep the
  /// adjoint for retrieval via adjoint().
  NodeId leaf(Eigen::MatrixXd value, bool wants_grad = false);

  /// W.value * x + b.value broadcast over columns.
  NodeId affine(Param& w, Param& b, NodeId x);
  /// W.value * x (no bias).
  NodeId matvec(Param& w, NodeId x);
  /// softplus(w_raw.value) * x — elementwise-nonnegative weight product.
  NodeId nonneg_matvec(Param& w_raw, NodeId x);

  NodeId activation(Activation act, NodeId x);
  /// Elementwise clamp to [lo, hi]; gradient passes through strictly inside
  /// the interval and is zero outside.
  NodeId clamp(NodeId x, double lo, double hi);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  /// x minus a single column broadcast across all columns of x.
  NodeId sub_broadcast(NodeId x, NodeId column);
  NodeId scale(NodeId x, double c);
  NodeId rows(NodeId x, int start, int count);
  NodeId vstack(NodeId top, NodeId bottom);
  /// Column-wise squared norm: n x B -> 1 x B.
  NodeId col_sqnorm(NodeId x);

  /// Column-wise stability correction: out_j = gamma_j * f_j with
  /// gamma_j = 1 when vf_j <= beta * vz_j (the column is passed through
  /// unchanged) and gamma_j = beta * vz_j / vf_j otherwise. vz and vf are
  /// 1 x B rows. Gradients flow through f, vz and vf.
  NodeId stable_scale(NodeId f, NodeId vz, NodeId vf, double beta);

  /// mean over columns of (pred - target)^2 -> 1x1. target takes no gradient.
  NodeId mean_sq_diff(NodeId pred, NodeId target);
  /// Mean of all entries -> 1x1.
  NodeId col_mean(NodeId x);
  /// Sum of all entries -> 1x1.
  NodeId sum_all(NodeId x);

  const Eigen::MatrixXd& value(NodeId id) const;
  /// Adjoint of a node after backward(); only retained for leaves created
  /// with wants_grad and for intermediate nodes.
  const Eigen::MatrixXd& adjoint(NodeId id) const;

  /// Seed a 1x1 node with 1 and accumulate parameter/input gradients.
  void backward(NodeId output);
  /// Seed an arbitrary node with an explicit adjoint (vector-Jacobian
  /// product).
  void backward(NodeId output, const Eigen::MatrixXd& seed);

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kAffine,
    kMatVec,
    kNonNegMatVec,
    kActivation,
    kClamp,
    kAdd,
    kSub,
    kSubBroadcast,
    kScale,
    kRows,
    kVStack,
    kColSqNorm,
    kStableScale,
    kMeanSqDiff,
    kColMean,
    kSumAll,
  };

  struct Node {
    Op op;
    Activation act = Activation::kIdentity;
    NodeId a = -1, b = -1, c = -1;
    Param* w = nullptr;
    Param* bias = nullptr;
    double scalar = 0.0;
    int row_start = 0, row_count = 0;
    bool wants_grad = false;
    Eigen::MatrixXd val;
    Eigen::MatrixXd adj;
    Eigen::MatrixXd aux;  // op-specific cache (softplus(W), gamma row, ...)
  };

  NodeId push(Node&& n);
  Node& at(NodeId id);
  const Node& at(NodeId id) const;
  void check_parent(NodeId id) const;
  void backward_impl(NodeId output, const Eigen::MatrixXd& seed);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace ykrl::nn
