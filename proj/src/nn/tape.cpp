#include "ykrl/nn/tape.hpp"

#include <sstream>
#include <stdexcept>

namespace ykrl::nn {

namespace {

[[noreturn]] void shape_error(const char* op, Eigen::Index ar, Eigen::Index ac,
                              Eigen::Index br, Eigen::Index bc) {
  std::ostringstream os;
  os << "tape: shape mismatch in " << op << ": (" << ar << "x" << ac
     << ") vs (" << br << "x" << bc << ")";
  throw std::invalid_argument(os.str());
}

}  // namespace

Tape::NodeId Tape::push(Node&& n) {
  backward_done_ = false;  // new recording re-arms the tape
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Tape::Node& Tape::at(NodeId id) { return nodes_.at(static_cast<size_t>(id)); }

const Tape::Node& Tape::at(NodeId id) const {
  return nodes_.at(static_cast<size_t>(id));
}

void Tape::check_parent(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size()))
    throw std::invalid_argument("tape: invalid parent node id");
}

Tape::NodeId Tape::leaf(Eigen::MatrixXd value, bool wants_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.val = std::move(value);
  n.wants_grad = wants_grad;
  return push(std::move(n));
}

Tape::NodeId Tape::affine(Param& w, Param& b, NodeId x) {
  check_parent(x);
  const auto& xv = at(x).val;
  if (w.value.cols() != xv.rows())
    shape_error("affine", w.value.rows(), w.value.cols(), xv.rows(), xv.cols());
  if (b.value.rows() != w.value.rows() || b.value.cols() != 1)
    shape_error("affine bias", b.value.rows(), b.value.cols(), w.value.rows(),
                1);
  Node n;
  n.op = Op::kAffine;
  n.a = x;
  n.w = &w;
  n.bias = &b;
  n.val = (w.value * xv).colwise() + b.value.col(0);
  return push(std::move(n));
}

Tape::NodeId Tape::matvec(Param& w, NodeId x) {
  check_parent(x);
  const auto& xv = at(x).val;
  if (w.value.cols() != xv.rows())
    shape_error("matvec", w.value.rows(), w.value.cols(), xv.rows(), xv.cols());
  Node n;
  n.op = Op::kMatVec;
  n.a = x;
  n.w = &w;
  n.val = w.value * xv;
  return push(std::move(n));
}

Tape::NodeId Tape::nonneg_matvec(Param& w_raw, NodeId x) {
  check_parent(x);
  const auto& xv = at(x).val;
  if (w_raw.value.cols() != xv.rows())
    shape_error("nonneg_matvec", w_raw.value.rows(), w_raw.value.cols(),
                xv.rows(), xv.cols());
  Node n;
  n.op = Op::kNonNegMatVec;
  n.a = x;
  n.w = &w_raw;
  n.aux = w_raw.value.unaryExpr([](double v) { return softplus(v); });
  n.val = n.aux * xv;
  return push(std::move(n));
}

Tape::NodeId Tape::activation(Activation act, NodeId x) {
  check_parent(x);
  Node n;
  n.op = Op::kActivation;
  n.act = act;
  n.a = x;
  n.val = at(x).val.unaryExpr([act](double v) { return activate(act, v); });
  return push(std::move(n));
}

Tape::NodeId Tape::clamp(NodeId x, double lo, double hi) {
  check_parent(x);
  if (!(lo < hi)) throw std::invalid_argument("tape: clamp needs lo < hi");
  Node n;
  n.op = Op::kClamp;
  n.a = x;
  n.row_start = 0;
  n.scalar = lo;
  n.aux.resize(1, 1);
  n.aux(0, 0) = hi;
  n.val = at(x).val.unaryExpr(
      [lo, hi](double v) { return v < lo ? lo : (v > hi ? hi : v); });
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_parent(a);
  check_parent(b);
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    shape_error("add", av.rows(), av.cols(), bv.rows(), bv.cols());
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.val = av + bv;
  return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  check_parent(a);
  check_parent(b);
  const auto& av = at(a).val;
  const auto& bv = at(b).val;
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    shape_error("sub", av.rows(), av.cols(), bv.rows(), bv.cols());
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.val = av - bv;
  return push(std::move(n));
}

Tape::NodeId Tape::sub_broadcast(NodeId x, NodeId column) {
  check_parent(x);
  check_parent(column);
  const auto& xv = at(x).val;
  const auto& cv = at(column).val;
  if (cv.cols() != 1 || cv.rows() != xv.rows())
    shape_error("sub_broadcast", xv.rows(), xv.cols(), cv.rows(), cv.cols());
  Node n;
  n.op = Op::kSubBroadcast;
  n.a = x;
  n.b = column;
  n.val = xv.colwise() - cv.col(0);
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId x, double c) {
  check_parent(x);
  Node n;
  n.op = Op::kScale;
  n.a = x;
  n.scalar = c;
  n.val = c * at(x).val;
  return push(std::move(n));
}

Tape::NodeId Tape::rows(NodeId x, int start, int count) {
  check_parent(x);
  const auto& xv = at(x).val;
  if (start < 0 || count <= 0 || start + count > xv.rows())
    throw std::invalid_argument("tape: rows() slice out of range");
  Node n;
  n.op = Op::kRows;
  n.a = x;
  n.row_start = start;
  n.row_count = count;
  n.val = xv.middleRows(start, count);
  return push(std::move(n));
}

Tape::NodeId Tape::vstack(NodeId top, NodeId bottom) {
  check_parent(top);
  check_parent(bottom);
  const auto& tv = at(top).val;
  const auto& bv = at(bottom).val;
  if (tv.cols() != bv.cols())
    shape_error("vstack", tv.rows(), tv.cols(), bv.rows(), bv.cols());
  Node n;
  n.op = Op::kVStack;
  n.a = top;
  n.b = bottom;
  n.val.resize(tv.rows() + bv.rows(), tv.cols());
  n.val.topRows(tv.rows()) = tv;
  n.val.bottomRows(bv.rows()) = bv;
  return push(std::move(n));
}

Tape::NodeId Tape::col_sqnorm(NodeId x) {
  check_parent(x);
  Node n;
  n.op = Op::kColSqNorm;
  n.a = x;
  n.val = at(x).val.colwise().squaredNorm();
  return push(std::move(n));
}

Tape::NodeId Tape::stable_scale(NodeId f, NodeId vz, NodeId vf, double beta) {
  check_parent(f);
  check_parent(vz);
  check_parent(vf);
  const auto& fv = at(f).val;
  const auto& vzv = at(vz).val;
  const auto& vfv = at(vf).val;
  if (vzv.rows() != 1 || vfv.rows() != 1 || vzv.cols() != fv.cols() ||
      vfv.cols() != fv.cols())
    shape_error("stable_scale", fv.rows(), fv.cols(), vzv.rows(), vzv.cols());
  Node n;
  n.op = Op::kStableScale;
  n.a = f;
  n.b = vz;
  n.c = vf;
  n.scalar = beta;
  n.aux.resize(1, fv.cols());  // per-column gamma; 1 marks the pass-through
  n.val.resize(fv.rows(), fv.cols());
  for (Eigen::Index j = 0; j < fv.cols(); ++j) {
    if (vfv(0, j) <= beta * vzv(0, j)) {
      n.aux(0, j) = 1.0;
      n.val.col(j) = fv.col(j);  // exact pass-through
    } else {
      const double gamma = beta * vzv(0, j) / vfv(0, j);
      n.aux(0, j) = gamma;
      n.val.col(j) = gamma * fv.col(j);
    }
  }
  return push(std::move(n));
}

Tape::NodeId Tape::mean_sq_diff(NodeId pred, NodeId target) {
  check_parent(pred);
  check_parent(target);
  const auto& pv = at(pred).val;
  const auto& tv = at(target).val;
  if (pv.rows() != tv.rows() || pv.cols() != tv.cols())
    shape_error("mean_sq_diff", pv.rows(), pv.cols(), tv.rows(), tv.cols());
  Node n;
  n.op = Op::kMeanSqDiff;
  n.a = pred;
  n.b = target;
  n.val.resize(1, 1);
  n.val(0, 0) = (pv - tv).squaredNorm() / static_cast<double>(pv.size());
  return push(std::move(n));
}

Tape::NodeId Tape::col_mean(NodeId x) {
  check_parent(x);
  Node n;
  n.op = Op::kColMean;
  n.a = x;
  n.val.resize(1, 1);
  n.val(0, 0) = at(x).val.mean();
  return push(std::move(n));
}

Tape::NodeId Tape::sum_all(NodeId x) {
  check_parent(x);
  Node n;
  n.op = Op::kSumAll;
  n.a = x;
  n.val.resize(1, 1);
  n.val(0, 0) = at(x).val.sum();
  return push(std::move(n));
}

const Eigen::MatrixXd& Tape::value(NodeId id) const { return at(id).val; }

const Eigen::MatrixXd& Tape::adjoint(NodeId id) const {
  const Node& n = at(id);
  if (n.adj.size() == 0)
    throw std::logic_error("tape: adjoint not available; run backward first");
  return n.adj;
}

void Tape::backward(NodeId output) {
  const Node& out = at(output);
  if (out.val.rows() != 1 || out.val.cols() != 1)
    throw std::invalid_argument(
        "tape: backward() without a seed requires a 1x1 output node");
  backward_impl(output, Eigen::MatrixXd::Ones(1, 1));
}

void Tape::backward(NodeId output, const Eigen::MatrixXd& seed) {
  const Node& out = at(output);
  if (seed.rows() != out.val.rows() || seed.cols() != out.val.cols())
    shape_error("backward seed", seed.rows(), seed.cols(), out.val.rows(),
                out.val.cols());
  backward_impl(output, seed);
}

void Tape::backward_impl(NodeId output, const Eigen::MatrixXd& seed) {
  if (nodes_.empty())
    throw std::logic_error("tape: backward without a recorded forward pass");
  if (backward_done_)
    throw std::logic_error(
        "tape: second backward pass without a new forward recording");
  backward_done_ = true;

  for (Node& n : nodes_) n.adj = Eigen::MatrixXd::Zero(n.val.rows(), n.val.cols());
  at(output).adj = seed;

  for (NodeId id = output; id >= 0; --id) {
    Node& n = at(id);
    if (n.adj.size() == 0 || n.adj.isZero(0.0)) continue;
    const Eigen::MatrixXd& d = n.adj;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAffine: {
        Node& x = at(n.a);
        n.w->grad.noalias() += d * x.val.transpose();
        n.bias->grad.col(0).noalias() += d.rowwise().sum();
        x.adj.noalias() += n.w->value.transpose() * d;
        break;
      }
      case Op::kMatVec: {
        Node& x = at(n.a);
        n.w->grad.noalias() += d * x.val.transpose();
        x.adj.noalias() += n.w->value.transpose() * d;
        break;
      }
      case Op::kNonNegMatVec: {
        Node& x = at(n.a);
        // d softplus(w)/dw = logistic(w)
        n.w->grad.array() +=
            (d * x.val.transpose()).array() *
            n.w->value.unaryExpr([](double v) { return logistic(v); }).array();
        x.adj.noalias() += n.aux.transpose() * d;
        break;
      }
      case Op::kActivation: {
        Node& x = at(n.a);
        const Activation act = n.act;
        x.adj.array() +=
            d.array() *
            x.val.unaryExpr([act](double v) { return activate_deriv(act, v); })
                .array();
        break;
      }
      case Op::kClamp: {
        Node& x = at(n.a);
        const double lo = n.scalar;
        const double hi = n.aux(0, 0);
        for (Eigen::Index j = 0; j < d.cols(); ++j)
          for (Eigen::Index i = 0; i < d.rows(); ++i)
            if (x.val(i, j) > lo && x.val(i, j) < hi)
              x.adj(i, j) += d(i, j);
        break;
      }
      case Op::kAdd:
        at(n.a).adj += d;
        at(n.b).adj += d;
        break;
      case Op::kSub:
        at(n.a).adj += d;
        at(n.b).adj -= d;
        break;
      case Op::kSubBroadcast:
        at(n.a).adj += d;
        at(n.b).adj.col(0) -= d.rowwise().sum();
        break;
      case Op::kScale:
        at(n.a).adj += n.scalar * d;
        break;
      case Op::kRows:
        at(n.a).adj.middleRows(n.row_start, n.row_count) += d;
        break;
      case Op::kVStack: {
        Node& t = at(n.a);
        Node& b = at(n.b);
        t.adj += d.topRows(t.val.rows());
        b.adj += d.bottomRows(b.val.rows());
        break;
      }
      case Op::kColSqNorm: {
        Node& x = at(n.a);
        x.adj.noalias() += 2.0 * x.val * d.row(0).asDiagonal();
        break;
      }
      case Op::kStableScale: {
        Node& f = at(n.a);
        Node& vz = at(n.b);
        Node& vf = at(n.c);
        const double beta = n.scalar;
        for (Eigen::Index j = 0; j < n.val.cols(); ++j) {
          const double gamma = n.aux(0, j);
          if (gamma == 1.0) {
            f.adj.col(j) += d.col(j);
          } else {
            const double vfj = vf.val(0, j);
            const double df_dot_f = d.col(j).dot(f.val.col(j));
            f.adj.col(j) += gamma * d.col(j);
            vz.adj(0, j) += beta / vfj * df_dot_f;
            vf.adj(0, j) -= gamma / vfj * df_dot_f;
          }
        }
        break;
      }
      case Op::kMeanSqDiff: {
        Node& p = at(n.a);
        const Node& t = at(n.b);
        p.adj += (2.0 / static_cast<double>(p.val.size())) * d(0, 0) *
                 (p.val - t.val);
        break;
      }
      case Op::kColMean: {
        Node& x = at(n.a);
        x.adj.array() += d(0, 0) / static_cast<double>(x.val.size());
        break;
      }
      case Op::kSumAll:
        at(n.a).adj.array() += d(0, 0);
        break;
    }
    if (!n.wants_grad && n.op == Op::kLeaf) n.adj.resize(0, 0);
  }
}

void Tape::clear() {
  nodes_.clear();
  backward_done_ = false;
}

}  // namespace ykrl::nn
