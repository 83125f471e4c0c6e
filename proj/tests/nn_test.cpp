#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ykrl/nn/adam.hpp"
#include "ykrl/nn/checkpoint.hpp"
#include "ykrl/nn/dense_net.hpp"
#include "ykrl/nn/tape.hpp"
#include "ykrl/rng.hpp"
#include "ykrl/verify/fd_check.hpp"
#include "ykrl/verify/suites.hpp"

using namespace ykrl;
using nn::Activation;

TEST_CASE("forward: identity single layer reproduces the input") {
  nn::DenseNet net({2, 2}, {Activation::kIdentity});
  net.params()[0]->value = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  const Eigen::VectorXd y = net.forward(x);
  CHECK(y(0) == 1.0);
  CHECK(y(1) == 2.0);
}

TEST_CASE("forward: softplus at zero is ln 2") {
  nn::DenseNet net({1, 1}, {Activation::kSoftplus});
  net.params()[0]->value(0, 0) = 1.0;  // y = softplus(x)
  const Eigen::VectorXd y = net.forward(Eigen::VectorXd(Eigen::VectorXd::Zero(1)));
  CHECK(y(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(nn::activate(Activation::kSoftplus, 0.0) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
}

TEST_CASE("forward: zero-weight tanh net maps everything to zero") {
  nn::DenseNet net({3, 5, 2}, {Activation::kTanh, Activation::kTanh});
  Eigen::VectorXd x(3);
  x << -4.0, 0.5, 9.0;
  const Eigen::VectorXd y = net.forward(x);
  CHECK(y.isZero(0.0));
  CHECK(y.size() == 2);
}

TEST_CASE("forward: input width mismatch is rejected with a shape message") {
  nn::DenseNet net({3, 2}, {Activation::kIdentity});
  CHECK_THROWS_WITH_AS(net.forward(Eigen::VectorXd(Eigen::VectorXd::Zero(4))),
                       doctest::Contains("expected 3"), std::invalid_argument);
}

TEST_CASE("parameter count equals sum of in*out + out") {
  nn::DenseNet net({3, 16, 16, 2},
                   {Activation::kTanh, Activation::kTanh, Activation::kIdentity});
  CHECK(net.param_count() == 3 * 16 + 16 + 16 * 16 + 16 + 16 * 2 + 2);
}

TEST_CASE("backward: linear map gives dw = x and dx = w") {
  nn::DenseNet net({2, 1}, {Activation::kIdentity});
  nn::Param* w = net.params()[0];
  w->value << 0.3, -0.7;
  Eigen::VectorXd x(2);
  x << 1.5, 2.5;

  nn::Tape tape;
  const auto xin = tape.leaf(x, /*wants_grad=*/true);
  const auto out = net.forward(tape, xin);
  tape.backward(tape.sum_all(out));

  CHECK(w->grad(0, 0) == doctest::Approx(1.5));
  CHECK(w->grad(0, 1) == doctest::Approx(2.5));
  CHECK(tape.adjoint(xin)(0, 0) == doctest::Approx(0.3));
  CHECK(tape.adjoint(xin)(1, 0) == doctest::Approx(-0.7));
}

TEST_CASE("backward: tanh(w x) at w=0 has slope x") {
  nn::DenseNet net({1, 1}, {Activation::kTanh});
  nn::Tape tape;
  Eigen::VectorXd x(1);
  x << 3.0;
  tape.backward(tape.sum_all(net.forward(tape, tape.leaf(x))));
  CHECK(net.params()[0]->grad(0, 0) == doctest::Approx(3.0));  // tanh'(0) = 1
}

TEST_CASE("backward: random two-layer net matches central finite differences") {
  Rng rng(7);
  nn::DenseNet net({3, 4, 2}, {Activation::kTanh, Activation::kSoftplus});
  net.init(rng);
  Eigen::VectorXd x(3);
  for (int i = 0; i < 3; ++i) x(i) = rng.gaussian();

  auto loss_plain = [&]() { return net.forward(Eigen::MatrixXd(x)).sum(); };
  auto loss_and_grad = [&]() {
    for (nn::Param* p : net.params()) p->zero_grad();
    nn::Tape tape;
    const auto loss = tape.sum_all(net.forward(tape, tape.leaf(x)));
    tape.backward(loss);
    return tape.value(loss)(0, 0);
  };
  const verify::FdReport rep = verify::finite_difference_check(
      net.params(), loss_plain, loss_and_grad, 1e-5);
  CHECK(rep.max_rel < 1e-4);
  CHECK(rep.entries == static_cast<long>(net.param_count()));
}

TEST_CASE("gradient fidelity across all activations and depths") {
  const verify::SuiteResult res = verify::gradient_net_suite(30, 91);
  INFO(res.detail);
  CHECK(res.pass);
}

TEST_CASE("backward preconditions") {
  nn::Tape tape;
  CHECK_THROWS_AS(tape.backward(0), std::exception);  // nothing recorded

  nn::DenseNet net({2, 1}, {Activation::kIdentity});
  const auto out =
      net.forward(tape, tape.leaf(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 1))));
  const auto loss = tape.sum_all(out);
  tape.backward(loss);
  CHECK_THROWS_WITH_AS(tape.backward(loss), doctest::Contains("second backward"),
                       std::logic_error);

  // Recording anything new re-arms the tape.
  const auto loss2 = tape.sum_all(out);
  CHECK_NOTHROW(tape.backward(loss2));
}

TEST_CASE("determinism: identical seeds give bit-identical nets and grads") {
  auto build = [](std::uint64_t seed) {
    Rng rng(seed);
    nn::DenseNet net({3, 8, 1}, {Activation::kTanh, Activation::kIdentity});
    net.init(rng);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.gaussian();
    nn::Tape tape;
    const auto loss = tape.sum_all(net.forward(tape, tape.leaf(x)));
    tape.backward(loss);
    Eigen::VectorXd flat(2 * net.param_count());
    Eigen::Index k = 0;
    for (nn::Param* p : net.params())
      for (Eigen::Index i = 0; i < p->grad.size(); ++i) {
        flat(k++) = *(p->grad.data() + i);
        flat(k++) = *(p->value.data() + i);
      }
    return std::pair{tape.value(loss)(0, 0), flat};
  };
  const auto [l1, g1] = build(123);
  const auto [l2, g2] = build(123);
  CHECK(l1 == l2);
  CHECK(g1 == g2);
}

TEST_CASE("activations stay finite and bounded on |x| <= 50") {
  for (const Activation a :
       {Activation::kIdentity, Activation::kTanh, Activation::kSoftplus,
        Activation::kRelu, Activation::kSmoothRelu}) {
    for (double x = -50.0; x <= 50.0; x += 2.5) {
      CHECK(std::isfinite(nn::activate(a, x)));
      const double d = nn::activate_deriv(a, x);
      CHECK(std::isfinite(d));
      CHECK(std::abs(d) <= 1.0 + 1e-12);  // all are 1-Lipschitz
    }
  }
  CHECK(nn::softplus(50.0) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("taped forward equals plain forward bitwise") {
  Rng rng(5);
  nn::DenseNet net({4, 8, 8, 3},
                   {Activation::kSoftplus, Activation::kTanh,
                    Activation::kIdentity});
  net.init(rng);
  Eigen::MatrixXd x(4, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) *(x.data() + i) = rng.gaussian();
  nn::Tape tape;
  const auto out = net.forward(tape, tape.leaf(x));
  CHECK(tape.value(out) == net.forward(x));
}

TEST_CASE("adam: zero gradient from a fresh state leaves parameters alone") {
  nn::Param p("p", Eigen::MatrixXd::Ones(2, 2));
  nn::Adam opt({&p}, 0.1);
  const Eigen::MatrixXd before = p.value;
  p.zero_grad();
  CHECK(opt.step());
  CHECK(opt.step());
  CHECK(p.value == before);
  CHECK(opt.step_count() == 2);
}

TEST_CASE("adam: one step on f(w) = w^2 moves w toward zero") {
  nn::Param p("w", Eigen::MatrixXd::Ones(1, 1));
  nn::Adam opt({&p}, 0.1);
  p.grad(0, 0) = 2.0 * p.value(0, 0);
  CHECK(opt.step());
  CHECK(p.value(0, 0) < 1.0);
  CHECK(p.value(0, 0) > 0.5);
}

TEST_CASE("adam: 500 steps on a 2-d convex quadratic reach the minimizer") {
  // f(w) = 0.5 (w - t)' Q (w - t), Q = diag(0.05, 0.025); the terminal
  // gradient norm stays under 1e-3 and w lands at the closed-form minimizer.
  nn::Param p("w", Eigen::MatrixXd::Zero(2, 1));
  p.value << 0.5, -0.5;
  const Eigen::Vector2d target(1.0, 0.0);
  const Eigen::Vector2d q(0.05, 0.025);
  nn::Adam opt({&p}, 2e-3);
  for (int i = 0; i < 500; ++i) {
    p.grad = (q.array() * (p.value.col(0) - target).array()).matrix();
    REQUIRE(opt.step());
  }
  const Eigen::Vector2d grad =
      (q.array() * (p.value.col(0) - target).array()).matrix();
  CHECK(grad.norm() < 1e-3);
  CHECK((p.value.col(0) - target).norm() < 0.05);
}

TEST_CASE("adam: non-finite gradient rejects the update and notifies") {
  nn::Param p("w", Eigen::MatrixXd::Ones(1, 1));
  nn::Adam opt({&p}, 0.1);
  p.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(opt.step());
  CHECK(p.value(0, 0) == 1.0);
  CHECK(opt.step_count() == 0);
}

TEST_CASE("checkpoint: named arrays and metadata round-trip exactly") {
  Rng rng(99);
  Eigen::MatrixXd a(3, 2), b(1, 4);
  for (Eigen::Index i = 0; i < a.size(); ++i) *(a.data() + i) = rng.gaussian();
  for (Eigen::Index i = 0; i < b.size(); ++i) *(b.data() + i) = rng.gaussian();

  const std::string path =
      (std::filesystem::temp_directory_path() / "ykrl_ckpt_test.txt").string();
  nn::save_checkpoint(path, {{"layer.W", &a}, {"layer.b", &b}},
                      {{"beta", 0.99}, {"n_q", 4.0}});
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  CHECK(ck.version == 1);
  CHECK(ck.meta_value("beta") == 0.99);
  CHECK(ck.meta_value("n_q") == 4.0);
  CHECK(ck.array("layer.W") == a);
  CHECK(ck.array("layer.b") == b);
  CHECK_THROWS_AS(ck.array("missing"), std::invalid_argument);
  std::filesystem::remove(path);
}
