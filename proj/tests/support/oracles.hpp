#pragma once

// Test-only reference computations, independent of the library paths they
// check.

#include <Eigen/Core>
#include <span>
#include <stdexcept>
#include <vector>

#include "ykrl/lti/state_space.hpp"

namespace ykrl::testsupport {

/// Impulse response h_0..h_{len-1} via explicit powers of A:
/// h_0 = D, h_k = C A^{k-1} B.
inline std::vector<double> impulse_response(const lti::StateSpace& sys,
                                            int len) {
  std::vector<double> h;
  h.reserve(len);
  h.push_back(sys.d());
  Eigen::VectorXd v = sys.b();
  for (int k = 1; k < len; ++k) {
    h.push_back(sys.c().dot(v));
    v = sys.a() * v;
  }
  return h;
}

/// y = h * u (causal convolution, zero initial conditions).
inline std::vector<double> convolve(std::span<const double> h,
                                    std::span<const double> u) {
  std::vector<double> y(u.size(), 0.0);
  for (std::size_t t = 0; t < u.size(); ++t)
    for (std::size_t k = 0; k <= t && k < h.size(); ++k)
      y[t] += h[k] * u[t - k];
  return y;
}

/// Polynomials in ascending powers: p(z) = c[0] + c[1] z + ...
inline std::vector<double> poly_mul(std::span<const double> a,
                                    std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline std::vector<double> poly_sub(std::vector<double> a,
                                    std::span<const double> b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

/// Long-division impulse response of num(z)/den(z): the series
/// h_0 + h_1 z^-1 + ... with deg(num) <= deg(den). den's leading coefficient
/// must be nonzero.
inline std::vector<double> rational_impulse_response(std::vector<double> num,
                                                     std::vector<double> den,
                                                     int len) {
  if (den.empty() || den.back() == 0.0)
    throw std::invalid_argument("rational_impulse_response: bad denominator");
  const double lead = den.back();
  for (double& c : num) c /= lead;
  for (double& c : den) c /= lead;
  const std::size_t n = den.size() - 1;
  if (num.size() > n + 1)
    throw std::invalid_argument("rational_impulse_response: improper ratio");
  num.resize(n + 1, 0.0);

  // b_{n-k} indexing with monic denominator: h_k = b_{n-k} - sum a_{n-i} h_{k-i}.
  std::vector<double> h(len, 0.0);
  for (int k = 0; k < len; ++k) {
    double v = (static_cast<std::size_t>(k) <= n)
                   ? num[n - static_cast<std::size_t>(k)]
                   : 0.0;
    for (int i = 1; i <= k; ++i) {
      if (static_cast<std::size_t>(i) > n) break;
      v -= den[n - static_cast<std::size_t>(i)] * h[k - i];
    }
    h[static_cast<std::size_t>(k)] = v;
  }
  return h;
}

}  // namespace ykrl::testsupport
