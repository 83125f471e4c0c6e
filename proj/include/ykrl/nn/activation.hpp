#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ykrl::nn {

enum class Activation { kIdentity, kTanh, kSoftplus, kRelu, kSmoothRelu };

/// Knee width of the quadratic-smoothed ReLU: 0 for x<=0, x - d/2 for x>=d,
/// x^2/(2d) in between. Convex, nondecreasing, C^1.
inline constexpr double kSmoothReluKnee = 0.1;

inline double softplus(double x) {
  // Overflow-safe: for large x, log(1+e^x) == x to double precision.
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

inline double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

inline double smooth_relu(double x) {
  constexpr double d = kSmoothReluKnee;
  if (x <= 0.0) return 0.0;
  if (x >= d) return x - d / 2.0;
  return x * x / (2.0 * d);
}

inline double smooth_relu_deriv(double x) {
  constexpr double d = kSmoothReluKnee;
  if (x <= 0.0) return 0.0;
  if (x >= d) return 1.0;
  return x / d;
}

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:   return x;
    case Activation::kTanh:       return std::tanh(x);
    case Activation::kSoftplus:   return softplus(x);
    case Activation::kRelu:       return x > 0.0 ? x : 0.0;
    case Activation::kSmoothRelu: return smooth_relu(x);
  }
  throw std::logic_error("unknown activation");
}

inline double activate_deriv(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity:   return 1.0;
    case Activation::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::kSoftplus:   return logistic(x);
    case Activation::kRelu:       return x > 0.0 ? 1.0 : 0.0;
    case Activation::kSmoothRelu: return smooth_relu_deriv(x);
  }
  throw std::logic_error("unknown activation");
}

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity:   return "identity";
    case Activation::kTanh:       return "tanh";
    case Activation::kSoftplus:   return "softplus";
    case Activation::kRelu:       return "relu";
    case Activation::kSmoothRelu: return "smooth-relu";
  }
  throw std::logic_error("unknown activation");
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "tanh") return Activation::kTanh;
  if (s == "softplus") return Activation::kSoftplus;
  if (s == "relu") return Activation::kRelu;
  if (s == "smooth-relu") return Activation::kSmoothRelu;
  throw std::invalid_argument("unknown activation name: " + s);
}

}  // namespace ykrl::nn
