#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ykrl::verify {

struct SuiteResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// Every length-L window of a random stable LTI system satisfies the stacked
/// Hankel equation built from a fresh excitation record (noise-free).
SuiteResult fundamental_lemma_suite(int systems, int windows_per_system,
                                    std::uint64_t seed);

/// The Hankel model's next-output prediction matches the state-space rollout.
SuiteResult prediction_suite(int systems, int windows_per_system,
                             std::uint64_t seed);

/// The data-driven controller reproduces the classical Youla-Kucera control
/// signal for random stable (P, Q) pairs.
SuiteResult equivalence_suite(int pairs, int steps, std::uint64_t seed);

/// Sampled decrease certificate V(f(z)) <= beta V(z) + 1e-9 for random weight
/// draws; with include_trained, half the draws are taken mid-training after a
/// burst of TD3 updates on synthetic data.
SuiteResult decrease_suite(int weight_draws, int samples_per_draw,
                           std::uint64_t seed, bool include_trained);

/// V(0) = 0, the quadratic floor, and sampled midpoint convexity.
SuiteResult lyapunov_structure_suite(int samples, std::uint64_t seed);

/// Finite-difference fidelity of plain dense-network gradients (tol 1e-4).
SuiteResult gradient_net_suite(int draws, std::uint64_t seed);

/// Finite-difference fidelity through the corrected dynamics, both branches,
/// sampled away from the switching surface (tol 1e-3).
SuiteResult gradient_stable_suite(int draws, std::uint64_t seed);

/// All of the above at cmd-verify scale.
std::vector<SuiteResult> run_all(std::uint64_t seed);

}  // namespace ykrl::verify
