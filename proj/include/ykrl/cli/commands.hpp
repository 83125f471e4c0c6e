#pragma once

#include <string>

#include "ykrl/cli/config.hpp"

namespace ykrl::cli {

/// Exit-code contract: 0 success, 2 validation failure, 3 verification
/// failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitVerification = 3;

/// Run the excitation experiment and write <out>/excitation.csv plus a
/// persistent-excitation report. A failed PE check exits with
/// kExitVerification.
int run_collect(const RunConfig& cfg);

/// Train from the collected trajectory: builds the Hankel model, writes
/// config.snapshot, rewards.csv, per-seed rollouts and checkpoints.
int run_train(const RunConfig& cfg);

/// Oracle suites (fundamental lemma, prediction, equivalence, Lyapunov
/// decrease and structure, gradient checks) with a pass/fail report.
int run_verify(const RunConfig& cfg);

/// Plot-ready exports from a finished run directory.
int run_export(const std::string& run_dir);

}  // namespace ykrl::cli
