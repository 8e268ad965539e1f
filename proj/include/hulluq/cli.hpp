#pragma once

#include <ostream>

#include "hulluq/config.hpp"

namespace hulluq {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitBackendError = 2;
inline constexpr int kExitDataError = 3;

/// Sample responses per (instance, temperature) and append them to
/// <out>/responses.jsonl, printing per-temperature counts.
int cmd_collect(const RunConfig& config, std::ostream& log);

/// Score every response set: writes uncertainty.csv, stats.csv, and
/// per-temperature histogram plus per-instance contour artifacts.
int cmd_analyze(const RunConfig& config, std::ostream& log);

/// Render a single self-contained HTML report from the analyze outputs.
int cmd_report(const RunConfig& config, std::ostream& log);

}  // namespace hulluq
