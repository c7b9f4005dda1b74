#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace chaosmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;  // overrides output.directory
    std::size_t workers = 1;
    bool svg = false;
};

struct RunReport {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
    std::string message;
};

/// Runs the configured experiment and writes its CSVs plus metadata.json.
/// Runtime failures are reported through the exit code, not thrown.
RunReport run_command(const RunConfig& config, const RunOptions& options);

/// Canonical output columns: (x, v, p_x, p_v) in the original coordinates.
/// Risk models map (x, u, P_x, P_u) to v = u/x, p_x = P_x + v P_u, p_v = x P_u.
struct PriceInventoryState {
    double x;
    double v;
    double p_x;
    double p_v;
};
PriceInventoryState price_inventory(const ModelParams& params, const PhaseState& state);

/// Shortest round-trip decimal, used in sweep file names.
std::string file_tag(double value);

}  // namespace chaosmm::cli
