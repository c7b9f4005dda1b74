#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chaosmm/analysis.hpp"
#include "chaosmm/ensemble.hpp"
#include "chaosmm/integrate.hpp"
#include "chaosmm/model.hpp"

namespace chaosmm::cli {

/// Bad config; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { Simulate, Poincare, Lyapunov, KamCheck, SampleHist, PotentialGrid };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct IntegratorBlock {
    Scheme scheme = Scheme::Yoshida4;
    double dt = 0.01;
    std::size_t n_steps = 100'000;
    std::size_t record_every = 1;
};

/// Either an explicit canonical state or an energy-targeted draw (path 0).
struct InitialCondition {
    std::optional<PhaseState> state;
    double energy_target = 1.0;
    double energy_tol = 0.01;
    std::optional<SamplingBox> sampling_box;
};

struct SimulateParams {
    InitialCondition ic;
};

struct PoincareParams {
    std::vector<double> epsilons;
    std::vector<double> energy_targets;
    std::size_t n_paths = 100;
    double energy_tol = 0.01;
    std::optional<SamplingBox> sampling_box;
};

struct LyapunovParams {
    std::vector<double> epsilons;
    double energy_target = 5.0;
    std::size_t n_paths = 5;
    double energy_tol = 0.01;
    std::size_t renorm_every = 10;
    double zero_threshold = kZeroExponentThreshold;
    std::optional<SamplingBox> sampling_box;
};

struct KamParams {
    std::vector<double> epsilons;
    double i_x = 0.1;
    double i_v = 0.1;
    double theta_x = 0.0;
    double theta_v = 0.0;
};

struct SampleHistParams {
    InitialCondition ic;
    std::size_t every_n = 100;
    std::size_t n_bins = 50;
    Component component = Component::Price;
};

/// Column name used for a sampled component: t, x, v, q2, p_x, p_v, energy.
std::string component_name(Component component);

struct PotentialGridParams {
    AxisRange x_range{-2.0, 4.0};
    AxisRange v_range{-3.0, 3.0};
    std::size_t n = 101;
    std::vector<double> epsilons;
};

using ExperimentParams = std::variant<SimulateParams, PoincareParams, LyapunovParams, KamParams, SampleHistParams,
                                      PotentialGridParams>;

struct OutputBlock {
    std::string directory = "out";
    bool svg = false;
};

struct RunConfig {
    ModelParams model;
    IntegratorBlock integrator;
    Experiment experiment = Experiment::Simulate;
    ExperimentParams params;
    OutputBlock output;
    std::uint64_t master_seed = 0;
};

/// Parses and fully validates; throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Resolved config with every default filled in.
nlohmann::json to_json(const RunConfig& config);

/// CHAOS_MM_SEED, when set, replaces master_seed.
void apply_seed_override(RunConfig& config, const char* env_value);

}  // namespace chaosmm::cli
