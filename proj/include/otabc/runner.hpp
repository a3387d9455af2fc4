#pragma once

#include <filesystem>
#include <memory>

#include "otabc/asymptotics.hpp"

namespace otabc {

struct ModelConfig {
    std::string name = "normal_location"; // normal_location | normal_repeated | pref_attach
    double sigma = 1.0;                   // normal_location only
    Box theta_bounds;                     // empty -> model default
};

struct PriorConfig {
    std::string kind = "gaussian"; // uniform | gaussian | truncated_gaussian
    std::vector<double> mean;
    std::vector<double> sd;
    Box bounds;
};

struct DiscrepancyConfig {
    std::string kind = "wasserstein"; // wasserstein | sliced_wasserstein | radon
    double p = 1.0;
    int n_projections = 100;
    std::uint64_t projection_seed = 0x51ced;
};

struct SimulateFromConfig {
    std::vector<double> theta;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<ModelConfig> model; // absent -> the experiment's model
};

struct DataConfig {
    enum class Source { inline_values, csv, simulate };
    Source source = Source::inline_values;
    std::vector<double> inline_values;
    std::filesystem::path csv_path;
    SimulateFromConfig simulate;
};

struct GridConfig {
    double lo = 0.0, hi = 0.0, step = 0.0;
    std::vector<double> points() const;
};

struct TauSigmaConfig {
    std::vector<double> theta_values; // empty -> stride over the bounds grid
    std::size_t theta_stride = 10;
    std::vector<double> eps_values;
    std::vector<std::size_t> n_values;
    std::size_t mc_reps = 200;
    std::size_t m_proxy = 0; // 0 -> estimator default
    bool sigma_zero = false; // force sigma_hat = 0 (eps1 treated as infinite)
};

struct BoundsConfig {
    double epsilon_offset = 0.0; // the eps in threshold eps_star + eps
    std::vector<double> zeta_values;
    GridConfig grid;
    std::size_t t_map_m = 100'000;
    TauSigmaConfig tau_sigma;
    bool has_modulus = false;
    ModulusSpec modulus;
};

struct RunConfig {
    std::string experiment; // abc | convergence | bounds
    std::uint64_t seed = 0;
    int threads = 1;
    std::filesystem::path output_dir = "out";
    double epsilon0 = kInf;
    std::size_t n_draws = 0;

    ModelConfig model;
    PriorConfig prior;
    DiscrepancyConfig discrepancy;
    DataConfig data;

    // abc
    double epsilon = 0.0;
    bool epsilon_set = false;
    double epsilon_quantile = 0.0;
    bool epsilon_quantile_set = false;

    // convergence
    std::vector<double> epsilon_schedule;
    std::vector<Region> regions;

    // bounds
    BoundsConfig bounds;

    // Canonical echo of the fully resolved configuration.
    std::string resolved_json;
};

struct ValidationResult {
    std::shared_ptr<RunConfig> config; // null on failure
    std::vector<std::string> errors;   // complete list, not first-error-only
    bool ok() const { return config != nullptr && errors.empty(); }
};

// Strict parse: unknown keys are errors, every constraint violation is
// reported with its field path, and referenced files must exist.
ValidationResult validate_config_file(const std::filesystem::path& path);
ValidationResult validate_config_text(const std::string& text, const std::filesystem::path& base_dir);

// Component factories shared by the runner and the tests.
std::unique_ptr<GenerativeModel> make_model(const ModelConfig& cfg);
Prior make_prior(const PriorConfig& cfg);
Discrepancy make_discrepancy(const DiscrepancyConfig& cfg);
DataSet resolve_data(const RunConfig& cfg);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitZeroAcceptance = 3;

// Executes the configured experiment and writes run.json, draws.csv and the
// experiment-specific artifacts into the output directory. Returns an exit
// status (kExitZeroAcceptance when nothing was accepted).
int run_experiment(const RunConfig& cfg);

} // namespace otabc
