#pragma once

#include <optional>

#include "otabc/abc.hpp"

namespace otabc {

// Long-run proxy for mu_theta: the empirical measure of m simulated
// observations at theta. Deterministic in (theta, m, seed); its discrepancy
// to the true mu_theta decays with m for ergodic models.
EmpiricalMeasure estimate_mu_theta(const GenerativeModel& model, std::span<const double> theta,
                                   std::size_t m, std::uint64_t seed);

// Grid estimates of the map theta -> T(mu_theta, mu_star) together with its
// minimum eps_star and minimizer theta_star, plus the tau/sigma exceedance
// constants once estimated. Parameter grids are one-dimensional.
struct AsymptoticEstimates {
    std::vector<double> theta_grid; // ascending
    std::vector<double> t_map;      // same length
    double eps_star = 0.0;
    double theta_star = 0.0;
    std::size_t theta_star_index = 0;

    double tau_hat = 0.0;
    double sigma_hat = 0.0;
    double eps1_hat = kInf;
    double tau_std_error = 0.0;
    double sigma_std_error = 0.0;
    std::size_t mc_reps = 0;
    std::vector<std::size_t> n_values;

    // Piecewise-linear interpolation of the grid map, constant beyond the
    // grid hull.
    double interpolate(double theta) const;
};

AsymptoticEstimates estimate_T_map(const GenerativeModel& model, const Discrepancy& disc,
                                   std::vector<double> theta_grid,
                                   const EmpiricalMeasure& data_proxy, std::size_t m,
                                   std::uint64_t seed);

// Monte-Carlo exceedance estimates mu_theta^n[T(mu_{theta,n}, mu_theta) > eps]
// across theta, eps and n. The limsup/liminf in the definitions of tau and
// sigma are proxied by the estimate at the largest configured n; the full
// n-trajectories are returned so non-convergence is visible.
struct TauSigmaResult {
    double tau_hat = 0.0;
    double sigma_hat = 0.0;
    double eps1_hat = kInf;
    double tau_std_error = 0.0;
    double sigma_std_error = 0.0;
    bool sigma_clamped = false; // raised sigma > tau clamped down to tau

    struct Trajectory {
        double theta = 0.0;
        double eps = 0.0;
        std::vector<double> exceedance_by_n;
    };
    std::vector<Trajectory> trajectories;
    std::vector<std::size_t> n_values;
    std::size_t mc_reps = 0;
};

TauSigmaResult estimate_tau_sigma(const GenerativeModel& model, const Discrepancy& disc,
                                  std::span<const double> theta_sample,
                                  std::span<const double> eps_values,
                                  std::span<const std::size_t> n_values, std::size_t mc_reps,
                                  std::uint64_t seed, std::size_t m_proxy = 0);

// Parameter region with a printable label.
struct Region {
    std::string label;
    Box box;
};

struct ConvergenceRow {
    double epsilon = 0.0;
    std::string region;
    double abc_estimate = 0.0;
    double oracle_value = 0.0;
    double abs_error = 0.0;
    double mc_stderr = 0.0;
    std::size_t n_accepted = 0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    AbcRun run; // pass at the largest threshold; rows re-threshold it
};

// One rejection pass at the top of the schedule, re-thresholded downwards,
// compared region by region against the conjugate-normal oracle.
ConvergenceResult convergence_experiment(const GenerativeModel& model, const Prior& prior,
                                         const DataSet& data, const DeviationMeasure& dev,
                                         std::span<const double> eps_schedule, std::size_t n_draws,
                                         std::span<const Region> regions, std::uint64_t seed,
                                         int threads = 1, double epsilon0 = kInf);

// Documented contract of the experiment: at the smallest threshold with at
// least 500 acceptances, each region's error is <= max(0.02, 3 * stderr).
// Returns one message per violation (empty when the contract holds).
std::vector<std::string> convergence_contract_violations(std::span<const ConvergenceRow> rows);

// Local growth bound psi(u) = scale * u^exponent valid on I0 = ]0, radius].
struct ModulusSpec {
    double scale = 1.0;
    double exponent = 1.0;
    double radius = 0.0;

    double psi(double u) const;
    void validate() const;
};

// Least-squares fit of log(T - eps_star) against log|theta - theta_star|
// over the neighborhood of theta_star (radius 0 picks a default from the
// grid geometry). InvalidInputError when fewer than two usable points exist.
ModulusSpec fit_modulus(const AsymptoticEstimates& est, double radius = 0.0);

// Prior mass of the sublevel set { theta : T_interp(theta) <= c }, computed
// by piecewise-linear inversion of the grid map and exact prior interval
// probabilities (no Monte Carlo on this side).
double prior_sublevel_mass(const AsymptoticEstimates& est, const Prior& prior, double c);

struct BoundLine {
    std::string part; // "a", "b", "c", "d", "density_a", "density_b"
    double zeta = std::numeric_limits<double>::quiet_NaN();
    double lhs = 0.0;
    double rhs = 0.0;
    double std_error = 0.0;
    bool passes = false;
};

struct LowerBoundReport {
    double epsilon = 0.0;
    double eps_star = 0.0;
    double theta_star = 0.0;
    double tau_hat = 0.0;
    double sigma_hat = 0.0;
    double eps1_hat = kInf;

    double lambda_eps = 0.0;
    double plain_factor = 0.0;     // 1 - tau_hat
    double sharpened_factor = 0.0; // (1 - tau_hat) / lambda_eps
    double argmin_tolerance = 0.0;
    std::size_t n_accepted = 0;

    bool hypothesis_unmet = false;    // eps_star >= eps0, or eps outside ]0, eps0 - eps_star[
    bool part_c_hypothesis_ok = true; // eps_star < eps1/2 and 2 eps_star + 3 eps < eps1
    bool modulus_available = false;
    bool modulus_fitted = false;
    ModulusSpec modulus;

    bool density_factor_estimable = false;
    double density_factor = std::numeric_limits<double>::quiet_NaN();
    double density_factor_log_min = 0.0;
    double density_factor_log_mean = 0.0;

    std::vector<BoundLine> lines;
    std::vector<std::string> notes;
};

// Numerical evaluation of the small-threshold lower bounds at threshold
// eps_star + eps. The run must have been produced at exactly that threshold
// with a deviation built by deviation_from_discrepancy (so the acceptance
// event coincides with the discrepancy ball). `model` and `data`, when
// given for a model with a density, enable the heuristic plug-in estimate
// of the min/mean density factor; otherwise that section is marked not
// estimable.
LowerBoundReport lower_bound_report(const AbcRun& run, const AsymptoticEstimates& est,
                                    const Prior& prior, double eps,
                                    std::span<const double> zeta_values,
                                    const std::optional<ModulusSpec>& modulus = std::nullopt,
                                    const GenerativeModel* model = nullptr,
                                    const DataSet* data = nullptr);

} // namespace otabc
