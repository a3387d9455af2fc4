#pragma once

#include <functional>
#include <string>

#include "otabc/models.hpp"
#include "otabc/transport.hpp"

namespace otabc {

// Pseudo-metric on the raw data space Y^n used by the acceptance rule.
// `bind_left` precomputes whatever is reusable for a fixed left argument
// (the observed data) and is what the rejection loop calls.
struct DeviationMeasure {
    std::string id;
    std::function<double(const DataSet&, const DataSet&)> eval;
    std::function<std::function<double(const DataSet&)>(const DataSet&)> bind_left;

    double operator()(const DataSet& y, const DataSet& z) const { return eval(y, z); }
};

// Deviation that compares the empirical measures of the two samples under
// the given discrepancy: D(y, z) = T(mu_hat_y, mu_hat_z). Permutation
// invariant in both arguments by construction.
DeviationMeasure deviation_from_discrepancy(const Discrepancy& disc);

// One full rejection pass: every draw is retained together with its
// discrepancy, and acceptance flags are derived (d_i <= epsilon), so the
// same draws can be re-thresholded without re-simulation.
struct AbcRun {
    int theta_dim = 1;
    std::vector<double> thetas;        // n_draws x theta_dim, flat
    std::vector<double> discrepancies; // n_draws
    double epsilon = kInf;
    double epsilon0 = kInf;
    std::uint64_t seed = 0;
    std::string model_id, prior_id, deviation_id;

    std::size_t n_draws() const { return discrepancies.size(); }
    std::span<const double> theta(std::size_t i) const {
        return {thetas.data() + i * static_cast<std::size_t>(theta_dim),
                static_cast<std::size_t>(theta_dim)};
    }
    bool accepted(std::size_t i) const { return discrepancies[i] <= epsilon; }
    std::size_t n_accepted() const;
    bool zero_acceptance() const { return n_accepted() == 0; }

    // Same draws, new threshold (must satisfy the same validity condition).
    AbcRun with_epsilon(double new_epsilon) const;
};

// Threshold validity: 0 < epsilon < epsilon0, with epsilon = +inf admitted
// when epsilon0 = +inf (the accept-everything ball D_inf = Y^n).
bool epsilon_valid(double epsilon, double epsilon0);

// The rejection algorithm. Draw i uses the deterministic stream
// (seed, i) for both the prior draw and the simulation, so the result is
// independent of the number of worker threads.
AbcRun abc_rejection(const GenerativeModel& model, const Prior& prior, const DataSet& data,
                     const DeviationMeasure& dev, double epsilon, std::size_t n_draws,
                     std::uint64_t seed, int threads = 1, double epsilon0 = kInf);

struct PosteriorEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_accepted = 0;
    std::size_t n_in_region = 0;
};

// pi_hat^eps[B] = #(accepted and in B) / #accepted, with the binomial
// Monte-Carlo standard error. NoPosteriorError when nothing was accepted.
PosteriorEstimate abc_posterior_prob(const AbcRun& run,
                                     const std::function<bool(std::span<const double>)>& region);
PosteriorEstimate abc_posterior_prob(const AbcRun& run, std::span<const Interval> box);

// Lower empirical quantile (order statistic at ceil(q*N)); thresholding at
// the returned value accepts at least q*N of the given discrepancies.
double epsilon_from_quantile(std::span<const double> discrepancies, double q);

} // namespace otabc
