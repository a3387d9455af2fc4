#pragma once

#include <memory>
#include <optional>
#include <string>

#include "otabc/measures.hpp"
#include "otabc/rng.hpp"

namespace otabc {

// Standard normal distribution function.
double normal_cdf(double z);

// Parameter space H in R^d with box bounds and a metric rho_H.
struct ParameterSpace {
    int dim = 1;
    Box bounds; // one (possibly infinite) interval per coordinate
    MetricKind metric = MetricKind::euclidean;

    bool contains(std::span<const double> theta) const;
    double distance(std::span<const double> a, std::span<const double> b) const;
    void validate() const;
};

// Simulator theta -> z^{1:n}. Simulation is a pure function of
// (theta, n, stream state); models are stateless and safe to share across
// workers. The log-density is optional - its absence is exactly the
// intractable-likelihood case.
class GenerativeModel {
public:
    virtual ~GenerativeModel() = default;

    const std::string& id() const { return id_; }
    const ParameterSpace& parameter_space() const { return space_; }
    virtual int sample_dim() const { return 1; }

    // Validates theta against H, then simulates n observations.
    DataSet simulate(std::span<const double> theta, std::size_t n, RngStream& rng) const;
    void simulate_into(std::span<const double> theta, std::size_t n, RngStream& rng,
                       std::vector<double>& out) const;

    virtual bool has_log_density() const { return false; }
    virtual double log_density(std::span<const double> theta, const DataSet& z) const;

    // sigma when the model is i.i.d. Normal(theta, sigma); enables the
    // conjugate posterior oracle.
    virtual std::optional<double> iid_normal_sigma() const { return std::nullopt; }

protected:
    GenerativeModel(std::string id, ParameterSpace space);
    virtual void do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                             std::vector<double>& out) const = 0;

private:
    std::string id_;
    ParameterSpace space_;
};

// i.i.d. Normal(theta, sigma) observations; sigma fixed at construction.
class NormalLocationModel final : public GenerativeModel {
public:
    explicit NormalLocationModel(double sigma = 1.0, Box theta_bounds = {Interval{}});

    bool has_log_density() const override { return true; }
    double log_density(std::span<const double> theta, const DataSet& z) const override;
    std::optional<double> iid_normal_sigma() const override { return sigma_; }
    double sigma() const { return sigma_; }

private:
    void do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                     std::vector<double>& out) const override;
    double sigma_;
};

// z^k = V for every k with a single V ~ N(theta, 1): the empirical measure
// never settles, whatever n. Used to exercise the liminf lower bound.
class RepeatedNormalModel final : public GenerativeModel {
public:
    explicit RepeatedNormalModel(Box theta_bounds = {Interval{}});

private:
    void do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                     std::vector<double>& out) const override;
};

// Preferential-attachment growth: one node and one edge per step, the new
// node attaching to v with probability proportional to deg(v)^theta + 1.
// Emits the final degree sequence; no tractable likelihood.
class PrefAttachModel final : public GenerativeModel {
public:
    explicit PrefAttachModel(Box theta_bounds = {Interval{0.0, 3.0}});

private:
    void do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                     std::vector<double>& out) const override;
};

// Degree sequence of an n_nodes preferential-attachment graph. The degrees
// always sum to 2(n_nodes - 1).
DataSet simulate_pref_attach(double theta, std::size_t n_nodes, RngStream& rng);

// Prior on H: product of independent coordinates. Sampling consumes the
// given stream; interval probabilities are exact (no Monte Carlo).
class Prior {
public:
    enum class Kind { uniform, gaussian, truncated_gaussian };

    static Prior uniform(Box bounds);
    static Prior gaussian(std::vector<double> mean, std::vector<double> sd);
    static Prior truncated_gaussian(std::vector<double> mean, std::vector<double> sd, Box bounds);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Box& support() const { return bounds_; }
    // Location/scale parameters; empty for the uniform kind.
    std::span<const double> mean() const { return mean_; }
    std::span<const double> sd() const { return sd_; }

    void sample(RngStream& rng, std::span<double> out) const;
    std::vector<double> sample(RngStream& rng) const;

    // P[theta in box] with the half-open box convention (the boundary carries
    // no mass for these priors).
    double interval_prob(std::span<const Interval> box) const;
    // Marginal distribution function of the first coordinate (dim = 1 use).
    double cdf1(double x) const;

    std::string describe() const;

private:
    Prior() = default;
    double coord_cdf(std::size_t c, double x) const;

    Kind kind_ = Kind::uniform;
    int dim_ = 1;
    std::vector<double> mean_, sd_;
    Box bounds_;
};

// Conjugate posterior for i.i.d. Normal(theta, model_sigma) data under a
// Normal(prior_mean, prior_sd) prior. Empty data returns the prior.
struct NormalPosterior {
    double mean = 0.0;
    double sd = 1.0;

    double cdf(double x) const { return normal_cdf((x - mean) / sd); }
    double interval_prob(const Interval& iv) const { return cdf(iv.hi) - cdf(iv.lo); }
};

NormalPosterior normal_true_posterior(double prior_mean, double prior_sd,
                                      std::span<const double> data, double model_sigma = 1.0);

} // namespace otabc
