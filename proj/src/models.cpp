#include "otabc/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otabc {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

bool ParameterSpace::contains(std::span<const double> theta) const {
    if (theta.size() != static_cast<std::size_t>(dim)) return false;
    for (std::size_t c = 0; c < theta.size(); ++c) {
        if (!(theta[c] >= bounds[c].lo && theta[c] <= bounds[c].hi)) return false;
    }
    return true;
}

double ParameterSpace::distance(std::span<const double> a, std::span<const double> b) const {
    SampleSpaceConfig s;
    s.dim = dim;
    s.metric = metric;
    return s.distance(a, b);
}

void ParameterSpace::validate() const {
    if (dim < 1) {
        throw InvalidInputError("ParameterSpace: dim must be >= 1");
    }
    if (bounds.size() != static_cast<std::size_t>(dim)) {
        throw InvalidInputError("ParameterSpace: bounds size must equal dim");
    }
    for (const auto& iv : bounds) {
        if (!(iv.lo <= iv.hi)) {
            throw InvalidInputError("ParameterSpace: empty bound interval");
        }
    }
}

GenerativeModel::GenerativeModel(std::string id, ParameterSpace space)
    : id_(std::move(id)), space_(std::move(space)) {
    space_.validate();
}

DataSet GenerativeModel::simulate(std::span<const double> theta, std::size_t n,
                                  RngStream& rng) const {
    DataSet out;
    out.dim = sample_dim();
    simulate_into(theta, n, rng, out.values);
    return out;
}

void GenerativeModel::simulate_into(std::span<const double> theta, std::size_t n, RngStream& rng,
                                    std::vector<double>& out) const {
    if (n < 1) {
        throw InvalidInputError("simulate: n must be >= 1");
    }
    if (!space_.contains(theta)) {
        throw InvalidInputError("simulate: theta outside the parameter space");
    }
    out.clear();
    do_simulate(theta, n, rng, out);
}

double GenerativeModel::log_density(std::span<const double>, const DataSet&) const {
    throw UnsupportedError("log_density: model '" + id_ + "' does not expose a density");
}

NormalLocationModel::NormalLocationModel(double sigma, Box theta_bounds)
    : GenerativeModel("normal_location", ParameterSpace{1, std::move(theta_bounds)}), sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidInputError("NormalLocationModel: sigma must be positive");
    }
}

void NormalLocationModel::do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                                      std::vector<double>& out) const {
    out.resize(n);
    for (auto& z : out) {
        z = theta[0] + sigma_ * rng.normal();
    }
}

double NormalLocationModel::log_density(std::span<const double> theta, const DataSet& z) const {
    if (theta.size() != 1) {
        throw InvalidInputError("log_density: theta must be scalar");
    }
    if (z.dim != 1 || z.values.empty()) {
        throw InvalidInputError("log_density: data must be nonempty and one-dimensional");
    }
    constexpr double log_two_pi = 1.8378770664093454836;
    const double inv_var = 1.0 / (sigma_ * sigma_);
    double acc = 0.0;
    for (const double v : z.values) {
        const double d = v - theta[0];
        acc += d * d;
    }
    const auto n = static_cast<double>(z.values.size());
    return -0.5 * n * (log_two_pi + 2.0 * std::log(sigma_)) - 0.5 * inv_var * acc;
}

RepeatedNormalModel::RepeatedNormalModel(Box theta_bounds)
    : GenerativeModel("normal_repeated", ParameterSpace{1, std::move(theta_bounds)}) {}

void RepeatedNormalModel::do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                                      std::vector<double>& out) const {
    const double v = theta[0] + rng.normal();
    out.assign(n, v);
}

PrefAttachModel::PrefAttachModel(Box theta_bounds)
    : GenerativeModel("pref_attach", ParameterSpace{1, std::move(theta_bounds)}) {}

void PrefAttachModel::do_simulate(std::span<const double> theta, std::size_t n, RngStream& rng,
                                  std::vector<double>& out) const {
    out = simulate_pref_attach(theta[0], n, rng).values;
}

DataSet simulate_pref_attach(double theta, std::size_t n_nodes, RngStream& rng) {
    if (n_nodes < 2) {
        throw InvalidInputError("simulate_pref_attach: n_nodes must be >= 2");
    }
    std::vector<std::uint32_t> degree(n_nodes, 0);
    std::vector<double> weight(n_nodes, 0.0);
    degree[0] = degree[1] = 1; // seed edge
    weight[0] = weight[1] = 2.0;
    double total = weight[0] + weight[1];
    for (std::size_t k = 2; k < n_nodes; ++k) {
        const double u = rng.uniform01() * total;
        std::size_t target = k - 1;
        double acc = 0.0;
        for (std::size_t v = 0; v < k; ++v) {
            acc += weight[v];
            if (u < acc) {
                target = v;
                break;
            }
        }
        ++degree[target];
        const double w = std::pow(static_cast<double>(degree[target]), theta) + 1.0;
        total += w - weight[target];
        weight[target] = w;
        degree[k] = 1;
        weight[k] = 2.0;
        total += weight[k];
    }
    DataSet out;
    out.dim = 1;
    out.values.assign(degree.begin(), degree.end());
    return out;
}

Prior Prior::uniform(Box bounds) {
    if (bounds.empty()) {
        throw InvalidInputError("Prior::uniform: bounds must be nonempty");
    }
    for (const auto& iv : bounds) {
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo < iv.hi)) {
            throw InvalidInputError("Prior::uniform: bounds must be finite nondegenerate intervals");
        }
    }
    Prior p;
    p.kind_ = Kind::uniform;
    p.dim_ = static_cast<int>(bounds.size());
    p.bounds_ = std::move(bounds);
    return p;
}

Prior Prior::gaussian(std::vector<double> mean, std::vector<double> sd) {
    if (mean.empty() || mean.size() != sd.size()) {
        throw InvalidInputError("Prior::gaussian: mean/sd must be nonempty and equally sized");
    }
    for (double s : sd) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InvalidInputError("Prior::gaussian: sd must be positive");
        }
    }
    Prior p;
    p.kind_ = Kind::gaussian;
    p.dim_ = static_cast<int>(mean.size());
    p.mean_ = std::move(mean);
    p.sd_ = std::move(sd);
    p.bounds_.assign(static_cast<std::size_t>(p.dim_), Interval{});
    return p;
}

Prior Prior::truncated_gaussian(std::vector<double> mean, std::vector<double> sd, Box bounds) {
    Prior p = gaussian(std::move(mean), std::move(sd));
    if (bounds.size() != static_cast<std::size_t>(p.dim_)) {
        throw InvalidInputError("Prior::truncated_gaussian: bounds size must match dim");
    }
    for (std::size_t c = 0; c < bounds.size(); ++c) {
        if (!(bounds[c].lo < bounds[c].hi)) {
            throw InvalidInputError("Prior::truncated_gaussian: empty bound interval");
        }
        const double mass = normal_cdf((bounds[c].hi - p.mean_[c]) / p.sd_[c]) -
                            normal_cdf((bounds[c].lo - p.mean_[c]) / p.sd_[c]);
        if (!(mass > 0.0)) {
            throw InvalidInputError("Prior::truncated_gaussian: bounds carry no prior mass");
        }
    }
    p.kind_ = Kind::truncated_gaussian;
    p.bounds_ = std::move(bounds);
    return p;
}

void Prior::sample(RngStream& rng, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(dim_)) {
        throw InvalidInputError("Prior::sample: output span has wrong size");
    }
    switch (kind_) {
        case Kind::uniform:
            for (std::size_t c = 0; c < out.size(); ++c) {
                out[c] = rng.uniform(bounds_[c].lo, bounds_[c].hi);
            }
            return;
        case Kind::gaussian:
            for (std::size_t c = 0; c < out.size(); ++c) {
                out[c] = mean_[c] + sd_[c] * rng.normal();
            }
            return;
        case Kind::truncated_gaussian:
            for (std::size_t c = 0; c < out.size(); ++c) {
                double x = 0.0;
                int attempts = 0;
                do {
                    if (++attempts > 1'000'000) {
                        throw Error("Prior::sample: truncated-gaussian rejection stalled");
                    }
                    x = mean_[c] + sd_[c] * rng.normal();
                } while (!(x >= bounds_[c].lo && x <= bounds_[c].hi));
                out[c] = x;
            }
            return;
    }
    throw Error("Prior: unknown kind");
}

std::vector<double> Prior::sample(RngStream& rng) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    sample(rng, out);
    return out;
}

double Prior::coord_cdf(std::size_t c, double x) const {
    switch (kind_) {
        case Kind::uniform: {
            const auto& iv = bounds_[c];
            if (x <= iv.lo) return 0.0;
            if (x >= iv.hi) return 1.0;
            return (x - iv.lo) / (iv.hi - iv.lo);
        }
        case Kind::gaussian:
            return normal_cdf((x - mean_[c]) / sd_[c]);
        case Kind::truncated_gaussian: {
            const auto& iv = bounds_[c];
            if (x <= iv.lo) return 0.0;
            if (x >= iv.hi) return 1.0;
            const double lo = normal_cdf((iv.lo - mean_[c]) / sd_[c]);
            const double hi = normal_cdf((iv.hi - mean_[c]) / sd_[c]);
            return (normal_cdf((x - mean_[c]) / sd_[c]) - lo) / (hi - lo);
        }
    }
    throw Error("Prior: unknown kind");
}

double Prior::interval_prob(std::span<const Interval> box) const {
    if (box.size() != static_cast<std::size_t>(dim_)) {
        throw InvalidInputError("Prior::interval_prob: box dimension mismatch");
    }
    double p = 1.0;
    for (std::size_t c = 0; c < box.size(); ++c) {
        if (!(box[c].lo <= box[c].hi)) {
            throw InvalidInputError("Prior::interval_prob: empty interval");
        }
        p *= std::max(0.0, coord_cdf(c, box[c].hi) - coord_cdf(c, box[c].lo));
    }
    return p;
}

double Prior::cdf1(double x) const { return coord_cdf(0, x); }

std::string Prior::describe() const {
    switch (kind_) {
        case Kind::uniform:
            return "uniform";
        case Kind::gaussian:
            return "gaussian";
        case Kind::truncated_gaussian:
            return "truncated_gaussian";
    }
    return "unknown";
}

NormalPosterior normal_true_posterior(double prior_mean, double prior_sd,
                                      std::span<const double> data, double model_sigma) {
    if (!(prior_sd > 0.0) || !(model_sigma > 0.0)) {
        throw InvalidInputError("normal_true_posterior: scales must be positive");
    }
    NormalPosterior post;
    if (data.empty()) {
        post.mean = prior_mean;
        post.sd = prior_sd;
        return post;
    }
    const auto n = static_cast<double>(data.size());
    const double ybar = std::accumulate(data.begin(), data.end(), 0.0) / n;
    const double prior_precision = 1.0 / (prior_sd * prior_sd);
    const double data_precision = n / (model_sigma * model_sigma);
    const double precision = prior_precision + data_precision;
    post.mean = (prior_mean * prior_precision + ybar * data_precision) / precision;
    post.sd = std::sqrt(1.0 / precision);
    return post;
}

} // namespace otabc
