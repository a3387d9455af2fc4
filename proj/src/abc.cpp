#include "otabc/abc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace otabc {

DeviationMeasure deviation_from_discrepancy(const Discrepancy& disc) {
    disc.validate();
    DeviationMeasure dev;
    dev.id = disc.describe() + " on empirical measures";
    const Discrepancy d = disc;
    dev.eval = [d](const DataSet& y, const DataSet& z) {
        const auto mu = EmpiricalMeasure::from_samples(y, d.space);
        const auto nu = EmpiricalMeasure::from_samples(z, d.space);
        return d.evaluate(mu, nu);
    };
    dev.bind_left = [d](const DataSet& y) {
        const auto mu = EmpiricalMeasure::from_samples(y, d.space);
        return [d, mu](const DataSet& z) {
            const auto nu = EmpiricalMeasure::from_samples(z, d.space);
            return d.evaluate(mu, nu);
        };
    };
    return dev;
}

std::size_t AbcRun::n_accepted() const {
    std::size_t n = 0;
    for (const double d : discrepancies) {
        if (d <= epsilon) ++n;
    }
    return n;
}

AbcRun AbcRun::with_epsilon(double new_epsilon) const {
    if (!epsilon_valid(new_epsilon, epsilon0)) {
        throw InvalidInputError("with_epsilon: threshold outside ]0, epsilon0[");
    }
    AbcRun out = *this;
    out.epsilon = new_epsilon;
    return out;
}

bool epsilon_valid(double epsilon, double epsilon0) {
    if (std::isnan(epsilon) || !(epsilon > 0.0)) return false;
    if (epsilon0 == kInf) return true; // +inf admitted: accept-everything ball
    return epsilon < epsilon0;
}

AbcRun abc_rejection(const GenerativeModel& model, const Prior& prior, const DataSet& data,
                     const DeviationMeasure& dev, double epsilon, std::size_t n_draws,
                     std::uint64_t seed, int threads, double epsilon0) {
    if (!epsilon_valid(epsilon, epsilon0)) {
        throw InvalidInputError("abc_rejection: epsilon outside ]0, epsilon0[");
    }
    if (n_draws < 1) {
        throw InvalidInputError("abc_rejection: n_draws must be >= 1");
    }
    if (data.count() == 0) {
        throw InvalidInputError("abc_rejection: observed data must be nonempty");
    }
    if (prior.dim() != model.parameter_space().dim) {
        throw InvalidInputError("abc_rejection: prior and model parameter dimensions differ");
    }
    if (threads < 1) threads = 1;

    const std::size_t n = data.count();
    const auto dim = static_cast<std::size_t>(prior.dim());

    AbcRun run;
    run.theta_dim = prior.dim();
    run.thetas.resize(n_draws * dim);
    run.discrepancies.resize(n_draws);
    run.epsilon = epsilon;
    run.epsilon0 = epsilon0;
    run.seed = seed;
    run.model_id = model.id();
    run.prior_id = prior.describe();
    run.deviation_id = dev.id;

    const auto worker = [&](std::size_t begin, std::size_t end) {
        std::function<double(const DataSet&)> distance_to_data;
        if (dev.bind_left) {
            distance_to_data = dev.bind_left(data);
        } else {
            distance_to_data = [&dev, &data](const DataSet& z) { return dev.eval(data, z); };
        }
        DataSet sim;
        sim.dim = model.sample_dim();
        for (std::size_t i = begin; i < end; ++i) {
            RngStream rng(seed, i);
            std::span<double> theta{run.thetas.data() + i * dim, dim};
            prior.sample(rng, theta);
            model.simulate_into(theta, n, rng, sim.values);
            run.discrepancies[i] = distance_to_data(sim);
        }
    };

    if (threads == 1 || n_draws < 2) {
        worker(0, n_draws);
    } else {
        const auto t = static_cast<std::size_t>(threads);
        std::vector<std::thread> pool;
        pool.reserve(t);
        const std::size_t chunk = (n_draws + t - 1) / t;
        for (std::size_t w = 0; w < t; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n_draws, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return run;
}

namespace {

PosteriorEstimate posterior_from_counts(std::size_t n_acc, std::size_t n_in) {
    PosteriorEstimate est;
    est.n_accepted = n_acc;
    est.n_in_region = n_in;
    est.estimate = static_cast<double>(n_in) / static_cast<double>(n_acc);
    est.std_error =
        std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(n_acc));
    return est;
}

} // namespace

PosteriorEstimate abc_posterior_prob(const AbcRun& run,
                                     const std::function<bool(std::span<const double>)>& region) {
    std::size_t n_acc = 0, n_in = 0;
    for (std::size_t i = 0; i < run.n_draws(); ++i) {
        if (!run.accepted(i)) continue;
        ++n_acc;
        if (region(run.theta(i))) ++n_in;
    }
    if (n_acc == 0) {
        throw NoPosteriorError("abc_posterior_prob: run has zero accepted draws");
    }
    return posterior_from_counts(n_acc, n_in);
}

PosteriorEstimate abc_posterior_prob(const AbcRun& run, std::span<const Interval> box) {
    if (box.size() != static_cast<std::size_t>(run.theta_dim)) {
        throw InvalidInputError("abc_posterior_prob: box dimension mismatch");
    }
    return abc_posterior_prob(
        run, [box](std::span<const double> theta) { return box_contains(box, theta); });
}

double epsilon_from_quantile(std::span<const double> discrepancies, double q) {
    if (discrepancies.empty()) {
        throw InvalidInputError("epsilon_from_quantile: empty discrepancy list");
    }
    if (!(q > 0.0 && q <= 1.0)) {
        throw InvalidInputError("epsilon_from_quantile: q must lie in ]0, 1]");
    }
    std::vector<double> sorted(discrepancies.begin(), discrepancies.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank < 1) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

} // namespace otabc
