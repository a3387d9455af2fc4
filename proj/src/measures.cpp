#include "otabc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otabc {

bool box_contains(std::span<const Interval> box, std::span<const double> x) {
    if (box.size() != x.size()) {
        throw InvalidInputError("box_contains: box and point dimensions differ");
    }
    for (std::size_t c = 0; c < x.size(); ++c) {
        const auto& iv = box[c];
        if (!(x[c] > iv.lo) || !(x[c] <= iv.hi)) {
            return false;
        }
    }
    return true;
}

double SampleSpaceConfig::distance(std::span<const double> a, std::span<const double> b) const {
    if (a.size() != b.size()) {
        throw InvalidInputError("distance: point dimensions differ");
    }
    if (metric == MetricKind::euclidean) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c) {
            const double d = a[c] - b[c];
            s += d * d;
        }
        return std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        s += std::abs(a[c] - b[c]);
    }
    return s;
}

void SampleSpaceConfig::validate() const {
    if (dim < 1) {
        throw InvalidInputError("SampleSpaceConfig: dim must be >= 1");
    }
    if (bounds && static_cast<int>(bounds->size()) != dim) {
        throw InvalidInputError("SampleSpaceConfig: bounds size must equal dim");
    }
    if (bounds) {
        for (const auto& iv : *bounds) {
            if (!(iv.lo <= iv.hi)) {
                throw InvalidInputError("SampleSpaceConfig: empty bound interval");
            }
        }
    }
}

namespace {

// Lexicographic point order with the weight as final tie-breaker, so that
// equal-atom weights are always added in the same order regardless of the
// input permutation.
struct AtomLess {
    std::span<const double> flat;
    std::span<const double> weights;
    std::size_t dim;
    bool operator()(std::size_t a, std::size_t b) const {
        const double* pa = flat.data() + a * dim;
        const double* pb = flat.data() + b * dim;
        for (std::size_t c = 0; c < dim; ++c) {
            if (pa[c] < pb[c]) return true;
            if (pa[c] > pb[c]) return false;
        }
        return weights[a] < weights[b];
    }
};

bool same_point(const double* a, const double* b, std::size_t dim) {
    for (std::size_t c = 0; c < dim; ++c) {
        if (a[c] != b[c]) return false;
    }
    return true;
}

} // namespace

EmpiricalMeasure EmpiricalMeasure::build(std::span<const double> flat, std::span<const double> weights,
                                         int dim) {
    if (dim < 1) {
        throw InvalidInputError("EmpiricalMeasure: dim must be >= 1");
    }
    const auto d = static_cast<std::size_t>(dim);
    if (flat.size() % d != 0) {
        throw InvalidInputError("EmpiricalMeasure: flat sample size is not a multiple of dim");
    }
    const std::size_t n = flat.size() / d;
    if (n == 0) {
        throw InvalidInputError("EmpiricalMeasure: empty sample");
    }
    if (weights.size() != n) {
        throw InvalidInputError("EmpiricalMeasure: weights length does not match sample count");
    }
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidInputError("EmpiricalMeasure: weights must be finite and nonnegative");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), AtomLess{flat, weights, d});

    EmpiricalMeasure m;
    m.dim_ = dim;
    m.support_.reserve(flat.size());
    m.weights_.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double* p = flat.data() + order[r] * d;
        const double w = weights[order[r]];
        if (!m.weights_.empty() && same_point(p, m.support_.data() + (m.weights_.size() - 1) * d, d)) {
            m.weights_.back() += w;
        } else {
            m.support_.insert(m.support_.end(), p, p + d);
            m.weights_.push_back(w);
        }
    }

    // Prune zero-mass atoms, then normalize.
    std::size_t out = 0;
    for (std::size_t i = 0; i < m.weights_.size(); ++i) {
        if (m.weights_[i] > 0.0) {
            if (out != i) {
                m.weights_[out] = m.weights_[i];
                std::copy_n(m.support_.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                            m.support_.begin() + static_cast<std::ptrdiff_t>(out * d));
            }
            ++out;
        }
    }
    m.weights_.resize(out);
    m.support_.resize(out * d);
    if (out == 0) {
        throw InvalidInputError("EmpiricalMeasure: total mass is zero");
    }

    const double total = std::accumulate(m.weights_.begin(), m.weights_.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw InvalidInputError("EmpiricalMeasure: total mass must be positive and finite");
    }
    for (double& w : m.weights_) {
        w /= total;
    }
    m.cum_.resize(out);
    double acc = 0.0;
    for (std::size_t i = 0; i < out; ++i) {
        acc += m.weights_[i];
        m.cum_[i] = acc;
    }
    m.cum_.back() = 1.0;
    return m;
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::span<const double> flat,
                                                const SampleSpaceConfig& space) {
    space.validate();
    const auto d = static_cast<std::size_t>(space.dim);
    if (flat.empty()) {
        throw InvalidInputError("empirical_from_samples: empty sample list");
    }
    if (flat.size() % d != 0) {
        throw InvalidInputError("empirical_from_samples: sample dimension mismatch");
    }
    if (space.bounds) {
        const std::size_t n = flat.size() / d;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                const double x = flat[i * d + c];
                const auto& iv = (*space.bounds)[c];
                if (!(x >= iv.lo && x <= iv.hi)) {
                    throw InvalidInputError("empirical_from_samples: sample outside space bounds");
                }
            }
        }
    }
    const std::vector<double> ones(flat.size() / d, 1.0);
    return build(flat, ones, space.dim);
}

EmpiricalMeasure EmpiricalMeasure::from_samples(const DataSet& samples, const SampleSpaceConfig& space) {
    if (samples.dim != space.dim) {
        throw InvalidInputError("empirical_from_samples: data dimension does not match space");
    }
    return from_samples(std::span<const double>(samples.values), space);
}

EmpiricalMeasure EmpiricalMeasure::from_weighted(std::span<const double> flat,
                                                 std::span<const double> weights, int dim) {
    return build(flat, weights, dim);
}

void EmpiricalMeasure::require_univariate(const char* op) const {
    if (dim_ != 1) {
        throw UnsupportedError(std::string(op) + ": defined for one-dimensional measures only");
    }
}

double EmpiricalMeasure::cdf(double y) const {
    require_univariate("cdf");
    const auto it = std::upper_bound(support_.begin(), support_.end(), y);
    if (it == support_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double EmpiricalMeasure::quantile(double t) const {
    require_univariate("quantile");
    if (!(t > 0.0 && t <= 1.0)) {
        throw InvalidInputError("quantile: t must lie in ]0, 1]");
    }
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), t);
    return support_[static_cast<std::size_t>(it - cum_.begin())];
}

double EmpiricalMeasure::min_support() const {
    require_univariate("min_support");
    return support_.front();
}

double EmpiricalMeasure::max_support() const {
    require_univariate("max_support");
    return support_.back();
}

} // namespace otabc
