#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "otabc/errors.hpp"

namespace otabc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class MetricKind { euclidean, absolute };

// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;
};

// Axis-aligned box, one interval per coordinate.
using Box = std::vector<Interval>;

// Membership with half-open ]lo, hi] semantics per coordinate, so that
// adjacent boxes sharing a face form a genuine partition.
bool box_contains(std::span<const Interval> box, std::span<const double> x);

// Raw data block: `count()` points of dimension `dim`, stored flat row-major.
struct DataSet {
    std::vector<double> values;
    int dim = 1;

    std::size_t count() const { return dim > 0 ? values.size() / static_cast<std::size_t>(dim) : 0; }
    std::span<const double> point(std::size_t i) const {
        return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

// The sample space (Y, rho_Y): dimension, metric, optional box bounds.
struct SampleSpaceConfig {
    int dim = 1;
    MetricKind metric = MetricKind::euclidean;
    std::optional<Box> bounds;

    double distance(std::span<const double> a, std::span<const double> b) const;
    void validate() const;
};

// Finitely supported probability measure on R^d.
//
// Construction canonicalizes the representation: atoms sorted
// lexicographically, exact duplicates merged (weights added), weights
// normalized to total mass one, zero-weight atoms pruned. Two inputs that
// describe the same measure therefore compare equal atom by atom, and
// permuting the input samples reproduces the identical object.
// Instances are immutable; concurrent reads are safe.
class EmpiricalMeasure {
public:
    // Uniform weights 1/n over the given samples.
    static EmpiricalMeasure from_samples(const DataSet& samples, const SampleSpaceConfig& space);
    static EmpiricalMeasure from_samples(std::span<const double> flat, const SampleSpaceConfig& space);

    // Arbitrary nonnegative weights (normalized on construction).
    static EmpiricalMeasure from_weighted(std::span<const double> flat, std::span<const double> weights,
                                          int dim);

    int dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }

    std::span<const double> point(std::size_t i) const {
        return {support_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    // Scalar atom, d = 1 storage.
    double atom(std::size_t i) const { return support_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> support_flat() const { return support_; }
    std::span<const double> weights() const { return weights_; }
    // Prefix sums of the weights; the last entry is exactly 1.
    std::span<const double> cumulative() const { return cum_; }

    // Right-continuous distribution function (d = 1 only).
    double cdf(double y) const;
    // Left-continuous generalized inverse F^{-1}(t) = inf{ y : F(y) >= t },
    // defined for t in ]0, 1] (d = 1 only).
    double quantile(double t) const;

    double min_support() const;
    double max_support() const;

    friend bool operator==(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
        return a.dim_ == b.dim_ && a.support_ == b.support_ && a.weights_ == b.weights_;
    }

private:
    EmpiricalMeasure() = default;
    static EmpiricalMeasure build(std::span<const double> flat, std::span<const double> weights, int dim);
    void require_univariate(const char* op) const;

    int dim_ = 1;
    std::vector<double> support_; // size() * dim_, canonical order
    std::vector<double> weights_;
    std::vector<double> cum_;
};

} // namespace otabc
