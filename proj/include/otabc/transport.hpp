#pragma once

#include <cstdint>
#include <string>

#include "otabc/measures.hpp"

namespace otabc {

inline constexpr std::size_t kDefaultKantorovichCap = 10'000;

// Unit cost c(y, y') between support points. Either rho(y, y')^p for the
// space metric, or an explicit nonnegative table.
class CostFunction {
public:
    static CostFunction metric_power(double p, MetricKind metric = MetricKind::euclidean);
    static CostFunction custom_table(std::size_t rows, std::size_t cols, std::vector<double> entries);

    // Dense row-major cost matrix for the two supports.
    std::vector<double> matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const;

    bool is_metric_power() const { return custom_rows_ == 0; }
    double power() const { return p_; }

private:
    CostFunction() = default;
    double p_ = 1.0;
    MetricKind metric_ = MetricKind::euclidean;
    std::size_t custom_rows_ = 0, custom_cols_ = 0;
    std::vector<double> table_;
};

// Joint mass matrix with prescribed marginals (a transport plan).
struct DiscreteCoupling {
    std::size_t rows = 0, cols = 0;
    std::vector<double> mass;         // row-major rows x cols
    std::vector<double> row_marginal; // weights of mu
    std::vector<double> col_marginal; // weights of nu

    double operator()(std::size_t i, std::size_t j) const { return mass[i * cols + j]; }
    // Largest absolute row/column-sum deviation from the marginals.
    double max_marginal_violation() const;
};

struct KantorovichResult {
    double value = 0.0;
    DiscreteCoupling coupling;
};

// Exact solution of the discrete Kantorovich problem
//   min_{gamma in Gamma(mu, nu)} sum_ij gamma_ij c(y_i, y'_j)
// by the transportation simplex. Support sizes k, m must satisfy
// k * m <= cap (TooLargeError otherwise).
KantorovichResult kantorovich_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                       const CostFunction& cost,
                                       std::size_t cap = kDefaultKantorovichCap);

// W_p(mu, nu) for univariate measures through the quantile identity
//   W_p^p = int_0^1 |F_mu^{-1}(t) - F_nu^{-1}(t)|^p dt,
// evaluated exactly by merging the two weight partitions of [0, 1].
double wasserstein_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

// W_p in any dimension: the closed form when d = 1, otherwise the exact
// discrete solver under cost rho^p (TooLargeError beyond the cap, where
// sliced_wasserstein is the intended fallback).
double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                     MetricKind metric = MetricKind::euclidean,
                     std::size_t cap = kDefaultKantorovichCap);

// Monte-Carlo sliced W_p: average of 1-d W_p^p over `n_projections` uniform
// unit directions, then the p-th root. Fully determined by `rng_seed`.
double sliced_wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                          int n_projections, std::uint64_t rng_seed);

// Radon (total variation) metric: sup over |h| <= 1 of int h d(mu - nu),
// which for purely atomic measures is the closed form
// sum_x |mu({x}) - nu({x})| over the union of supports. Value in [0, 2].
double radon_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Pseudo-distance selector on probability measures over Y.
struct Discrepancy {
    enum class Kind { wasserstein, sliced_wasserstein, radon };

    Kind kind = Kind::wasserstein;
    double p = 1.0;
    int n_projections = 100;
    std::uint64_t projection_seed = 0x51ced;
    SampleSpaceConfig space;
    std::size_t kantorovich_cap = kDefaultKantorovichCap;

    void validate() const;
    double evaluate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const;
    std::string describe() const;
};

} // namespace otabc
