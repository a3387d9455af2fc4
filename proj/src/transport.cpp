#include "otabc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "otabc/rng.hpp"

namespace otabc {

namespace {

double pow_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
}

double root_p(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return std::sqrt(x);
    return std::pow(x, 1.0 / p);
}

void require_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw InvalidInputError("transport: p must be a finite real >= 1");
    }
}

// W_p^p via the merged quantile partition; exact for step quantile functions.
double wasserstein_1d_ppow(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    const auto xa = mu.support_flat();
    const auto xb = nu.support_flat();
    const auto ca = mu.cumulative();
    const auto cb = nu.cumulative();
    double acc = 0.0;
    double tprev = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xa.size() && j < xb.size()) {
        const double t = std::min(ca[i], cb[j]);
        acc += (t - tprev) * pow_p(std::abs(xa[i] - xb[j]), p);
        tprev = t;
        const bool ai = (ca[i] == t);
        const bool bj = (cb[j] == t);
        if (ai) ++i;
        if (bj) ++j;
    }
    return acc;
}

// Exact transportation simplex on the dense bipartite problem. Nodes are
// rows 0..k-1 and columns k..k+m-1; the basis is a spanning tree with
// k+m-1 arcs throughout.
class TransportSimplex {
public:
    TransportSimplex(std::span<const double> supply, std::span<const double> demand,
                     std::span<const double> cost)
        : k_(supply.size()),
          m_(demand.size()),
          cost_(cost),
          supply_(supply.begin(), supply.end()),
          demand_(demand.begin(), demand.end()),
          is_basic_(k_ * m_, 0),
          adj_(k_ + m_) {}

    void solve() {
        northwest_corner();
        rebuild_adjacency();

        const std::size_t bland_after = 64 * (k_ + m_) + 1024;
        const std::size_t hard_cap = 4096 * (k_ + m_) + (1u << 20);
        for (std::size_t iter = 0;; ++iter) {
            if (iter > hard_cap) {
                throw Error("kantorovich_discrete: simplex iteration cap exceeded");
            }
            compute_potentials();
            std::size_t ei = 0, ej = 0;
            if (!find_entering(iter > bland_after, ei, ej)) {
                break;
            }
            pivot(ei, ej);
        }
    }

    double objective() const {
        double v = 0.0;
        for (const auto& a : basis_) {
            v += a.flow * cost_[a.i * m_ + a.j];
        }
        return v;
    }

    void fill_plan(std::vector<double>& plan) const {
        plan.assign(k_ * m_, 0.0);
        for (const auto& a : basis_) {
            plan[a.i * m_ + a.j] = (a.flow > 0.0) ? a.flow : 0.0;
        }
    }

private:
    struct Arc {
        std::uint32_t i, j;
        double flow;
    };

    void northwest_corner() {
        std::vector<double> a = supply_;
        std::vector<double> b = demand_;
        std::size_t i = 0, j = 0;
        while (true) {
            const double t = std::min(a[i], b[j]);
            basis_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), t});
            is_basic_[i * m_ + j] = 1;
            a[i] -= t;
            b[j] -= t;
            if (i + 1 == k_ && j + 1 == m_) break;
            if (a[i] <= 0.0 && i + 1 < k_) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    void rebuild_adjacency() {
        for (auto& lst : adj_) lst.clear();
        for (std::size_t id = 0; id < basis_.size(); ++id) {
            adj_[basis_[id].i].push_back(static_cast<std::uint32_t>(id));
            adj_[k_ + basis_[id].j].push_back(static_cast<std::uint32_t>(id));
        }
    }

    void compute_potentials() {
        u_.assign(k_, 0.0);
        v_.assign(m_, 0.0);
        std::vector<std::uint8_t> seen(k_ + m_, 0);
        std::deque<std::size_t> queue{0};
        seen[0] = 1;
        while (!queue.empty()) {
            const std::size_t node = queue.front();
            queue.pop_front();
            for (const auto id : adj_[node]) {
                const Arc& a = basis_[id];
                const std::size_t other = (node < k_) ? k_ + a.j : a.i;
                if (seen[other]) continue;
                seen[other] = 1;
                if (node < k_) {
                    v_[a.j] = cost_[a.i * m_ + a.j] - u_[a.i];
                } else {
                    u_[a.i] = cost_[a.i * m_ + a.j] - v_[a.j];
                }
                queue.push_back(other);
            }
        }
    }

    bool find_entering(bool bland, std::size_t& ei, std::size_t& ej) const {
        constexpr double tol = 1e-11;
        double best = -tol;
        bool found = false;
        for (std::size_t i = 0; i < k_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                if (is_basic_[i * m_ + j]) continue;
                const double r = cost_[i * m_ + j] - u_[i] - v_[j];
                if (r < best) {
                    best = r;
                    ei = i;
                    ej = j;
                    found = true;
                    if (bland) return true;
                }
            }
        }
        return found;
    }

    void pivot(std::size_t ei, std::size_t ej) {
        // Unique tree path from row node ei to column node k_+ej.
        const std::size_t src = ei;
        const std::size_t dst = k_ + ej;
        std::vector<std::int32_t> parent_arc(k_ + m_, -1);
        std::vector<std::int32_t> parent_node(k_ + m_, -1);
        std::vector<std::uint8_t> seen(k_ + m_, 0);
        std::deque<std::size_t> queue{src};
        seen[src] = 1;
        while (!queue.empty()) {
            const std::size_t node = queue.front();
            queue.pop_front();
            if (node == dst) break;
            for (const auto id : adj_[node]) {
                const Arc& a = basis_[id];
                const std::size_t other = (node < k_) ? k_ + a.j : a.i;
                if (seen[other]) continue;
                seen[other] = 1;
                parent_arc[other] = static_cast<std::int32_t>(id);
                parent_node[other] = static_cast<std::int32_t>(node);
                queue.push_back(other);
            }
        }

        std::vector<std::uint32_t> path;
        for (std::size_t node = dst; node != src;) {
            path.push_back(static_cast<std::uint32_t>(parent_arc[node]));
            node = static_cast<std::size_t>(parent_node[node]);
        }
        std::reverse(path.begin(), path.end());

        // Around the cycle the entering arc is "+"; path arcs alternate
        // starting with "-".
        double theta = kInf;
        std::size_t leaving_pos = 0;
        for (std::size_t pos = 0; pos < path.size(); pos += 2) {
            const double f = basis_[path[pos]].flow;
            if (f < theta) {
                theta = f;
                leaving_pos = pos;
            }
        }
        for (std::size_t pos = 0; pos < path.size(); ++pos) {
            basis_[path[pos]].flow += (pos % 2 == 0) ? -theta : theta;
        }
        const std::uint32_t leaving_id = path[leaving_pos];
        const Arc leaving = basis_[leaving_id];
        is_basic_[static_cast<std::size_t>(leaving.i) * m_ + leaving.j] = 0;
        is_basic_[ei * m_ + ej] = 1;
        basis_[leaving_id] = {static_cast<std::uint32_t>(ei), static_cast<std::uint32_t>(ej), theta};
        rebuild_adjacency();
    }

    std::size_t k_, m_;
    std::span<const double> cost_;
    std::vector<double> supply_, demand_;
    std::vector<Arc> basis_;
    std::vector<std::uint8_t> is_basic_;
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<double> u_, v_;
};

} // namespace

CostFunction CostFunction::metric_power(double p, MetricKind metric) {
    require_p(p);
    CostFunction c;
    c.p_ = p;
    c.metric_ = metric;
    return c;
}

CostFunction CostFunction::custom_table(std::size_t rows, std::size_t cols,
                                        std::vector<double> entries) {
    if (rows == 0 || cols == 0 || entries.size() != rows * cols) {
        throw InvalidInputError("CostFunction::custom_table: bad table shape");
    }
    for (double e : entries) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw InvalidInputError("CostFunction::custom_table: entries must be finite and >= 0");
        }
    }
    CostFunction c;
    c.custom_rows_ = rows;
    c.custom_cols_ = cols;
    c.table_ = std::move(entries);
    return c;
}

std::vector<double> CostFunction::matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const {
    const std::size_t k = mu.size();
    const std::size_t m = nu.size();
    if (custom_rows_ != 0) {
        if (custom_rows_ != k || custom_cols_ != m) {
            throw InvalidInputError("CostFunction: custom table shape does not match the supports");
        }
        return table_;
    }
    if (mu.dim() != nu.dim()) {
        throw InvalidInputError("CostFunction: measures have different dimensions");
    }
    SampleSpaceConfig space;
    space.dim = mu.dim();
    space.metric = metric_;
    std::vector<double> cost(k * m);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cost[i * m + j] = pow_p(space.distance(mu.point(i), nu.point(j)), p_);
        }
    }
    return cost;
}

double DiscreteCoupling::max_marginal_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += mass[i * cols + j];
        worst = std::max(worst, std::abs(s - row_marginal[i]));
    }
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += mass[i * cols + j];
        worst = std::max(worst, std::abs(s - col_marginal[j]));
    }
    return worst;
}

KantorovichResult kantorovich_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                       const CostFunction& cost, std::size_t cap) {
    const std::size_t k = mu.size();
    const std::size_t m = nu.size();
    if (k * m > cap) {
        throw TooLargeError("kantorovich_discrete: support product k*m exceeds the cap");
    }
    const std::vector<double> c = cost.matrix(mu, nu);

    TransportSimplex simplex(mu.weights(), nu.weights(), c);
    simplex.solve();

    KantorovichResult res;
    res.coupling.rows = k;
    res.coupling.cols = m;
    res.coupling.row_marginal.assign(mu.weights().begin(), mu.weights().end());
    res.coupling.col_marginal.assign(nu.weights().begin(), nu.weights().end());
    simplex.fill_plan(res.coupling.mass);
    res.value = simplex.objective();
    return res;
}

double wasserstein_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
    if (mu.dim() != 1 || nu.dim() != 1) {
        throw UnsupportedError("wasserstein_1d: both measures must be one-dimensional");
    }
    require_p(p);
    return root_p(wasserstein_1d_ppow(mu, nu, p), p);
}

double wasserstein_p(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                     MetricKind metric, std::size_t cap) {
    if (mu.dim() != nu.dim()) {
        throw InvalidInputError("wasserstein_p: measures have different dimensions");
    }
    require_p(p);
    if (mu.dim() == 1) {
        return wasserstein_1d(mu, nu, p);
    }
    if (mu.size() * nu.size() > cap) {
        throw TooLargeError(
            "wasserstein_p: supports exceed the exact-solver cap; use sliced_wasserstein");
    }
    const auto res = kantorovich_discrete(mu, nu, CostFunction::metric_power(p, metric), cap);
    return root_p(std::max(res.value, 0.0), p);
}

double sliced_wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p,
                          int n_projections, std::uint64_t rng_seed) {
    if (mu.dim() != nu.dim()) {
        throw InvalidInputError("sliced_wasserstein: measures have different dimensions");
    }
    require_p(p);
    if (n_projections < 1) {
        throw InvalidInputError("sliced_wasserstein: n_projections must be >= 1");
    }
    const auto d = static_cast<std::size_t>(mu.dim());
    if (d == 1) {
        // Every unit direction is +-1 and |<u, x>| differences reduce to plain
        // absolute differences, so the average is the 1-d distance itself.
        return wasserstein_1d(mu, nu, p);
    }

    RngStream rng(rng_seed, 0);
    std::vector<double> dir(d);
    std::vector<double> pa(mu.size());
    std::vector<double> pb(nu.size());
    double acc = 0.0;
    for (int t = 0; t < n_projections; ++t) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& g : dir) {
                g = rng.normal();
                norm += g * g;
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        for (auto& g : dir) g /= norm;

        for (std::size_t i = 0; i < mu.size(); ++i) {
            const auto pt = mu.point(i);
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += dir[c] * pt[c];
            pa[i] = s;
        }
        for (std::size_t j = 0; j < nu.size(); ++j) {
            const auto pt = nu.point(j);
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += dir[c] * pt[c];
            pb[j] = s;
        }
        const auto ma = EmpiricalMeasure::from_weighted(pa, mu.weights(), 1);
        const auto mb = EmpiricalMeasure::from_weighted(pb, nu.weights(), 1);
        acc += wasserstein_1d_ppow(ma, mb, p);
    }
    return root_p(acc / n_projections, p);
}

double radon_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dim() != nu.dim()) {
        throw InvalidInputError("radon_distance: measures have different dimensions");
    }
    const auto d = static_cast<std::size_t>(mu.dim());
    const auto less_lex = [d](std::span<const double> a, std::span<const double> b) {
        for (std::size_t c = 0; c < d; ++c) {
            if (a[c] < b[c]) return -1;
            if (a[c] > b[c]) return 1;
        }
        return 0;
    };
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < mu.size() || j < nu.size()) {
        if (i == mu.size()) {
            s += nu.weight(j++);
        } else if (j == nu.size()) {
            s += mu.weight(i++);
        } else {
            const int cmp = less_lex(mu.point(i), nu.point(j));
            if (cmp < 0) {
                s += mu.weight(i++);
            } else if (cmp > 0) {
                s += nu.weight(j++);
            } else {
                s += std::abs(mu.weight(i++) - nu.weight(j++));
            }
        }
    }
    return std::min(s, 2.0);
}

void Discrepancy::validate() const {
    require_p(p);
    if (n_projections < 1) {
        throw InvalidInputError("Discrepancy: n_projections must be >= 1");
    }
    space.validate();
}

double Discrepancy::evaluate(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const {
    switch (kind) {
        case Kind::wasserstein:
            return wasserstein_p(mu, nu, p, space.metric, kantorovich_cap);
        case Kind::sliced_wasserstein:
            return sliced_wasserstein(mu, nu, p, n_projections, projection_seed);
        case Kind::radon:
            return radon_distance(mu, nu);
    }
    throw Error("Discrepancy: unknown kind");
}

std::string Discrepancy::describe() const {
    switch (kind) {
        case Kind::wasserstein:
            return "wasserstein(p=" + std::to_string(p) + ")";
        case Kind::sliced_wasserstein:
            return "sliced_wasserstein(p=" + std::to_string(p) +
                   ", n_projections=" + std::to_string(n_projections) + ")";
        case Kind::radon:
            return "radon";
    }
    return "unknown";
}

} // namespace otabc
