#include "spdsliced/transport.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "spdsliced/parallel.hpp"

namespace spdsliced {

std::string_view to_string(GroundMetric metric) {
    switch (metric) {
        case GroundMetric::log_euclidean: return "log_euclidean";
        case GroundMetric::affine_invariant: return "affine_invariant";
    }
    return "unknown";
}

namespace {

double raise(double distance, double p) {
    if (p == 1.0) return distance;
    if (p == 2.0) return distance * distance;
    return std::pow(distance, p);
}

}  // namespace

CostMatrix make_cost_matrix(Matrix entries, GroundMetric metric, double p) {
    require(entries.size() > 0, ErrorCode::EmptyMeasure, "cost matrix is empty");
    require(entries.allFinite() && entries.minCoeff() >= 0.0, ErrorCode::InvalidData,
            "cost entries must be finite and nonnegative");
    return {std::move(entries), metric, p};
}

CostMatrix build_cost_matrix(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu, GroundMetric metric,
                             double p) {
    require(mu.dim() == nu.dim(), ErrorCode::DimensionMismatch, "cost matrix between different dimensions");
    require(p >= 1.0, ErrorCode::InvalidArgument, "order p must be >= 1");
    const Index n = mu.size(), m = nu.size();
    Matrix c(n, m);
    if (metric == GroundMetric::log_euclidean) {
        const Matrix &x = mu.log_measure().vectorized();
        const Matrix &y = nu.log_measure().vectorized();
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
            const auto i = static_cast<Index>(row);
            for (Index j = 0; j < m; ++j) {
                const double sq = (x.col(i) - y.col(j)).squaredNorm();
                c(i, j) = p == 2.0 ? sq : raise(std::sqrt(sq), p);
            }
        });
    } else {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
            const auto i = static_cast<Index>(row);
            for (Index j = 0; j < m; ++j) c(i, j) = raise(dist_affine_invariant(mu[i], nu[j]), p);
        });
    }
    return make_cost_matrix(std::move(c), metric, p);
}

std::vector<Index> solve_assignment(const Matrix &cost) {
    const Index n = cost.rows();
    require(n == cost.cols(), ErrorCode::SizeMismatch, "assignment needs a square cost matrix");
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual root of each augmenting search.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
    std::vector<Index> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (Index i = 1; i <= n; ++i) {
        match[0] = i;
        Index j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const Index i0 = match[j0];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const Index j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> row_to_col(static_cast<std::size_t>(n));
    for (Index j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    return row_to_col;
}

TransportPlan exact_wasserstein(const CostMatrix &cost, Index size_cap) {
    const Index n = cost.rows(), m = cost.cols();
    require(n >= 1 && m >= 1, ErrorCode::EmptyMeasure, "empty cost matrix");
    if (n * m > size_cap * size_cap) {
        throw Error(ErrorCode::InstanceTooLarge, "exact OT instance " + std::to_string(n) + "x" + std::to_string(m) +
                                                     " exceeds cap " + std::to_string(size_cap));
    }
    TransportPlan out{Matrix::Zero(n, m), 0.0};
    if (n == m) {
        const auto assignment = solve_assignment(cost.entries);
        double acc = 0;
        for (Index i = 0; i < n; ++i) {
            const Index j = assignment[static_cast<std::size_t>(i)];
            out.plan(i, j) = 1.0 / double(n);
            acc += cost.entries(i, j);
        }
        out.cost = acc / double(n);
        return out;
    }
    const Index k = std::lcm(n, m);
    if (k > size_cap) {
        throw Error(ErrorCode::InstanceTooLarge,
                    "unequal sizes need an lcm grid of " + std::to_string(k) + " points, above the cap");
    }
    const Index rep_x = k / n, rep_y = k / m;
    Matrix expanded(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) expanded(a, b) = cost.entries(a / rep_x, b / rep_y);
    const auto assignment = solve_assignment(expanded);
    double acc = 0;
    for (Index a = 0; a < k; ++a) {
        const Index b = assignment[static_cast<std::size_t>(a)];
        out.plan(a / rep_x, b / rep_y) += 1.0 / double(k);
        acc += expanded(a, b);
    }
    out.cost = acc / double(k);
    return out;
}

namespace {

// ε log Σ_j exp(v_j / ε), stable.
template <typename Vec>
double soft_max(const Vec &v, double eps) {
    const double top = v.maxCoeff();
    if (!std::isfinite(top)) return top;
    return top + eps * std::log(((v.array() - top) / eps).exp().sum());
}

}  // namespace

SinkhornResult sinkhorn(const CostMatrix &cost, const SinkhornOptions &options) {
    require(options.epsilon > 0, ErrorCode::InvalidArgument, "Sinkhorn epsilon must be positive");
    require(options.max_iter >= 1 && options.check_every >= 1, ErrorCode::InvalidArgument, "Sinkhorn iteration limits");
    const Index n = cost.rows(), m = cost.cols();
    const double eps = options.epsilon;
    const double log_a = -std::log(double(n)), log_b = -std::log(double(m));
    const Matrix &c = cost.entries;

    SinkhornResult res;
    res.f = Vector::Zero(n);
    res.g = Vector::Zero(m);
    Vector &f = res.f, &g = res.g;

    auto row_violation = [&] {
        double viol = 0;
        for (Index i = 0; i < n; ++i) {
            const double mass = ((f(i) + g.array() - c.row(i).transpose().array()) / eps).exp().sum();
            viol += std::abs(mass - std::exp(log_a));
        }
        return viol;
    };

    Index it = 0;
    double viol = std::numeric_limits<double>::infinity();
    while (it < options.max_iter) {
        for (Index i = 0; i < n; ++i) f(i) = eps * log_a - soft_max((g - c.row(i).transpose()).eval(), eps);
        for (Index j = 0; j < m; ++j) g(j) = eps * log_b - soft_max((f - c.col(j)).eval(), eps);
        ++it;
        if (it % options.check_every == 0 || it == options.max_iter) {
            viol = row_violation();
            if (viol < options.threshold) break;
        }
    }
    res.iterations = it;
    res.marginal_violation = viol;
    res.converged = viol < options.threshold;

    Matrix plan(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) plan(i, j) = std::exp((f(i) + g(j) - c(i, j)) / eps);
    res.plan.cost = plan.cwiseProduct(c).sum();
    double kl = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) {
            const double pij = plan(i, j);
            if (pij > 0) kl += pij * (std::log(pij) - log_a - log_b) - pij + std::exp(log_a + log_b);
        }
    res.regularized_objective = res.plan.cost + eps * kl;
    res.plan.plan = std::move(plan);
    return res;
}

}  // namespace spdsliced
