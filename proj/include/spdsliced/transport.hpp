#pragma once

#include <string_view>
#include <vector>

#include "spdsliced/linalg.hpp"
#include "spdsliced/measure.hpp"

namespace spdsliced {

enum class GroundMetric { log_euclidean, affine_invariant };

std::string_view to_string(GroundMetric metric);

/// Pairwise ground costs d(X_i, Y_j)^p.
struct CostMatrix {
    Matrix entries;
    GroundMetric metric = GroundMetric::log_euclidean;
    double power = 2;

    Index rows() const { return entries.rows(); }
    Index cols() const { return entries.cols(); }
};

/// Coupling of two uniform empirical measures and its cost ⟨plan, C⟩.
struct TransportPlan {
    Matrix plan;
    double cost = 0;
};

CostMatrix build_cost_matrix(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu, GroundMetric metric,
                             double p);

/// Cost matrix from arbitrary entries (validated finite, nonnegative).
CostMatrix make_cost_matrix(Matrix entries, GroundMetric metric, double p);

/// Minimum-cost assignment for a square matrix (shortest augmenting paths with
/// potentials, O(n³)). Returns column index per row.
std::vector<Index> solve_assignment(const Matrix &cost);

inline constexpr Index kExactSizeCap = 512;

/// Exact optimal transport between uniform marginals. n == m solves an
/// assignment; n != m replicates points onto the lcm(n, m) grid, which must
/// itself fit under the cap. Larger instances throw InstanceTooLarge.
TransportPlan exact_wasserstein(const CostMatrix &cost, Index size_cap = kExactSizeCap);

struct SinkhornOptions {
    double epsilon = 1.0;
    Index max_iter = 100000;
    double threshold = 1e-10;
    Index check_every = 10;
};

struct SinkhornResult {
    TransportPlan plan;
    bool converged = false;
    Index iterations = 0;
    /// L1 violation of the row marginal (columns are exact after each sweep).
    double marginal_violation = 0;
    /// ⟨P, C⟩ + ε KL(P ‖ a⊗b), the quantity whose gradient in C is P.
    double regularized_objective = 0;
    Vector f, g;  // dual potentials
};

/// Log-domain Sinkhorn between uniform marginals. Does not throw on
/// non-convergence: the last iterate is returned with converged == false.
SinkhornResult sinkhorn(const CostMatrix &cost, const SinkhornOptions &options);

}  // namespace spdsliced
