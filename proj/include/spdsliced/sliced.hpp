#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spdsliced/linalg.hpp"
#include "spdsliced/measure.hpp"
#include "spdsliced/sampling.hpp"

namespace spdsliced {

enum class Estimator { spdsw, symsw, logsw, hspdsw, lew_exact, le_sinkhorn, aiw_exact };

std::string_view to_string(Estimator e);

/// Result of any discrepancy computation. `value` is the raw estimator, i.e.
/// the p-th power W_p^p (or its sliced average).
struct DiscrepancyReport {
    double value = 0;
    Estimator estimator = Estimator::spdsw;
    double order_p = 2;
    std::optional<Index> num_projections;
    std::optional<RngState> seed;
    std::optional<SamplerKind> sampler;
    double wall_time_seconds = 0;
    Index resampled_directions = 0;

    /// value^(1/p).
    double root() const;
};

/// Projections of one measure on one slice: the raw coordinates and their
/// ascending order statistics.
struct ProjectedMeasure {
    std::vector<double> coords;
    std::vector<double> sorted_view;

    explicit ProjectedMeasure(std::vector<double> c);
};

// Geodesics through the identity, G_A = {exp(tA)}, with ‖A‖_F = 1.

/// exp(Tr(A log M) A): the closest point of G_A to M in the log-Euclidean metric.
SpdMatrixd geodesic_project(const SymMatrixd &direction, const SpdMatrixd &m);

/// t^A(M) = ⟨A, log M⟩_F.
double geodesic_coordinate(const SymMatrixd &direction, const SpdMatrixd &m);

/// Minimum eigenvalue gap of a direction accepted for horospherical slicing.
inline constexpr double kDirectionGap = 1e-9;

/// Busemann coordinate of the affine-invariant geodesic ray along A,
/// −Σ θ̃_i log D_ii where A = P diag(θ̃) Pᵀ (θ̃ descending) and PᵀMP = U D Uᵀ.
double busemann_coordinate_ai(const SymMatrixd &direction, const SpdMatrixd &m);

/// Same coordinate from an eigen-form direction (P, θ) in any order.
double busemann_coordinate_ai(const SpectralDirection &direction, const SpdMatrixd &m);

/// W_p^p between two uniform empirical measures on the line, given their
/// sorted supports. Unequal sizes integrate the quantile functions exactly on
/// the merged grid {i/n} ∪ {j/m}.
double wasserstein_1d(std::span<const double> x_sorted, std::span<const double> y_sorted, double p);

/// Per-slice W_p^p for coordinate matrices (points × slices), slice order kept.
std::vector<double> sliced_wasserstein_values(const Matrix &x_coords, const Matrix &y_coords, double p);

DiscrepancyReport spdsw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                        const ProjectionBasis &basis, double p);

/// Sliced Wasserstein between symmetric-matrix measures with slices ⟨A, B⟩_F.
DiscrepancyReport sym_sw(const SymMeasure &mu, const SymMeasure &nu, const ProjectionBasis &basis, double p);

/// Euclidean SW of the log-pushforwards with directions uniform on the sphere
/// of vectorized symmetric matrices (basis kind vectorized_sphere).
DiscrepancyReport log_sw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                         const ProjectionBasis &sphere_basis, double p);

/// Horospherical sliced discrepancy; requires an eig_uniform basis. Directions
/// with an eigenvalue gap below kDirectionGap are redrawn from their own
/// stream and counted in the report.
DiscrepancyReport hspdsw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                         const ProjectionBasis &basis, double p);

struct McErrorRow {
    Index num_projections;
    double mean_abs_error;
    double std_error;
};

struct McErrorTable {
    double reference_value;
    Index reference_projections;
    std::vector<McErrorRow> rows;
};

/// Monte Carlo error of the spdsw estimator: for each L, the mean over
/// `repetitions` independent bases of |estimate_L − reference|, the reference
/// using `reference_projections` directions. At L equal to the reference size
/// the reference basis itself is used, so the error is zero.
McErrorTable mc_error_estimate(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu, double p,
                               const std::vector<Index> &projection_counts, Index repetitions,
                               const RngState &rng, Index reference_projections = 10000,
                               SamplerKind kind = SamplerKind::eig_uniform);

}  // namespace spdsliced
