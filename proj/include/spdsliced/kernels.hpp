#pragma once

#include <memory>
#include <vector>

#include "spdsliced/linalg.hpp"
#include "spdsliced/measure.hpp"
#include "spdsliced/random.hpp"
#include "spdsliced/sampling.hpp"

namespace spdsliced {

/// Midpoint grid q_j = (j − 1/2) / M.
Vector midpoint_quantile_levels(Index count);

/// Finite-dimensional feature map: values(j, i) is the empirical quantile of
/// t^{A_i}_# μ at level q_j, divided by √(M L). Squared Euclidean distances
/// between features approximate the sliced W_2² between measures.
struct QuantileFeature {
    Vector quantile_levels;
    std::shared_ptr<const ProjectionBasis> basis;
    Matrix values;  // M × L
};

/// Left-continuous empirical quantile: order statistic ⌈q n⌉ (1-based).
QuantileFeature quantile_feature(const EmpiricalSpdMeasure &mu, std::shared_ptr<const ProjectionBasis> basis,
                                 const Vector &quantile_levels);

double squared_feature_distance(const QuantileFeature &a, const QuantileFeature &b);

struct GramMatrix {
    Matrix entries;
    double sigma = 1;
};

/// Median of the off-diagonal squared feature distances, returned as σ (so
/// σ² equals that median). Falls back to 1 when every distance is zero.
double median_heuristic_sigma(const std::vector<QuantileFeature> &features);

/// K_ij = exp(−‖Φ̂_i − Φ̂_j‖² / (2σ²)).
GramMatrix gaussian_kernel(const std::vector<QuantileFeature> &features, double sigma);

/// Rows: `rows` features, columns: `cols` features.
Matrix gaussian_cross_kernel(const std::vector<QuantileFeature> &rows, const std::vector<QuantileFeature> &cols,
                             double sigma);

GramMatrix sum_kernels(const std::vector<GramMatrix> &grams);

/// Dual ridge solution on centered targets; predictions add the mean back.
struct KernelRidgeModel {
    Vector coefficients;
    double target_mean = 0;
    double alpha = 0;
    double condition_number = 0;
};

inline constexpr double kMaxRidgeCondition = 1e14;

/// Solves (K + αI) c = y − ȳ. Throws IllConditioned above kMaxRidgeCondition.
KernelRidgeModel kernel_ridge_fit(const GramMatrix &gram, const Vector &targets, double alpha);

/// ŷ = ȳ + K_cross c, with K_cross of shape test × train.
Vector kernel_ridge_predict(const Matrix &cross_gram, const KernelRidgeModel &model);

Vector kernel_ridge_predict(const std::vector<QuantileFeature> &train, const KernelRidgeModel &model,
                            const std::vector<QuantileFeature> &test, double sigma);

/// Seeded shuffle split into `folds` nearly equal parts; every index appears
/// in exactly one fold.
std::vector<std::vector<Index>> kfold_indices(Index n, Index folds, const RngState &rng);

double r2_score(const Vector &truth, const Vector &predicted);
double mean_absolute_error(const Vector &truth, const Vector &predicted);

}  // namespace spdsliced
