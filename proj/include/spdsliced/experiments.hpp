#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spdsliced/adaptation.hpp"
#include "spdsliced/classifier.hpp"
#include "spdsliced/io.hpp"
#include "spdsliced/kernels.hpp"
#include "spdsliced/sliced.hpp"

namespace spdsliced {

Estimator estimator_from_string(std::string_view name);

/// n independent Wishart(dof, scale)/dof draws; point i uses rng.derive(i).
std::vector<Matrix> wishart_matrices(const RngState &rng, Index n, Index d, Index dof, const Matrix &scale);
EmpiricalSpdMeasure wishart_measure(const RngState &rng, Index n, Index d, Index dof, const Matrix &scale);

/// Builds the measure from raw symmetric matrices, decomposing in parallel.
EmpiricalSpdMeasure measure_from_matrices(const std::vector<Matrix> &matrices);

/// K classes of `per_class` points; class k has scale (1 + k)·base_scale.
LabeledSpdDataset wishart_classes(const RngState &rng, Index d, Index per_class, Index dof, const Matrix &base_scale,
                                  int classes);

/// Congruence X ↦ e^{s} RᵀXR with R = exp(angle·Ω̂) for a random unit skew Ω̂.
/// The log of every point is rotated and then translated by s·I. A zero angle
/// and zero translation return the points unchanged.
struct DomainShift {
    double rotation_angle = 0;
    double log_translation = 0;
};

Matrix shift_rotation(const RngState &rng, Index d, double angle);
EmpiricalSpdMeasure apply_domain_shift(const EmpiricalSpdMeasure &measure, const RngState &rng,
                                       const DomainShift &shift);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

double median(std::vector<double> values);
/// Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::vector<double> values);

/// Evaluates one estimator between two measures.
struct DistanceOptions {
    Estimator metric = Estimator::spdsw;
    Index num_projections = 500;
    double p = 2;
    RngState seed{};
    SamplerKind sampler = SamplerKind::eig_uniform;
    double epsilon = 1;
    Index exact_size_cap = kExactSizeCap;
};

DiscrepancyReport compute_distance(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                                   const DistanceOptions &options);

struct RuntimeConfig {
    std::vector<Index> n_grid;
    Index d = 20;
    Index num_projections = 200;
    std::vector<Estimator> metrics{Estimator::spdsw, Estimator::logsw, Estimator::lew_exact};
    Index repeats = 20;
    /// Transport estimators are skipped when their n × n cost matrix exceeds this.
    std::size_t cost_memory_cap_bytes = std::size_t(256) << 20;
    RngState seed{};
};

/// Rows (metric, n, median_seconds, iqr_seconds, skipped). Timed work starts
/// from raw matrices: decomposition, logarithms and the estimator itself.
ExperimentReport run_runtime_benchmark(const RuntimeConfig &config);

struct SampleComplexityConfig {
    std::vector<Index> dims{2, 20};
    std::vector<Index> n_grid{10, 20, 50, 100, 200, 500};
    std::vector<Estimator> metrics{Estimator::spdsw, Estimator::lew_exact};
    Index repeats = 100;
    Index num_projections = 500;
    double p = 2;
    /// Degrees of freedom are d + dof_offset.
    Index dof_offset = 1;
    RngState seed{};
};

/// Rows (metric, d, n, mean, ci_low, ci_high) of the raw estimator between two
/// independent n-samples of one Wishart law.
ExperimentReport run_sample_complexity(const SampleComplexityConfig &config);

struct ProjectionComplexityConfig {
    std::vector<Index> dims{3};
    std::vector<Index> projection_grid{10, 22, 46, 100, 215, 464, 1000};
    Index reference_projections = 10000;
    Index repeats = 100;
    Index n = 100;
    double p = 2;
    SamplerKind sampler = SamplerKind::eig_uniform;
    RngState seed{};
};

/// Rows (d, num_projections, mean_abs_error, std_error).
ExperimentReport run_projection_complexity(const ProjectionComplexityConfig &config);

/// One regression input: a distribution per band and a real target.
struct RegressionItem {
    std::vector<EmpiricalSpdMeasure> bands;
    double target = 0;
};

struct KernelRidgeConfig {
    Index num_projections = 500;
    Index quantiles = 100;
    /// Bandwidth per band; empty means the median heuristic on the training fold.
    std::optional<double> sigma;
    double alpha = 1e-3;
    Index folds = 5;
    RngState seed{};
};

struct RegressionResult {
    ExperimentReport report;  // one row per fold, plus the pooled row
    Vector predictions;       // out-of-fold (cross-validation) or test predictions
    double r2 = 0;
    double mae = 0;
};

/// K-fold cross-validation; the kernel on each band uses its own basis drawn
/// from seed.derive(band).
RegressionResult run_kernel_ridge_cv(const std::vector<RegressionItem> &items, const KernelRidgeConfig &config);

/// Fit on `train`, predict `test`.
RegressionResult run_kernel_ridge_split(const std::vector<RegressionItem> &train, const std::vector<RegressionItem> &test,
                                        const KernelRidgeConfig &config);

struct SyntheticRegressionConfig {
    Index num_distributions = 80;
    Index points = 100;
    Index d = 5;
    Index dof = 10;
    RngState seed{};
};

/// Distribution i has scale (1 + u_i)·I with target u_i ~ U[0, 1].
std::vector<RegressionItem> synthetic_regression_items(const SyntheticRegressionConfig &config);

struct DomainAdaptationBenchmark {
    Index d = 5;
    Index per_class = 100;
    Index dof = 20;
    DomainShift shift{0.5, 0.6931471805599453};
    double l2_penalty = 1e-2;
    AdaptationConfig adaptation;
    RngState seed{};
};

struct DomainAdaptationOutcome {
    double accuracy_before = 0;
    double accuracy_after = 0;
    double initial_loss = 0;
    double final_loss = 0;
    AdaptationTrace trace;
};

/// Accuracy of a classifier trained on the source (before) and on the adapted
/// source (after), both evaluated on the labeled target.
DomainAdaptationOutcome evaluate_adaptation(const LabeledSpdDataset &source, const LabeledSpdDataset &target,
                                            const AdaptationConfig &config, double l2_penalty);

/// Source from wishart_classes with scales I, 2I, ...; target is the shifted
/// source with the same labels.
DomainAdaptationOutcome run_domain_adaptation_benchmark(const DomainAdaptationBenchmark &config);

Json adaptation_config_json(const AdaptationConfig &config);

}  // namespace spdsliced
