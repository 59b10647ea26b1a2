#include "spdsliced/experiments.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "spdsliced/parallel.hpp"
#include "spdsliced/transport.hpp"

namespace spdsliced {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Json index_list(const std::vector<Index> &v) { return Json(v); }

Json estimator_list(const std::vector<Estimator> &v) {
    Json out = Json::array();
    for (auto e : v) out.push_back(std::string(to_string(e)));
    return out;
}

bool is_transport(Estimator e) {
    return e == Estimator::lew_exact || e == Estimator::le_sinkhorn || e == Estimator::aiw_exact;
}

}  // namespace

Estimator estimator_from_string(std::string_view name) {
    if (name == "spdsw") return Estimator::spdsw;
    if (name == "symsw") return Estimator::symsw;
    if (name == "logsw") return Estimator::logsw;
    if (name == "hspdsw") return Estimator::hspdsw;
    if (name == "lew" || name == "lew_exact") return Estimator::lew_exact;
    if (name == "les" || name == "le_sinkhorn") return Estimator::le_sinkhorn;
    if (name == "aiw" || name == "aiw_exact") return Estimator::aiw_exact;
    throw Error(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::vector<Matrix> wishart_matrices(const RngState &rng, Index n, Index d, Index dof, const Matrix &scale) {
    require(n >= 1, ErrorCode::InvalidArgument, "need at least one sample");
    const SpdMatrixd s(scale);
    std::vector<Matrix> out(static_cast<std::size_t>(n));
    parallel_for(out.size(), [&](std::size_t i) { out[i] = sample_wishart(rng.derive(i), d, dof, s).matrix(); });
    return out;
}

EmpiricalSpdMeasure wishart_measure(const RngState &rng, Index n, Index d, Index dof, const Matrix &scale) {
    require(n >= 1, ErrorCode::InvalidArgument, "need at least one sample");
    const SpdMatrixd s(scale);
    std::vector<SpdMatrixd> out(static_cast<std::size_t>(n), SpdMatrixd::identity(d));
    parallel_for(out.size(), [&](std::size_t i) { out[i] = sample_wishart(rng.derive(i), d, dof, s); });
    return EmpiricalSpdMeasure(std::move(out));
}

EmpiricalSpdMeasure measure_from_matrices(const std::vector<Matrix> &matrices) {
    require(!matrices.empty(), ErrorCode::EmptyMeasure, "measure needs at least one point");
    const Index d = matrices.front().rows();
    std::vector<SpdMatrixd> out(matrices.size(), SpdMatrixd::identity(d));
    parallel_for(out.size(), [&](std::size_t i) { out[i] = SpdMatrixd(matrices[i]); });
    return EmpiricalSpdMeasure(std::move(out));
}

LabeledSpdDataset wishart_classes(const RngState &rng, Index d, Index per_class, Index dof, const Matrix &base_scale,
                                  int classes) {
    require(classes >= 1, ErrorCode::InvalidArgument, "need at least one class");
    std::vector<SpdMatrixd> points;
    std::vector<int> labels;
    for (int k = 0; k < classes; ++k) {
        const auto m = wishart_measure(rng.derive(std::uint64_t(k)), per_class, d, dof, double(1 + k) * base_scale);
        points.insert(points.end(), m.points().begin(), m.points().end());
        labels.insert(labels.end(), std::size_t(per_class), k);
    }
    return LabeledSpdDataset(EmpiricalSpdMeasure(std::move(points)), std::move(labels));
}

Matrix shift_rotation(const RngState &rng, Index d, double angle) {
    if (angle == 0.0) return Matrix::Identity(d, d);
    RandomStream stream(rng);
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = stream.normal();
    Matrix omega = 0.5 * (g - g.transpose());
    const double norm = omega.norm();
    require(norm > 0, ErrorCode::DegenerateSample, "rotation generator vanished");
    omega *= angle / norm;
    return omega.exp();
}

EmpiricalSpdMeasure apply_domain_shift(const EmpiricalSpdMeasure &measure, const RngState &rng,
                                       const DomainShift &shift) {
    const Index d = measure.dim();
    const Matrix r = shift_rotation(rng, d, shift.rotation_angle);
    const double factor = std::exp(shift.log_translation);
    std::vector<SpdMatrixd> out(std::size_t(measure.size()), SpdMatrixd::identity(d));
    parallel_for(out.size(), [&](std::size_t i) {
        const Matrix m = factor * (r.transpose() * measure.points()[i].matrix() * r);
        out[i] = SpdMatrixd(m);
    });
    return EmpiricalSpdMeasure(std::move(out));
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::SizeMismatch, "slope needs two or more points");
    double mx = 0, my = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0 && y[i] > 0, ErrorCode::InvalidArgument, "log-log slope needs positive values");
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    require(sxx > 0, ErrorCode::InvalidArgument, "slope needs distinct abscissae");
    return sxy / sxx;
}

namespace {

double quantile_sorted(const std::vector<double> &v, double q) {
    const double pos = q * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double median(std::vector<double> values) {
    require(!values.empty(), ErrorCode::InvalidArgument, "median of nothing");
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

double interquartile_range(std::vector<double> values) {
    require(!values.empty(), ErrorCode::InvalidArgument, "IQR of nothing");
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

DiscrepancyReport compute_distance(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                                   const DistanceOptions &options) {
    require(mu.dim() == nu.dim(), ErrorCode::DimensionMismatch, "measures differ in dimension");
    const Index d = mu.dim();
    switch (options.metric) {
        case Estimator::spdsw:
        case Estimator::symsw: {
            const auto start = Clock::now();
            const auto basis = build_projection_basis(options.seed, d, options.num_projections, options.sampler);
            auto r = options.metric == Estimator::spdsw
                         ? spdsw(mu, nu, basis, options.p)
                         : sym_sw(mu.log_measure(), nu.log_measure(), basis, options.p);
            r.wall_time_seconds = seconds_since(start);
            return r;
        }
        case Estimator::logsw: {
            const auto start = Clock::now();
            const auto basis =
                build_projection_basis(options.seed, d, options.num_projections, SamplerKind::vectorized_sphere);
            auto r = log_sw(mu, nu, basis, options.p);
            r.wall_time_seconds = seconds_since(start);
            return r;
        }
        case Estimator::hspdsw: {
            require(options.sampler == SamplerKind::eig_uniform, ErrorCode::InvalidArgument,
                    "hspdsw needs eigen-form directions (sampler eig)");
            const auto start = Clock::now();
            const auto basis = build_projection_basis(options.seed, d, options.num_projections, options.sampler);
            auto r = hspdsw(mu, nu, basis, options.p);
            r.wall_time_seconds = seconds_since(start);
            return r;
        }
        case Estimator::lew_exact:
        case Estimator::aiw_exact:
        case Estimator::le_sinkhorn: {
            const auto start = Clock::now();
            const auto metric =
                options.metric == Estimator::aiw_exact ? GroundMetric::affine_invariant : GroundMetric::log_euclidean;
            const auto cost = build_cost_matrix(mu, nu, metric, options.p);
            DiscrepancyReport r;
            r.estimator = options.metric;
            r.order_p = options.p;
            if (options.metric == Estimator::le_sinkhorn) {
                const auto res = sinkhorn(cost, SinkhornOptions{options.epsilon, 100000, 1e-10, 10});
                if (!res.converged) throw Error(ErrorCode::NotConverged, "Sinkhorn did not converge");
                r.value = res.plan.cost;
            } else {
                r.value = exact_wasserstein(cost, options.exact_size_cap).cost;
            }
            r.wall_time_seconds = seconds_since(start);
            return r;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown metric");
}

ExperimentReport run_runtime_benchmark(const RuntimeConfig &config) {
    require(!config.n_grid.empty() && config.repeats >= 1, ErrorCode::InvalidArgument, "empty runtime grid");
    ExperimentReport report;
    report.experiment = "runtime";
    report.config = {{"n_grid", index_list(config.n_grid)},
                     {"d", config.d},
                     {"num_projections", config.num_projections},
                     {"metrics", estimator_list(config.metrics)},
                     {"repeats", config.repeats},
                     {"cost_memory_cap_bytes", config.cost_memory_cap_bytes},
                     {"seed", rng_json(config.seed)},
                     {"threads", thread_count()}};
    const auto total = Clock::now();
    const Matrix scale = Matrix::Identity(config.d, config.d);
    for (Index n : config.n_grid) {
        const auto x = wishart_matrices(config.seed.derive(std::uint64_t(n)).derive(0), n, config.d, config.d, scale);
        const auto y = wishart_matrices(config.seed.derive(std::uint64_t(n)).derive(1), n, config.d, config.d, scale);
        for (Estimator metric : config.metrics) {
            Json row{{"metric", std::string(to_string(metric))}, {"n", n}};
            const std::size_t bytes = std::size_t(n) * std::size_t(n) * sizeof(double);
            if (is_transport(metric) && bytes > config.cost_memory_cap_bytes) {
                row["median_seconds"] = nullptr;
                row["iqr_seconds"] = nullptr;
                row["skipped"] = true;
                report.rows.push_back(std::move(row));
                continue;
            }
            DistanceOptions opts;
            opts.metric = metric;
            opts.num_projections = config.num_projections;
            opts.seed = config.seed.derive(std::uint64_t(n)).derive(2);
            opts.exact_size_cap = n;
            std::vector<double> times;
            for (Index r = 0; r < config.repeats; ++r) {
                const auto start = Clock::now();
                const auto mu = measure_from_matrices(x);
                const auto nu = measure_from_matrices(y);
                (void)compute_distance(mu, nu, opts);
                times.push_back(seconds_since(start));
            }
            row["median_seconds"] = median(times);
            row["iqr_seconds"] = interquartile_range(times);
            row["skipped"] = false;
            report.rows.push_back(std::move(row));
        }
    }
    report.timing["total_seconds"] = seconds_since(total);
    return report;
}

ExperimentReport run_sample_complexity(const SampleComplexityConfig &config) {
    require(config.repeats >= 2, ErrorCode::InvalidArgument, "need at least two repeats");
    ExperimentReport report;
    report.experiment = "sample_complexity";
    report.config = {{"dims", index_list(config.dims)},
                     {"n_grid", index_list(config.n_grid)},
                     {"metrics", estimator_list(config.metrics)},
                     {"repeats", config.repeats},
                     {"num_projections", config.num_projections},
                     {"p", config.p},
                     {"dof_offset", config.dof_offset},
                     {"seed", rng_json(config.seed)}};
    const auto total = Clock::now();
    for (Index d : config.dims) {
        const Matrix scale = Matrix::Identity(d, d);
        for (Index n : config.n_grid) {
            std::vector<std::vector<double>> values(config.metrics.size());
            for (Index r = 0; r < config.repeats; ++r) {
                const auto rng = config.seed.derive(std::uint64_t(d)).derive(std::uint64_t(n)).derive(std::uint64_t(r));
                const auto mu = wishart_measure(rng.derive(0), n, d, d + config.dof_offset, scale);
                const auto nu = wishart_measure(rng.derive(1), n, d, d + config.dof_offset, scale);
                for (std::size_t k = 0; k < config.metrics.size(); ++k) {
                    DistanceOptions opts;
                    opts.metric = config.metrics[k];
                    opts.num_projections = config.num_projections;
                    opts.p = config.p;
                    opts.seed = rng.derive(2);
                    opts.exact_size_cap = std::max(n, kExactSizeCap);
                    values[k].push_back(std::abs(compute_distance(mu, nu, opts).value));
                }
            }
            for (std::size_t k = 0; k < config.metrics.size(); ++k) {
                const auto &v = values[k];
                const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
                double var = 0;
                for (double t : v) var += (t - mean) * (t - mean);
                var /= double(v.size() - 1);
                const double half = 1.96 * std::sqrt(var / double(v.size()));
                report.rows.push_back({{"metric", std::string(to_string(config.metrics[k]))},
                                       {"d", d},
                                       {"n", n},
                                       {"mean", mean},
                                       {"ci_low", mean - half},
                                       {"ci_high", mean + half}});
            }
        }
    }
    report.timing["total_seconds"] = seconds_since(total);
    return report;
}

ExperimentReport run_projection_complexity(const ProjectionComplexityConfig &config) {
    ExperimentReport report;
    report.experiment = "projection_complexity";
    report.config = {{"dims", index_list(config.dims)},
                     {"projection_grid", index_list(config.projection_grid)},
                     {"reference_projections", config.reference_projections},
                     {"repeats", config.repeats},
                     {"n", config.n},
                     {"p", config.p},
                     {"sampler", std::string(to_string(config.sampler))},
                     {"seed", rng_json(config.seed)}};
    const auto total = Clock::now();
    for (Index d : config.dims) {
        const auto rng = config.seed.derive(std::uint64_t(d));
        const Matrix scale = Matrix::Identity(d, d);
        const auto mu = wishart_measure(rng.derive(0), config.n, d, d + 1, scale);
        const auto nu = wishart_measure(rng.derive(1), config.n, d, d + 1, 2.0 * scale);
        const auto table = mc_error_estimate(mu, nu, config.p, config.projection_grid, config.repeats, rng.derive(2),
                                             config.reference_projections, config.sampler);
        for (const auto &row : table.rows) {
            report.rows.push_back({{"d", d},
                                   {"num_projections", row.num_projections},
                                   {"mean_abs_error", row.mean_abs_error},
                                   {"std_error", row.std_error},
                                   {"reference_value", table.reference_value}});
        }
    }
    report.timing["total_seconds"] = seconds_since(total);
    return report;
}

namespace {

struct BandFeatures {
    std::vector<std::vector<QuantileFeature>> per_band;  // [band][item]
};

BandFeatures compute_features(const std::vector<const RegressionItem *> &items, const KernelRidgeConfig &config,
                              std::vector<std::shared_ptr<const ProjectionBasis>> &bases) {
    const std::size_t bands = items.front()->bands.size();
    const Vector levels = midpoint_quantile_levels(config.quantiles);
    BandFeatures out;
    out.per_band.resize(bands);
    for (std::size_t b = 0; b < bands; ++b) {
        if (bases.size() <= b) {
            const Index d = items.front()->bands[b].dim();
            bases.push_back(std::make_shared<const ProjectionBasis>(build_projection_basis(
                config.seed.derive(1).derive(b), d, config.num_projections, SamplerKind::eig_uniform)));
        }
        auto &feats = out.per_band[b];
        for (const auto *item : items) {
            require(item->bands.size() == bands, ErrorCode::SizeMismatch, "items differ in band count");
            feats.push_back(quantile_feature(item->bands[b], bases[b], levels));
        }
    }
    return out;
}

std::vector<QuantileFeature> pick(const std::vector<QuantileFeature> &all, const std::vector<Index> &idx) {
    std::vector<QuantileFeature> out;
    out.reserve(idx.size());
    for (Index i : idx) out.push_back(all[std::size_t(i)]);
    return out;
}

struct FoldFit {
    Vector predictions;
    std::vector<double> sigmas;
    double condition_number;
};

FoldFit fit_predict(const BandFeatures &train, const BandFeatures &test, const std::vector<Index> &train_idx,
                    const std::vector<Index> &test_idx, const Vector &train_targets, const KernelRidgeConfig &config) {
    std::vector<GramMatrix> grams;
    Matrix cross;
    FoldFit fit;
    for (std::size_t b = 0; b < train.per_band.size(); ++b) {
        const auto tr = pick(train.per_band[b], train_idx);
        const auto te = pick(test.per_band[b], test_idx);
        const double sigma = config.sigma ? *config.sigma : median_heuristic_sigma(tr);
        fit.sigmas.push_back(sigma);
        grams.push_back(gaussian_kernel(tr, sigma));
        const Matrix c = gaussian_cross_kernel(te, tr, sigma);
        cross = b == 0 ? c : Matrix(cross + c);
    }
    const auto model = kernel_ridge_fit(sum_kernels(grams), train_targets, config.alpha);
    fit.predictions = kernel_ridge_predict(cross, model);
    fit.condition_number = model.condition_number;
    return fit;
}

Vector targets_of(const std::vector<const RegressionItem *> &items, const std::vector<Index> &idx) {
    Vector y(Index(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) y(Index(k)) = items[std::size_t(idx[k])]->target;
    return y;
}

Json kernel_config_json(const KernelRidgeConfig &config) {
    Json j{{"num_projections", config.num_projections},
           {"quantiles", config.quantiles},
           {"alpha", config.alpha},
           {"folds", config.folds},
           {"seed", rng_json(config.seed)}};
    j["sigma"] = config.sigma ? Json(*config.sigma) : Json("median");
    return j;
}

std::vector<const RegressionItem *> pointers(const std::vector<RegressionItem> &items) {
    std::vector<const RegressionItem *> out;
    for (const auto &i : items) out.push_back(&i);
    return out;
}

}  // namespace

RegressionResult run_kernel_ridge_cv(const std::vector<RegressionItem> &items, const KernelRidgeConfig &config) {
    require(!items.empty() && !items.front().bands.empty(), ErrorCode::InvalidArgument, "no regression items");
    const auto start = Clock::now();
    const auto ptrs = pointers(items);
    const auto n = Index(items.size());
    std::vector<std::shared_ptr<const ProjectionBasis>> bases;
    const auto feats = compute_features(ptrs, config, bases);
    const auto folds = kfold_indices(n, config.folds, config.seed.derive(2));

    RegressionResult result;
    result.report.experiment = "kernel_ridge";
    result.report.config = kernel_config_json(config);
    result.report.config["mode"] = "cross_validation";
    result.report.config["items"] = n;
    result.predictions = Vector::Zero(n);
    std::vector<double> fold_r2, fold_mae;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<Index> train_idx;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        std::sort(train_idx.begin(), train_idx.end());
        const auto &test_idx = folds[f];
        const auto fit = fit_predict(feats, feats, train_idx, test_idx, targets_of(ptrs, train_idx), config);
        const Vector truth = targets_of(ptrs, test_idx);
        for (std::size_t k = 0; k < test_idx.size(); ++k) result.predictions(test_idx[k]) = fit.predictions(Index(k));
        fold_r2.push_back(r2_score(truth, fit.predictions));
        fold_mae.push_back(mean_absolute_error(truth, fit.predictions));
        result.report.rows.push_back({{"fold", Index(f)},
                                      {"n_train", Index(train_idx.size())},
                                      {"n_test", Index(test_idx.size())},
                                      {"r2", fold_r2.back()},
                                      {"mae", fold_mae.back()},
                                      {"sigma", fit.sigmas.front()},
                                      {"condition_number", fit.condition_number}});
    }
    Vector all(n);
    for (Index i = 0; i < n; ++i) all(i) = items[std::size_t(i)].target;
    result.r2 = std::accumulate(fold_r2.begin(), fold_r2.end(), 0.0) / double(fold_r2.size());
    result.mae = std::accumulate(fold_mae.begin(), fold_mae.end(), 0.0) / double(fold_mae.size());
    result.report.rows.push_back({{"fold", "mean"}, {"r2", result.r2}, {"mae", result.mae}});
    result.report.rows.push_back({{"fold", "pooled"},
                                  {"r2", r2_score(all, result.predictions)},
                                  {"mae", mean_absolute_error(all, result.predictions)}});
    result.report.timing["total_seconds"] = seconds_since(start);
    return result;
}

RegressionResult run_kernel_ridge_split(const std::vector<RegressionItem> &train, const std::vector<RegressionItem> &test,
                                        const KernelRidgeConfig &config) {
    require(!train.empty() && !test.empty(), ErrorCode::InvalidArgument, "no regression items");
    const auto start = Clock::now();
    const auto tr = pointers(train), te = pointers(test);
    std::vector<std::shared_ptr<const ProjectionBasis>> bases;
    const auto train_feats = compute_features(tr, config, bases);
    const auto test_feats = compute_features(te, config, bases);
    std::vector<Index> train_idx(train.size()), test_idx(test.size());
    std::iota(train_idx.begin(), train_idx.end(), 0);
    std::iota(test_idx.begin(), test_idx.end(), 0);
    const auto fit = fit_predict(train_feats, test_feats, train_idx, test_idx, targets_of(tr, train_idx), config);
    const Vector truth = targets_of(te, test_idx);

    RegressionResult result;
    result.report.experiment = "kernel_ridge";
    result.report.config = kernel_config_json(config);
    result.report.config["mode"] = "train_test";
    result.report.config["train_items"] = Index(train.size());
    result.report.config["test_items"] = Index(test.size());
    result.predictions = fit.predictions;
    result.r2 = r2_score(truth, fit.predictions);
    result.mae = mean_absolute_error(truth, fit.predictions);
    result.report.rows.push_back({{"fold", "test"},
                                  {"n_train", Index(train.size())},
                                  {"n_test", Index(test.size())},
                                  {"r2", result.r2},
                                  {"mae", result.mae},
                                  {"sigma", fit.sigmas.front()},
                                  {"condition_number", fit.condition_number}});
    result.report.timing["total_seconds"] = seconds_since(start);
    return result;
}

std::vector<RegressionItem> synthetic_regression_items(const SyntheticRegressionConfig &config) {
    RandomStream targets(config.seed.derive(0));
    std::vector<RegressionItem> items;
    items.reserve(std::size_t(config.num_distributions));
    const Matrix id = Matrix::Identity(config.d, config.d);
    for (Index i = 0; i < config.num_distributions; ++i) {
        const double u = targets.uniform();
        items.push_back({{wishart_measure(config.seed.derive(1).derive(std::uint64_t(i)), config.points, config.d,
                                          config.dof, (1.0 + u) * id)},
                         u});
    }
    return items;
}

DomainAdaptationOutcome evaluate_adaptation(const LabeledSpdDataset &source, const LabeledSpdDataset &target,
                                            const AdaptationConfig &config, double l2_penalty) {
    const auto before = train_log_linear_classifier(source, l2_penalty);
    const double accuracy_before = evaluate_transfer(before, target);
    auto trace = run_adaptation(source, target.measure, config);
    const auto after = train_log_linear_classifier(trace.adapted_source, l2_penalty);
    const double accuracy_after = evaluate_transfer(after, target);
    const double initial = trace.losses.front(), final_loss = trace.losses.back();
    return {accuracy_before, accuracy_after, initial, final_loss, std::move(trace)};
}

DomainAdaptationOutcome run_domain_adaptation_benchmark(const DomainAdaptationBenchmark &config) {
    const auto source =
        wishart_classes(config.seed.derive(0), config.d, config.per_class, config.dof, Matrix::Identity(config.d, config.d), 2);
    const LabeledSpdDataset target(apply_domain_shift(source.measure, config.seed.derive(1), config.shift),
                                   source.labels);
    AdaptationConfig adapt = config.adaptation;
    adapt.seed = config.seed.derive(2);
    return evaluate_adaptation(source, target, adapt, config.l2_penalty);
}

Json adaptation_config_json(const AdaptationConfig &config) {
    return {{"mode", std::string(to_string(config.mode))},
            {"loss", std::string(to_string(config.loss.kind))},
            {"p", config.loss.p},
            {"num_projections", config.num_projections},
            {"epochs", config.epochs},
            {"learning_rate", config.learning_rate},
            {"seed", rng_json(config.seed)},
            {"safeguard", config.safeguard},
            {"max_halvings", config.max_halvings},
            {"sinkhorn_epsilon", config.loss.sinkhorn.epsilon},
            {"classifier", "multinomial logistic regression on standardized log features"}};
}

}  // namespace spdsliced
