#include "spdsliced/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spdsliced/parallel.hpp"

namespace spdsliced {

Vector midpoint_quantile_levels(Index count) {
    require(count >= 1, ErrorCode::InvalidArgument, "need at least one quantile level");
    Vector q(count);
    for (Index j = 0; j < count; ++j) q(j) = (double(j) + 0.5) / double(count);
    return q;
}

QuantileFeature quantile_feature(const EmpiricalSpdMeasure &mu, std::shared_ptr<const ProjectionBasis> basis,
                                 const Vector &levels) {
    require(basis != nullptr, ErrorCode::InvalidArgument, "feature map needs a basis");
    require(mu.dim() == basis->dim(), ErrorCode::DimensionMismatch, "measure and basis dimensions");
    require(levels.size() >= 1, ErrorCode::InvalidArgument, "need at least one quantile level");
    for (Index j = 0; j < levels.size(); ++j) {
        require(levels(j) > 0 && levels(j) < 1 && (j == 0 || levels(j) > levels(j - 1)), ErrorCode::InvalidArgument,
                "quantile levels must be strictly increasing inside (0, 1)");
    }
    const Index n = mu.size(), M = levels.size(), L = basis->count();
    std::vector<Index> order_stat(static_cast<std::size_t>(M));
    for (Index j = 0; j < M; ++j) {
        const auto k = static_cast<Index>(std::ceil(levels(j) * double(n)));
        order_stat[static_cast<std::size_t>(j)] = std::clamp<Index>(k, 1, n) - 1;
    }
    const Matrix coords = mu.log_measure().vectorized().transpose() * basis->vectorized();
    const double scale = 1.0 / std::sqrt(double(M) * double(L));
    Matrix values(M, L);
    std::vector<double> column(static_cast<std::size_t>(n));
    for (Index i = 0; i < L; ++i) {
        std::copy(coords.col(i).data(), coords.col(i).data() + n, column.begin());
        std::sort(column.begin(), column.end());
        for (Index j = 0; j < M; ++j) values(j, i) = scale * column[static_cast<std::size_t>(order_stat[j])];
    }
    return {levels, std::move(basis), std::move(values)};
}

namespace {

void check_compatible(const QuantileFeature &a, const QuantileFeature &b) {
    const bool same_basis = a.basis == b.basis ||
                            (a.basis && b.basis && a.basis->seed() == b.basis->seed() &&
                             a.basis->count() == b.basis->count() && a.basis->dim() == b.basis->dim() &&
                             a.basis->sampler_kind() == b.basis->sampler_kind());
    require(same_basis && a.quantile_levels.size() == b.quantile_levels.size() &&
                a.quantile_levels == b.quantile_levels,
            ErrorCode::BasisMismatch, "features built from different bases or quantile grids");
}

}  // namespace

double squared_feature_distance(const QuantileFeature &a, const QuantileFeature &b) {
    check_compatible(a, b);
    return (a.values - b.values).squaredNorm();
}

double median_heuristic_sigma(const std::vector<QuantileFeature> &features) {
    std::vector<double> d2;
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = i + 1; j < features.size(); ++j) d2.push_back(squared_feature_distance(features[i], features[j]));
    if (d2.empty()) return 1.0;
    const auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    double median = *mid;
    if (d2.size() % 2 == 0) median = 0.5 * (median + *std::max_element(d2.begin(), mid));
    return median > 0 ? std::sqrt(median) : 1.0;
}

Matrix gaussian_cross_kernel(const std::vector<QuantileFeature> &rows, const std::vector<QuantileFeature> &cols,
                             double sigma) {
    require(sigma > 0, ErrorCode::InvalidArgument, "bandwidth must be positive");
    Matrix k(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    const double inv = 1.0 / (2.0 * sigma * sigma);
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            k(Index(i), Index(j)) = std::exp(-squared_feature_distance(rows[i], cols[j]) * inv);
    });
    return k;
}

GramMatrix gaussian_kernel(const std::vector<QuantileFeature> &features, double sigma) {
    require(sigma > 0, ErrorCode::InvalidArgument, "bandwidth must be positive");
    const auto n = static_cast<Index>(features.size());
    Matrix k(n, n);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    parallel_for(features.size(), [&](std::size_t row) {
        const auto i = static_cast<Index>(row);
        k(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            k(i, j) = std::exp(-squared_feature_distance(features[row], features[std::size_t(j)]) * inv);
        }
    });
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) k(j, i) = k(i, j);
    return {std::move(k), sigma};
}

GramMatrix sum_kernels(const std::vector<GramMatrix> &grams) {
    require(!grams.empty(), ErrorCode::InvalidArgument, "nothing to sum");
    GramMatrix out = grams.front();
    for (std::size_t b = 1; b < grams.size(); ++b) {
        require(grams[b].entries.rows() == out.entries.rows() && grams[b].entries.cols() == out.entries.cols(),
                ErrorCode::SizeMismatch, "Gram matrices differ in size");
        out.entries += grams[b].entries;
    }
    return out;
}

KernelRidgeModel kernel_ridge_fit(const GramMatrix &gram, const Vector &targets, double alpha) {
    const Index n = gram.entries.rows();
    require(gram.entries.cols() == n && targets.size() == n, ErrorCode::SizeMismatch, "Gram and targets sizes");
    require(alpha > 0, ErrorCode::InvalidArgument, "ridge penalty must be positive");
    const Matrix system = gram.entries + alpha * Matrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(system);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double cond = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxRidgeCondition)) {
        throw Error(ErrorCode::IllConditioned, "kernel ridge system condition number " + std::to_string(cond));
    }
    KernelRidgeModel model;
    model.alpha = alpha;
    model.condition_number = cond;
    model.target_mean = targets.mean();
    const Vector centered = targets.array() - model.target_mean;
    model.coefficients = eig.eigenvectors() *
                         (eig.eigenvectors().transpose() * centered).cwiseQuotient(eig.eigenvalues());
    // One refinement step keeps the residual at the 1e-8 relative level.
    const Vector residual = centered - system * model.coefficients;
    model.coefficients += eig.eigenvectors() *
                          (eig.eigenvectors().transpose() * residual).cwiseQuotient(eig.eigenvalues());
    return model;
}

Vector kernel_ridge_predict(const Matrix &cross_gram, const KernelRidgeModel &model) {
    require(cross_gram.cols() == model.coefficients.size(), ErrorCode::SizeMismatch, "cross kernel width");
    return (cross_gram * model.coefficients).array() + model.target_mean;
}

Vector kernel_ridge_predict(const std::vector<QuantileFeature> &train, const KernelRidgeModel &model,
                            const std::vector<QuantileFeature> &test, double sigma) {
    return kernel_ridge_predict(gaussian_cross_kernel(test, train, sigma), model);
}

std::vector<std::vector<Index>> kfold_indices(Index n, Index folds, const RngState &rng) {
    require(folds >= 2 && folds <= n, ErrorCode::InvalidArgument, "need 2 <= folds <= n");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    RandomStream stream(rng);
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(stream.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[std::size_t(i)], perm[std::size_t(j)]);
    }
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
    for (Index k = 0; k < n; ++k) out[std::size_t(k % folds)].push_back(perm[std::size_t(k)]);
    for (auto &f : out) std::sort(f.begin(), f.end());
    return out;
}

double r2_score(const Vector &truth, const Vector &predicted) {
    require(truth.size() == predicted.size() && truth.size() > 0, ErrorCode::SizeMismatch, "R2 sizes");
    const double ss_res = (truth - predicted).squaredNorm();
    const double ss_tot = (truth.array() - truth.mean()).matrix().squaredNorm();
    return ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
}

double mean_absolute_error(const Vector &truth, const Vector &predicted) {
    require(truth.size() == predicted.size() && truth.size() > 0, ErrorCode::SizeMismatch, "MAE sizes");
    return (truth - predicted).cwiseAbs().mean();
}

}  // namespace spdsliced
