#include "spdsliced/adaptation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "spdsliced/parallel.hpp"

namespace spdsliced {

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::spdsw: return "spdsw";
        case LossKind::logsw: return "logsw";
        case LossKind::lew_exact: return "lew";
        case LossKind::le_sinkhorn: return "les";
    }
    return "unknown";
}

std::string_view to_string(AdaptationMode mode) {
    return mode == AdaptationMode::particles ? "particles" : "transform";
}

LossKind loss_kind_from_string(std::string_view name) {
    if (name == "spdsw") return LossKind::spdsw;
    if (name == "logsw") return LossKind::logsw;
    if (name == "lew" || name == "lew_exact") return LossKind::lew_exact;
    if (name == "les" || name == "le_sinkhorn") return LossKind::le_sinkhorn;
    throw Error(ErrorCode::InvalidArgument, "unknown loss '" + std::string(name) + "'");
}

AdaptationMode adaptation_mode_from_string(std::string_view name) {
    if (name == "particles") return AdaptationMode::particles;
    if (name == "transform") return AdaptationMode::transform;
    throw Error(ErrorCode::InvalidArgument, "unknown adaptation mode '" + std::string(name) + "'");
}

namespace {

double powered(double t, double p) {
    if (p == 2.0) return t * t;
    if (p == 1.0) return t;
    return std::pow(t, p);
}

// d/dx |x − y|^p
double powered_slope(double diff, double p) {
    if (p == 2.0) return 2.0 * diff;
    if (diff == 0.0) return 0.0;
    const double s = diff > 0 ? 1.0 : -1.0;
    if (p == 1.0) return s;
    return p * std::pow(std::abs(diff), p - 1.0) * s;
}

// Sliced loss over coordinate matrices (points × slices) and its gradient with
// respect to every source coordinate. Ties are broken by point index.
double sliced_loss_gradient(const Matrix &xs, const Matrix &ys, double p, Matrix &grad) {
    const Index n = xs.rows(), m = ys.rows(), slices = xs.cols();
    grad.setZero(n, slices);
    std::vector<double> per_slice(static_cast<std::size_t>(slices));
    parallel_for(static_cast<std::size_t>(slices), [&](std::size_t l) {
        const auto col = static_cast<Index>(l);
        std::vector<Index> ox(static_cast<std::size_t>(n)), oy(static_cast<std::size_t>(m));
        std::iota(ox.begin(), ox.end(), 0);
        std::iota(oy.begin(), oy.end(), 0);
        std::stable_sort(ox.begin(), ox.end(), [&](Index a, Index b) { return xs(a, col) < xs(b, col); });
        std::stable_sort(oy.begin(), oy.end(), [&](Index a, Index b) { return ys(a, col) < ys(b, col); });
        double acc = 0;
        if (n == m) {
            for (Index k = 0; k < n; ++k) {
                const Index i = ox[std::size_t(k)], j = oy[std::size_t(k)];
                const double diff = xs(i, col) - ys(j, col);
                acc += powered(std::abs(diff), p);
                grad(i, col) = powered_slope(diff, p) / double(n);
            }
            per_slice[l] = acc / double(n);
            return;
        }
        const double total = double(n) * double(m);
        std::size_t a = 0, b = 0;
        std::uint64_t prev = 0;
        while (a < std::size_t(n) && b < std::size_t(m)) {
            const std::uint64_t nx = (a + 1) * std::uint64_t(m), ny = (b + 1) * std::uint64_t(n);
            const std::uint64_t next = std::min(nx, ny);
            const double w = double(next - prev) / total;
            const Index i = ox[a], j = oy[b];
            const double diff = xs(i, col) - ys(j, col);
            acc += w * powered(std::abs(diff), p);
            grad(i, col) += w * powered_slope(diff, p);
            prev = next;
            if (nx == next) ++a;
            if (ny == next) ++b;
        }
        per_slice[l] = acc;
    });
    grad /= double(slices);
    return std::accumulate(per_slice.begin(), per_slice.end(), 0.0) / double(slices);
}

Matrix sym(const Matrix &m) { return 0.5 * (m + m.transpose()); }
Matrix skew(const Matrix &m) { return 0.5 * (m - m.transpose()); }

}  // namespace

VectorizedLoss loss_on_logs(const Matrix &source_vec, const Matrix &target_vec, const ProjectionBasis *basis,
                            const LossConfig &config) {
    require(source_vec.rows() == target_vec.rows(), ErrorCode::DimensionMismatch, "source and target dimensions");
    require(config.p >= 1, ErrorCode::InvalidArgument, "order p must be >= 1");
    VectorizedLoss out;
    if (config.kind == LossKind::spdsw || config.kind == LossKind::logsw) {
        require(basis != nullptr, ErrorCode::InvalidArgument, "sliced losses need a projection basis");
        require(basis->vectorized().rows() == source_vec.rows(), ErrorCode::DimensionMismatch, "basis dimension");
        const Matrix xs = source_vec.transpose() * basis->vectorized();
        const Matrix ys = target_vec.transpose() * basis->vectorized();
        Matrix coord_grad;
        out.value = sliced_loss_gradient(xs, ys, config.p, coord_grad);
        out.gradient = basis->vectorized() * coord_grad.transpose();
        return out;
    }
    // Transport losses on log-Euclidean ground cost ‖s_i − t_j‖^p.
    const Index n = source_vec.cols(), m = target_vec.cols();
    Matrix dist(n, m), cost(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) {
            dist(i, j) = (source_vec.col(i) - target_vec.col(j)).norm();
            cost(i, j) = powered(dist(i, j), config.p);
        }
    const auto c = make_cost_matrix(cost, GroundMetric::log_euclidean, config.p);
    Matrix plan;
    if (config.kind == LossKind::lew_exact) {
        auto tp = exact_wasserstein(c, config.exact_size_cap);
        out.value = tp.cost;
        plan = std::move(tp.plan);
    } else {
        auto res = sinkhorn(c, config.sinkhorn);
        out.value = res.regularized_objective;
        out.converged = res.converged;
        plan = std::move(res.plan.plan);
    }
    out.gradient = Matrix::Zero(source_vec.rows(), n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) {
            if (plan(i, j) == 0.0) continue;
            const double r = dist(i, j);
            const double scale = config.p == 2.0 ? 2.0 : (r > 0 ? config.p * std::pow(r, config.p - 2.0) : 0.0);
            out.gradient.col(i) += plan(i, j) * scale * (source_vec.col(i) - target_vec.col(j));
        }
    return out;
}

ParticleLoss loss_and_gradient_particles(const std::vector<SymMatrixd> &source_logs, const EmpiricalSpdMeasure &target,
                                         const ProjectionBasis &basis, const LossConfig &config) {
    const SymMeasure src(source_logs);
    require(src.dim() == target.dim(), ErrorCode::DimensionMismatch, "source and target dimensions");
    const auto res = loss_on_logs(src.vectorized(), target.log_measure().vectorized(), &basis, config);
    ParticleLoss out;
    out.loss = res.value;
    out.converged = res.converged;
    out.gradients.reserve(source_logs.size());
    for (Index i = 0; i < res.gradient.cols(); ++i) out.gradients.push_back(unvectorize<double>(res.gradient.col(i), src.dim()));
    return out;
}

Matrix TransformStep::matrix() const {
    if (kind == Kind::translation) return sym_exp(SymMatrixd(parameter)).matrix();
    return skew(parameter).exp();
}

TransformChain::TransformChain(std::vector<TransformStep> steps) : steps_(std::move(steps)) {
    for (const auto &s : steps_) {
        require(s.parameter.rows() == s.parameter.cols(), ErrorCode::DimensionMismatch, "step parameter must be square");
        if (s.kind == TransformStep::Kind::translation) {
            require((s.parameter - s.parameter.transpose()).norm() <= 1e-12 * (1 + s.parameter.norm()),
                    ErrorCode::InvalidArgument, "translation parameter must be symmetric");
        } else {
            require((s.parameter + s.parameter.transpose()).norm() <= 1e-12 * (1 + s.parameter.norm()),
                    ErrorCode::InvalidArgument, "rotation parameter must be skew-symmetric");
        }
    }
}

TransformChain TransformChain::translation_rotation(Index d) {
    return TransformChain({{TransformStep::Kind::translation, Matrix::Zero(d, d)},
                           {TransformStep::Kind::rotation, Matrix::Zero(d, d)}});
}

Matrix TransformChain::apply(const Matrix &c) const {
    Matrix m = c;
    for (const auto &s : steps_) {
        const Matrix t = s.matrix();
        m = sym(t.transpose() * m * t);
    }
    return m;
}

EmpiricalSpdMeasure TransformChain::apply(const EmpiricalSpdMeasure &measure) const {
    std::vector<Matrix> mats;
    for (const auto &s : steps_) mats.push_back(s.matrix());
    std::vector<SpdMatrixd> out;
    out.reserve(std::size_t(measure.size()));
    for (const auto &p : measure.points()) {
        Matrix m = p.matrix();
        for (const auto &t : mats) m = sym(t.transpose() * m * t);
        out.emplace_back(m);
    }
    return EmpiricalSpdMeasure(std::move(out));
}

ChainLoss loss_and_gradient_transform(const TransformChain &chain, const EmpiricalSpdMeasure &source,
                                      const EmpiricalSpdMeasure &target, const ProjectionBasis *basis,
                                      const LossConfig &config) {
    require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source and target dimensions");
    const Index d = source.dim(), n = source.size();
    const auto &steps = chain.steps();
    const std::size_t k = steps.size();
    std::vector<Matrix> t(k);
    for (std::size_t s = 0; s < k; ++s) {
        require(steps[s].parameter.rows() == d, ErrorCode::DimensionMismatch, "chain and data dimensions");
        t[s] = steps[s].matrix();
    }

    // Forward pass keeps every intermediate matrix for the backward pass.
    std::vector<std::vector<Matrix>> inter(static_cast<std::size_t>(n), std::vector<Matrix>(k + 1));
    std::vector<SpdMatrixd> finals;
    finals.reserve(std::size_t(n));
    Matrix logs(vectorized_size(d), n);
    for (Index i = 0; i < n; ++i) {
        auto &path = inter[std::size_t(i)];
        path[0] = source[i].matrix();
        for (std::size_t s = 0; s < k; ++s) path[s + 1] = sym(t[s].transpose() * path[s] * t[s]);
        finals.emplace_back(path[k]);
        vectorize_into<double>(finals.back().log().matrix(), logs.col(i));
    }

    const auto res = loss_on_logs(logs, target.log_measure().vectorized(), basis, config);
    ChainLoss out;
    out.loss = res.value;
    out.converged = res.converged;
    std::vector<Matrix> grad_t(k, Matrix::Zero(d, d));
    for (Index i = 0; i < n; ++i) {
        const auto g_log = unvectorize<double>(res.gradient.col(i), d);
        Matrix g = log_frechet_derivative(finals[std::size_t(i)], g_log).matrix();
        const auto &path = inter[std::size_t(i)];
        for (std::size_t s = k; s-- > 0;) {
            grad_t[s] += 2.0 * path[s] * t[s] * g;
            g = sym(t[s] * g * t[s].transpose());
        }
    }
    out.gradients.resize(k);
    for (std::size_t s = 0; s < k; ++s) {
        if (steps[s].kind == TransformStep::Kind::translation) {
            out.gradients[s] =
                exp_frechet_derivative(SymMatrixd(steps[s].parameter), SymMatrixd(sym(grad_t[s]))).matrix();
        } else {
            const Matrix omega_t = skew(steps[s].parameter).transpose();
            Matrix block = Matrix::Zero(2 * d, 2 * d);
            block.topLeftCorner(d, d) = omega_t;
            block.bottomRightCorner(d, d) = omega_t;
            block.topRightCorner(d, d) = grad_t[s];
            const Matrix e = block.exp();
            out.gradients[s] = skew(e.topRightCorner(d, d));
        }
    }
    return out;
}

AdaptationTrace run_adaptation(const LabeledSpdDataset &source, const EmpiricalSpdMeasure &target,
                               const AdaptationConfig &config) {
    const auto start = std::chrono::steady_clock::now();
    require(config.epochs >= 0, ErrorCode::InvalidArgument, "epochs must be >= 0");
    require(config.learning_rate > 0, ErrorCode::InvalidArgument, "learning rate must be positive");
    require(source.dim() == target.dim(), ErrorCode::DimensionMismatch, "source and target dimensions");
    const Index d = source.dim();

    std::optional<ProjectionBasis> basis;
    if (config.loss.kind == LossKind::spdsw || config.loss.kind == LossKind::logsw) {
        const auto kind = config.loss.kind == LossKind::spdsw ? SamplerKind::eig_uniform : SamplerKind::vectorized_sphere;
        basis.emplace(build_projection_basis(config.seed, d, config.num_projections, kind));
    }
    const ProjectionBasis *bp = basis ? &*basis : nullptr;
    const Matrix &target_vec = target.log_measure().vectorized();

    double lr = config.learning_rate;
    std::vector<double> losses;
    Index rejected = 0;
    bool converged = true;

    auto accept = [&](double trial, double current) { return !config.safeguard || trial <= current; };

    if (config.mode == AdaptationMode::particles) {
        Matrix x = source.measure.log_measure().vectorized();
        auto cur = loss_on_logs(x, target_vec, bp, config.loss);
        converged = converged && cur.converged;
        losses.push_back(cur.value);
        for (Index epoch = 0; epoch < config.epochs; ++epoch) {
            bool stepped = false;
            for (int h = 0; h <= config.max_halvings; ++h) {
                Matrix trial_x = x - lr * cur.gradient;
                auto trial = loss_on_logs(trial_x, target_vec, bp, config.loss);
                if (accept(trial.value, cur.value)) {
                    x = std::move(trial_x);
                    cur = std::move(trial);
                    converged = converged && cur.converged;
                    stepped = true;
                    break;
                }
                ++rejected;
                lr *= 0.5;
            }
            (void)stepped;
            losses.push_back(cur.value);
        }
        std::vector<SpdMatrixd> pts;
        pts.reserve(std::size_t(x.cols()));
        for (Index i = 0; i < x.cols(); ++i) pts.push_back(sym_exp(unvectorize<double>(x.col(i), d)));
        AdaptationTrace trace{losses, LabeledSpdDataset(EmpiricalSpdMeasure(std::move(pts)), source.labels),
                              std::nullopt, config, lr, rejected, converged, 0.0};
        trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return trace;
    }

    TransformChain chain = TransformChain::translation_rotation(d);
    auto cur = loss_and_gradient_transform(chain, source.measure, target, bp, config.loss);
    converged = converged && cur.converged;
    losses.push_back(cur.loss);
    for (Index epoch = 0; epoch < config.epochs; ++epoch) {
        for (int h = 0; h <= config.max_halvings; ++h) {
            TransformChain trial_chain = chain;
            for (std::size_t s = 0; s < chain.steps().size(); ++s) {
                trial_chain.steps()[s].parameter -= lr * cur.gradients[s];
            }
            std::optional<ChainLoss> trial;
            try {
                trial = loss_and_gradient_transform(trial_chain, source.measure, target, bp, config.loss);
            } catch (const Error &e) {
                const bool out_of_range = e.code() == ErrorCode::Overflow || e.code() == ErrorCode::NotPositiveDefinite;
                if (!config.safeguard || !out_of_range) throw;
            }
            if (trial && accept(trial->loss, cur.loss)) {
                chain = std::move(trial_chain);
                cur = std::move(*trial);
                converged = converged && cur.converged;
                break;
            }
            ++rejected;
            lr *= 0.5;
        }
        losses.push_back(cur.loss);
    }
    AdaptationTrace trace{losses, LabeledSpdDataset(chain.apply(source.measure), source.labels), chain, config, lr,
                          rejected, converged, 0.0};
    trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return trace;
}

}  // namespace spdsliced
