#include "spdsliced/sliced.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "spdsliced/parallel.hpp"

namespace spdsliced {

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::spdsw: return "spdsw";
        case Estimator::symsw: return "symsw";
        case Estimator::logsw: return "logsw";
        case Estimator::hspdsw: return "hspdsw";
        case Estimator::lew_exact: return "lew_exact";
        case Estimator::le_sinkhorn: return "le_sinkhorn";
        case Estimator::aiw_exact: return "aiw_exact";
    }
    return "unknown";
}

double DiscrepancyReport::root() const { return std::pow(value, 1.0 / order_p); }

ProjectedMeasure::ProjectedMeasure(std::vector<double> c) : coords(std::move(c)), sorted_view(coords) {
    std::sort(sorted_view.begin(), sorted_view.end());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_unit(const SymMatrixd &a) {
    require(std::abs(a.norm() - 1.0) <= 1e-10, ErrorCode::NotUnitNorm, "direction must have unit Frobenius norm");
}

void check_order(double p) {
    require(std::isfinite(p) && p >= 1.0, ErrorCode::InvalidArgument, "order p must be >= 1");
}

inline double cost(double a, double b, double p) {
    const double t = std::abs(a - b);
    if (p == 2.0) return t * t;
    if (p == 1.0) return t;
    return std::pow(t, p);
}

struct SortedDirection {
    Matrix rotation;  // columns reordered so the spectrum is descending
    Vector spectrum;
};

std::optional<SortedDirection> sort_descending(const Matrix &rotation, const Vector &spectrum) {
    const Index d = spectrum.size();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return spectrum(a) > spectrum(b); });
    SortedDirection out{Matrix(rotation.rows(), d), Vector(d)};
    for (Index k = 0; k < d; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.rotation.col(k) = rotation.col(src);
        out.spectrum(k) = spectrum(src);
        if (k > 0 && out.spectrum(k - 1) - out.spectrum(k) < kDirectionGap) return std::nullopt;
    }
    return out;
}

double busemann_sorted(const SortedDirection &dir, const Matrix &m) {
    const Matrix rotated = dir.rotation.transpose() * m * dir.rotation;
    const auto udu = udu_decompose<double>(0.5 * (rotated + rotated.transpose()));
    double acc = 0;
    for (Index i = 0; i < dir.spectrum.size(); ++i) acc -= dir.spectrum(i) * std::log(udu.diagonal(i));
    return acc;
}

DiscrepancyReport finish(double sum_values, Index count, Estimator est, double p, const ProjectionBasis &basis,
                         Clock::time_point start) {
    DiscrepancyReport r;
    r.value = sum_values / static_cast<double>(count);
    r.estimator = est;
    r.order_p = p;
    r.num_projections = count;
    r.seed = basis.seed();
    r.sampler = basis.sampler_kind();
    r.wall_time_seconds = seconds_since(start);
    return r;
}

DiscrepancyReport sliced_on_vectorized(const Matrix &x_vec, const Matrix &y_vec, const ProjectionBasis &basis,
                                       double p, Estimator est, Clock::time_point start) {
    const Matrix x_coords = x_vec.transpose() * basis.vectorized();
    const Matrix y_coords = y_vec.transpose() * basis.vectorized();
    const auto values = sliced_wasserstein_values(x_coords, y_coords, p);
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return finish(sum, basis.count(), est, p, basis, start);
}

}  // namespace

SpdMatrixd geodesic_project(const SymMatrixd &direction, const SpdMatrixd &m) {
    const double t = geodesic_coordinate(direction, m);
    return sym_exp(t * direction);
}

double geodesic_coordinate(const SymMatrixd &direction, const SpdMatrixd &m) {
    check_unit(direction);
    require(direction.dim() == m.dim(), ErrorCode::DimensionMismatch, "direction and matrix dimensions");
    return inner(direction, m.log());
}

double busemann_coordinate_ai(const SymMatrixd &direction, const SpdMatrixd &m) {
    check_unit(direction);
    require(direction.dim() == m.dim(), ErrorCode::DimensionMismatch, "direction and matrix dimensions");
    const auto eig = eigh<double>(direction.matrix());
    const auto sorted = sort_descending(eig.eigenvectors, eig.eigenvalues);
    require(sorted.has_value(), ErrorCode::DegenerateDirection, "direction has repeated eigenvalues");
    return busemann_sorted(*sorted, m.matrix());
}

double busemann_coordinate_ai(const SpectralDirection &direction, const SpdMatrixd &m) {
    require(direction.rotation.rows() == m.dim(), ErrorCode::DimensionMismatch, "direction and matrix dimensions");
    const auto sorted = sort_descending(direction.rotation, direction.spectrum);
    require(sorted.has_value(), ErrorCode::DegenerateDirection, "direction has repeated eigenvalues");
    return busemann_sorted(*sorted, m.matrix());
}

double wasserstein_1d(std::span<const double> x, std::span<const double> y, double p) {
    require(!x.empty() && !y.empty(), ErrorCode::EmptyMeasure, "1D Wasserstein needs nonempty supports");
    check_order(p);
    const std::size_t n = x.size(), m = y.size();
    if (n == m) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += cost(x[i], y[i], p);
        return acc / static_cast<double>(n);
    }
    // Quantile breakpoints in units of 1/(n m): x_i covers ((i)m, (i+1)m], y_j covers (jn, (j+1)n].
    const double total = static_cast<double>(n) * static_cast<double>(m);
    std::size_t i = 0, j = 0;
    std::uint64_t prev = 0;
    double acc = 0;
    while (i < n && j < m) {
        const std::uint64_t next_x = (i + 1) * m, next_y = (j + 1) * n;
        const std::uint64_t next = std::min(next_x, next_y);
        acc += static_cast<double>(next - prev) * cost(x[i], y[j], p);
        prev = next;
        if (next_x == next) ++i;
        if (next_y == next) ++j;
    }
    return acc / total;
}

std::vector<double> sliced_wasserstein_values(const Matrix &x_coords, const Matrix &y_coords, double p) {
    check_order(p);
    require(x_coords.cols() == y_coords.cols(), ErrorCode::SizeMismatch, "slice counts differ");
    const auto slices = static_cast<std::size_t>(x_coords.cols());
    std::vector<double> values(slices);
    parallel_for(slices, [&](std::size_t l) {
        const auto col = static_cast<Index>(l);
        std::vector<double> xs(x_coords.col(col).data(), x_coords.col(col).data() + x_coords.rows());
        std::vector<double> ys(y_coords.col(col).data(), y_coords.col(col).data() + y_coords.rows());
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        values[l] = wasserstein_1d(xs, ys, p);
    });
    return values;
}

DiscrepancyReport spdsw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                        const ProjectionBasis &basis, double p) {
    const auto start = Clock::now();
    check_order(p);
    require(mu.dim() == nu.dim() && mu.dim() == basis.dim(), ErrorCode::DimensionMismatch,
            "measures and basis must share a dimension");
    return sliced_on_vectorized(mu.log_measure().vectorized(), nu.log_measure().vectorized(), basis, p,
                                Estimator::spdsw, start);
}

DiscrepancyReport sym_sw(const SymMeasure &mu, const SymMeasure &nu, const ProjectionBasis &basis, double p) {
    const auto start = Clock::now();
    check_order(p);
    require(mu.dim() == nu.dim() && mu.dim() == basis.dim(), ErrorCode::DimensionMismatch,
            "measures and basis must share a dimension");
    return sliced_on_vectorized(mu.vectorized(), nu.vectorized(), basis, p, Estimator::symsw, start);
}

DiscrepancyReport log_sw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                         const ProjectionBasis &sphere_basis, double p) {
    const auto start = Clock::now();
    check_order(p);
    require(sphere_basis.sampler_kind() == SamplerKind::vectorized_sphere, ErrorCode::InvalidArgument,
            "logSW needs directions uniform on the vectorized sphere");
    require(mu.dim() == nu.dim() && mu.dim() == sphere_basis.dim(), ErrorCode::DimensionMismatch,
            "measures and basis must share a dimension");
    return sliced_on_vectorized(mu.log_measure().vectorized(), nu.log_measure().vectorized(), sphere_basis, p,
                                Estimator::logsw, start);
}

DiscrepancyReport hspdsw(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu,
                         const ProjectionBasis &basis, double p) {
    const auto start = Clock::now();
    check_order(p);
    require(basis.sampler_kind() == SamplerKind::eig_uniform && !basis.spectral().empty(),
            ErrorCode::InvalidArgument, "horospherical slicing needs an eig_uniform basis");
    require(mu.dim() == nu.dim() && mu.dim() == basis.dim(), ErrorCode::DimensionMismatch,
            "measures and basis must share a dimension");
    const auto slices = static_cast<std::size_t>(basis.count());
    const Index d = basis.dim();

    std::vector<SortedDirection> dirs(slices);
    std::vector<Index> redraws(slices, 0);
    parallel_for(slices, [&](std::size_t l) {
        const auto &f = basis.spectral()[l];
        auto sorted = sort_descending(f.rotation, f.spectrum);
        Index attempt = 0;
        while (!sorted) {
            ++attempt;
            const auto redraw = sample_spectral_direction(direction_stream(basis.seed(), Index(l), attempt), d);
            sorted = sort_descending(redraw.rotation, redraw.spectrum);
        }
        redraws[l] = attempt;
        dirs[l] = std::move(*sorted);
    });

    Matrix x_coords(mu.size(), basis.count()), y_coords(nu.size(), basis.count());
    parallel_for(slices, [&](std::size_t l) {
        const auto col = static_cast<Index>(l);
        for (Index i = 0; i < mu.size(); ++i) x_coords(i, col) = busemann_sorted(dirs[l], mu[i].matrix());
        for (Index j = 0; j < nu.size(); ++j) y_coords(j, col) = busemann_sorted(dirs[l], nu[j].matrix());
    });
    const auto values = sliced_wasserstein_values(x_coords, y_coords, p);
    auto report = finish(std::accumulate(values.begin(), values.end(), 0.0), basis.count(), Estimator::hspdsw, p,
                         basis, start);
    report.resampled_directions = std::accumulate(redraws.begin(), redraws.end(), Index(0));
    return report;
}

McErrorTable mc_error_estimate(const EmpiricalSpdMeasure &mu, const EmpiricalSpdMeasure &nu, double p,
                               const std::vector<Index> &projection_counts, Index repetitions,
                               const RngState &rng, Index reference_projections, SamplerKind kind) {
    require(repetitions >= 1, ErrorCode::InvalidArgument, "repetitions must be >= 1");
    const auto reference_basis = build_projection_basis(rng.derive(0), mu.dim(), reference_projections, kind);
    const double reference = spdsw(mu, nu, reference_basis, p).value;
    McErrorTable table{reference, reference_projections, {}};
    for (const Index count : projection_counts) {
        require(count >= 1, ErrorCode::InvalidArgument, "projection counts must be >= 1");
        if (count == reference_projections) {
            table.rows.push_back({count, 0.0, 0.0});
            continue;
        }
        std::vector<double> errors(static_cast<std::size_t>(repetitions));
        for (Index r = 0; r < repetitions; ++r) {
            const RngState s = rng.derive(1 + static_cast<std::uint64_t>(r)).derive(static_cast<std::uint64_t>(count));
            const auto basis = build_projection_basis(s, mu.dim(), count, kind);
            errors[static_cast<std::size_t>(r)] = std::abs(spdsw(mu, nu, basis, p).value - reference);
        }
        const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / double(repetitions);
        double var = 0;
        for (double e : errors) var += (e - mean) * (e - mean);
        const double se = repetitions > 1 ? std::sqrt(var / double(repetitions - 1) / double(repetitions)) : 0.0;
        table.rows.push_back({count, mean, se});
    }
    return table;
}

}  // namespace spdsliced
