// Acceptance suite: one PASS/FAIL line per criterion.
//
//   spdsliced_acceptance            run every criterion
//   spdsliced_acceptance 3 9        run only criteria 3 and 9

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spdsliced/adaptation.hpp"
#include "spdsliced/experiments.hpp"
#include "spdsliced/kernels.hpp"
#include "spdsliced/sliced.hpp"
#include "spdsliced/transport.hpp"

using namespace spdsliced;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

EmpiricalSpdMeasure random_measure(RandomStream &s, const RngState &rng, Index n, Index d) {
    return wishart_measure(rng, n, d, d + 1, oracle::random_spd(s, d, 0.5));
}

Outcome metric_axioms() {
    const auto start = Clock::now();
    const RngState root{101, 0};
    const auto basis = build_projection_basis(root.derive(0), 3, 100, SamplerKind::eig_uniform);
    RandomStream scales(root.derive(1));
    double worst_self = 0, worst_triangle = -1e300;
    bool symmetric = true;
    for (int t = 0; t < 200; ++t) {
        const auto rng = root.derive(2).derive(std::uint64_t(t));
        const auto mu = random_measure(scales, rng.derive(0), 20, 3);
        const auto nu = random_measure(scales, rng.derive(1), 20, 3);
        const auto rho = random_measure(scales, rng.derive(2), 20, 3);
        worst_self = std::max(worst_self, spdsw(mu, mu, basis, 2).value);
        const double mn = spdsw(mu, nu, basis, 2).value, nm = spdsw(nu, mu, basis, 2).value;
        symmetric = symmetric && mn == nm;
        const double mr = std::sqrt(spdsw(mu, rho, basis, 2).value);
        const double nr = std::sqrt(spdsw(nu, rho, basis, 2).value);
        const double a = std::sqrt(mn);
        worst_triangle = std::max({worst_triangle, mr - a - nr, a - mr - nr, nr - a - mr});
    }
    const double secs = since(start);
    return {worst_self <= 1e-12 && symmetric && worst_triangle <= 1e-10 && secs < 60,
            fmt("max self %.2e, symmetry %s, worst triangle excess %.2e, %.1fs", worst_self,
                symmetric ? "exact" : "broken", worst_triangle, secs)};
}

Outcome log_pushforward_equivalence() {
    const RngState root{202, 0};
    RandomStream scales(root.derive(1));
    double worst_lib = 0, worst_oracle = 0;
    for (int t = 0; t < 100; ++t) {
        const auto rng = root.derive(2).derive(std::uint64_t(t));
        const Index d = 2 + t % 3;
        const auto basis = build_projection_basis(rng.derive(9), d, 40, SamplerKind::eig_uniform);
        const auto mu = random_measure(scales, rng.derive(0), 12, d);
        const auto nu = random_measure(scales, rng.derive(1), t % 2 ? 12 : 9, d);
        std::vector<Matrix> xs, ys, dirs;
        for (const auto &p : mu.points()) xs.push_back(p.matrix());
        for (const auto &p : nu.points()) ys.push_back(p.matrix());
        for (const auto &a : basis.directions()) dirs.push_back(a.matrix());
        for (double p : {1.0, 2.0}) {
            const double a = spdsw(mu, nu, basis, p).value;
            const double b = sym_sw(mu.log_measure(), nu.log_measure(), basis, p).value;
            const double c = oracle::sliced_with_logm(xs, ys, dirs, p);
            worst_lib = std::max(worst_lib, std::abs(a - b) / std::abs(b));
            worst_oracle = std::max(worst_oracle, std::abs(a - c) / std::abs(c));
        }
    }
    return {worst_lib <= 1e-10 && worst_oracle <= 1e-10,
            fmt("max relative gap vs SymSW %.2e, vs independent logm oracle %.2e", worst_lib, worst_oracle)};
}

Outcome upper_bound() {
    const RngState root{303, 0};
    RandomStream scales(root.derive(1));
    double worst_exact = 0;
    for (int t = 0; t < 100; ++t) {
        const Index n = 1 + t % 6;
        const auto rng = root.derive(2).derive(std::uint64_t(t));
        const auto mu = random_measure(scales, rng.derive(0), n, 3);
        const auto nu = random_measure(scales, rng.derive(1), n, 3);
        const auto cost = build_cost_matrix(mu, nu, GroundMetric::log_euclidean, 2);
        const double exact = exact_wasserstein(cost).cost;
        const double brute = oracle::brute_force_assignment(cost.entries);
        worst_exact = std::max(worst_exact, std::abs(exact - brute) / std::max(1.0, brute));
    }
    double worst_excess = -1e300, worst_ratio = 0;
    for (Index d : {Index(2), Index(5)}) {
        for (int t = 0; t < 50; ++t) {
            const auto rng = root.derive(3).derive(std::uint64_t(d)).derive(std::uint64_t(t));
            const auto mu = random_measure(scales, rng.derive(0), 16, d);
            const auto nu = random_measure(scales, rng.derive(1), 16, d);
            const auto basis = build_projection_basis(rng.derive(2), d, 20000, SamplerKind::eig_uniform);
            const double sw = spdsw(mu, nu, basis, 2).value;
            const double lew = exact_wasserstein(build_cost_matrix(mu, nu, GroundMetric::log_euclidean, 2)).cost;
            worst_excess = std::max(worst_excess, sw - lew / double(d));
            worst_ratio = std::max(worst_ratio, sw * double(d) / lew);
        }
    }
    return {worst_exact <= 1e-12 && worst_excess <= 1e-10,
            fmt("assignment vs brute force %.2e; max (spdsw - lew/d) %.2e, max d*spdsw/lew %.3f", worst_exact,
                worst_excess, worst_ratio)};
}

Outcome projection_complexity() {
    const auto start = Clock::now();
    ProjectionComplexityConfig cfg;
    cfg.seed = RngState{404, 0};
    const auto report = run_projection_complexity(cfg);
    std::vector<double> ls, errs;
    for (const auto &row : report.rows) {
        ls.push_back(row["num_projections"].get<double>());
        errs.push_back(row["mean_abs_error"].get<double>());
    }
    const double slope = loglog_slope(ls, errs);
    const double drop = errs.front() / errs.back();
    const double secs = since(start);
    return {slope >= -0.65 && slope <= -0.35 && drop >= 5 && secs < 600,
            fmt("slope %.3f, error ratio first/last %.1f, %.1fs", slope, drop, secs)};
}

Outcome sample_complexity() {
    const auto start = Clock::now();
    SampleComplexityConfig cfg;
    cfg.seed = RngState{505, 0};
    const auto report = run_sample_complexity(cfg);
    std::map<std::pair<std::string, Index>, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto &row : report.rows) {
        auto &s = series[{row["metric"].get<std::string>(), row["d"].get<Index>()}];
        s.first.push_back(row["n"].get<double>());
        s.second.push_back(row["mean"].get<double>());
    }
    std::map<std::pair<std::string, Index>, double> slope;
    int steps = 0, violations = 0;
    for (const auto &[key, s] : series) {
        slope[key] = loglog_slope(s.first, s.second);
        for (std::size_t i = 1; i < s.second.size(); ++i, ++steps) violations += s.second[i] > s.second[i - 1];
    }
    const double sw2 = slope[{"spdsw", 2}], sw20 = slope[{"spdsw", 20}];
    const double le2 = slope[{"lew_exact", 2}], le20 = slope[{"lew_exact", 20}];
    const double secs = since(start);
    const bool ok = std::abs(sw2 - sw20) <= 0.15 && le20 - le2 >= 0.1 && violations <= 0.1 * steps && secs < 900;
    return {ok, fmt("spdsw slopes %.3f (d=2) %.3f (d=20); lew slopes %.3f (d=2) %.3f (d=20); "
                    "monotonicity violations %d/%d; %.1fs",
                    sw2, sw20, le2, le20, violations, steps, secs)};
}

Outcome feature_isometry() {
    const RngState root{606, 0};
    RandomStream scales(root.derive(1));
    auto basis = std::make_shared<const ProjectionBasis>(
        build_projection_basis(root.derive(0), 3, 200, SamplerKind::eig_uniform));
    const Vector levels = midpoint_quantile_levels(500);
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        const auto rng = root.derive(2).derive(std::uint64_t(t));
        const auto mu = random_measure(scales, rng.derive(0), 100, 3);
        const auto nu = random_measure(scales, rng.derive(1), 100, 3);
        const double feat = squared_feature_distance(quantile_feature(mu, basis, levels), quantile_feature(nu, basis, levels));
        const double sw = spdsw(mu, nu, basis->prefix(basis->count()), 2).value;
        worst = std::max(worst, std::abs(feat - sw) / sw);
    }
    double min_eig = 1e300;
    for (int g = 0; g < 5; ++g) {
        std::vector<QuantileFeature> feats;
        for (int i = 0; i < 30; ++i) {
            const auto mu = random_measure(scales, root.derive(3).derive(std::uint64_t(g)).derive(std::uint64_t(i)), 100, 3);
            feats.push_back(quantile_feature(mu, basis, levels));
        }
        const double sigma = median_heuristic_sigma(feats);
        for (double f : {0.25, 1.0, 4.0}) {
            const auto gram = gaussian_kernel(feats, f * sigma);
            min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix>(gram.entries).eigenvalues().minCoeff());
        }
    }
    return {worst <= 0.05 && min_eig >= -1e-8,
            fmt("max relative gap %.2e, min Gram eigenvalue %.3e", worst, min_eig)};
}

Outcome distribution_regression() {
    const auto start = Clock::now();
    SyntheticRegressionConfig data;
    data.seed = RngState{707, 0};
    KernelRidgeConfig cfg;
    cfg.seed = RngState{708, 0};
    const auto result = run_kernel_ridge_cv(synthetic_regression_items(data), cfg);
    const double secs = since(start);
    return {result.r2 >= 0.9 && secs < 300, fmt("mean fold R2 %.4f, MAE %.4f, %.1fs", result.r2, result.mae, secs)};
}

Outcome domain_adaptation() {
    double gain = 0, initial = 0, final_loss = 0;
    std::string per_seed;
    for (std::uint64_t s = 0; s < 5; ++s) {
        DomainAdaptationBenchmark cfg;
        cfg.seed = RngState{800 + s, 0};
        const auto out = run_domain_adaptation_benchmark(cfg);
        gain += (out.accuracy_after - out.accuracy_before) / 5;
        initial += out.initial_loss / 5;
        final_loss += out.final_loss / 5;
        per_seed += fmt(" %.2f->%.2f", out.accuracy_before, out.accuracy_after);
    }
    return {gain >= 0.15 && final_loss <= 0.5 * initial,
            fmt("mean accuracy gain %.3f (%s), mean loss %.3e -> %.3e", gain, per_seed.c_str(), initial, final_loss)};
}

Outcome gradients() {
    const RngState root{909, 0};
    RandomStream s(root);
    // Log Fréchet derivative against central differences of an independent logm.
    double worst_log = 0;
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 5;
        Matrix m;
        if (t % 3 == 0) {
            const Matrix g = oracle::random_skew(s, d);
            const Matrix q = g.exp();
            Vector ev(d);
            const double base = std::exp(0.5 * s.normal());
            for (Index i = 0; i < d; ++i) ev(i) = base * (1.0 + (i % 2) * std::pow(10.0, -9.0 - double(t % 4)));
            m = q * ev.asDiagonal() * q.transpose();
            m = 0.5 * (m + m.transpose());
        } else {
            m = oracle::random_spd(s, d, 0.7);
        }
        const Matrix h = oracle::random_symmetric(s, d);
        const double step = 1e-5 * m.norm();
        const Matrix fd = (oracle::logm(m + step * h) - oracle::logm(m - step * h)) / (2 * step);
        const Matrix an = log_frechet_derivative(SpdMatrixd(m), SymMatrixd(h)).matrix();
        worst_log = std::max(worst_log, (an - fd).norm() / fd.norm());
    }

    // Particle loss.
    double worst_particle = 0;
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 3;
        const auto rng = root.derive(1).derive(std::uint64_t(t));
        const auto basis = build_projection_basis(rng.derive(0), d, 20, SamplerKind::eig_uniform);
        const auto target = random_measure(s, rng.derive(1), t % 2 ? 10 : 8, d);
        std::vector<SymMatrixd> src, dir;
        for (int i = 0; i < 8; ++i) {
            src.emplace_back(oracle::random_symmetric(s, d));
            dir.emplace_back(oracle::random_symmetric(s, d));
        }
        LossConfig lc;
        lc.p = t % 4 == 3 ? 1.5 : 2.0;
        const auto res = loss_and_gradient_particles(src, target, basis, lc);
        double analytic = 0;
        for (std::size_t i = 0; i < src.size(); ++i) analytic += inner(res.gradients[i], dir[i]);
        const double h = 1e-6;
        auto shifted = [&](double sign) {
            std::vector<SymMatrixd> out;
            for (std::size_t i = 0; i < src.size(); ++i) out.push_back(src[i] + (sign * h) * dir[i]);
            return loss_and_gradient_particles(out, target, basis, lc).loss;
        };
        const double fd = (shifted(1) - shifted(-1)) / (2 * h);
        worst_particle = std::max(worst_particle, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8));
    }

    // Transform chain.
    double worst_chain = 0;
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 3;
        const auto rng = root.derive(2).derive(std::uint64_t(t));
        const auto basis = build_projection_basis(rng.derive(0), d, 20, SamplerKind::eig_uniform);
        const auto source = random_measure(s, rng.derive(1), 8, d);
        const auto target = random_measure(s, rng.derive(2), 8, d);
        TransformChain chain({{TransformStep::Kind::translation, 0.3 * oracle::random_symmetric(s, d)},
                              {TransformStep::Kind::rotation, 0.5 * oracle::random_skew(s, d)}});
        const std::vector<Matrix> dir{oracle::random_symmetric(s, d), oracle::random_skew(s, d)};
        LossConfig lc;
        lc.kind = t % 2 ? LossKind::lew_exact : LossKind::spdsw;
        const auto res = loss_and_gradient_transform(chain, source, target, &basis, lc);
        double analytic = 0;
        for (std::size_t k = 0; k < 2; ++k) analytic += (res.gradients[k].array() * dir[k].array()).sum();
        const double h = 1e-6;
        auto shifted = [&](double sign) {
            TransformChain c = chain;
            for (std::size_t k = 0; k < 2; ++k) c.steps()[k].parameter += sign * h * dir[k];
            return loss_and_gradient_transform(c, source, target, &basis, lc).loss;
        };
        const double fd = (shifted(1) - shifted(-1)) / (2 * h);
        worst_chain = std::max(worst_chain, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8));
    }
    return {worst_log <= 1e-6 && worst_particle <= 1e-5 && worst_chain <= 1e-4,
            fmt("max relative error: log derivative %.2e, particles %.2e, transform chain %.2e", worst_log,
                worst_particle, worst_chain)};
}

Outcome horospherical_structure() {
    const RngState root{1010, 0};
    RandomStream s(root);
    double worst_udu = 0, worst_diag = 0, worst_inv = 0;
    bool triangular = true;
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 7;
        const Matrix m = oracle::random_spd(s, d, 1.0);
        const auto f = udu_decompose<double>(m);
        for (Index i = 0; i < d; ++i) {
            triangular = triangular && f.unit_upper(i, i) == 1.0;
            for (Index j = 0; j < i; ++j) triangular = triangular && f.unit_upper(i, j) == 0.0;
        }
        const Matrix rec = f.unit_upper * f.diagonal.asDiagonal() * f.unit_upper.transpose();
        worst_udu = std::max(worst_udu, (rec - m).norm() / m.norm());
    }
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 7;
        Vector theta(d), diag(d);
        for (Index i = 0; i < d; ++i) {
            theta(i) = s.normal();
            diag(i) = std::exp(s.normal());
        }
        theta /= theta.norm();
        const SymMatrixd a(Matrix(theta.asDiagonal()));
        const SpdMatrixd m(Matrix(diag.asDiagonal()));
        const double expected = -(theta.array() * diag.array().log()).sum();
        worst_diag = std::max(worst_diag, std::abs(busemann_coordinate_ai(a, m) - expected) / (1 + std::abs(expected)));
    }
    for (int t = 0; t < 100; ++t) {
        const Index d = 2 + t % 7;
        const auto dir = sample_spectral_direction(root.derive(1).derive(std::uint64_t(t)), d);
        std::vector<Index> order(static_cast<std::size_t>(d));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Index a, Index b) { return dir.spectrum(a) > dir.spectrum(b); });
        Matrix p(d, d);
        for (Index k = 0; k < d; ++k) p.col(k) = dir.rotation.col(order[std::size_t(k)]);
        Matrix v = Matrix::Identity(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = i + 1; j < d; ++j) v(i, j) = s.normal();
        const Matrix m = oracle::random_spd(s, d, 0.7);
        const Matrix g = p * v * p.transpose();
        const Matrix moved = g * m * g.transpose();
        const double before = busemann_coordinate_ai(dir, SpdMatrixd(m));
        const double after = busemann_coordinate_ai(dir, SpdMatrixd(0.5 * (moved + moved.transpose())));
        worst_inv = std::max(worst_inv, std::abs(before - after));
    }
    return {triangular && worst_udu <= 1e-10 && worst_diag <= 1e-12 && worst_inv <= 1e-8,
            fmt("UDU reconstruction %.2e (unit upper %s), diagonal case %.2e, triangular invariance %.2e", worst_udu,
                triangular ? "yes" : "no", worst_diag, worst_inv)};
}

Outcome runtime_scaling() {
    RuntimeConfig cfg;
    cfg.n_grid = {1000, 3162, 10000, 31623, 100000};
    cfg.d = 20;
    cfg.num_projections = 200;
    cfg.metrics = {Estimator::spdsw, Estimator::lew_exact};
    cfg.repeats = 3;
    cfg.seed = RngState{1111, 0};
    const auto report = run_runtime_benchmark(cfg);
    std::vector<double> ns, sw;
    std::map<Index, double> sw_by_n, lew_by_n;
    for (const auto &row : report.rows) {
        if (row["skipped"].get<bool>()) continue;
        const Index n = row["n"].get<Index>();
        const double t = row["median_seconds"].get<double>();
        if (row["metric"] == "spdsw") {
            ns.push_back(double(n));
            sw.push_back(t);
            sw_by_n[n] = t;
        } else {
            lew_by_n[n] = t;
        }
    }
    const double slope = loglog_slope(ns, sw);
    std::vector<double> ratios;
    for (const auto &[n, t] : lew_by_n) ratios.push_back(t / sw_by_n.at(n));
    bool increasing = ratios.size() >= 2;
    for (std::size_t i = 1; i < ratios.size(); ++i) increasing = increasing && ratios[i] > ratios[i - 1];
    std::string rs;
    for (double r : ratios) rs += fmt(" %.1f", r);
    return {slope <= 1.2 && increasing,
            fmt("spdsw slope %.3f; lew/spdsw ratio over shared prefix:%s", slope, rs.c_str())};
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"metric axioms", metric_axioms},
        {"log-pushforward equivalence", log_pushforward_equivalence},
        {"upper bound by the log-Euclidean Wasserstein distance", upper_bound},
        {"projection complexity", projection_complexity},
        {"sample complexity", sample_complexity},
        {"feature-map isometry", feature_isometry},
        {"distribution regression", distribution_regression},
        {"domain adaptation", domain_adaptation},
        {"gradient correctness", gradients},
        {"horospherical structure", horospherical_structure},
        {"runtime scaling", runtime_scaling},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = int(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = Clock::now();
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("%s #%d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first, out.detail.c_str(),
                    since(start));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
