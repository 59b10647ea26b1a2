#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spdsliced/adaptation.hpp"
#include "spdsliced/classifier.hpp"
#include "spdsliced/experiments.hpp"

using namespace spdsliced;

namespace {

EmpiricalSpdMeasure random_measure(RandomStream &s, Index n, Index d, double spread = 0.6) {
    std::vector<SpdMatrixd> pts;
    for (Index i = 0; i < n; ++i) pts.emplace_back(oracle::random_spd(s, d, spread));
    return EmpiricalSpdMeasure(std::move(pts));
}

LabeledSpdDataset two_classes(std::uint64_t seed, Index per_class, Index d) {
    return wishart_classes(RngState{seed, 0}, d, per_class, d + 100, Matrix::Identity(d, d), 2);
}

Matrix diagonal(const Vector &v) { return Matrix(v.asDiagonal()); }

}  // namespace

TEST_CASE("name round trips") {
    for (auto k : {LossKind::spdsw, LossKind::logsw, LossKind::lew_exact, LossKind::le_sinkhorn})
        CHECK(loss_kind_from_string(to_string(k)) == k);
    for (auto m : {AdaptationMode::particles, AdaptationMode::transform})
        CHECK(adaptation_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(loss_kind_from_string("nope"), Error);
}

TEST_CASE("loss and gradient vanish when source equals target") {
    RandomStream s(RngState{1, 0});
    const auto mu = random_measure(s, 12, 3);
    const auto basis = build_projection_basis(RngState{2, 0}, 3, 40, SamplerKind::eig_uniform);
    std::vector<SymMatrixd> logs;
    for (const auto &p : mu.points()) logs.push_back(p.log());
    for (auto kind : {LossKind::spdsw, LossKind::lew_exact}) {
        LossConfig cfg;
        cfg.kind = kind;
        const auto r = loss_and_gradient_particles(logs, mu, basis, cfg);
        CHECK(r.loss <= 1e-24);
        for (const auto &g : r.gradients) CHECK(g.matrix().norm() <= 1e-12);
    }
}

TEST_CASE("vectorized loss gradients match finite differences") {
    RandomStream s(RngState{3, 0});
    const Index D = 6, n = 7, m = 9;
    Matrix x(D, n), y(D, m);
    for (Index i = 0; i < D; ++i) {
        for (Index j = 0; j < n; ++j) x(i, j) = s.normal();
        for (Index j = 0; j < m; ++j) y(i, j) = s.normal();
    }
    const auto basis = build_projection_basis(RngState{4, 0}, 3, 25, SamplerKind::eig_uniform);
    const auto sphere = build_projection_basis(RngState{4, 0}, 3, 25, SamplerKind::vectorized_sphere);
    for (auto kind : {LossKind::spdsw, LossKind::logsw, LossKind::lew_exact, LossKind::le_sinkhorn}) {
        LossConfig cfg;
        cfg.kind = kind;
        cfg.sinkhorn.epsilon = 0.5;
        cfg.sinkhorn.threshold = 1e-13;
        const ProjectionBasis *b = kind == LossKind::logsw ? &sphere : &basis;
        const auto r = loss_on_logs(x, y, b, cfg);
        REQUIRE(r.converged);
        REQUIRE(r.gradient.rows() == D);
        REQUIRE(r.gradient.cols() == n);
        Matrix dir(D, n);
        for (Index i = 0; i < D; ++i)
            for (Index j = 0; j < n; ++j) dir(i, j) = s.normal();
        const double h = 1e-6;
        const double fd = (loss_on_logs(x + h * dir, y, b, cfg).value - loss_on_logs(x - h * dir, y, b, cfg).value) / (2 * h);
        const double an = (r.gradient.array() * dir.array()).sum();
        CHECK_MESSAGE(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)), "loss " << to_string(kind));
    }
}

TEST_CASE("a small particle step decreases the sliced loss") {
    RandomStream s(RngState{5, 0});
    const auto target = random_measure(s, 20, 3);
    const auto source = random_measure(s, 20, 3, 1.0);
    const auto basis = build_projection_basis(RngState{6, 0}, 3, 50, SamplerKind::eig_uniform);
    std::vector<SymMatrixd> logs;
    for (const auto &p : source.points()) logs.push_back(p.log());
    const auto r = loss_and_gradient_particles(logs, target, basis);
    std::vector<SymMatrixd> moved;
    for (std::size_t i = 0; i < logs.size(); ++i) moved.emplace_back(Matrix(logs[i].matrix() - 0.1 * r.gradients[i].matrix()));
    CHECK(loss_and_gradient_particles(moved, target, basis).loss < r.loss);
}

TEST_CASE("transform chains") {
    RandomStream s(RngState{7, 0});
    const auto mu = random_measure(s, 8, 3);
    const auto id = TransformChain::translation_rotation(3);
    for (Index i = 0; i < mu.size(); ++i) CHECK((id.apply(mu[i].matrix()) - mu[i].matrix()).norm() == 0.0);

    // Commuting translation: log(e^S C e^S) = log C + 2S for diagonal S, C.
    Vector sv(3), cv(3);
    sv << 0.3, -0.2, 0.5;
    cv << 2.0, 0.5, 1.5;
    const TransformChain shift({{TransformStep::Kind::translation, diagonal(sv)}});
    const Matrix out = shift.apply(diagonal(cv));
    CHECK((oracle::logm(out) - (oracle::logm(diagonal(cv)) + 2 * diagonal(sv))).norm() <= 1e-13);

    // Rotations preserve the spectrum.
    const Matrix omega = oracle::random_skew(s, 3);
    const TransformChain rot({{TransformStep::Kind::rotation, omega}});
    const Vector before = Eigen::SelfAdjointEigenSolver<Matrix>(mu[0].matrix()).eigenvalues();
    const Vector after = Eigen::SelfAdjointEigenSolver<Matrix>(rot.apply(mu[0].matrix())).eigenvalues();
    CHECK((before - after).norm() <= 1e-12 * before.norm());

    CHECK_THROWS_AS(TransformChain({{TransformStep::Kind::rotation, Matrix::Identity(3, 3)}}), Error);
    CHECK_THROWS_AS(TransformChain({{TransformStep::Kind::translation, omega}}), Error);
}

TEST_CASE("transform chain gradients match finite differences") {
    RandomStream s(RngState{8, 0});
    const auto src = random_measure(s, 10, 3), tgt = random_measure(s, 12, 3);
    const auto basis = build_projection_basis(RngState{9, 0}, 3, 30, SamplerKind::eig_uniform);
    TransformChain chain({{TransformStep::Kind::translation, 0.2 * oracle::random_symmetric(s, 3)},
                          {TransformStep::Kind::rotation, 0.5 * oracle::random_skew(s, 3)},
                          {TransformStep::Kind::translation, 0.1 * oracle::random_symmetric(s, 3)}});
    for (auto kind : {LossKind::spdsw, LossKind::lew_exact}) {
        LossConfig cfg;
        cfg.kind = kind;
        const auto r = loss_and_gradient_transform(chain, src, tgt, &basis, cfg);
        for (std::size_t k = 0; k < chain.steps().size(); ++k) {
            const bool sym = chain.steps()[k].kind == TransformStep::Kind::translation;
            const Matrix dir = sym ? oracle::random_symmetric(s, 3) : oracle::random_skew(s, 3);
            const double h = 1e-6;
            TransformChain plus = chain, minus = chain;
            plus.steps()[k].parameter += h * dir;
            minus.steps()[k].parameter -= h * dir;
            const double fd = (loss_and_gradient_transform(plus, src, tgt, &basis, cfg).loss -
                               loss_and_gradient_transform(minus, src, tgt, &basis, cfg).loss) /
                              (2 * h);
            const double an = (r.gradients[k].array() * dir.array()).sum();
            CHECK_MESSAGE(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)), "step " << k);
            if (sym) CHECK((r.gradients[k] - r.gradients[k].transpose()).norm() <= 1e-12 * (1 + r.gradients[k].norm()));
            else CHECK((r.gradients[k] + r.gradients[k].transpose()).norm() <= 1e-12 * (1 + r.gradients[k].norm()));
        }
    }
}

TEST_CASE("run_adaptation") {
    const auto source = two_classes(10, 30, 3);
    const auto target = apply_domain_shift(source.measure, RngState{11, 0}, DomainShift{0.4, 0.5});
    AdaptationConfig cfg;
    cfg.num_projections = 50;
    cfg.epochs = 0;
    cfg.seed = RngState{12, 0};

    SUBCASE("zero epochs leave the source unchanged") {
        for (auto mode : {AdaptationMode::particles, AdaptationMode::transform}) {
            cfg.mode = mode;
            const auto t = run_adaptation(source, target, cfg);
            REQUIRE(t.losses.size() == 1);
            for (Index i = 0; i < source.size(); ++i)
                CHECK((t.adapted_source.measure[i].matrix() - source.measure[i].matrix()).norm() <=
                      1e-12 * source.measure[i].matrix().norm());
        }
    }
    SUBCASE("traces are deterministic, safeguarded losses never increase") {
        cfg.epochs = 30;
        cfg.learning_rate = 50;
        for (auto mode : {AdaptationMode::particles, AdaptationMode::transform}) {
            cfg.mode = mode;
            const auto a = run_adaptation(source, target, cfg);
            const auto b = run_adaptation(source, target, cfg);
            CHECK(a.losses == b.losses);
            REQUIRE(a.losses.size() == 31);
            for (std::size_t e = 1; e < a.losses.size(); ++e) CHECK(a.losses[e] <= a.losses[e - 1]);
            CHECK(a.losses.back() < a.losses.front());
            CHECK(a.adapted_source.labels == source.labels);
            CHECK(a.adapted_source.size() == source.size());
            CHECK(a.adapted_source.dim() == source.dim());
            CHECK(a.chain.has_value() == (mode == AdaptationMode::transform));
            CHECK(a.final_learning_rate <= cfg.learning_rate);
        }
    }
    SUBCASE("transport losses") {
        cfg.epochs = 5;
        cfg.learning_rate = 1;
        for (auto kind : {LossKind::lew_exact, LossKind::le_sinkhorn}) {
            cfg.loss.kind = kind;
            const auto t = run_adaptation(source, target, cfg);
            CHECK(t.losses.back() <= t.losses.front());
            CHECK(t.inner_converged);
        }
    }
}

TEST_CASE("log-linear classifier") {
    const auto data = two_classes(20, 40, 3);
    SUBCASE("well separated classes are learned") {
        const auto clf = train_log_linear_classifier(data, 1e-3);
        CHECK(evaluate_transfer(clf, data) >= 0.95);
        const Matrix proba = clf.predict_proba(data.measure);
        CHECK((proba.rowwise().sum() - Vector::Ones(proba.rows())).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(clf.final_gradient_norm() <= 1e-6);
    }
    SUBCASE("relabeling permutes predictions") {
        std::vector<int> flipped;
        for (int y : data.labels) flipped.push_back(1 - y);
        const auto a = train_log_linear_classifier(data, 1e-2).predict(data.measure);
        const auto b = train_log_linear_classifier(LabeledSpdDataset(data.measure, flipped), 1e-2).predict(data.measure);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == 1 - b[i]);
    }
    SUBCASE("random labels stay near chance") {
        const auto big = two_classes(21, 200, 3);
        RandomStream s(RngState{22, 0});
        std::vector<int> random_labels;
        for (Index i = 0; i < big.size(); ++i) random_labels.push_back(int(s.next_u64() % 3));
        const auto clf = train_log_linear_classifier(LabeledSpdDataset(big.measure, random_labels), 1.0);
        std::vector<int> fresh;
        for (Index i = 0; i < big.size(); ++i) fresh.push_back(int(s.next_u64() % 3));
        CHECK(std::abs(evaluate_transfer(clf, LabeledSpdDataset(big.measure, fresh)) - 1.0 / 3.0) <= 0.08);
    }
    SUBCASE("degenerate inputs") {
        std::vector<SpdMatrixd> same(6, SpdMatrixd::identity(2));
        const LabeledSpdDataset flat(EmpiricalSpdMeasure(same), {0, 1, 0, 1, 0, 1});
        try {
            (void)train_log_linear_classifier(flat, 1e-2);
            FAIL("expected SingularFeatures");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::SingularFeatures);
        }
        const auto clf = train_log_linear_classifier(data, 1e-2);
        const auto other = two_classes(23, 5, 2);
        CHECK_THROWS_AS(evaluate_transfer(clf, other), Error);
    }
}
