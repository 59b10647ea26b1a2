#include "spdsliced/classifier.hpp"

#include <algorithm>
#include <cmath>

namespace spdsliced {

LabeledSpdDataset::LabeledSpdDataset(EmpiricalSpdMeasure m, std::vector<int> l)
    : measure(std::move(m)), labels(std::move(l)) {
    require(static_cast<Index>(labels.size()) == measure.size(), ErrorCode::SizeMismatch,
            "labels must match the number of points");
    for (int y : labels) require(y >= 0, ErrorCode::InvalidData, "labels must be nonnegative");
}

int LabeledSpdDataset::num_classes() const {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

Matrix log_features(const EmpiricalSpdMeasure &measure) {
    return measure.log_measure().vectorized().transpose();
}

namespace {

constexpr double kInterceptPenalty = 1e-8;

Matrix softmax_rows(const Matrix &scores) {
    Matrix p(scores.rows(), scores.cols());
    for (Index i = 0; i < scores.rows(); ++i) {
        const double top = scores.row(i).maxCoeff();
        p.row(i) = (scores.row(i).array() - top).exp();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

struct Objective {
    double value;
    Vector gradient;
};

}  // namespace

Matrix LogLinearClassifier::standardized(const EmpiricalSpdMeasure &measure) const {
    require(measure.dim() == dim_, ErrorCode::DimensionMismatch, "classifier and data dimensions differ");
    const Matrix raw = log_features(measure);
    Matrix x(raw.rows(), static_cast<Index>(kept_.size()) + 1);
    for (std::size_t c = 0; c < kept_.size(); ++c) {
        const auto col = static_cast<Index>(c);
        x.col(col) = (raw.col(kept_[c]).array() - mean_(col)) / scale_(col);
    }
    x.col(x.cols() - 1).setOnes();
    return x;
}

Matrix LogLinearClassifier::predict_proba(const EmpiricalSpdMeasure &measure) const {
    return softmax_rows(standardized(measure) * weights_.transpose());
}

std::vector<int> LogLinearClassifier::predict(const EmpiricalSpdMeasure &measure) const {
    const Matrix p = predict_proba(measure);
    std::vector<int> out(static_cast<std::size_t>(p.rows()));
    for (Index i = 0; i < p.rows(); ++i) {
        Index best;
        p.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

LogLinearClassifier train_log_linear_classifier(const LabeledSpdDataset &train, double l2_penalty) {
    require(l2_penalty > 0, ErrorCode::InvalidArgument, "l2 penalty must be positive");
    const int k = train.num_classes();
    require(k >= 2, ErrorCode::InvalidArgument, "classifier needs at least two classes");
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int y : train.labels) ++counts[static_cast<std::size_t>(y)];
    for (Index c : counts) require(c > 0, ErrorCode::InvalidData, "every class needs at least one point");

    LogLinearClassifier clf;
    clf.dim_ = train.dim();
    clf.num_classes_ = k;
    const Matrix raw = log_features(train.measure);
    const Index n = raw.rows();
    std::vector<double> means, scales;
    for (Index c = 0; c < raw.cols(); ++c) {
        const double mean = raw.col(c).mean();
        const double sd = std::sqrt((raw.col(c).array() - mean).square().sum() / double(n));
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
            clf.dropped_.push_back(c);
            continue;
        }
        clf.kept_.push_back(c);
        means.push_back(mean);
        scales.push_back(sd);
    }
    if (clf.kept_.empty()) throw Error(ErrorCode::SingularFeatures, "every feature column is constant");
    clf.mean_ = Eigen::Map<const Vector>(means.data(), Index(means.size()));
    clf.scale_ = Eigen::Map<const Vector>(scales.data(), Index(scales.size()));
    const Matrix x = clf.standardized(train.measure);
    const Index f = x.cols();  // includes intercept
    const Index dim = k * f;

    Matrix onehot = Matrix::Zero(n, k);
    for (Index i = 0; i < n; ++i) onehot(i, train.labels[static_cast<std::size_t>(i)]) = 1.0;
    Vector penalty = Vector::Constant(dim, l2_penalty);
    for (int c = 0; c < k; ++c) penalty(c * f + f - 1) = kInterceptPenalty;

    auto unpack = [&](const Vector &theta) {
        Matrix w(k, f);
        for (int c = 0; c < k; ++c) w.row(c) = theta.segment(c * f, f).transpose();
        return w;
    };
    auto objective = [&](const Vector &theta) {
        const Matrix scores = x * unpack(theta).transpose();
        double value = 0;
        for (Index i = 0; i < n; ++i) {
            const double top = scores.row(i).maxCoeff();
            const double lse = top + std::log((scores.row(i).array() - top).exp().sum());
            value += lse - scores.row(i).dot(onehot.row(i));
        }
        value /= double(n);
        value += 0.5 * (penalty.array() * theta.array().square()).sum();
        const Matrix resid = softmax_rows(scores) - onehot;
        const Matrix g = resid.transpose() * x / double(n);  // K × F
        Vector grad(dim);
        for (int c = 0; c < k; ++c) grad.segment(c * f, f) = g.row(c).transpose();
        grad += penalty.cwiseProduct(theta);
        return Objective{value, grad};
    };

    Vector theta = Vector::Zero(dim);
    Objective cur = objective(theta);
    for (int iter = 0; iter < 200 && cur.gradient.norm() > 1e-6; ++iter) {
        const Matrix p = softmax_rows(x * unpack(theta).transpose());
        Matrix hess = Matrix::Zero(dim, dim);
        for (int a = 0; a < k; ++a) {
            for (int b = a; b < k; ++b) {
                Vector w = -p.col(a).cwiseProduct(p.col(b));
                if (a == b) w += p.col(a);
                const Matrix block = x.transpose() * w.asDiagonal() * x / double(n);
                hess.block(a * f, b * f, f, f) = block;
                if (a != b) hess.block(b * f, a * f, f, f) = block.transpose();
            }
        }
        hess.diagonal() += penalty;
        const Vector step = hess.ldlt().solve(-cur.gradient);
        double t = 1.0;
        Objective trial = objective(theta + step);
        while (trial.value > cur.value + 1e-4 * t * cur.gradient.dot(step) && t > 1e-10) {
            t *= 0.5;
            trial = objective(theta + t * step);
        }
        theta += t * step;
        cur = std::move(trial);
    }
    clf.weights_ = unpack(theta);
    clf.grad_norm_ = cur.gradient.norm();
    return clf;
}

double evaluate_transfer(const LogLinearClassifier &classifier, const LabeledSpdDataset &target) {
    require(classifier.dim() == target.dim(), ErrorCode::DimensionMismatch, "classifier and target dimensions differ");
    const auto pred = classifier.predict(target.measure);
    Index correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == target.labels[i];
    return double(correct) / double(pred.size());
}

}  // namespace spdsliced
