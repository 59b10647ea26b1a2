#pragma once

#include <string>
#include <vector>

#include "spdsliced/linalg.hpp"
#include "spdsliced/measure.hpp"

namespace spdsliced {

/// SPD points with class labels in [0, K).
struct LabeledSpdDataset {
    EmpiricalSpdMeasure measure;
    std::vector<int> labels;

    LabeledSpdDataset(EmpiricalSpdMeasure m, std::vector<int> l);

    Index size() const { return measure.size(); }
    Index dim() const { return measure.dim(); }
    int num_classes() const;
};

/// Rows are isometric vectorizations of log X_i.
Matrix log_features(const EmpiricalSpdMeasure &measure);

/// L2-regularized multinomial logistic regression on standardized log
/// features, fitted by damped Newton to gradient norm 1e-6.
class LogLinearClassifier {
public:
    Index dim() const { return dim_; }
    int num_classes() const { return num_classes_; }
    const std::vector<Index> &dropped_columns() const { return dropped_; }
    double final_gradient_norm() const { return grad_norm_; }

    /// n × K class probabilities.
    Matrix predict_proba(const EmpiricalSpdMeasure &measure) const;
    std::vector<int> predict(const EmpiricalSpdMeasure &measure) const;

private:
    friend LogLinearClassifier train_log_linear_classifier(const LabeledSpdDataset &, double);

    Matrix standardized(const EmpiricalSpdMeasure &measure) const;

    Index dim_ = 0;
    int num_classes_ = 0;
    std::vector<Index> kept_;
    std::vector<Index> dropped_;
    Vector mean_, scale_;
    Matrix weights_;  // K × (F + 1), last column is the intercept
    double grad_norm_ = 0;
};

/// Constant feature columns are dropped (listed in dropped_columns()); if
/// every column is constant the fit throws SingularFeatures.
LogLinearClassifier train_log_linear_classifier(const LabeledSpdDataset &train, double l2_penalty);

/// Fraction of correctly classified points.
double evaluate_transfer(const LogLinearClassifier &classifier, const LabeledSpdDataset &target);

}  // namespace spdsliced
