#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "spdsliced/classifier.hpp"
#include "spdsliced/linalg.hpp"
#include "spdsliced/measure.hpp"
#include "spdsliced/sampling.hpp"
#include "spdsliced/transport.hpp"

namespace spdsliced {

enum class LossKind { spdsw, logsw, lew_exact, le_sinkhorn };
enum class AdaptationMode { particles, transform };

std::string_view to_string(LossKind kind);
std::string_view to_string(AdaptationMode mode);
LossKind loss_kind_from_string(std::string_view name);
AdaptationMode adaptation_mode_from_string(std::string_view name);

struct LossConfig {
    LossKind kind = LossKind::spdsw;
    double p = 2;
    SinkhornOptions sinkhorn{10.0, 100000, 1e-10, 10};
    Index exact_size_cap = kExactSizeCap;
};

/// Loss between point clouds given as vectorized logs (columns), and its
/// gradient with respect to every source column. Sliced kinds need a basis;
/// transport kinds differentiate through the fixed optimal (or converged
/// entropic) plan.
struct VectorizedLoss {
    double value = 0;
    Matrix gradient;  // D × n
    bool converged = true;
};

VectorizedLoss loss_on_logs(const Matrix &source_vec, const Matrix &target_vec, const ProjectionBasis *basis,
                            const LossConfig &config);

struct ParticleLoss {
    double loss = 0;
    std::vector<SymMatrixd> gradients;  // Frobenius gradients w.r.t. each source log
    bool converged = true;
};

ParticleLoss loss_and_gradient_particles(const std::vector<SymMatrixd> &source_logs, const EmpiricalSpdMeasure &target,
                                         const ProjectionBasis &basis, const LossConfig &config = {});

/// One congruence step C ↦ TᵀCT. Translations use T = exp(S) with S symmetric;
/// rotations use T = exp(Ω) with Ω skew-symmetric.
struct TransformStep {
    enum class Kind { translation, rotation };
    Kind kind;
    Matrix parameter;

    Matrix matrix() const;
};

class TransformChain {
public:
    TransformChain() = default;
    explicit TransformChain(std::vector<TransformStep> steps);

    /// One translation followed by one rotation, both at the identity.
    static TransformChain translation_rotation(Index d);

    const std::vector<TransformStep> &steps() const { return steps_; }
    std::vector<TransformStep> &steps() { return steps_; }

    Matrix apply(const Matrix &c) const;
    EmpiricalSpdMeasure apply(const EmpiricalSpdMeasure &measure) const;

private:
    std::vector<TransformStep> steps_;
};

struct ChainLoss {
    double loss = 0;
    std::vector<Matrix> gradients;  // per step: symmetric (translation) or skew (rotation)
    bool converged = true;
};

ChainLoss loss_and_gradient_transform(const TransformChain &chain, const EmpiricalSpdMeasure &source,
                                      const EmpiricalSpdMeasure &target, const ProjectionBasis *basis,
                                      const LossConfig &config);

struct AdaptationConfig {
    AdaptationMode mode = AdaptationMode::particles;
    LossConfig loss;
    Index num_projections = 500;
    Index epochs = 500;
    double learning_rate = 1000;
    RngState seed{};
    /// Halve the step on any loss increase (up to max_halvings per epoch).
    bool safeguard = true;
    int max_halvings = 20;
};

struct AdaptationTrace {
    std::vector<double> losses;  // losses[0] is the unadapted loss, then one per epoch
    LabeledSpdDataset adapted_source;
    std::optional<TransformChain> chain;
    AdaptationConfig config;
    double final_learning_rate = 0;
    Index rejected_steps = 0;
    bool inner_converged = true;
    double wall_time_seconds = 0;
};

/// Fixed-step gradient descent aligning source onto target. Slicing
/// directions are drawn once from config.seed.
AdaptationTrace run_adaptation(const LabeledSpdDataset &source, const EmpiricalSpdMeasure &target,
                               const AdaptationConfig &config);

}  // namespace spdsliced
