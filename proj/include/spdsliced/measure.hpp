#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "spdsliced/linalg.hpp"

namespace spdsliced {

/// Uniformly weighted point cloud of symmetric matrices (a log-pushforward, or
/// any tangent-space data).
class SymMeasure {
public:
    explicit SymMeasure(std::vector<SymMatrixd> points);

    Index dim() const { return dim_; }
    Index size() const { return static_cast<Index>(points_.size()); }
    const std::vector<SymMatrixd> &points() const { return points_; }

    /// D × n, column i = isometric vectorization of point i.
    const Matrix &vectorized() const { return vectorized_; }

    /// Adds C to every point.
    SymMeasure shifted(const SymMatrixd &c) const;

private:
    Index dim_;
    std::vector<SymMatrixd> points_;
    Matrix vectorized_;
};

/// μ̂_n = (1/n) Σ δ_{X_i} over SPD matrices. Logarithms are computed once per
/// measure and shared between copies.
class EmpiricalSpdMeasure {
public:
    explicit EmpiricalSpdMeasure(std::vector<SpdMatrixd> points);

    Index dim() const { return dim_; }
    Index size() const { return static_cast<Index>(points_.size()); }
    const std::vector<SpdMatrixd> &points() const { return points_; }
    const SpdMatrixd &operator[](Index i) const { return points_[static_cast<std::size_t>(i)]; }

    /// The push-forward log_# μ̂, computed on first use (in parallel over points).
    const SymMeasure &log_measure() const;

    /// Same points with every per-matrix cache dropped; used for timing runs.
    EmpiricalSpdMeasure fresh_copy() const;

private:
    struct Cache {
        std::once_flag once;
        std::unique_ptr<SymMeasure> logs;
    };

    Index dim_;
    std::vector<SpdMatrixd> points_;
    std::shared_ptr<Cache> cache_;
};

}  // namespace spdsliced
