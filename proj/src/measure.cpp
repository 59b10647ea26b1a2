#include "spdsliced/measure.hpp"

#include "spdsliced/parallel.hpp"

namespace spdsliced {

SymMeasure::SymMeasure(std::vector<SymMatrixd> points) : points_(std::move(points)) {
    require(!points_.empty(), ErrorCode::EmptyMeasure, "measure needs at least one point");
    dim_ = points_.front().dim();
    vectorized_.resize(vectorized_size(dim_), size());
    for (Index i = 0; i < size(); ++i) {
        const auto &p = points_[static_cast<std::size_t>(i)];
        require(p.dim() == dim_, ErrorCode::DimensionMismatch, "all points must share a dimension");
        vectorize_into<double>(p.matrix(), vectorized_.col(i));
    }
}

SymMeasure SymMeasure::shifted(const SymMatrixd &c) const {
    std::vector<SymMatrixd> out;
    out.reserve(points_.size());
    for (const auto &p : points_) out.push_back(p + c);
    return SymMeasure(std::move(out));
}

EmpiricalSpdMeasure::EmpiricalSpdMeasure(std::vector<SpdMatrixd> points)
    : points_(std::move(points)), cache_(std::make_shared<Cache>()) {
    require(!points_.empty(), ErrorCode::EmptyMeasure, "measure needs at least one point");
    dim_ = points_.front().dim();
    for (const auto &p : points_) {
        require(p.dim() == dim_, ErrorCode::DimensionMismatch, "all points must share a dimension");
    }
}

const SymMeasure &EmpiricalSpdMeasure::log_measure() const {
    std::call_once(cache_->once, [this] {
        std::vector<SymMatrixd> logs(points_.size());
        parallel_for(points_.size(), [&](std::size_t i) { logs[i] = points_[i].log(); });
        cache_->logs = std::make_unique<SymMeasure>(std::move(logs));
    });
    return *cache_->logs;
}

EmpiricalSpdMeasure EmpiricalSpdMeasure::fresh_copy() const {
    std::vector<SpdMatrixd> copies;
    copies.reserve(points_.size());
    for (const auto &p : points_) copies.push_back(p.fresh_copy());
    return EmpiricalSpdMeasure(std::move(copies));
}

}  // namespace spdsliced
