#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "spdsliced/linalg.hpp"
#include "spdsliced/random.hpp"

namespace spdsliced {

enum class SamplerKind {
    eig_uniform,        // A = P diag(θ) Pᵀ, P Haar, θ uniform on the sphere
    fast_symmetric,     // A = (Z + Zᵀ) / ‖Z + Zᵀ‖_F
    vectorized_sphere,  // uniform on the sphere of isometrically vectorized matrices (logSW)
};

std::string_view to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(std::string_view name);

/// Eigen-form of a λ_S draw, kept so horospherical slicing can sort θ.
struct SpectralDirection {
    Matrix rotation;  // P
    Vector spectrum;  // θ, unit norm, generation order
};

Vector sample_sphere(const RngState &rng, Index d);
Matrix sample_haar_orthogonal(const RngState &rng, Index d);
SpectralDirection sample_spectral_direction(const RngState &rng, Index d);
SymMatrixd sample_lambda_s(const RngState &rng, Index d);
SymMatrixd sample_fast_symmetric(const RngState &rng, Index d);
SymMatrixd sample_vectorized_sphere(const RngState &rng, Index d);

/// (1/dof) Σ z_k z_kᵀ with z_k ~ N(0, scale). Resamples once on a degenerate
/// draw, then fails with DegenerateSample.
SpdMatrixd sample_wishart(const RngState &rng, Index d, Index dof, const SpdMatrixd &scale);
SpdMatrixd sample_wishart(const RngState &rng, Index d, Index dof);

/// L unit-Frobenius slicing directions. Direction ℓ is drawn from stream
/// rng.derive(ℓ), so any subset can be regenerated independently.
class ProjectionBasis {
public:
    ProjectionBasis(Index dim, SamplerKind kind, RngState seed, std::vector<SymMatrixd> directions,
                    std::vector<SpectralDirection> spectral = {});

    Index dim() const { return dim_; }
    Index count() const { return static_cast<Index>(directions_.size()); }
    SamplerKind sampler_kind() const { return kind_; }
    const RngState &seed() const { return seed_; }
    const std::vector<SymMatrixd> &directions() const { return directions_; }
    const SymMatrixd &operator[](Index l) const { return directions_[static_cast<std::size_t>(l)]; }

    /// Eigen-form of each direction; empty unless sampled with eig_uniform.
    const std::vector<SpectralDirection> &spectral() const { return spectral_; }

    /// Directions as columns of a D × L matrix in isometric vectorization.
    const Matrix &vectorized() const { return vectorized_; }

    /// The first `count` directions (a prefix is a valid basis of its own).
    ProjectionBasis prefix(Index count) const;

private:
    Index dim_;
    SamplerKind kind_;
    RngState seed_;
    std::vector<SymMatrixd> directions_;
    std::vector<SpectralDirection> spectral_;
    Matrix vectorized_;
};

ProjectionBasis build_projection_basis(const RngState &rng, Index d, Index count, SamplerKind kind);

/// Stream used for direction ℓ after `attempt` degenerate rejections.
RngState direction_stream(const RngState &rng, Index l, Index attempt = 0);

}  // namespace spdsliced
