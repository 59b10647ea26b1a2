#include "spdsliced/sampling.hpp"

#include <cmath>
#include <string>

#include "spdsliced/parallel.hpp"

namespace spdsliced {

std::string_view to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::eig_uniform: return "eig_uniform";
        case SamplerKind::fast_symmetric: return "fast_symmetric";
        case SamplerKind::vectorized_sphere: return "vectorized_sphere";
    }
    return "unknown";
}

SamplerKind sampler_kind_from_string(std::string_view name) {
    if (name == "eig" || name == "eig_uniform") return SamplerKind::eig_uniform;
    if (name == "fast" || name == "fast_symmetric") return SamplerKind::fast_symmetric;
    if (name == "sphere" || name == "vectorized_sphere") return SamplerKind::vectorized_sphere;
    throw Error(ErrorCode::InvalidArgument, "unknown sampler '" + std::string(name) + "'");
}

namespace {

Matrix gaussian_matrix(RandomStream &stream, Index rows, Index cols) {
    Matrix z(rows, cols);
    // Row-major fill order is part of the determinism contract.
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) z(i, j) = stream.normal();
    return z;
}

void check_dim(Index d) { require(d >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1"); }

}  // namespace

Vector sample_sphere(const RngState &rng, Index d) {
    check_dim(d);
    RandomStream stream(rng);
    Vector v(d);
    double norm = 0;
    // A zero draw has probability zero; loop keeps the contract total.
    do {
        for (Index i = 0; i < d; ++i) v(i) = stream.normal();
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

Matrix sample_haar_orthogonal(const RngState &rng, Index d) {
    check_dim(d);
    RandomStream stream(rng);
    const Matrix z = gaussian_matrix(stream, d, d);
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix &r = qr.matrixQR();
    for (Index j = 0; j < d; ++j) {
        if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
}

SpectralDirection sample_spectral_direction(const RngState &rng, Index d) {
    return {sample_haar_orthogonal(rng.derive(0), d), sample_sphere(rng.derive(1), d)};
}

SymMatrixd sample_lambda_s(const RngState &rng, Index d) {
    const auto s = sample_spectral_direction(rng, d);
    return SymMatrixd(s.rotation * s.spectrum.asDiagonal() * s.rotation.transpose());
}

SymMatrixd sample_fast_symmetric(const RngState &rng, Index d) {
    check_dim(d);
    RandomStream stream(rng);
    Matrix s;
    double norm = 0;
    do {
        const Matrix z = gaussian_matrix(stream, d, d);
        s = z + z.transpose();
        norm = s.norm();
    } while (norm == 0.0);
    return SymMatrixd(s / norm);
}

SymMatrixd sample_vectorized_sphere(const RngState &rng, Index d) {
    check_dim(d);
    return unvectorize<double>(sample_sphere(rng, vectorized_size(d)), d);
}

SpdMatrixd sample_wishart(const RngState &rng, Index d, Index dof, const SpdMatrixd &scale) {
    check_dim(d);
    require(scale.dim() == d, ErrorCode::DimensionMismatch, "Wishart scale dimension");
    require(dof >= d, ErrorCode::InvalidArgument, "Wishart degrees of freedom must be >= d");
    const Eigen::LLT<Matrix> chol(scale.matrix());
    const Matrix factor = chol.matrixL();
    for (int attempt = 0; attempt < 2; ++attempt) {
        RandomStream stream(rng.derive(static_cast<std::uint64_t>(attempt)));
        const Matrix g = gaussian_matrix(stream, dof, d);
        const Matrix z = g * factor.transpose();  // rows are z_k
        const Matrix w = (z.transpose() * z) / static_cast<double>(dof);
        try {
            return SpdMatrixd(w);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        }
    }
    throw Error(ErrorCode::DegenerateSample, "Wishart draw not positive definite after resampling");
}

SpdMatrixd sample_wishart(const RngState &rng, Index d, Index dof) {
    return sample_wishart(rng, d, dof, SpdMatrixd::identity(d));
}

ProjectionBasis::ProjectionBasis(Index dim, SamplerKind kind, RngState seed,
                                 std::vector<SymMatrixd> directions,
                                 std::vector<SpectralDirection> spectral)
    : dim_(dim), kind_(kind), seed_(seed), directions_(std::move(directions)), spectral_(std::move(spectral)) {
    require(!directions_.empty(), ErrorCode::InvalidArgument, "projection basis needs L >= 1");
    require(spectral_.empty() || spectral_.size() == directions_.size(), ErrorCode::SizeMismatch,
            "spectral factors must match directions");
    vectorized_.resize(vectorized_size(dim_), count());
    for (Index l = 0; l < count(); ++l) {
        const auto &a = directions_[static_cast<std::size_t>(l)];
        require(a.dim() == dim_, ErrorCode::DimensionMismatch, "direction dimension");
        require(std::abs(a.norm() - 1.0) <= 1e-10, ErrorCode::NotUnitNorm, "direction is not unit norm");
        vectorize_into<double>(a.matrix(), vectorized_.col(l));
    }
}

ProjectionBasis ProjectionBasis::prefix(Index n) const {
    require(n >= 1 && n <= count(), ErrorCode::InvalidArgument, "basis prefix length");
    std::vector<SymMatrixd> dirs(directions_.begin(), directions_.begin() + n);
    std::vector<SpectralDirection> spec;
    if (!spectral_.empty()) spec.assign(spectral_.begin(), spectral_.begin() + n);
    return ProjectionBasis(dim_, kind_, seed_, std::move(dirs), std::move(spec));
}

RngState direction_stream(const RngState &rng, Index l, Index attempt) {
    const RngState base = rng.derive(static_cast<std::uint64_t>(l));
    return attempt == 0 ? base : base.derive(0x5245534DULL + static_cast<std::uint64_t>(attempt));
}

ProjectionBasis build_projection_basis(const RngState &rng, Index d, Index count, SamplerKind kind) {
    check_dim(d);
    require(count >= 1, ErrorCode::InvalidArgument, "number of projections must be >= 1");
    const auto n = static_cast<std::size_t>(count);
    std::vector<SymMatrixd> directions(n);
    std::vector<SpectralDirection> spectral;
    if (kind == SamplerKind::eig_uniform) spectral.resize(n);
    parallel_for(n, [&](std::size_t l) {
        const RngState s = direction_stream(rng, static_cast<Index>(l));
        switch (kind) {
            case SamplerKind::eig_uniform: {
                spectral[l] = sample_spectral_direction(s, d);
                const auto &f = spectral[l];
                directions[l] = SymMatrixd(f.rotation * f.spectrum.asDiagonal() * f.rotation.transpose());
                break;
            }
            case SamplerKind::fast_symmetric: directions[l] = sample_fast_symmetric(s, d); break;
            case SamplerKind::vectorized_sphere: directions[l] = sample_vectorized_sphere(s, d); break;
        }
    });
    return ProjectionBasis(d, kind, rng, std::move(directions), std::move(spectral));
}

}  // namespace spdsliced
