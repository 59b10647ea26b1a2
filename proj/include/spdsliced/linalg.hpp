#pragma once

// Symmetric and SPD matrix primitives. Every matrix function here goes through
// one symmetric eigendecomposition (Eigen's tridiagonal QL solver).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "spdsliced/error.hpp"

namespace spdsliced {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Relative threshold on the smallest eigenvalue, scaled by the largest magnitude.
inline constexpr double kPdRelativeTolerance = 1e-12;
/// Relative eigenvalue gap under which divided differences use the derivative limit.
inline constexpr double kDividedDifferenceGap = 1e-10;

template <typename Scalar>
struct EigenPair {
    VectorX<Scalar> eigenvalues;   // ascending
    MatrixX<Scalar> eigenvectors;  // columns, orthonormal
};

template <typename Scalar, typename Derived>
EigenPair<Scalar> eigh(const Eigen::MatrixBase<Derived> &symmetric) {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(symmetric.template cast<Scalar>().eval());
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::InvalidArgument, "symmetric eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Q f(Λ) Qᵀ for a scalar function f applied to the spectrum.
template <typename Scalar, typename F>
MatrixX<Scalar> apply_spectral(const EigenPair<Scalar> &eig, F &&f) {
    const VectorX<Scalar> values = eig.eigenvalues.unaryExpr(f);
    MatrixX<Scalar> out = eig.eigenvectors * values.asDiagonal() * eig.eigenvectors.transpose();
    return Scalar(0.5) * (out + out.transpose());
}

template <typename Scalar>
bool is_positive_definite_spectrum(const VectorX<Scalar> &ascending) {
    if (ascending.size() == 0) return false;
    const Scalar largest = ascending.cwiseAbs().maxCoeff();
    return ascending(0) > Scalar(kPdRelativeTolerance) * largest;
}

/// A symmetric matrix: tangent vectors, matrix logarithms and slicing directions.
/// Construction symmetrizes its input as (M + Mᵀ) / 2.
template <typename Scalar>
class SymMatrix {
public:
    using Matrix = MatrixX<Scalar>;

    SymMatrix() = default;

    template <typename Derived>
    explicit SymMatrix(const Eigen::MatrixBase<Derived> &m) {
        require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, "symmetric matrix must be square");
        require(m.rows() > 0, ErrorCode::InvalidArgument, "matrix dimension must be positive");
        const Matrix tmp = m.template cast<Scalar>();
        matrix_ = Scalar(0.5) * (tmp + tmp.transpose());
        require(matrix_.allFinite(), ErrorCode::InvalidData, "symmetric matrix has non-finite entries");
    }

    static SymMatrix zero(Index d) { return SymMatrix(Matrix::Zero(d, d)); }
    static SymMatrix identity(Index d) { return SymMatrix(Matrix::Identity(d, d)); }

    Index dim() const { return matrix_.rows(); }
    const Matrix &matrix() const { return matrix_; }
    Scalar operator()(Index i, Index j) const { return matrix_(i, j); }
    Scalar norm() const { return matrix_.norm(); }

    friend SymMatrix operator+(const SymMatrix &a, const SymMatrix &b) {
        require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "symmetric sum");
        return SymMatrix(a.matrix_ + b.matrix_);
    }
    friend SymMatrix operator-(const SymMatrix &a, const SymMatrix &b) {
        require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "symmetric difference");
        return SymMatrix(a.matrix_ - b.matrix_);
    }
    friend SymMatrix operator*(Scalar s, const SymMatrix &a) { return SymMatrix(s * a.matrix_); }

private:
    Matrix matrix_;
};

/// Frobenius inner product ⟨A, B⟩_F = Tr(AᵀB).
template <typename Scalar>
Scalar inner(const SymMatrix<Scalar> &a, const SymMatrix<Scalar> &b) {
    require(a.dim() == b.dim(), ErrorCode::DimensionMismatch, "inner product");
    return a.matrix().cwiseProduct(b.matrix()).sum();
}

template <typename Scalar>
class SpdMatrix;

template <typename Scalar>
SpdMatrix<Scalar> sym_exp(const SymMatrix<Scalar> &s);

/// A symmetric positive definite matrix. The spectral decomposition is computed
/// once at construction (it is the positive-definiteness check); the logarithm
/// is filled lazily and shared between copies.
template <typename Scalar>
class SpdMatrix {
public:
    using Matrix = MatrixX<Scalar>;

    template <typename Derived>
    explicit SpdMatrix(const Eigen::MatrixBase<Derived> &m) : sym_(m) {
        auto eig = eigh<Scalar>(sym_.matrix());
        if (!is_positive_definite_spectrum(eig.eigenvalues)) {
            throw Error(ErrorCode::NotPositiveDefinite,
                        "smallest eigenvalue " + std::to_string(double(eig.eigenvalues(0))) +
                            " below relative tolerance");
        }
        cache_ = std::make_shared<Cache>(std::move(eig));
    }

    static SpdMatrix identity(Index d) { return SpdMatrix(Matrix::Identity(d, d)); }

    Index dim() const { return sym_.dim(); }
    const Matrix &matrix() const { return sym_.matrix(); }
    const SymMatrix<Scalar> &symmetric() const { return sym_; }
    Scalar operator()(Index i, Index j) const { return sym_(i, j); }
    const EigenPair<Scalar> &eigen() const { return cache_->eig; }

    /// log M, computed on first call.
    const SymMatrix<Scalar> &log() const {
        std::call_once(cache_->log_once, [this] {
            cache_->log = SymMatrix<Scalar>(
                apply_spectral(cache_->eig, [](Scalar v) { return std::log(v); }));
        });
        return *cache_->log;
    }

    /// Drops the shared cache: the copy recomputes its spectrum and logarithm.
    SpdMatrix fresh_copy() const { return SpdMatrix(sym_.matrix()); }

private:
    struct Cache {
        explicit Cache(EigenPair<Scalar> e) : eig(std::move(e)) {}
        EigenPair<Scalar> eig;
        std::once_flag log_once;
        std::optional<SymMatrix<Scalar>> log;
    };

    SpdMatrix(SymMatrix<Scalar> sym, EigenPair<Scalar> eig, std::optional<SymMatrix<Scalar>> log)
        : sym_(std::move(sym)), cache_(std::make_shared<Cache>(std::move(eig))) {
        if (log) {
            std::call_once(cache_->log_once, [&] { cache_->log = std::move(log); });
        }
    }

    friend SpdMatrix<Scalar> sym_exp<Scalar>(const SymMatrix<Scalar> &s);

    SymMatrix<Scalar> sym_;
    std::shared_ptr<Cache> cache_;
};

template <typename Scalar>
const SymMatrix<Scalar> &sym_log(const SpdMatrix<Scalar> &m) {
    return m.log();
}

/// Largest eigenvalue accepted by sym_exp.
template <typename Scalar>
Scalar exp_cap() {
    return std::log(std::numeric_limits<Scalar>::max()) - Scalar(1);
}

template <typename Scalar>
SpdMatrix<Scalar> sym_exp(const SymMatrix<Scalar> &s) {
    auto eig = eigh<Scalar>(s.matrix());
    if (eig.eigenvalues(eig.eigenvalues.size() - 1) > exp_cap<Scalar>()) {
        throw Error(ErrorCode::Overflow, "eigenvalue exceeds exponential cap");
    }
    EigenPair<Scalar> out{eig.eigenvalues.unaryExpr([](Scalar v) { return std::exp(v); }),
                          eig.eigenvectors};
    if (!is_positive_definite_spectrum(out.eigenvalues)) {
        throw Error(ErrorCode::NotPositiveDefinite, "exponential spectrum spread exceeds tolerance");
    }
    SymMatrix<Scalar> m(apply_spectral(eig, [](Scalar v) { return std::exp(v); }));
    return SpdMatrix<Scalar>(std::move(m), std::move(out), s);
}

template <typename Scalar>
Scalar dist_log_euclidean(const SpdMatrix<Scalar> &x, const SpdMatrix<Scalar> &y) {
    require(x.dim() == y.dim(), ErrorCode::DimensionMismatch, "log-Euclidean distance");
    return (x.log().matrix() - y.log().matrix()).norm();
}

/// ‖log(X^{-1/2} Y X^{-1/2})‖_F.
template <typename Scalar>
Scalar dist_affine_invariant(const SpdMatrix<Scalar> &x, const SpdMatrix<Scalar> &y) {
    require(x.dim() == y.dim(), ErrorCode::DimensionMismatch, "affine-invariant distance");
    const MatrixX<Scalar> inv_sqrt = apply_spectral(x.eigen(), [](Scalar v) { return Scalar(1) / std::sqrt(v); });
    const MatrixX<Scalar> c = inv_sqrt * y.matrix() * inv_sqrt;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(Scalar(0.5) * (c + c.transpose()), Eigen::EigenvaluesOnly);
    const VectorX<Scalar> &values = solver.eigenvalues();
    require(values(0) > Scalar(0), ErrorCode::NotPositiveDefinite, "whitened matrix lost definiteness");
    return std::sqrt(values.unaryExpr([](Scalar v) { return std::log(v); }).squaredNorm());
}

namespace detail {

// First divided differences f[λi, λj] for f = log and f = exp, with the
// derivative limit on near-equal pairs.
template <typename Scalar>
MatrixX<Scalar> log_divided_differences(const VectorX<Scalar> &values) {
    const Index d = values.size();
    MatrixX<Scalar> g(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            const Scalar a = values(i), b = values(j);
            const Scalar scale = std::max(std::abs(a), std::abs(b));
            if (i == j || std::abs(a - b) < Scalar(kDividedDifferenceGap) * scale) {
                g(i, j) = Scalar(1) / a;
            } else {
                g(i, j) = std::log1p((a - b) / b) / (a - b);
            }
        }
    }
    return g;
}

template <typename Scalar>
MatrixX<Scalar> exp_divided_differences(const VectorX<Scalar> &values) {
    const Index d = values.size();
    MatrixX<Scalar> g(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            const Scalar a = values(i), b = values(j);
            const Scalar scale = std::max({std::abs(a), std::abs(b), Scalar(1)});
            if (i == j || std::abs(a - b) < Scalar(kDividedDifferenceGap) * scale) {
                g(i, j) = std::exp(a);
            } else {
                g(i, j) = std::exp(b) * std::expm1(a - b) / (a - b);
            }
        }
    }
    return g;
}

template <typename Scalar>
SymMatrix<Scalar> daleckii_krein(const EigenPair<Scalar> &eig, const MatrixX<Scalar> &divided,
                                 const SymMatrix<Scalar> &h) {
    const MatrixX<Scalar> &q = eig.eigenvectors;
    const MatrixX<Scalar> inner_h = q.transpose() * h.matrix() * q;
    return SymMatrix<Scalar>(q * divided.cwiseProduct(inner_h) * q.transpose());
}

}  // namespace detail

/// Fréchet derivative of the matrix logarithm at M in direction H. Self-adjoint
/// for the Frobenius inner product, so it also pulls gradients back through log.
template <typename Scalar>
SymMatrix<Scalar> log_frechet_derivative(const SpdMatrix<Scalar> &m, const SymMatrix<Scalar> &h) {
    require(m.dim() == h.dim(), ErrorCode::DimensionMismatch, "log Fréchet derivative");
    const auto &eig = m.eigen();
    return detail::daleckii_krein(eig, detail::log_divided_differences(eig.eigenvalues), h);
}

/// Fréchet derivative of the matrix exponential at symmetric S in direction H.
template <typename Scalar>
SymMatrix<Scalar> exp_frechet_derivative(const SymMatrix<Scalar> &s, const SymMatrix<Scalar> &h) {
    require(s.dim() == h.dim(), ErrorCode::DimensionMismatch, "exp Fréchet derivative");
    const auto eig = eigh<Scalar>(s.matrix());
    return detail::daleckii_krein(eig, detail::exp_divided_differences(eig.eigenvalues), h);
}

template <typename Scalar>
struct UduFactors {
    MatrixX<Scalar> unit_upper;
    VectorX<Scalar> diagonal;
};

/// M = U D Uᵀ with U unit upper triangular and D positive diagonal,
/// eliminating from the last row/column upwards.
template <typename Scalar, typename Derived>
UduFactors<Scalar> udu_decompose(const Eigen::MatrixBase<Derived> &m) {
    const Index d = m.rows();
    require(d == m.cols() && d > 0, ErrorCode::DimensionMismatch, "UDU needs a square matrix");
    MatrixX<Scalar> u = MatrixX<Scalar>::Identity(d, d);
    VectorX<Scalar> diag(d);
    for (Index j = d - 1; j >= 0; --j) {
        Scalar pivot = m(j, j);
        for (Index k = j + 1; k < d; ++k) pivot -= u(j, k) * u(j, k) * diag(k);
        if (!(pivot > Scalar(0))) {
            throw Error(ErrorCode::NotPositiveDefinite, "non-positive pivot in UDU elimination");
        }
        diag(j) = pivot;
        for (Index i = 0; i < j; ++i) {
            Scalar v = m(i, j);
            for (Index k = j + 1; k < d; ++k) v -= u(i, k) * u(j, k) * diag(k);
            u(i, j) = v / pivot;
        }
    }
    return {std::move(u), std::move(diag)};
}

template <typename Scalar>
UduFactors<Scalar> udu_decompose(const SpdMatrix<Scalar> &m) {
    return udu_decompose<Scalar>(m.matrix());
}

/// Isometric half-vectorization: diagonal entries as-is, upper off-diagonal
/// entries scaled by √2, so ⟨vec(A), vec(B)⟩ = ⟨A, B⟩_F.
inline Index vectorized_size(Index d) { return d * (d + 1) / 2; }

template <typename Scalar, typename Derived>
void vectorize_into(const Eigen::MatrixBase<Derived> &m, Eigen::Ref<VectorX<Scalar>> out) {
    const Index d = m.rows();
    const Scalar root2 = std::sqrt(Scalar(2));
    Index k = 0;
    for (Index i = 0; i < d; ++i) {
        out(k++) = m(i, i);
        for (Index j = i + 1; j < d; ++j) out(k++) = root2 * m(i, j);
    }
}

template <typename Scalar>
VectorX<Scalar> vectorize(const SymMatrix<Scalar> &s) {
    VectorX<Scalar> out(vectorized_size(s.dim()));
    vectorize_into<Scalar>(s.matrix(), out);
    return out;
}

template <typename Scalar, typename Derived>
SymMatrix<Scalar> unvectorize(const Eigen::MatrixBase<Derived> &v, Index d) {
    require(v.size() == vectorized_size(d), ErrorCode::DimensionMismatch, "vectorized length");
    const Scalar inv_root2 = Scalar(1) / std::sqrt(Scalar(2));
    MatrixX<Scalar> m(d, d);
    Index k = 0;
    for (Index i = 0; i < d; ++i) {
        m(i, i) = v(k++);
        for (Index j = i + 1; j < d; ++j) {
            m(i, j) = m(j, i) = inv_root2 * v(k++);
        }
    }
    return SymMatrix<Scalar>(m);
}

using SymMatrixd = SymMatrix<double>;
using SpdMatrixd = SpdMatrix<double>;
using EigenPaird = EigenPair<double>;
using UduFactorsd = UduFactors<double>;
using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

}  // namespace spdsliced
