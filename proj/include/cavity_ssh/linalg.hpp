// linalg.hpp: Hermitian eigensolvers

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <type_traits>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cavity_ssh/errors.hpp"

namespace cavity_ssh {

/// Dense diagonalization is used up to this dimension; above it only the
/// lowest levels are computed iteratively.
inline constexpr Eigen::Index kDenseLimit = 4000;

template <typename Scalar>
struct EigenSystem {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // orthonormal columns matched to values
    double residual{0.0};    // max_i |H v_i - E_i v_i|
    double orthonormality_error{0.0};

    Eigen::Index size() const { return values.size(); }
};

namespace detail {
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}
} // namespace detail

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& h) {
    return detail::max_abs(h - h.adjoint());
}

/// Full spectrum of a Hermitian matrix. Throws NonHermitianInput or
/// ConvergenceFailure; the residual bound is |Hv - Ev| < 1e-9 |H|.
template <typename Derived>
EigenSystem<typename Derived::Scalar> diagonalize(const Eigen::MatrixBase<Derived>& h) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    if (h.rows() != h.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "matrix is " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
    }
    const double scale = std::max(1.0, detail::max_abs(h));
    const double herm = hermiticity_error(h);
    if (herm > 1e-10 * scale) {
        throw Error(ErrorCode::NonHermitianInput, "max |H - H^dagger| = " + std::to_string(herm));
    }

    const Matrix hm = h;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hm);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "self-adjoint eigensolver did not converge");
    }

    EigenSystem<Scalar> out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();

    const double norm = std::max(1.0, out.values.cwiseAbs().maxCoeff());
    out.residual = out.size() == 0
        ? 0.0
        : (hm * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm().maxCoeff();
    const Matrix gram = out.vectors.adjoint() * out.vectors;
    out.orthonormality_error = detail::max_abs(gram - Matrix::Identity(gram.rows(), gram.cols()));
    if (out.residual > 1e-9 * norm || out.orthonormality_error > 1e-9) {
        throw Error(ErrorCode::ConvergenceFailure,
                    "residual " + std::to_string(out.residual) + " exceeds bound");
    }
    return out;
}

/// Lowest `count` eigenvalues of a sparse real symmetric matrix by Lanczos
/// with full reorthogonalization. The Krylov space grows until every
/// requested Ritz value has residual below `tol`.
/// One start vector: an exactly degenerate level shows up once, not with its multiplicity.
inline Eigen::VectorXd lanczos_lowest(const Eigen::SparseMatrix<double>& h, int count,
                                      double tol = 1e-10, unsigned seed = 7) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw Error(ErrorCode::DimensionMismatch, "sparse matrix not square");
    if (count <= 0 || count > n) {
        throw Error(ErrorCode::OutOfRange, "requested " + std::to_string(count) + " levels");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd start(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] = normal(rng);
    start.normalize();

    Eigen::Index max_steps = std::min<Eigen::Index>(n, std::max<Eigen::Index>(4 * count + 40, 80));
    while (true) {
        Eigen::MatrixXd q(n, max_steps);
        Eigen::VectorXd alpha(max_steps), beta(max_steps);
        q.col(0) = start;
        Eigen::Index steps = 0;
        double last_beta = 0.0;
        for (Eigen::Index j = 0; j < max_steps; ++j) {
            Eigen::VectorXd w = h * q.col(j);
            alpha[j] = q.col(j).dot(w);
            // full reorthogonalization, applied twice
            for (int pass = 0; pass < 2; ++pass) {
                w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
            }
            steps = j + 1;
            last_beta = w.norm();
            if (j + 1 == max_steps || last_beta < 1e-13) break;
            beta[j] = last_beta;
            q.col(j + 1) = w / last_beta;
        }

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
        for (Eigen::Index j = 0; j < steps; ++j) {
            t(j, j) = alpha[j];
            if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
        if (tri.info() != Eigen::Success) {
            throw Error(ErrorCode::ConvergenceFailure, "tridiagonal eigensolver failed");
        }
        const Eigen::Index available = std::min<Eigen::Index>(count, steps);
        bool converged = available == count;
        for (Eigen::Index i = 0; converged && i < available; ++i) {
            const double res = std::abs(last_beta * tri.eigenvectors()(steps - 1, i));
            if (res > tol * std::max(1.0, std::abs(tri.eigenvalues()[i]))) converged = false;
        }
        if (converged || steps == n) {
            if (available < count) {
                throw Error(ErrorCode::ConvergenceFailure, "Krylov space exhausted");
            }
            return tri.eigenvalues().head(count);
        }
        if (max_steps == n) throw Error(ErrorCode::ConvergenceFailure, "Lanczos did not converge");
        max_steps = std::min<Eigen::Index>(n, 2 * max_steps);
    }
}

/// Lowest `count` eigenvalues; dense below kDenseLimit, Lanczos above.
inline Eigen::VectorXd lowest_levels(const Eigen::SparseMatrix<double>& h, int count) {
    if (h.rows() <= kDenseLimit) {
        const Eigen::MatrixXd dense(h);
        const auto sys = diagonalize(dense);
        if (count > sys.size()) throw Error(ErrorCode::OutOfRange, "more levels than dimension");
        return sys.values.head(count);
    }
    return lanczos_lowest(h, count);
}

} // namespace cavity_ssh
