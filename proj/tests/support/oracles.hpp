#pragma once

// Reference computations independent of the library code paths.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace ngrc::testing {

/// W = Y O^T (O O^T + lambda I)^{-1} by Gauss-Jordan elimination with partial
/// pivoting in long double, forming every product element by element.
inline Eigen::MatrixXd ridge_normal_equations(const Eigen::MatrixXd& o, const Eigen::MatrixXd& y, double lambda)
{
    using L = long double;
    const auto n = static_cast<std::size_t>(o.rows());
    const auto m = static_cast<std::size_t>(o.cols());
    const auto s = static_cast<std::size_t>(y.rows());
    // augmented [A | B] with A = O O^T + lambda I (n x n), B = O Y^T (n x s)
    std::vector<std::vector<L>> aug(n, std::vector<L>(n + s, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            L acc = 0.0L;
            for (std::size_t k = 0; k < m; ++k) acc += L(o(i, k)) * L(o(j, k));
            aug[i][j] = acc + (i == j ? L(lambda) : 0.0L);
        }
        for (std::size_t c = 0; c < s; ++c) {
            L acc = 0.0L;
            for (std::size_t k = 0; k < m; ++k) acc += L(o(i, k)) * L(y(c, k));
            aug[i][n + c] = acc;
        }
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
        }
        if (aug[piv][col] == 0.0L) throw std::runtime_error("oracle: singular system");
        std::swap(aug[col], aug[piv]);
        const L p = aug[col][col];
        for (auto& v : aug[col]) v /= p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const L f = aug[r][col];
            if (f == 0.0L) continue;
            for (std::size_t c = col; c < n + s; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < s; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            w(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = static_cast<double>(aug[i][n + c]);
        }
    }
    return w;
}

/// Minimizes ||Y - W O||^2 + lambda ||W||^2 by gradient descent with a step
/// below 1 / (largest curvature).
inline Eigen::MatrixXd ridge_gradient_descent(const Eigen::MatrixXd& o, const Eigen::MatrixXd& y, double lambda,
                                              int iterations = 200000)
{
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(y.rows(), o.rows());
    const double curvature = o.squaredNorm() + lambda;  // bounds the top eigenvalue of O O^T + lambda I
    const double step = 1.0 / curvature;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::MatrixXd grad = (w * o - y) * o.transpose() + lambda * w;
        w -= step * grad;
        if (grad.norm() < 1e-15) break;
    }
    return w;
}

inline double dense_spectral_radius(const Eigen::MatrixXd& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

inline double relative_frobenius(const Eigen::MatrixXd& got, const Eigen::MatrixXd& expected)
{
    return (got - expected).norm() / std::max(expected.norm(), 1e-300);
}

} // namespace ngrc::testing
