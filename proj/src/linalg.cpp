#include "mfccert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mfc::linalg {

Eigen::VectorXd solve_dense(Eigen::MatrixXd A, Eigen::VectorXd rhs, double singular_tol)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || rhs.size() != n)
        throw std::invalid_argument("solve_dense: dimension mismatch");

    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(pivot, col)))
                pivot = r;
        if (std::abs(A(pivot, col)) <= singular_tol * scale)
            throw NumericalError("solve_dense: matrix is singular to working precision");
        if (pivot != col) {
            A.row(pivot).swap(A.row(col));
            std::swap(rhs(pivot), rhs(col));
        }
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double factor = A(r, col) / A(col, col);
            if (factor == 0.0)
                continue;
            A.row(r).tail(n - col) -= factor * A.row(col).tail(n - col);
            rhs(r) -= factor * rhs(col);
        }
    }

    Eigen::VectorXd x(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double acc = rhs(r);
        for (Eigen::Index c = r + 1; c < n; ++c)
            acc -= A(r, c) * x(c);
        x(r) = acc / A(r, r);
    }
    return x;
}

void require_symmetric(const Matrix& S, double tol)
{
    if (S.rows() != S.cols())
        throw std::invalid_argument("matrix is not square");
    if (S.size() > 0 && (S - S.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("matrix is not symmetric");
}

namespace {

double max_off_diagonal(const Matrix& S)
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
        for (Eigen::Index j = i + 1; j < S.cols(); ++j)
            m = std::max(m, std::abs(S(i, j)));
    return m;
}

} // namespace

SymmetricEigen jacobi_eigen(const Matrix& S, double tol, int max_sweeps)
{
    require_symmetric(S);
    const Eigen::Index n = S.rows();
    Matrix a = 0.5 * (S + S.transpose());
    Matrix v = Matrix::Identity(n, n);

    for (int sweep = 0; sweep < max_sweeps && max_off_diagonal(a) > tol; ++sweep) {
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= tol * 1e-3)
                    continue;
                // Rotation angle that annihilates a(p, q).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (max_off_diagonal(a) > tol)
        throw NumericalError("jacobi_eigen: no convergence");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });

    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

bool ldlt_positive_definite(const Matrix& S)
{
    require_symmetric(S);
    const Eigen::Index n = S.rows();
    Matrix L = Matrix::Identity(n, n);
    Vector d(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double dj = S(j, j);
        for (Eigen::Index k = 0; k < j; ++k)
            dj -= L(j, k) * L(j, k) * d(k);
        if (!(dj > 0.0))
            return false;
        d(j) = dj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double lij = S(i, j);
            for (Eigen::Index k = 0; k < j; ++k)
                lij -= L(i, k) * L(j, k) * d(k);
            L(i, j) = lij / dj;
        }
    }
    return true;
}

Matrix symmetric_sqrt(const Matrix& S)
{
    const auto eig = jacobi_eigen(S);
    if (eig.values.minCoeff() < 0.0)
        throw NumericalError("symmetric_sqrt: matrix is not positive semidefinite");
    const Vector root = eig.values.cwiseSqrt();
    return eig.vectors * root.asDiagonal() * eig.vectors.transpose();
}

Matrix symmetric_inverse_sqrt(const Matrix& S)
{
    const auto eig = jacobi_eigen(S);
    if (!(eig.values.minCoeff() > 0.0))
        throw NumericalError("symmetric_inverse_sqrt: matrix is not positive definite");
    const Vector inv_root = eig.values.cwiseSqrt().cwiseInverse();
    return eig.vectors * inv_root.asDiagonal() * eig.vectors.transpose();
}

} // namespace mfc::linalg
