#pragma once

#include "mfccert/types.hpp"

#include <Eigen/Dense>

namespace mfc::linalg {

/// Solves A x = rhs by Gaussian elimination with partial pivoting.
/// Throws NumericalError when a pivot falls below `singular_tol * max|A|`.
Eigen::VectorXd solve_dense(Eigen::MatrixXd A, Eigen::VectorXd rhs, double singular_tol = 1e-13);

/// Throws std::invalid_argument unless S is square and |S - S^T|_max <= tol.
void require_symmetric(const Matrix& S, double tol = 1e-10);

struct SymmetricEigen {
    Vector values;  // ascending
    Matrix vectors; // column i belongs to values[i]
};

/// Cyclic Jacobi rotations until the largest off-diagonal magnitude is <= tol.
SymmetricEigen jacobi_eigen(const Matrix& S, double tol = 1e-12, int max_sweeps = 100);

/// Root-free LDL^T factorization; true iff every pivot d_i is positive.
bool ldlt_positive_definite(const Matrix& S);

/// Symmetric square root S^{1/2} and its inverse, via the Jacobi eigenbasis.
Matrix symmetric_sqrt(const Matrix& S);
Matrix symmetric_inverse_sqrt(const Matrix& S);

} // namespace mfc::linalg
