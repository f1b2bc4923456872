#pragma once

#include "mfccert/types.hpp"

#include <complex>
#include <span>

namespace mfc {

/// Feedback gains of the two-loop design. `k_star` is the model-loop gain,
/// `k_tilde = k_star^T D^{-1} / epsilon` the high-gain process-loop gain and
/// D = diag(epsilon^{n-1}, ..., epsilon, 1) the time-scaling matrix.
struct GainSet {
    Vector k_star;
    Vector k_tilde;
    double epsilon = 1.0;
    Matrix D;

    int dimension() const { return static_cast<int>(k_star.size()); }
};

/// Gain k with det(sI - A - b k^T) = prod(s - root_i) for the Brunovsky pair.
/// Throws std::invalid_argument if the roots are not closed under complex
/// conjugation, not all in the open left half-plane, or not n in number.
Vector place_poles(int n, std::span<const std::complex<double>> roots);

struct HighGain {
    Vector k_tilde;
    Matrix D;
};

/// k_tilde_i = k_star_i * epsilon^{-(n-i+1)} (1-based i). Requires 0 < epsilon <= 1.
HighGain high_gain(const Vector& k_star, double epsilon);

/// place_poles followed by high_gain.
GainSet design_gains(std::span<const std::complex<double>> roots, double epsilon);

/// A + b k^T in Brunovsky form (companion matrix with last row k).
Matrix closed_loop_matrix(const Vector& k);

/// Unique symmetric P with (A + b k^T)^T P + P (A + b k^T) = -I.
/// Throws NumericalError when the vectorized system is singular or the
/// solution is not positive definite (k not Hurwitz).
Matrix solve_lyapunov(const Vector& k_star);

/// max |(A + b k^T)^T P + P (A + b k^T) + I|.
double lyapunov_residual(const Vector& k_star, const Matrix& P);

/// Smallest eigenvalue of the symmetric matrix P (closed form for n = 2,
/// cyclic Jacobi otherwise). Throws std::invalid_argument on asymmetric input.
double lambda_min(const Matrix& P);

/// |b^T P|_2, the Euclidean norm of the last row of P.
double bP_norm(const Matrix& P);

/// Robustness bound of the two-loop design,
/// 1 / (epsilon (1 + sqrt(1 + 1/(vartheta epsilon))) |b^T P|).
double gamma_mfc(double epsilon, double vartheta, const Matrix& P);

/// Single-loop bound 1 / (2 |b^T P|).
double gamma_sl(const Matrix& P);

/// Single-loop high-gain bound 1 / (2 epsilon |b^T P|).
double gamma_slhg(double epsilon, const Matrix& P);

/// Weight of the model-loop part of the Lyapunov function used when none is configured.
inline double default_vartheta(double epsilon) { return 100.0 / epsilon; }

struct MMatrixTest {
    bool positive = false;
    Matrix2 M;
};

/// Builds M = [[vartheta, -gamma|b^T P|], [-gamma|b^T P|, 1/epsilon - 2 gamma |b^T P|]]
/// and reports whether both leading principal minors are positive.
MMatrixTest m_matrix_positive(double vartheta, double epsilon, double gamma, const Matrix& P);

struct LyapunovCertificate {
    Matrix P;
    double lambda_min = 0.0;
    double bP_norm = 0.0;
    double vartheta = 0.0;
    double epsilon = 1.0;
    double gamma_mfc = 0.0;
    double gamma_sl = 0.0;
    double gamma_slhg = 0.0;
    double residual = 0.0;
};

LyapunovCertificate certify(const GainSet& gains, double vartheta);

} // namespace mfc
