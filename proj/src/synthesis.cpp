#include "mfccert/synthesis.hpp"

#include "mfccert/linalg.hpp"
#include "mfccert/plant.hpp"

#include <cmath>
#include <vector>

namespace mfc {

namespace {

void require_epsilon(double epsilon)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon must lie in (0, 1]");
}

void require_conjugate_closed(std::span<const std::complex<double>> roots)
{
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i])
            continue;
        const auto r = roots[i];
        const double tol = 1e-9 * (1.0 + std::abs(r));
        if (std::abs(r.imag()) <= tol) {
            used[i] = true;
            continue;
        }
        bool matched = false;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - std::conj(r)) <= tol) {
                used[i] = used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched)
            throw std::invalid_argument("place_poles: roots are not closed under complex conjugation");
    }
}

} // namespace

Vector place_poles(int n, std::span<const std::complex<double>> roots)
{
    BrunovskyDims dims(n);
    if (roots.size() != static_cast<std::size_t>(dims.n))
        throw std::invalid_argument("place_poles: expected " + std::to_string(n) + " roots");
    for (const auto& r : roots)
        if (!(r.real() < 0.0))
            throw std::invalid_argument("place_poles: every root needs a negative real part");
    require_conjugate_closed(roots);

    // Monic polynomial coefficients, poly[i] multiplies s^i.
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] -= r * poly[i];
        }
        poly = std::move(next);
    }

    Vector k(n);
    for (int i = 0; i < n; ++i)
        k(i) = -poly[static_cast<std::size_t>(i)].real();
    return k;
}

HighGain high_gain(const Vector& k_star, double epsilon)
{
    require_epsilon(epsilon);
    const auto n = k_star.size();
    if (n < 1 || n > kMaxDim)
        throw std::invalid_argument("high_gain: gain dimension out of range");
    HighGain out{Vector(n), Matrix::Zero(n, n)};
    // Repeated division keeps e.g. -4 / 0.1^2 at exactly -400; pow(0.1, -2) does not.
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = 1.0;
        double k = k_star(i);
        for (Eigen::Index j = i + 1; j < n; ++j)
            d *= epsilon;
        for (Eigen::Index j = i; j < n; ++j)
            k /= epsilon;
        out.D(i, i) = d;
        out.k_tilde(i) = k;
    }
    return out;
}

GainSet design_gains(std::span<const std::complex<double>> roots, double epsilon)
{
    GainSet g;
    g.k_star = place_poles(static_cast<int>(roots.size()), roots);
    auto hg = high_gain(g.k_star, epsilon);
    g.k_tilde = std::move(hg.k_tilde);
    g.D = std::move(hg.D);
    g.epsilon = epsilon;
    return g;
}

Matrix closed_loop_matrix(const Vector& k)
{
    BrunovskyDims dims(static_cast<int>(k.size()));
    Matrix M = dims.A();
    M.row(dims.n - 1) += k.transpose();
    return M;
}

Matrix solve_lyapunov(const Vector& k_star)
{
    const Matrix M = closed_loop_matrix(k_star);
    const Eigen::Index n = M.rows();

    // Column-major vec: vec(M^T P) = (I kron M^T) vec P, vec(P M) = (M^T kron I) vec P.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index a = 0; a < n; ++a) {
                K(i * n + a, i * n + j) += M(j, a);
                K(i * n + a, j * n + a) += M(j, i);
            }
        }
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        rhs(i * n + i) = -1.0;

    const Eigen::VectorXd vecP = linalg::solve_dense(K, rhs);
    Matrix P(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            P(r, c) = vecP(c * n + r);
    P = (0.5 * (P + P.transpose())).eval();

    if (!linalg::ldlt_positive_definite(P))
        throw NumericalError("solve_lyapunov: solution is not positive definite; the gain is not Hurwitz");
    return P;
}

double lyapunov_residual(const Vector& k_star, const Matrix& P)
{
    const Matrix M = closed_loop_matrix(k_star);
    const Matrix R = M.transpose() * P + P * M + Matrix::Identity(M.rows(), M.cols());
    return R.cwiseAbs().maxCoeff();
}

double lambda_min(const Matrix& P)
{
    linalg::require_symmetric(P);
    if (P.rows() == 2) {
        const double mean = 0.5 * (P(0, 0) + P(1, 1));
        const double half_diff = 0.5 * (P(0, 0) - P(1, 1));
        return mean - std::hypot(half_diff, P(0, 1));
    }
    return linalg::jacobi_eigen(P).values(0);
}

double bP_norm(const Matrix& P)
{
    return P.row(P.rows() - 1).norm();
}

double gamma_mfc(double epsilon, double vartheta, const Matrix& P)
{
    require_epsilon(epsilon);
    if (!(vartheta > 0.0))
        throw std::invalid_argument("gamma_mfc: vartheta must be positive");
    return 1.0 / (epsilon * (1.0 + std::sqrt(1.0 + 1.0 / (vartheta * epsilon))) * bP_norm(P));
}

double gamma_sl(const Matrix& P)
{
    return 1.0 / (2.0 * bP_norm(P));
}

double gamma_slhg(double epsilon, const Matrix& P)
{
    require_epsilon(epsilon);
    return 1.0 / (2.0 * epsilon * bP_norm(P));
}

MMatrixTest m_matrix_positive(double vartheta, double epsilon, double gamma, const Matrix& P)
{
    const double coupling = gamma * bP_norm(P);
    MMatrixTest out;
    out.M << vartheta, -coupling, -coupling, 1.0 / epsilon - 2.0 * coupling;
    out.positive = out.M(0, 0) > 0.0 && out.M.determinant() > 0.0;
    return out;
}

LyapunovCertificate certify(const GainSet& gains, double vartheta)
{
    LyapunovCertificate c;
    c.P = solve_lyapunov(gains.k_star);
    c.lambda_min = lambda_min(c.P);
    c.bP_norm = bP_norm(c.P);
    c.vartheta = vartheta;
    c.epsilon = gains.epsilon;
    c.gamma_mfc = gamma_mfc(gains.epsilon, vartheta, c.P);
    c.gamma_sl = gamma_sl(c.P);
    c.gamma_slhg = gamma_slhg(gains.epsilon, c.P);
    c.residual = lyapunov_residual(gains.k_star, c.P);
    return c;
}

} // namespace mfc
