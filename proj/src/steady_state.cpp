#include "mfccert/steady_state.hpp"

#include "mfccert/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mfc {

double Cubic::max_abs_coefficient() const
{
    return std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
}

namespace {

std::vector<double> quadratic_roots(double a, double b, double c)
{
    if (a == 0.0) {
        if (b == 0.0)
            return {};
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    const double tol = 1e-14 * (b * b + std::abs(4.0 * a * c));
    if (std::abs(disc) <= tol)
        return {-b / (2.0 * a)};
    if (disc < 0.0)
        return {};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0)
        return {0.0};
    return {q / a, c / q};
}

std::vector<double> depressed_cubic_roots(double p, double q)
{
    // t^3 + p t + q = 0
    const double half_q = 0.5 * q;
    const double third_p = p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;
    const double tol = 1e-14 * (half_q * half_q + std::abs(third_p * third_p * third_p));

    if (std::abs(disc) <= tol) {
        if (std::abs(p) <= 1e-300)
            return {0.0};
        return {3.0 * q / p, -1.5 * q / p};
    }
    if (disc > 0.0) {
        const double root = std::sqrt(disc);
        const double A = -std::copysign(std::cbrt(std::abs(half_q) + root), q);
        const double B = (A != 0.0) ? -third_p / A : 0.0;
        return {A + B};
    }
    // Three distinct real roots: trigonometric form (p < 0 here).
    const double r = 2.0 * std::sqrt(-third_p);
    const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    std::vector<double> out(3);
    for (int k = 0; k < 3; ++k)
        out[static_cast<std::size_t>(k)] = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
    return out;
}

double polish(const Cubic& c, double x)
{
    double fx = c(x);
    for (int it = 0; it < 5 && fx != 0.0; ++it) {
        const double d = c.derivative(x);
        if (d == 0.0)
            break;
        const double next = x - fx / d;
        const double fnext = c(next);
        if (!(std::abs(fnext) < std::abs(fx)))
            break;
        x = next;
        fx = fnext;
    }
    return x;
}

} // namespace

std::vector<double> solve_cubic(const Cubic& c)
{
    const double scale = c.max_abs_coefficient();
    if (scale == 0.0 || !std::isfinite(scale))
        throw std::invalid_argument("solve_cubic: coefficients must be finite and not all zero");

    std::vector<double> roots;
    if (std::abs(c.a3) <= 1e-15 * scale) {
        roots = quadratic_roots(c.a2, c.a1, c.a0);
    } else {
        const double a = c.a2 / c.a3;
        const double b = c.a1 / c.a3;
        const double d = c.a0 / c.a3;
        const double p = b - a * a / 3.0;
        const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
        for (double t : depressed_cubic_roots(p, q))
            roots.push_back(t - a / 3.0);
    }

    for (double& r : roots)
        r = polish(c, r);
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || std::abs(r - unique.back()) > 1e-9 * std::max(1.0, std::abs(r)))
            unique.push_back(r);
    return unique;
}

Cubic mfc_steady_polynomial(const MsdParams& p, double k1_star, double epsilon, double y_d)
{
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("mfc_steady_polynomial: epsilon must lie in (0, 1]");
    // (y_d + x)^3 = x^3 + 3 y_d x^2 + 3 y_d^2 x + y_d^3
    const double s = sigma1(p) / p.m;
    const double lin = p.delta_k / p.m;
    Cubic c;
    c.a3 = -s;
    c.a2 = -3.0 * s * y_d;
    c.a1 = k1_star / (epsilon * epsilon) - 3.0 * s * y_d * y_d - lin;
    c.a0 = -s * y_d * y_d * y_d - lin * y_d;
    return c;
}

Cubic sl_steady_polynomial(const MsdParams& p, double k1, double y_d)
{
    Cubic c;
    c.a3 = -sigma1(p) / p.m;
    c.a2 = 0.0;
    c.a1 = k1 - p.delta_k / p.m;
    c.a0 = -k1 * y_d;
    return c;
}

std::string_view to_string(LoopKind kind)
{
    switch (kind) {
    case LoopKind::SL: return "SL";
    case LoopKind::SLHG: return "SLHG";
    case LoopKind::MFC: return "MFC";
    }
    return "?";
}

std::string_view to_string(Stability s)
{
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
    }
    return "?";
}

Stability classify_stability(double root, LoopKind kind, const MsdParams& p, const GainSet& gains, double y_d)
{
    if (gains.dimension() != 2)
        throw std::invalid_argument("classify_stability: the mass-spring-damper loop is two-dimensional");

    const BrunovskyDims dims(2);
    const Matrix2 A = dims.A();
    const Vector2 b = dims.b();

    Matrix2 J;
    if (kind == LoopKind::MFC) {
        const Vector x_s{{y_d + root, 0.0}};
        const Vector2 grad = msd_grad_phi(p, x_s);
        const Matrix2 D = gains.D;
        J = (A + b * gains.k_star.transpose()) / gains.epsilon + b * grad.transpose() * D;
    } else {
        const Vector x_s{{root, 0.0}};
        const Vector2 grad = msd_grad_phi(p, x_s);
        const Vector2 k = (kind == LoopKind::SL) ? Vector2(gains.k_star) : Vector2(gains.k_tilde);
        J = A + b * k.transpose() + b * grad.transpose();
    }

    const double tr = J.trace();
    const double det = J.determinant();
    const double disc = tr * tr - 4.0 * det;
    double re_hi = 0.5 * tr;
    double re_lo = 0.5 * tr;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        re_hi = 0.5 * (tr + s);
        re_lo = 0.5 * (tr - s);
    }
    constexpr double kMarginal = 1e-9;
    if (std::abs(re_hi) <= kMarginal || std::abs(re_lo) <= kMarginal)
        return Stability::marginal;
    return re_hi < 0.0 ? Stability::stable : Stability::unstable;
}

Vector2 EquilibriumSet::steady_state() const
{
    const double r = selected_root();
    return Vector2(frame == SteadyFrame::process_error ? y_d + r : r, 0.0);
}

double EquilibriumSet::offset() const
{
    const double r = selected_root();
    return frame == SteadyFrame::process_error ? r : r - y_d;
}

EquilibriumSet solve_steady_state(const MsdParams& p, const GainSet& gains, LoopKind kind, double y_d)
{
    if (gains.dimension() != 2)
        throw std::invalid_argument("solve_steady_state: the mass-spring-damper loop is two-dimensional");

    EquilibriumSet eq;
    eq.kind = kind;
    eq.y_d = y_d;
    double target = y_d;
    switch (kind) {
    case LoopKind::MFC:
        eq.frame = SteadyFrame::process_error;
        eq.coefficients = mfc_steady_polynomial(p, gains.k_star(0), gains.epsilon, y_d);
        target = 0.0;
        break;
    case LoopKind::SL:
        eq.frame = SteadyFrame::process;
        eq.coefficients = sl_steady_polynomial(p, gains.k_star(0), y_d);
        break;
    case LoopKind::SLHG:
        eq.frame = SteadyFrame::process;
        eq.coefficients = sl_steady_polynomial(p, gains.k_tilde(0), y_d);
        break;
    }

    eq.roots = solve_cubic(eq.coefficients);
    if (eq.roots.empty())
        throw NumericalError("solve_steady_state: the steady-state polynomial has no real root");

    for (double r : eq.roots)
        eq.stability.push_back(classify_stability(r, kind, p, gains, y_d));

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eq.roots.size(); ++i) {
        const double dist = std::abs(eq.roots[i] - target);
        const double tie_tol = 1e-12 * (1.0 + dist);
        if (dist < best - tie_tol) {
            best = dist;
            eq.selected = i;
            eq.tie = false;
        } else if (std::abs(dist - best) <= tie_tol) {
            eq.tie = true; // roots are ascending, so the earlier (smaller) one stays selected
        }
    }
    return eq;
}

std::vector<SweepRow> steady_state_sweep(const MsdParams& p, const GainSet& gains, double y_min, double y_max, std::size_t count)
{
    if (count < 2 || !(y_max > y_min))
        throw std::invalid_argument("steady_state_sweep: need count >= 2 and y_max > y_min");
    std::vector<SweepRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double y = y_min + (y_max - y_min) * static_cast<double>(i) / static_cast<double>(count - 1);
        SweepRow row;
        row.y_d = y;
        row.sl_roots = solve_cubic(sl_steady_polynomial(p, gains.k_star(0), y));
        row.mfc_roots = solve_cubic(mfc_steady_polynomial(p, gains.k_star(0), gains.epsilon, y));
        rows.push_back(std::move(row));
    }
    return rows;
}

double sl_multiplicity_loss(const MsdParams& p, double k1, double y_lo, double y_hi, double tol)
{
    auto count = [&](double y) { return solve_cubic(sl_steady_polynomial(p, k1, y)).size(); };
    if (count(y_lo) < 3)
        return std::numeric_limits<double>::quiet_NaN();

    constexpr int kScan = 2000;
    double prev = y_lo;
    for (int i = 1; i <= kScan; ++i) {
        const double y = y_lo + (y_hi - y_lo) * i / kScan;
        if (count(y) < 3) {
            double lo = prev;
            double hi = y;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (count(mid) < 3 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = y;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace mfc
