#include "mfccert/simulate.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mfc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double checked_g(const Plant& plant, const Vector& x, const char* where)
{
    const double g = plant.g(x);
    if (g == 0.0 || !std::isfinite(g))
        throw NumericalError(std::string(where) + ": input gain g vanishes");
    return g;
}

Vector scaled_inverse(const Matrix& D, const Vector& v)
{
    return D.diagonal().cwiseInverse().cwiseProduct(v);
}

} // namespace

std::string_view to_string(ControllerKind kind)
{
    switch (kind) {
    case ControllerKind::SL: return "SL";
    case ControllerKind::SLHG: return "SLHG";
    case ControllerKind::MFC: return "MFC";
    case ControllerKind::FFLIN: return "FFLIN";
    }
    return "?";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view name)
{
    for (auto k : {ControllerKind::SL, ControllerKind::SLHG, ControllerKind::MFC, ControllerKind::FFLIN})
        if (name == to_string(k))
            return k;
    return std::nullopt;
}

Reference Reference::set_point(double y_d)
{
    Reference r;
    r.y_ = y_d;
    return r;
}

Reference Reference::trajectory(Generator gen)
{
    if (!gen)
        throw std::invalid_argument("Reference::trajectory: empty generator");
    Reference r;
    r.gen_ = std::move(gen);
    return r;
}

Vector Reference::derivatives(double t, int n) const
{
    if (!gen_) {
        Vector d = Vector::Zero(n + 1);
        d(0) = y_;
        return d;
    }
    const Vector d = gen_(t);
    if (d.size() < n + 1)
        throw std::invalid_argument("Reference: generator supplies fewer than n + 1 derivatives");
    return d.head(n + 1);
}

Vector Reference::state(double t, int n) const
{
    return derivatives(t, n).head(n);
}

MfcControl control_mfc(const Plant& plant, const Vector& x, const Vector& x_star, const Vector& x_d,
                       double y_d_n, const Vector& k_star, const Vector& k_tilde)
{
    MfcControl c;
    const double g_star = checked_g(plant, x_star, "control_mfc");
    const double g = checked_g(plant, x, "control_mfc");
    const double f_star = plant.f(x_star);
    c.u_star = (-f_star + y_d_n + k_star.dot(x_star - x_d)) / g_star;
    const double f_tilde = plant.f(x) - f_star + (g - g_star) * c.u_star;
    c.u_tilde = (-f_tilde + k_tilde.dot(x - x_star)) / g;
    c.u = c.u_star + c.u_tilde;
    return c;
}

double control_sl(const Plant& plant, const Vector& x, const Vector& x_d, double y_d_n, const Vector& k)
{
    return (-plant.f(x) + y_d_n + k.dot(x - x_d)) / checked_g(plant, x, "control_sl");
}

double control_fflin(const Plant& plant, const Vector& x_d, double y_d_n, double v_fb)
{
    return (-plant.f(x_d) + y_d_n + v_fb) / checked_g(plant, x_d, "control_fflin");
}

double control_input(const Plant& plant, const ControllerSpec& spec, double t, const Vector& x, const Vector& x_star)
{
    const int n = plant.dimension();
    const Vector yd = spec.reference.derivatives(t, n);
    const Vector x_d = yd.head(n);
    const double y_n = yd(n);
    switch (spec.kind) {
    case ControllerKind::SL:
        return control_sl(plant, x, x_d, y_n, spec.gains.k_star);
    case ControllerKind::SLHG:
        return control_sl(plant, x, x_d, y_n, spec.gains.k_tilde);
    case ControllerKind::FFLIN: {
        const Vector& k = spec.fflin_gain ? *spec.fflin_gain : spec.gains.k_tilde;
        return control_fflin(plant, x_d, y_n, k.dot(x - x_d));
    }
    case ControllerKind::MFC:
        return control_mfc(plant, x, x_star, x_d, y_n, spec.gains.k_star, spec.gains.k_tilde).u;
    }
    throw std::logic_error("control_input: unknown controller kind");
}

namespace {

double monitor_value(const ControllerSpec& spec, const Vector& x, const Vector& x_star, const Vector& x_d)
{
    if (!spec.monitor)
        return kNaN;
    const auto& m = *spec.monitor;
    switch (spec.kind) {
    case ControllerKind::SL: {
        const Vector e = x - m.x_s;
        return e.dot(m.P * e);
    }
    case ControllerKind::SLHG:
    case ControllerKind::FFLIN: {
        const Vector z = scaled_inverse(spec.gains.D, x - m.x_s);
        return z.dot(m.P * z);
    }
    case ControllerKind::MFC: {
        const Vector xt = x_star - x_d;
        const Vector z = scaled_inverse(spec.gains.D, (x - m.x_s) - xt);
        return m.vartheta * xt.dot(m.P * xt) + z.dot(m.P * z);
    }
    }
    return kNaN;
}

} // namespace

Trajectory simulate_closed_loop(const Plant& plant, const ControllerSpec& spec, const Vector& x0, double horizon, double h)
{
    const int n = plant.dimension();
    if (!(h > 0.0))
        throw std::invalid_argument("simulate_closed_loop: step must be positive");
    if (!(horizon >= h))
        throw std::invalid_argument("simulate_closed_loop: horizon must be at least one step");
    if (x0.size() != n || spec.gains.dimension() != n)
        throw std::invalid_argument("simulate_closed_loop: dimension mismatch");

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));

    Trajectory traj;
    traj.kind = spec.kind;
    traj.step = h;
    traj.t.reserve(steps + 1);
    traj.x.reserve(steps + 1);
    traj.x_star.reserve(steps + 1);
    traj.u.reserve(steps + 1);
    traj.V.reserve(steps + 1);

    const bool mfc = spec.kind == ControllerKind::MFC;

    // Stacked state: (x*, x) for MFC, x alone otherwise.
    StackedVector s(mfc ? 2 * n : n);
    if (mfc) {
        Vector xs0 = spec.x0_star.size() == 0 ? spec.reference.state(0.0, n) : spec.x0_star;
        if (xs0.size() != n)
            throw std::invalid_argument("simulate_closed_loop: x0_star dimension mismatch");
        s.head(n) = xs0;
        s.tail(n) = x0;
    } else {
        s = x0;
    }

    auto model_rhs = [&](double t, const Vector& xs) {
        const Vector yd = spec.reference.derivatives(t, n);
        const double g = checked_g(plant, xs, "model loop");
        const double u_star = (-plant.f(xs) + yd(n) + spec.gains.k_star.dot(xs - yd.head(n))) / g;
        return plant.rhs(xs, u_star, false);
    };

    auto dyn = [&](double t, const StackedVector& st) -> StackedVector {
        StackedVector d(st.size());
        if (mfc) {
            const Vector xs = st.head(n);
            const Vector x = st.tail(n);
            d.head(n) = model_rhs(t, xs);
            d.tail(n) = plant.rhs(x, control_input(plant, spec, t, x, xs));
        } else {
            const Vector x = st;
            const Vector x_d = spec.reference.state(t, n);
            d = plant.rhs(x, control_input(plant, spec, t, x, x_d));
        }
        return d;
    };

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * h;
        const Vector x_d = spec.reference.state(t, n);
        const Vector x = mfc ? Vector(s.tail(n)) : Vector(s);
        const Vector xs = mfc ? Vector(s.head(n)) : x_d;
        traj.t.push_back(t);
        traj.x.push_back(x);
        traj.x_star.push_back(xs);
        traj.u.push_back(control_input(plant, spec, t, x, xs));
        traj.V.push_back(monitor_value(spec, x, xs, x_d));
        if (k == steps)
            break;
        s = step_rk4(dyn, t, s, h);
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const std::size_t n = traj.x.empty() ? 2 : static_cast<std::size_t>(traj.x.front().size());
    os << "t";
    for (std::size_t i = 1; i <= n; ++i)
        os << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i)
        os << ",xstar" << i;
    os << ",u,V\n";
    const auto old = os.precision(12);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << traj.t[k];
        for (std::size_t i = 0; i < n; ++i)
            os << ',' << traj.x[k](static_cast<Eigen::Index>(i));
        for (std::size_t i = 0; i < n; ++i)
            os << ',' << traj.x_star[k](static_cast<Eigen::Index>(i));
        os << ',' << traj.u[k] << ',' << traj.V[k] << '\n';
    }
    os.precision(old);
}

Metrics metrics(const Trajectory& traj, const Vector& x_s, double y_d)
{
    if (traj.size() == 0)
        throw std::invalid_argument("metrics: empty trajectory");
    Metrics m;
    m.u0 = traj.u.front();
    for (double u : traj.u)
        m.peak_abs_u = std::max(m.peak_abs_u, std::abs(u));

    const double t_end = traj.t.back();
    const double window_start = t_end - 0.1 * t_end;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.t[k] >= window_start - 1e-12) {
            sum += traj.x[k](0);
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    m.steady_state_error_pct = y_d != 0.0 ? 100.0 * std::abs(mean - y_d) / std::abs(y_d) : kNaN;

    const double d0 = (traj.x.front() - x_s).norm();
    const double threshold = d0 > 0.0 ? 0.01 * d0 : 0.01;
    m.settle_time = 0.0;
    for (std::size_t k = traj.size(); k-- > 0;) {
        if ((traj.x[k] - x_s).norm() >= threshold) {
            m.settle_time = (k + 1 < traj.size()) ? traj.t[k + 1] : kNaN;
            break;
        }
    }
    return m;
}

double tracking_settle_time(const Trajectory& traj, double threshold)
{
    for (std::size_t k = traj.size(); k-- > 0;) {
        if ((traj.x[k] - traj.x_star[k]).norm() >= threshold)
            return (k + 1 < traj.size()) ? traj.t[k + 1] : kNaN;
    }
    return 0.0;
}

} // namespace mfc
