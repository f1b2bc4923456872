#pragma once

#include "mfccert/plant.hpp"
#include "mfccert/synthesis.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace mfc {

enum class ControllerKind { SL, SLHG, MFC, FFLIN };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(std::string_view name);

/// Reference output y_d(t). A generator returns (y_d, y_d', ..., y_d^(n)) and
/// must supply at least n + 1 entries; a set point has all derivatives zero.
class Reference {
public:
    using Generator = std::function<Vector(double t)>;

    static Reference set_point(double y_d);
    static Reference trajectory(Generator gen);

    /// (y_d, ..., y_d^(n)) at time t, length n + 1.
    Vector derivatives(double t, int n) const;
    /// x_d(t) = (y_d, ..., y_d^(n-1)).
    Vector state(double t, int n) const;
    bool is_set_point() const { return !gen_; }
    double set_point_value() const { return y_; }

private:
    double y_ = 0.0;
    Generator gen_;
};

/// Quadratic form recorded as V along a run. x_s is the equilibrium of the
/// loop being monitored; D and vartheta are taken from the gains / here.
struct LyapunovMonitor {
    Matrix P;
    double vartheta = 1.0;
    Vector x_s;
};

struct ControllerSpec {
    ControllerKind kind = ControllerKind::MFC;
    GainSet gains;
    Reference reference = Reference::set_point(0.0);
    Vector x0_star;                    // MFC only; defaults to x_d(0) when empty
    std::optional<Vector> fflin_gain;  // FFLIN: v_fb = gain^T (x - x_d); defaults to k_tilde
    std::optional<LyapunovMonitor> monitor;
};

struct MfcControl {
    double u = 0.0;
    double u_star = 0.0;
    double u_tilde = 0.0;
};

/// Model-loop law evaluated at x*, process-loop law with the f~ correction;
/// u = u* + u~. Throws NumericalError if g vanishes at x or x*.
MfcControl control_mfc(const Plant& plant, const Vector& x, const Vector& x_star, const Vector& x_d,
                       double y_d_n, const Vector& k_star, const Vector& k_tilde);

/// (1/g(x)) (-f(x) + y_d^(n) + k^T (x - x_d)).
double control_sl(const Plant& plant, const Vector& x, const Vector& x_d, double y_d_n, const Vector& k);

/// (1/g(x_d)) (-f(x_d) + y_d^(n) + v_fb).
double control_fflin(const Plant& plant, const Vector& x_d, double y_d_n, double v_fb);

/// One classical Runge-Kutta step. Throws IntegrationFailure when the new
/// state is not finite.
template <class State, class Dynamics>
State step_rk4(Dynamics&& dyn, double t, const State& x, double h)
{
    const State k1 = dyn(t, x);
    const State k2 = dyn(t + 0.5 * h, State(x + 0.5 * h * k1));
    const State k3 = dyn(t + 0.5 * h, State(x + 0.5 * h * k2));
    const State k4 = dyn(t + h, State(x + h * k3));
    State next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite())
        throw IntegrationFailure("state became non-finite", t + h);
    return next;
}

struct Trajectory {
    ControllerKind kind = ControllerKind::MFC;
    double step = 0.0;
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<Vector> x_star; // model state (MFC) or x_d(t)
    std::vector<double> u;
    std::vector<double> V;      // NaN without a monitor

    std::size_t size() const { return t.size(); }
};

/// Fixed-step RK4 over [0, horizon] on a uniform grid of step h. MFC
/// integrates the stacked (x*, x) system with the model loop free of phi.
Trajectory simulate_closed_loop(const Plant& plant, const ControllerSpec& spec, const Vector& x0, double horizon, double h);

/// Control input the given spec applies at (t, x, x*).
double control_input(const Plant& plant, const ControllerSpec& spec, double t, const Vector& x, const Vector& x_star);

/// Header `t,x1,x2,xstar1,xstar2,u,V` (generalised to n states).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct Metrics {
    double u0 = 0.0;
    double peak_abs_u = 0.0;
    double steady_state_error_pct = 0.0;
    double settle_time = 0.0; // NaN if the run never settles
};

/// u0, peak |u|, |mean x1 over the final 10% - y_d| / |y_d| in percent, and the
/// first time after which |x - x_s| stays below 1% of |x0 - x_s| (0.01 absolute
/// when x0 = x_s).
Metrics metrics(const Trajectory& traj, const Vector& x_s_expected, double y_d);

/// First time after which |x - x*| stays below `threshold`; NaN if never.
double tracking_settle_time(const Trajectory& traj, double threshold);

} // namespace mfc
