#include "mfccert/simulate.hpp"
#include "mfccert/steady_state.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

using namespace mfc;

namespace {

GainSet paper_gains()
{
    const std::vector<std::complex<double>> roots{-2.0, -2.0};
    return design_gains(roots, 0.1);
}

Vector v2(double a, double b)
{
    return Vector2(a, b);
}

ControllerSpec spec_for(ControllerKind kind, double y_d, Vector2 x0_star = Vector2::Zero())
{
    ControllerSpec s;
    s.kind = kind;
    s.gains = paper_gains();
    s.reference = Reference::set_point(y_d);
    s.x0_star = x0_star;
    return s;
}

using Scalar = Eigen::Matrix<double, 1, 1>;

double rk4_error(double h)
{
    Scalar x(1.0);
    const int steps = static_cast<int>(std::lround(1.0 / h));
    for (int i = 0; i < steps; ++i)
        x = step_rk4([](double, const Scalar& s) { return Scalar(-s); }, i * h, x, h);
    return std::abs(x(0) - std::exp(-1.0));
}

} // namespace

TEST_CASE("control_mfc examples")
{
    const MsdPlant plant(MsdParams{});
    const GainSet g = paper_gains();
    const Vector x_d = v2(0.75, 0);
    CHECK(control_mfc(plant, v2(0, 0), v2(0, 0), x_d, 0.0, g.k_star, g.k_tilde).u == doctest::Approx(12.81));
    CHECK(control_mfc(plant, v2(0.1, -8), v2(0, 0), x_d, 0.0, g.k_star, g.k_tilde).u == doctest::Approx(290.6).epsilon(0.02));
    CHECK(control_mfc(plant, v2(-0.25, 6), v2(0, 0), x_d, 0.0, g.k_star, g.k_tilde).u == doctest::Approx(-125.8).epsilon(0.02));
}

TEST_CASE("MFC equals the flatness-based law when x = x*")
{
    const MsdPlant plant(MsdParams{});
    const GainSet g = paper_gains();
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const Vector x = v2(u(rng), u(rng));
        const Vector x_d = v2(u(rng), u(rng));
        const double ydn = u(rng);
        const MfcControl c = control_mfc(plant, x, x, x_d, ydn, g.k_star, g.k_tilde);
        const double flat = control_sl(plant, x, x_d, ydn, g.k_star);
        CHECK(std::abs(c.u - flat) <= 1e-12 * std::max(1.0, std::abs(flat)));
        CHECK(c.u_tilde == doctest::Approx(0.0));
    }
}

TEST_CASE("split and combined MFC laws agree")
{
    // State-dependent g so that the (g - g*) u* correction matters.
    const FunctionPlant plant(
        2, [](const Vector& x) { return -std::sin(x(0)) - 0.3 * x(1); },
        [](const Vector& x) { return 2.0 + std::cos(x(0)); }, [](const Vector&) { return 0.0; },
        default_msd_domain());
    const GainSet g = paper_gains();
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        const Vector x = v2(u(rng), u(rng));
        const Vector xs = v2(u(rng), u(rng));
        const Vector x_d = v2(u(rng), u(rng));
        const double ydn = u(rng);
        const MfcControl c = control_mfc(plant, x, xs, x_d, ydn, g.k_star, g.k_tilde);
        const double combined =
            (-plant.f(x) + ydn + g.k_star.dot(xs - x_d) + g.k_tilde.dot(x - xs)) / plant.g(x);
        CHECK(std::abs(c.u_star + c.u_tilde - c.u) <= 1e-12 * std::max(1.0, std::abs(c.u)));
        CHECK(std::abs(c.u - combined) <= 1e-12 * std::max(1.0, std::abs(combined)));
    }
}

TEST_CASE("control_sl and control_fflin")
{
    const MsdParams p;
    const MsdPlant plant(p);
    const GainSet g = paper_gains();
    CHECK(control_sl(plant, v2(0, 0), v2(0.75, 0), 0.0, g.k_tilde) == doctest::Approx(309.81));
    CHECK(control_sl(plant, v2(0, 0), v2(2, 0), 0.0, g.k_tilde) == doctest::Approx(809.81));

    const MsdPlant nominal = plant.nominal();
    CHECK(control_sl(nominal, v2(0.75, 0), v2(0.75, 0), 0.0, g.k_tilde) == doctest::Approx(-p.m * msd_f(p, v2(0.75, 0))));

    CHECK(control_fflin(plant, v2(0.75, 0), 0.0, 0.0) == doctest::Approx(9.81 + 1.5 * (1 + 0.25 * 0.5625) * 0.75).epsilon(1e-9));
    CHECK(control_fflin(plant, v2(0.75, 0), 0.0, 0.0) == doctest::Approx(11.09).epsilon(1e-3));
    // At x = x_d the feedback vanishes and FFLIN equals the flatness law.
    ControllerSpec ff = spec_for(ControllerKind::FFLIN, 0.75);
    CHECK(control_input(plant, ff, 0.0, v2(0.75, 0), v2(0.75, 0)) ==
          doctest::Approx(control_sl(plant, v2(0.75, 0), v2(0.75, 0), 0.0, g.k_tilde)));
}

TEST_CASE("vanishing input gain")
{
    const FunctionPlant plant(
        2, [](const Vector&) { return 0.0; }, [](const Vector&) { return 0.0; }, [](const Vector&) { return 0.0; },
        default_msd_domain());
    CHECK_THROWS_AS(control_sl(plant, v2(0, 0), v2(0, 0), 0.0, paper_gains().k_star), NumericalError);
}

TEST_CASE("step_rk4")
{
    const Scalar x = step_rk4([](double, const Scalar& s) { return Scalar(-s); }, 0.0, Scalar(1.0), 0.1);
    CHECK(x(0) == doctest::Approx(0.904837).epsilon(1e-6));
    const Scalar y = step_rk4([](double, const Scalar&) { return Scalar(0.0); }, 0.0, Scalar(3.5), 0.1);
    CHECK(y(0) == 3.5);

    const double e1 = rk4_error(0.1), e2 = rk4_error(0.05), e3 = rk4_error(0.025);
    CHECK(std::log2(e1 / e2) >= 3.9);
    CHECK(std::log2(e2 / e3) >= 3.9);
}

TEST_CASE("integration failure carries its time")
{
    const FunctionPlant plant(
        2, [](const Vector& x) { return 1e3 * x(0) * x(0) * x(0); }, [](const Vector&) { return 1.0; },
        [](const Vector&) { return 0.0; }, default_msd_domain());
    ControllerSpec s = spec_for(ControllerKind::FFLIN, 0.0);
    s.fflin_gain = Vector(v2(0, 0));
    try {
        simulate_closed_loop(plant, s, v2(1, 0), 10.0, 1e-3);
        FAIL("expected IntegrationFailure");
    } catch (const IntegrationFailure& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 10.0);
    }
}

TEST_CASE("reference")
{
    const Reference r = Reference::trajectory([](double t) {
        Vector d(3);
        d << std::sin(t), std::cos(t), -std::sin(t);
        return d;
    });
    CHECK_FALSE(r.is_set_point());
    CHECK(r.state(0.5, 2)(1) == doctest::Approx(std::cos(0.5)));
    CHECK(r.derivatives(0.5, 2).size() == 3);
    const Reference c = Reference::set_point(2.0);
    CHECK(c.derivatives(1.0, 2) == Vector(Eigen::Vector3d(2, 0, 0)));
    CHECK(to_string(ControllerKind::FFLIN) == "FFLIN");
    CHECK(parse_controller_kind("MFC") == ControllerKind::MFC);
}

TEST_CASE("scenario 1 simulations")
{
    const MsdParams p;
    const MsdPlant plant(p);
    const GainSet g = paper_gains();

    const Trajectory mfc = simulate_closed_loop(plant, spec_for(ControllerKind::MFC, 0.75), v2(0, 0), 10.0, 1e-3);
    CHECK(mfc.size() == 10001);
    CHECK(mfc.t.back() == doctest::Approx(10.0));
    CHECK(std::abs(mfc.x.back()(0) - 0.75) / 0.75 < 1e-3);
    CHECK(std::abs(mfc.x.back()(0) - 0.75) < 7.5e-4);

    const Trajectory sl = simulate_closed_loop(plant, spec_for(ControllerKind::SL, 0.75), v2(0, 0), 10.0, 1e-3);
    CHECK(sl.x.back()(0) == doctest::Approx(0.782).epsilon(2e-3));
    const EquilibriumSet eq_sl = solve_steady_state(p, g, LoopKind::SL, 0.75);
    const Metrics m_sl = metrics(sl, Vector(eq_sl.steady_state()), 0.75);
    CHECK(m_sl.steady_state_error_pct == doctest::Approx(4.3).epsilon(0.3 / 4.3));

    const Trajectory slhg = simulate_closed_loop(plant, spec_for(ControllerKind::SLHG, 0.75), v2(0, 0), 10.0, 1e-3);
    const EquilibriumSet eq_hg = solve_steady_state(p, g, LoopKind::SLHG, 0.75);
    const Metrics m_hg = metrics(slhg, Vector(eq_hg.steady_state()), 0.75);
    CHECK(m_hg.u0 == doctest::Approx(310).epsilon(0.02));
    CHECK(m_hg.peak_abs_u >= m_hg.u0);
    CHECK(m_hg.settle_time < 10.0);

    for (const Vector2 x0 : {Vector2(0.1, -8), Vector2(-0.25, 6)}) {
        const Trajectory t = simulate_closed_loop(plant, spec_for(ControllerKind::MFC, 0.75), Vector(x0), 10.0, 1e-3);
        CHECK(tracking_settle_time(t, 0.01) < 0.5);
    }
    const Trajectory pert = simulate_closed_loop(plant, spec_for(ControllerKind::MFC, 0.75), v2(-0.25, 6), 1.0, 1e-3);
    CHECK(pert.u.front() == doctest::Approx(-125.77).epsilon(0.02));
}

TEST_CASE("MFC with x0* = x_d reproduces SLHG")
{
    const MsdPlant plant(MsdParams{});
    const Vector2 x_d(0.75, 0);
    const Trajectory a = simulate_closed_loop(plant, spec_for(ControllerKind::MFC, 0.75, x_d), v2(0, 0), 10.0, 1e-3);
    const Trajectory b = simulate_closed_loop(plant, spec_for(ControllerKind::SLHG, 0.75), v2(0, 0), 10.0, 1e-3);
    REQUIRE(a.size() == b.size());
    double worst_u = 0.0, worst_star = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst_u = std::max(worst_u, std::abs(a.u[i] - b.u[i]));
        worst_star = std::max(worst_star, (a.x_star[i] - Vector(x_d)).norm());
    }
    CHECK(worst_u <= 1e-9);
    CHECK(worst_star == 0.0);
}

TEST_CASE("nominal plant: every controller reaches the set point")
{
    const MsdPlant nominal = MsdPlant(MsdParams{}).nominal();
    for (ControllerKind k : {ControllerKind::SL, ControllerKind::SLHG, ControllerKind::MFC, ControllerKind::FFLIN}) {
        const Trajectory t = simulate_closed_loop(nominal, spec_for(k, 0.75), v2(0, 0), 10.0, 1e-3);
        CHECK((t.x.back() - Vector(v2(0.75, 0))).norm() < 1e-6);
    }
}

TEST_CASE("holding an equilibrium reports its offset")
{
    const MsdParams p;
    const MsdPlant plant(p);
    const EquilibriumSet eq = solve_steady_state(p, paper_gains(), LoopKind::SL, 0.75);
    const Vector x_s(eq.steady_state());
    const Trajectory t = simulate_closed_loop(plant, spec_for(ControllerKind::SL, 0.75), x_s, 2.0, 1e-3);
    const Metrics m = metrics(t, x_s, 0.75);
    CHECK(m.steady_state_error_pct == doctest::Approx(100 * eq.offset() / 0.75).epsilon(1e-9));
    CHECK(m.settle_time == 0.0);
}

TEST_CASE("monitor and CSV output")
{
    const MsdParams p;
    const MsdPlant plant(p);
    ControllerSpec s = spec_for(ControllerKind::SLHG, 0.75);
    const Vector x_s(solve_steady_state(p, s.gains, LoopKind::SLHG, 0.75).steady_state());
    s.monitor = LyapunovMonitor{solve_lyapunov(s.gains.k_star), 1000.0, x_s};
    const Trajectory t = simulate_closed_loop(plant, s, v2(0.7, 0.1), 0.01, 1e-3);
    CHECK(t.size() == 11);
    CHECK(std::isfinite(t.V.front()));
    std::ostringstream os;
    write_trajectory_csv(os, t);
    std::istringstream lines(os.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x1,x2,xstar1,xstar2,u,V");
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);)
        ++rows;
    CHECK(rows == 11);
}
