#include "mfccert/steady_state.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace mfc;

namespace {

GainSet paper_gains()
{
    const std::vector<std::complex<double>> roots{-2.0, -2.0};
    return design_gains(roots, 0.1);
}

MsdParams zero_uncertainty()
{
    MsdParams p;
    p.delta_k = p.delta_c_d = p.delta_alpha = 0.0;
    return p;
}

} // namespace

TEST_CASE("solve_cubic examples")
{
    const auto r1 = solve_cubic({1, 0, -1, 0});
    REQUIRE(r1.size() == 3);
    CHECK(r1[0] == doctest::Approx(-1));
    CHECK(std::abs(r1[1]) < 1e-14);
    CHECK(r1[2] == doctest::Approx(1));

    const auto r2 = solve_cubic({1, -6, 11, -6});
    REQUIRE(r2.size() == 3);
    CHECK(r2[0] == doctest::Approx(1));
    CHECK(r2[1] == doctest::Approx(2));
    CHECK(r2[2] == doctest::Approx(3));

    const auto r3 = solve_cubic({0.147, 0, -3.925, 8});
    REQUIRE(r3.size() == 1);
    CHECK(r3[0] == doctest::Approx(-5.99).epsilon(0.02 / 5.99));
}

TEST_CASE("solve_cubic degenerate inputs")
{
    const auto q = solve_cubic({0, 1, 0, -4});
    REQUIRE(q.size() == 2);
    CHECK(q[0] == doctest::Approx(-2));
    CHECK(q[1] == doctest::Approx(2));
    const auto l = solve_cubic({0, 0, 2, -1});
    REQUIRE(l.size() == 1);
    CHECK(l[0] == doctest::Approx(0.5));
    const auto d = solve_cubic({1, -3, 3, -1});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == doctest::Approx(1).epsilon(1e-5));
    CHECK(solve_cubic({0, 1, 0, 1}).empty());
    CHECK_THROWS_AS(solve_cubic({0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("roots back-substitute")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 2000; ++i) {
        const Cubic c{u(rng), u(rng), u(rng), u(rng)};
        const double scale = c.max_abs_coefficient();
        for (double r : solve_cubic(c)) {
            const double mag = std::max(1.0, std::abs(r));
            CHECK(std::abs(c(r)) <= 1e-9 * scale * mag * mag * mag);
        }
    }
}

TEST_CASE("steady-state polynomials")
{
    const MsdParams p;
    const GainSet g = paper_gains();

    const EquilibriumSet mfc = solve_steady_state(p, g, LoopKind::MFC, 0.75);
    CHECK(mfc.frame == SteadyFrame::process_error);
    CHECK(mfc.selected_root() == doctest::Approx(2.96e-4).epsilon(0.05));
    CHECK(mfc.stability[mfc.selected] == Stability::stable);

    const EquilibriumSet nominal = solve_steady_state(zero_uncertainty(), g, LoopKind::MFC, 1.3);
    REQUIRE(nominal.roots.size() == 1);
    CHECK(nominal.roots[0] == 0.0);

    CHECK(std::abs(solve_steady_state(p, g, LoopKind::MFC, 2.0).selected_root()) < 1e-2);

    const EquilibriumSet sl = solve_steady_state(p, g, LoopKind::SL, 0.75);
    CHECK(sl.selected_root() == doctest::Approx(0.782).epsilon(1e-3));
    CHECK(100 * sl.offset() / 0.75 == doctest::Approx(4.3).epsilon(0.3 / 4.3));
    CHECK(sl.stability[sl.selected] == Stability::stable);

    const EquilibriumSet sl2 = solve_steady_state(p, g, LoopKind::SL, 2.0);
    REQUIRE(sl2.roots.size() == 1);
    CHECK(sl2.roots[0] == doctest::Approx(-6.0).epsilon(0.1 / 6));
    CHECK(sl2.stability[0] == Stability::unstable);

    const EquilibriumSet slhg = solve_steady_state(p, g, LoopKind::SLHG, 0.75);
    CHECK(slhg.selected_root() == doctest::Approx(0.7503).epsilon(1e-3));

    const Cubic c = sl_steady_polynomial(p, -4, 2.0);
    CHECK(c.a3 == doctest::Approx(0.147));
    CHECK(c.a0 == doctest::Approx(8.0));
}

TEST_CASE("classify_stability without uncertainty is always stable")
{
    const GainSet g = paper_gains();
    for (LoopKind kind : {LoopKind::SL, LoopKind::SLHG, LoopKind::MFC})
        CHECK(classify_stability(0.0, kind, zero_uncertainty(), g, 0.0) == Stability::stable);
}

TEST_CASE("MFC and SLHG share their steady state")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 1.5), yd(0.05, 2.5);
    const GainSet g = paper_gains();
    for (int i = 0; i < 500; ++i) {
        MsdParams p;
        p.k *= u(rng);
        p.c_d *= u(rng);
        p.alpha *= u(rng);
        p.m *= u(rng);
        p.delta_k *= u(rng);
        p.delta_c_d *= u(rng);
        p.delta_alpha *= u(rng);
        const double y = yd(rng);
        const double a = solve_steady_state(p, g, LoopKind::MFC, y).steady_state()(0);
        const double b = solve_steady_state(p, g, LoopKind::SLHG, y).steady_state()(0);
        CHECK(std::abs(a - b) <= 1e-9);
    }
}

TEST_CASE("single-loop root count drops once near y_d = 1.95")
{
    const MsdParams p;
    const GainSet g = paper_gains();
    const auto rows = steady_state_sweep(p, g, 0.0, 2.5, 251);
    REQUIRE(rows.size() == 251);
    std::size_t transitions = 0;
    double where = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sl_roots.size() != rows[i - 1].sl_roots.size()) {
            ++transitions;
            where = rows[i].y_d;
        }
    CHECK(rows.front().sl_roots.size() == 3);
    CHECK(rows.back().sl_roots.size() == 1);
    CHECK(transitions == 1);
    CHECK(std::abs(where - 1.95) <= 0.05);
    CHECK(sl_multiplicity_loss(p, -4, 0.0, 2.5) == doctest::Approx(1.95).epsilon(0.05 / 1.95));
    CHECK(std::isnan(sl_multiplicity_loss(p, -4, 0.0, 1.0)));
}

TEST_CASE("ties select the smaller root")
{
    // sigma1 = -1, dk = 1.75, k1 = -1.5, y_d = 1: roots 0.5, 1.5 and -2.
    MsdParams p;
    p.k = 1.0;
    p.alpha = 1.0;
    p.delta_alpha = -1.0;
    p.delta_k = 1.75;
    REQUIRE(sigma1(p) == doctest::Approx(-1.0));
    GainSet g;
    g.k_star = Vector2(-1.5, -1.0);
    g.k_tilde = g.k_star;
    g.epsilon = 1.0;
    g.D = Matrix::Identity(2, 2);
    const EquilibriumSet e = solve_steady_state(p, g, LoopKind::SL, 1.0);
    REQUIRE(e.roots.size() == 3);
    CHECK(e.tie);
    CHECK(e.selected_root() == doctest::Approx(0.5));
}
