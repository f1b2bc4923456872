// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include "mfccert/config.hpp"
#include "mfccert/falsify.hpp"
#include "mfccert/report.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mfc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool within_rel(double v, double ref, double tol)
{
    return std::isfinite(v) && std::abs(v - ref) <= tol * std::abs(ref);
}

bool within_abs(double v, double ref, double tol)
{
    return std::isfinite(v) && std::abs(v - ref) <= tol;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail)
{
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

struct Fmt {
    std::ostringstream os;
    template <class T>
    Fmt& operator<<(const T& v)
    {
        os << v;
        return *this;
    }
    operator std::string() const { return os.str(); }
};

Vector k_paper()
{
    return Vector(Vector2(-4, -4));
}

Matrix P_paper()
{
    Matrix P(2, 2);
    P << 36, 4, 4, 5;
    return P / 32.0;
}

double u0_of(const Analysis& a, ControllerKind kind, const Vector2& x0)
{
    const MsdPlant plant(a.config.plant, a.config.domain);
    ControllerSpec spec;
    spec.kind = kind;
    spec.gains = a.gains;
    spec.reference = Reference::set_point(a.config.y_d);
    const Vector2 xs = kind == ControllerKind::MFC ? a.config.x0_star : Vector2(a.config.y_d, 0.0);
    return control_input(plant, spec, 0.0, Vector(x0), Vector(xs));
}

const SimulationRun* find_run(const std::vector<SimulationRun>& runs, const std::string& label)
{
    for (const auto& r : runs)
        if (r.label == label)
            return &r;
    return nullptr;
}

double error_pct(const EquilibriumSet& eq)
{
    return 100.0 * std::abs(eq.offset()) / std::abs(eq.y_d);
}

void criterion1()
{
    const auto t0 = Clock::now();
    const Matrix P = solve_lyapunov(k_paper());
    const double dt = seconds_since(t0);
    const double err = (P - P_paper()).cwiseAbs().maxCoeff();
    report(1, "P matrix", err <= 1e-10 && dt < 1e-3, Fmt() << "max error " << err << ", " << dt * 1e3 << " ms");
}

void criterion2()
{
    const HighGain h = high_gain(k_paper(), 0.1);
    const bool exact = h.k_tilde(0) == -400.0 && h.k_tilde(1) == -40.0;
    report(2, "gain scaling", exact, Fmt() << "k~ = (" << h.k_tilde(0) << ", " << h.k_tilde(1) << ")");
}

void criterion3(const Analysis& a)
{
    const auto& c = a.cert;
    const bool pass = within_rel(c.gamma_mfc, 24.9256, 3e-3) && within_rel(c.gamma_sl, 2.4988, 1e-3) &&
                      within_rel(c.gamma_slhg, 24.9878, 1e-3);
    report(3, "robustness bounds", pass,
           Fmt() << "Gamma_MFC " << c.gamma_mfc << ", Gamma_SL " << c.gamma_sl << ", Gamma_SLHG " << c.gamma_slhg);
}

void criterion4(const Analysis& a)
{
    RoaInputs in;
    in.params = a.config.plant;
    in.gains = a.gains;
    in.cert = a.cert;
    in.y_d = a.config.y_d;
    in.x0_star = a.config.x0_star;
    const auto t0 = Clock::now();
    const RoaEstimate sl = estimate_sl(in);
    const RoaEstimate slhg = estimate_slhg(in);
    const RoaEstimate m2 = estimate_mfc2(in);
    const double dt = seconds_since(t0);
    const bool pass = sl.valid && slhg.valid && m2.valid && within_rel(sl.level, 0.75, 0.02) &&
                      within_rel(slhg.level, 14.74, 0.01) && within_rel(m2.c_star, 632.813, 1e-3) &&
                      within_rel(m2.c_tilde, 9.2, 0.02) && within_rel(m2.total_level(), 642.045, 0.01) && dt < 1e-2;
    report(4, "ROA levels (scenario 1)", pass,
           Fmt() << "c_SL " << sl.level << ", c_SLHG " << slhg.level << ", c* " << m2.c_star << ", c~ " << m2.c_tilde
                 << ", c*+c~ " << m2.total_level() << ", " << dt * 1e3 << " ms");
}

void criterion5(const SteadyStates& s)
{
    const double sl = error_pct(s.sl), mfc = error_pct(s.mfc), slhg = error_pct(s.slhg);
    const bool pass = within_abs(sl, 4.3, 0.3) && mfc < 0.1 && slhg < 0.1 && within_abs(s.multiplicity_loss, 1.95, 0.05);
    report(5, "steady states", pass,
           Fmt() << "SL error " << sl << "%, MFC error " << mfc << "%, SLHG error " << slhg
                 << "%, SL multiplicity lost at y_d = " << s.multiplicity_loss);
}

void criterion6(const Analysis& a1, const Analysis& a2)
{
    const double slhg1 = u0_of(a1, ControllerKind::SLHG, a1.config.x0);
    const double slhg2 = u0_of(a2, ControllerKind::SLHG, a2.config.x0);
    const double mfc0 = u0_of(a1, ControllerKind::MFC, a1.config.x0);
    const double mfc1 = u0_of(a1, ControllerKind::MFC, Vector2(0.1, -8));
    const double mfc2 = u0_of(a1, ControllerKind::MFC, Vector2(-0.25, 6));
    const double gap = std::abs(mfc2 - (-127.0)) / 127.0;
    const bool pass = within_rel(slhg1, 310, 0.02) && within_rel(slhg2, 810, 0.02) && within_abs(mfc0, 13, 1) &&
                      within_rel(mfc1, 290, 0.02) && gap < 0.02;
    report(6, "control peaks", pass,
           Fmt() << "u_SLHG(0) " << slhg1 << " / " << slhg2 << ", u_MFC(0) " << mfc0 << ", " << mfc1 << ", " << mfc2
                 << " (published -127, gap " << 100 * gap << "% from rounding)");
}

void criterion7(const Analysis& a, const std::vector<SimulationRun>& runs)
{
    const SimulationRun* nominal = find_run(runs, "MFC");
    const SimulationRun* p1 = find_run(runs, "MFC_perturbed1");
    const SimulationRun* p2 = find_run(runs, "MFC_perturbed2");
    const bool present = nominal && nominal->trajectory && p1 && p1->trajectory && p2 && p2->trajectory;
    const double end = present ? std::abs(nominal->trajectory->x.back()(0) - 0.75) : NAN;
    const double r1 = present ? p1->reconverge_time : NAN;
    const double r2 = present ? p2->reconverge_time : NAN;

    const MsdPlant plant(a.config.plant, a.config.domain);
    ControllerSpec spec;
    spec.kind = ControllerKind::MFC;
    spec.gains = a.gains;
    spec.reference = Reference::set_point(0.75);
    spec.x0_star = Vector(Vector2::Zero());
    const auto t0 = Clock::now();
    simulate_closed_loop(plant, spec, Vector(Vector2::Zero()), 10.0, 1e-3);
    const double dt = seconds_since(t0);

    const bool pass = present && end < 7.5e-4 && r1 < 0.5 && r2 < 0.5 && dt < 1.0;
    report(7, "simulation endpoints", pass,
           Fmt() << "|x1(10) - 0.75| = " << end << ", re-convergence " << r1 << " s / " << r2 << " s, " << dt
                 << " s per run");
}

void criterion8(const Analysis& a)
{
    std::vector<std::string> failed;
    const MsdPlant plant(a.config.plant, a.config.domain);
    const GainSet& g = a.gains;

    if (a.cert.residual > 1e-10)
        failed.push_back("residual");

    {
        ControllerSpec m;
        m.kind = ControllerKind::MFC;
        m.gains = g;
        m.reference = Reference::set_point(0.75);
        m.x0_star = Vector(Vector2(0.75, 0));
        ControllerSpec s = m;
        s.kind = ControllerKind::SLHG;
        const Trajectory tm = simulate_closed_loop(plant, m, Vector(Vector2::Zero()), 10.0, 1e-3);
        const Trajectory ts = simulate_closed_loop(plant, s, Vector(Vector2::Zero()), 10.0, 1e-3);
        double worst = 0.0;
        for (std::size_t i = 0; i < tm.size(); ++i)
            worst = std::max(worst, std::abs(tm.u[i] - ts.u[i]));
        if (worst > 1e-9)
            failed.push_back("MFC-SLHG degeneration");
    }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-5, 5);
    bool flat = true, split = true;
    for (int i = 0; i < 1000; ++i) {
        const Vector x = Vector(Vector2(u(rng), u(rng)));
        const Vector xs = Vector(Vector2(u(rng), u(rng)));
        const Vector x_d = Vector(Vector2(u(rng), u(rng)));
        const double ydn = u(rng);
        const MfcControl same = control_mfc(plant, x, x, x_d, ydn, g.k_star, g.k_tilde);
        const double law = control_sl(plant, x, x_d, ydn, g.k_star);
        flat = flat && std::abs(same.u - law) <= 1e-12 * std::max(1.0, std::abs(law));
        const MfcControl c = control_mfc(plant, x, xs, x_d, ydn, g.k_star, g.k_tilde);
        const double combined = (-plant.f(x) + ydn + g.k_star.dot(xs - x_d) + g.k_tilde.dot(x - xs)) / plant.g(x);
        split = split && std::abs(c.u_star + c.u_tilde - combined) <= 1e-12 * std::max(1.0, std::abs(combined));
    }
    if (!flat)
        failed.push_back("flatness degeneration");
    if (!split)
        failed.push_back("combined-vs-split law");

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int draws = 0;
    bool ordered = true;
    while (draws < 1000) {
        const double vartheta = 1.0 + std::pow(10.0, 4 * u01(rng) - 2);
        const double lambda = 0.01 + 2 * u01(rng);
        const double r = 0.1 + 20 * u01(rng);
        const double cs = u01(rng) * lambda * r * r / 2;
        const LevelComparison d = compare_levels(cs, r, vartheta, lambda);
        if (d.c_tilde_1 <= 0 || d.c_tilde_2 <= 0)
            continue;
        ordered = ordered && d.difference > 0;
        ++draws;
    }
    if (!ordered)
        failed.push_back("level comparison");

    const Box& box = a.config.domain;
    if (gamma_empirical(a.config.plant, box, 100000, 1) > phi_lipschitz_sup(a.config.plant, box))
        failed.push_back("Lipschitz oracle");

    using S = Eigen::Matrix<double, 1, 1>;
    auto err = [](double h) {
        S x(1.0);
        const int n = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < n; ++i)
            x = step_rk4([](double, const S& s) { return S(-s); }, i * h, x, h);
        return std::abs(x(0) - std::exp(-1.0));
    };
    const double order = std::log2(err(0.05) / err(0.025));
    if (order < 3.9)
        failed.push_back("RK4 order");

    std::string detail = failed.empty() ? "all properties hold" : "failed:";
    for (const auto& f : failed)
        detail += " " + f + ";";
    report(8, "property suites", failed.empty(), Fmt() << detail << " (RK4 order " << order << ")");
}

void criterion9(const std::vector<FalsificationReport>& reports, double dt)
{
    std::size_t sets = 0, violations = 0, samples = 0;
    for (const auto& r : reports) {
        ++sets;
        samples += r.samples;
        violations += r.violations.size();
    }
    const bool pass = sets > 0 && violations == 0 && dt < 120.0;
    report(9, "falsification soundness", pass,
           Fmt() << violations << " violations over " << sets << " certified sets (" << samples << " samples), " << dt
                 << " s");
}

} // namespace

int main()
{
    try {
        const Analysis a1 = analyze(preset("scenario1"));
        const Analysis a2 = analyze(preset("scenario2"));
        const SteadyStates s1 = steady_states(a1);

        criterion1();
        criterion2();
        criterion3(a1);
        criterion4(a1);
        criterion5(s1);
        criterion6(a1, a2);
        criterion7(a1, simulate_all(a1, s1));
        criterion8(a1);

        const RoaResult r1 = roa(a1);
        const RoaResult r2 = roa(a2);
        const auto t0 = Clock::now();
        std::vector<FalsificationReport> reports = falsify_all(a1, r1);
        for (auto& r : falsify_all(a2, r2))
            reports.push_back(std::move(r));
        criterion9(reports, seconds_since(t0));
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", failures == 0 ? "all acceptance criteria met" : "acceptance criteria FAILED");
    return failures == 0 ? 0 : 1;
}
