#include "mfccert/falsify.hpp"

#include "mfccert/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

namespace mfc {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
{
}

std::uint64_t CounterRng::next_u64()
{
    return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
}

double CounterRng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::normal()
{
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    return r * std::cos(th);
}

std::vector<InitialCondition> sample_in_set(const RoaEstimate& e, std::size_t count, std::uint64_t seed)
{
    if (!e.valid)
        throw std::invalid_argument("sample_in_set: estimate is not valid: " + e.reason);
    const int d = e.sampling_dimension();
    const Matrix root = linalg::symmetric_inverse_sqrt(e.sampling_form()) * std::sqrt(0.999 * e.level);

    std::vector<InitialCondition> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, i);
        Vector w(d);
        double norm = 0.0;
        do {
            for (int j = 0; j < d; ++j)
                w(j) = rng.normal();
            norm = w.norm();
        } while (norm == 0.0);
        const double radius = std::pow(rng.uniform(), 1.0 / d);
        out.push_back(e.from_sampling_coords(Vector(root * (w * (radius / norm)))));
    }
    return out;
}

std::string_view to_string(FailureMode mode)
{
    switch (mode) {
    case FailureMode::diverged: return "diverged";
    case FailureMode::wrong_equilibrium: return "wrong-equilibrium";
    case FailureMode::v_increase: return "V-increase";
    }
    return "?";
}

ControllerKind default_controller(RoaKind kind)
{
    switch (kind) {
    case RoaKind::MFC1:
    case RoaKind::MFC2: return ControllerKind::MFC;
    case RoaKind::SL: return ControllerKind::SL;
    case RoaKind::SLHG: return ControllerKind::SLHG;
    }
    return ControllerKind::MFC;
}

double gamma_empirical(const MsdParams& p, const Box& region, std::size_t pairs, std::uint64_t seed)
{
    if (pairs == 0)
        throw std::invalid_argument("gamma_empirical: need at least one pair");
    if (region.dimension() != 2)
        throw std::invalid_argument("gamma_empirical: region must be two-dimensional");
    const Vector span = region.upper - region.lower;
    if (span.maxCoeff() == 0.0)
        return 0.0;

    double best = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        CounterRng rng(seed, i);
        Vector a(2), b(2);
        for (int j = 0; j < 2; ++j) {
            a(j) = region.lower(j) + span(j) * rng.uniform();
            b(j) = region.lower(j) + span(j) * rng.uniform();
        }
        const double dist = (a - b).norm();
        if (dist == 0.0)
            continue;
        best = std::max(best, std::abs(msd_phi(p, a) - msd_phi(p, b)) / dist);
    }
    return best;
}

DecreaseCheck lyapunov_decrease_check(const Trajectory& traj, double tolerance, double level)
{
    DecreaseCheck out;
    const double floor = std::isfinite(level) ? 1e-12 * level : 0.0;
    for (std::size_t k = 0; k + 1 < traj.V.size(); ++k) {
        const double v0 = traj.V[k];
        const double v1 = traj.V[k + 1];
        if (std::isnan(v0) || std::isnan(v1))
            break;
        if (v0 > level) {
            out.exited = true;
            out.exit_time = traj.t[k];
            break;
        }
        if (v1 > v0 * (1.0 + tolerance) + floor) {
            out.pass = false;
            out.violation_time = traj.t[k + 1];
            break;
        }
    }
    return out;
}

FalsificationReport falsify_roa(const RoaEstimate& e, const Plant& plant, const MsdParams& params,
                                const GainSet& gains, const FalsifyOptions& opt)
{
    if (!e.valid)
        throw std::invalid_argument("falsify_roa: estimate is not valid: " + e.reason);

    FalsificationReport report;
    report.kind = e.kind;
    report.controller = opt.controller.value_or(default_controller(e.kind));
    report.level = e.total_level();
    report.samples = opt.count;

    const auto initial = sample_in_set(e, opt.count, opt.seed);

    ControllerSpec spec;
    spec.kind = report.controller;
    spec.gains = gains;
    spec.reference = Reference::set_point(e.x_d(0));
    spec.monitor = LyapunovMonitor{Matrix(e.P), e.vartheta, Vector(e.x_s)};

    std::vector<std::optional<Violation>> outcome(initial.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < initial.size(); i = next++) {
            const InitialCondition& ic = initial[i];
            ControllerSpec local = spec;
            local.x0_star = ic.x0_star;
            const double d0 = (ic.x0 - e.x_s).norm();
            Violation v;
            v.index = i;
            v.initial = ic;
            try {
                const Trajectory traj = simulate_closed_loop(plant, local, Vector(ic.x0), opt.horizon, opt.step);
                const double dist = (traj.x.back() - Vector(e.x_s)).norm();
                v.time = traj.t.back();
                if (!std::isfinite(dist) || dist > 1e3 * (1.0 + d0)) {
                    v.mode = FailureMode::diverged;
                    outcome[i] = v;
                } else if (dist > std::max(0.01 * d0, 0.01)) {
                    v.mode = FailureMode::wrong_equilibrium;
                    outcome[i] = v;
                } else {
                    const DecreaseCheck dc = lyapunov_decrease_check(traj, opt.decrease_tolerance, report.level);
                    if (!dc.pass) {
                        v.mode = FailureMode::v_increase;
                        v.time = dc.violation_time;
                        outcome[i] = v;
                    }
                }
            } catch (const IntegrationFailure& err) {
                v.mode = FailureMode::diverged;
                v.time = err.time();
                outcome[i] = v;
            }
        }
    };

    unsigned threads = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, initial.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    for (auto& o : outcome)
        if (o)
            report.violations.push_back(*o);
    report.converged = report.samples - report.violations.size();

    if (!initial.empty()) {
        Vector lo = initial.front().x0;
        Vector hi = lo;
        for (const auto& ic : initial) {
            lo = lo.cwiseMin(Vector(ic.x0));
            hi = hi.cwiseMax(Vector(ic.x0));
        }
        const Box box(lo, hi);
        report.analytic_gamma = phi_lipschitz_sup(params, box);
        report.empirical_gamma = gamma_empirical(params, box, opt.lipschitz_pairs, opt.seed);
    }
    return report;
}

void write_violations_csv(std::ostream& os, const FalsificationReport& report)
{
    os << "index,mode,time,x1,x2,xstar1,xstar2\n";
    const auto old = os.precision(12);
    for (const auto& v : report.violations)
        os << v.index << ',' << to_string(v.mode) << ',' << v.time << ',' << v.initial.x0(0) << ','
           << v.initial.x0(1) << ',' << v.initial.x0_star(0) << ',' << v.initial.x0_star(1) << '\n';
    os.precision(old);
}

} // namespace mfc
