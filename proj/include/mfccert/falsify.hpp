#pragma once

#include "mfccert/plant.hpp"
#include "mfccert/roa.hpp"
#include "mfccert/simulate.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

namespace mfc {

/// Counter-based generator: draw k of stream s is splitmix64(seed, s, k), so
/// results do not depend on the order in which streams are consumed.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::optional<double> spare_;
};

/// `count` initial conditions drawn uniformly from the 0.999-scaled level set
/// of the estimate, mapped to physical coordinates. Throws
/// std::invalid_argument for an invalid estimate.
std::vector<InitialCondition> sample_in_set(const RoaEstimate& estimate, std::size_t count, std::uint64_t seed);

enum class FailureMode { diverged, wrong_equilibrium, v_increase };

std::string_view to_string(FailureMode mode);

struct Violation {
    std::size_t index = 0;
    InitialCondition initial;
    FailureMode mode = FailureMode::diverged;
    double time = 0.0; // failure time for divergence / V increase, horizon otherwise
};

struct FalsificationReport {
    RoaKind kind = RoaKind::SL;
    ControllerKind controller = ControllerKind::SL;
    double level = 0.0;
    std::size_t samples = 0;
    std::size_t converged = 0;
    std::vector<Violation> violations; // sorted by sample index
    double empirical_gamma = 0.0;
    double analytic_gamma = 0.0;
};

struct FalsifyOptions {
    std::size_t count = 500;
    double horizon = 10.0;
    double step = 1e-3;
    std::uint64_t seed = 1;
    std::optional<ControllerKind> controller; // default follows the estimate kind
    double decrease_tolerance = 1e-9;
    std::size_t lipschitz_pairs = 10000;
    unsigned threads = 0; // 0: hardware concurrency
};

/// Controller certified by an estimate: MFC for MFC1/MFC2, SL (k*) for SL,
/// SLHG (k~) for SLHG.
ControllerKind default_controller(RoaKind kind);

/// Simulates every sample and classifies it. A run converges when its final
/// state lies within 1% of its initial distance to x_s (or within 0.01).
FalsificationReport falsify_roa(const RoaEstimate& estimate, const Plant& plant, const MsdParams& params,
                                const GainSet& gains, const FalsifyOptions& options);

/// Largest sampled difference quotient |phi(a) - phi(b)| / |a - b| over
/// `pairs` uniform pairs from the box; 0 when the box is a single point.
double gamma_empirical(const MsdParams& p, const Box& region, std::size_t pairs, std::uint64_t seed);

struct DecreaseCheck {
    bool pass = true;
    bool exited = false; // state left the level set before the end
    double violation_time = std::numeric_limits<double>::quiet_NaN();
    double exit_time = std::numeric_limits<double>::quiet_NaN();
};

/// Passes iff V(t_k+1) <= V(t_k)(1 + tolerance) + 1e-12 level for every step
/// taken while V stays within `level`; leaving the set ends the check.
DecreaseCheck lyapunov_decrease_check(const Trajectory& traj, double tolerance,
                                      double level = std::numeric_limits<double>::infinity());

/// Columns index,mode,time,x1,x2,xstar1,xstar2.
void write_violations_csv(std::ostream& os, const FalsificationReport& report);

} // namespace mfc
