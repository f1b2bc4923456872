#pragma once

#include "mfccert/plant.hpp"
#include "mfccert/synthesis.hpp"

#include <string_view>
#include <vector>

namespace mfc {

/// a3 x^3 + a2 x^2 + a1 x + a0.
struct Cubic {
    double a3 = 0.0;
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    double operator()(double x) const { return ((a3 * x + a2) * x + a1) * x + a0; }
    double derivative(double x) const { return (3.0 * a3 * x + 2.0 * a2) * x + a1; }
    double max_abs_coefficient() const;
};

/// All real roots, ascending, each polished by up to five Newton steps and
/// with coincident roots (within 1e-9) collapsed. Degree drops gracefully to
/// quadratic/linear when leading coefficients vanish; throws
/// std::invalid_argument for the zero polynomial.
std::vector<double> solve_cubic(const Cubic& c);

/// Steady-state polynomial of the two-loop scheme in the process error
/// x~1 = x_s1 - y_d:
///   k1* eps^-2 x~1 - [ sigma1/m (y_d + x~1)^3 + dk/m (y_d + x~1) ].
Cubic mfc_steady_polynomial(const MsdParams& p, double k1_star, double epsilon, double y_d);

/// Steady-state polynomial of a single loop with first gain k1 in x1:
///   k1 (x1 - y_d) - [ sigma1/m x1^3 + dk/m x1 ].
Cubic sl_steady_polynomial(const MsdParams& p, double k1, double y_d);

enum class LoopKind { SL, SLHG, MFC };

enum class Stability { stable, unstable, marginal };

std::string_view to_string(LoopKind kind);
std::string_view to_string(Stability s);

/// First-order stability of an equilibrium. For SL/SLHG `root` is x_s1 and
/// the Jacobian is A + b k^T + b grad(phi)(x_s)^T. For MFC `root` is x~_s1 and
/// the shifted scaled-error Jacobian eps^-1 (A + b k*^T) + b grad(phi)(x_s)^T D
/// is used (model error at zero).
Stability classify_stability(double root, LoopKind kind, const MsdParams& p, const GainSet& gains, double y_d);

/// Which variable the steady-state polynomial is expressed in.
enum class SteadyFrame { process_error, process };

struct EquilibriumSet {
    LoopKind kind = LoopKind::SL;
    SteadyFrame frame = SteadyFrame::process;
    double y_d = 0.0;
    Cubic coefficients;
    std::vector<double> roots;
    std::vector<Stability> stability;
    std::size_t selected = 0;
    bool tie = false;

    double selected_root() const { return roots.at(selected); }
    /// Physical steady state (x_s1, 0) belonging to the selected root.
    Vector2 steady_state() const;
    /// x_s1 - y_d of the selected root.
    double offset() const;
};

/// Builds and solves the steady-state polynomial for the given loop,
/// classifies every root and selects the one closest to zero (MFC frame) or
/// closest to y_d (SL frame); ties go to the smaller root and set `tie`.
EquilibriumSet solve_steady_state(const MsdParams& p, const GainSet& gains, LoopKind kind, double y_d);

struct SweepRow {
    double y_d = 0.0;
    std::vector<double> sl_roots;
    std::vector<double> mfc_roots;
};

/// Roots of the single-loop (gain k1*) and two-loop polynomials on a uniform y_d grid.
std::vector<SweepRow> steady_state_sweep(const MsdParams& p, const GainSet& gains, double y_min, double y_max, std::size_t count);

/// Smallest y_d in [y_lo, y_hi] at which the single-loop polynomial with gain
/// k1 drops from three real roots to one, located by bisection to `tol`.
/// Returns NaN when the root count does not change over the interval.
double sl_multiplicity_loss(const MsdParams& p, double k1, double y_lo, double y_hi, double tol = 1e-6);

} // namespace mfc
