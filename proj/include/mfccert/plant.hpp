#pragma once

#include "mfccert/types.hpp"

#include <functional>

namespace mfc {

/// Integrator chain of length n: A has ones on the first superdiagonal,
/// b = e_n, c = e_1.
struct BrunovskyDims {
    int n = 2;

    explicit BrunovskyDims(int dim);

    Matrix A() const;
    Vector b() const;
    Vector c() const;
};

/// Axis-aligned box in state space. A box with lower == upper in some
/// coordinate is degenerate but valid.
struct Box {
    Vector lower;
    Vector upper;

    Box(Vector lo, Vector hi);

    int dimension() const { return static_cast<int>(lower.size()); }
    bool contains(const Vector& x) const;
};

/// Mass-spring-damper with hardening spring, gravity and matched parameter
/// uncertainty on k, c_d and alpha.
struct MsdParams {
    double k = 1.5;
    double c_d = 0.3;
    double alpha = 0.5;
    double m = 1.0;
    double g0 = 9.81;
    double delta_k = -0.075;
    double delta_c_d = 0.06;
    double delta_alpha = -0.1;

    /// Throws std::invalid_argument unless m, k, c_d, alpha are positive.
    void validate() const;
};

/// Default Lipschitz domain for the mass-spring-damper: x1 in [-5, 5], x2 in [-10, 10].
Box default_msd_domain();

double msd_f(const MsdParams& p, const Vector& x);
double msd_g(const MsdParams& p, const Vector& x);
double msd_phi(const MsdParams& p, const Vector& x);
Vector msd_grad_phi(const MsdParams& p, const Vector& x);

/// Combined cubic coefficient of the uncertainty:
/// dk (alpha + dalpha)^2 + k dalpha (2 alpha + dalpha).
double sigma1(const MsdParams& p);

/// Worst-case magnitude of sigma1 for the given uncertainty magnitudes.
double sigma1_bar(const MsdParams& p);

/// Exact supremum of |grad phi|_2 over the box (x2 does not enter the
/// gradient, so only the x1 range matters). Throws std::invalid_argument
/// for an inverted box.
double phi_lipschitz_sup(const MsdParams& p, const Box& region);

/// Evaluation interface for plants in Brunovsky form
///   x' = A x + b (f(x) + g(x) u + phi(x)).
class Plant {
public:
    virtual ~Plant() = default;

    virtual int dimension() const = 0;
    virtual double f(const Vector& x) const = 0;
    virtual double g(const Vector& x) const = 0;
    virtual double phi(const Vector& x) const = 0;
    virtual Vector grad_phi(const Vector& x) const = 0;
    virtual const Box& domain() const = 0;

    /// Right-hand side with the given input applied. With `with_uncertainty`
    /// false the nominal model is evaluated.
    Vector rhs(const Vector& x, double u, bool with_uncertainty = true) const;
};

class MsdPlant final : public Plant {
public:
    explicit MsdPlant(MsdParams params, Box domain = default_msd_domain());

    int dimension() const override { return 2; }
    double f(const Vector& x) const override { return msd_f(params_, x); }
    double g(const Vector& x) const override { return msd_g(params_, x); }
    double phi(const Vector& x) const override { return msd_phi(params_, x); }
    Vector grad_phi(const Vector& x) const override { return msd_grad_phi(params_, x); }
    const Box& domain() const override { return domain_; }

    const MsdParams& params() const { return params_; }

    /// Same plant with every uncertainty parameter set to zero.
    MsdPlant nominal() const;

private:
    MsdParams params_;
    Box domain_;
};

/// Plant assembled from callables, for Brunovsky systems other than the
/// mass-spring-damper.
class FunctionPlant final : public Plant {
public:
    using Scalar = std::function<double(const Vector&)>;
    using Gradient = std::function<Vector(const Vector&)>;

    FunctionPlant(int n, Scalar f, Scalar g, Scalar phi, Box domain, Gradient grad_phi = {});

    int dimension() const override { return n_; }
    double f(const Vector& x) const override { return f_(x); }
    double g(const Vector& x) const override { return g_(x); }
    double phi(const Vector& x) const override { return phi_(x); }
    Vector grad_phi(const Vector& x) const override;
    const Box& domain() const override { return domain_; }

private:
    int n_;
    Scalar f_;
    Scalar g_;
    Scalar phi_;
    Box domain_;
    Gradient grad_phi_;
};

} // namespace mfc
