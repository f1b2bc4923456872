#include "mfccert/plant.hpp"

#include <algorithm>
#include <cmath>

namespace mfc {

BrunovskyDims::BrunovskyDims(int dim) : n(dim)
{
    if (n < 1 || n > kMaxDim)
        throw std::invalid_argument("BrunovskyDims: n must lie in [1, " + std::to_string(kMaxDim) + "]");
}

Matrix BrunovskyDims::A() const
{
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i)
        a(i, i + 1) = 1.0;
    return a;
}

Vector BrunovskyDims::b() const
{
    Vector v = Vector::Zero(n);
    v(n - 1) = 1.0;
    return v;
}

Vector BrunovskyDims::c() const
{
    Vector v = Vector::Zero(n);
    v(0) = 1.0;
    return v;
}

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size() || lower.size() == 0)
        throw std::invalid_argument("Box: bound dimensions differ or are empty");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
        if (!(lower(i) <= upper(i)))
            throw std::invalid_argument("Box: lower bound exceeds upper bound in coordinate " + std::to_string(i));
}

bool Box::contains(const Vector& x) const
{
    if (x.size() != lower.size())
        return false;
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

void MsdParams::validate() const
{
    if (!(m > 0.0))
        throw std::invalid_argument("MsdParams: m must be positive");
    if (!(k > 0.0))
        throw std::invalid_argument("MsdParams: k must be positive");
    if (!(c_d > 0.0))
        throw std::invalid_argument("MsdParams: c_d must be positive");
    if (!(alpha > 0.0))
        throw std::invalid_argument("MsdParams: alpha must be positive");
}

Box default_msd_domain()
{
    return Box(Vector{{-5.0, -10.0}}, Vector{{5.0, 10.0}});
}

double msd_f(const MsdParams& p, const Vector& x)
{
    const double x1 = x(0);
    return -(p.k / p.m) * (1.0 + p.alpha * p.alpha * x1 * x1) * x1 - (p.c_d / p.m) * x(1) - p.g0;
}

double msd_g(const MsdParams& p, const Vector&)
{
    return 1.0 / p.m;
}

double msd_phi(const MsdParams& p, const Vector& x)
{
    const double x1 = x(0);
    const double a = p.alpha + p.delta_alpha;
    const double cube = x1 * x1 * x1;
    return -(p.delta_k / p.m) * a * a * cube
           - (p.k / p.m) * p.delta_alpha * (2.0 * p.alpha + p.delta_alpha) * cube
           - (p.delta_k / p.m) * x1
           - (p.delta_c_d / p.m) * x(1);
}

Vector msd_grad_phi(const MsdParams& p, const Vector& x)
{
    const double x1 = x(0);
    return Vector{{-(3.0 * sigma1(p) * x1 * x1 + p.delta_k) / p.m, -p.delta_c_d / p.m}};
}

double sigma1(const MsdParams& p)
{
    const double a = p.alpha + p.delta_alpha;
    return p.delta_k * a * a + p.k * p.delta_alpha * (2.0 * p.alpha + p.delta_alpha);
}

double sigma1_bar(const MsdParams& p)
{
    const double dk = std::abs(p.delta_k);
    const double da = std::abs(p.delta_alpha);
    return dk * (p.alpha + da) * (p.alpha + da) + p.k * da * (2.0 * p.alpha + da);
}

double phi_lipschitz_sup(const MsdParams& p, const Box& region)
{
    if (region.dimension() != 2)
        throw std::invalid_argument("phi_lipschitz_sup: region must be two-dimensional");

    // |grad phi| depends on x1 only through s = x1^2, linearly; the extreme
    // value of |3 sigma1 s + dk| is at an end of the attainable s range.
    const double lo = region.lower(0);
    const double hi = region.upper(0);
    const double s_max = std::max(lo * lo, hi * hi);
    const double s_min = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi);

    const double s1 = sigma1(p);
    const double slope = std::max(std::abs(3.0 * s1 * s_min + p.delta_k), std::abs(3.0 * s1 * s_max + p.delta_k));
    return std::hypot(slope, p.delta_c_d) / p.m;
}

Vector Plant::rhs(const Vector& x, double u, bool with_uncertainty) const
{
    const int n = dimension();
    Vector dx(n);
    for (int i = 0; i + 1 < n; ++i)
        dx(i) = x(i + 1);
    double last = f(x) + g(x) * u;
    if (with_uncertainty)
        last += phi(x);
    dx(n - 1) = last;
    return dx;
}

MsdPlant::MsdPlant(MsdParams params, Box domain) : params_(params), domain_(std::move(domain))
{
    params_.validate();
    if (domain_.dimension() != 2)
        throw std::invalid_argument("MsdPlant: domain must be two-dimensional");
}

MsdPlant MsdPlant::nominal() const
{
    MsdParams p = params_;
    p.delta_k = 0.0;
    p.delta_c_d = 0.0;
    p.delta_alpha = 0.0;
    return MsdPlant(p, domain_);
}

FunctionPlant::FunctionPlant(int n, Scalar f, Scalar g, Scalar phi, Box domain, Gradient grad_phi)
    : n_(BrunovskyDims(n).n), f_(std::move(f)), g_(std::move(g)), phi_(std::move(phi)),
      domain_(std::move(domain)), grad_phi_(std::move(grad_phi))
{
    if (!f_ || !g_ || !phi_)
        throw std::invalid_argument("FunctionPlant: f, g and phi are required");
    if (domain_.dimension() != n_)
        throw std::invalid_argument("FunctionPlant: domain dimension mismatch");
}

Vector FunctionPlant::grad_phi(const Vector& x) const
{
    if (!grad_phi_)
        throw std::logic_error("FunctionPlant: no gradient of phi was supplied");
    return grad_phi_(x);
}

} // namespace mfc
