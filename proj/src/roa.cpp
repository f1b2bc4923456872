#include "mfccert/roa.hpp"

#include "mfccert/linalg.hpp"
#include "mfccert/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfc {

namespace {

constexpr double kPi = std::numbers::pi;

/// (sqrt((m Gamma)^2 - dc_d^2) - |dk|) / sigma1_bar, or a reason it does not exist.
std::optional<double> core_term(const MsdParams& p, double gamma, std::string& reason)
{
    const double sb = sigma1_bar(p);
    if (sb == 0.0)
        throw std::domain_error("sigma1_bar is zero: the cubic uncertainty vanishes and the radius formula does not apply");
    const double mg = p.m * gamma;
    const double rad = mg * mg - p.delta_c_d * p.delta_c_d;
    if (!(rad > 0.0)) {
        reason = "(m*Gamma)^2 does not exceed delta_c_d^2";
        return std::nullopt;
    }
    return (std::sqrt(rad) - std::abs(p.delta_k)) / sb;
}

Radius finish(double radicand, double offset, std::string_view what)
{
    Radius r;
    if (!(radicand >= 0.0)) {
        r.reason = std::string(what) + ": negative radicand " + std::to_string(radicand);
        return r;
    }
    const double value = std::sqrt(radicand) - offset;
    if (!(value >= 0.0)) {
        r.reason = std::string(what) + ": negative radius " + std::to_string(value);
        return r;
    }
    r.value = value;
    return r;
}

Radius single_loop_radius(const MsdParams& p, double gamma, double norm, std::string_view what)
{
    Radius r;
    const auto core = core_term(p, gamma, r.reason);
    if (!core)
        return r;
    return finish(*core - 0.75 * norm * norm, 1.5 * norm, what);
}

Matrix2 inverse_diag(const Matrix2& D)
{
    Matrix2 Di = Matrix2::Zero();
    Di(0, 0) = 1.0 / D(0, 0);
    Di(1, 1) = 1.0 / D(1, 1);
    return Di;
}

Matrix2 as2(const Matrix& M)
{
    if (M.rows() != 2 || M.cols() != 2)
        throw std::invalid_argument("expected a 2x2 matrix");
    return Matrix2(M);
}

} // namespace

double gamma_level_bound(const MsdParams& p, double s, double n)
{
    const double inner = std::abs(p.delta_k) + sigma1_bar(p) * ((s + 1.5 * n) * (s + 1.5 * n) + 0.75 * n * n);
    return std::sqrt(inner * inner + p.delta_c_d * p.delta_c_d) / p.m;
}

Radius r_aux(const MsdParams& p, double gamma, double x_ref_norm)
{
    return single_loop_radius(p, gamma, x_ref_norm, "r_a");
}

Radius r_mfc1(const MsdParams& p, double gamma, double n)
{
    Radius r;
    const auto core = core_term(p, gamma, r.reason);
    if (!core)
        return r;
    return finish(0.5 * *core - 0.375 * n * n, 1.5 / std::numbers::sqrt2 * n, "r_MFC1");
}

double c_star(double vartheta, const Matrix& P, const Vector& x)
{
    if (!(vartheta > 0.0))
        throw std::invalid_argument("c_star: vartheta must be positive");
    return vartheta * x.dot(P * x);
}

Radius r_mfc2(const MsdParams& p, double gamma, double n, double cs, double vartheta, double lambda)
{
    Radius r;
    const auto core = core_term(p, gamma, r.reason);
    if (!core)
        return r;
    if (cs < 0.0 || !(vartheta > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("r_mfc2: need c* >= 0, vartheta > 0, lambda_min > 0");
    return finish(*core - 0.75 * n * n, 1.5 * n + std::sqrt(cs / (vartheta * lambda)), "r_MFC2");
}

Radius r_sl(const MsdParams& p, double gamma_sl, double x_s_norm)
{
    return single_loop_radius(p, gamma_sl, x_s_norm, "r_SL");
}

Radius r_slhg(const MsdParams& p, double gamma_slhg, double x_s_norm)
{
    return single_loop_radius(p, gamma_slhg, x_s_norm, "r_SLHG");
}

double c_star_upper_bound(double r_a, double vartheta, double lambda)
{
    return vartheta * lambda * r_a * r_a;
}

LevelComparison compare_levels(double cs, double r_a, double vartheta, double lambda)
{
    if (!(vartheta > 1.0))
        throw std::invalid_argument("compare_levels: vartheta must exceed 1");
    LevelComparison out;
    const double half = r_a / std::numbers::sqrt2;
    out.c_tilde_1 = lambda * half * half - cs;
    const double r2 = r_a - std::sqrt(cs / (vartheta * lambda));
    out.c_tilde_2 = lambda * r2 * r2;
    out.difference = out.c_tilde_2 - out.c_tilde_1;
    out.second_larger = out.difference > 0.0;
    return out;
}

std::vector<Vector2> ellipse_boundary(const Matrix2& F, double level, const Vector2& center, std::size_t points)
{
    if (!(level > 0.0))
        throw std::invalid_argument("ellipse_boundary: level must be positive");
    if (points == 0)
        throw std::invalid_argument("ellipse_boundary: need at least one point");
    if (!linalg::ldlt_positive_definite(Matrix(F)))
        throw std::invalid_argument("ellipse_boundary: form is not positive definite");
    const Matrix2 S = Matrix2(linalg::symmetric_inverse_sqrt(Matrix(F))) * std::sqrt(level);
    std::vector<Vector2> out;
    out.reserve(points);
    for (std::size_t k = 0; k < points; ++k) {
        const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(points);
        out.push_back(center + S * Vector2(std::cos(th), std::sin(th)));
    }
    return out;
}

Vector2 to_physical(const Vector2& z, const Matrix2& D, const Vector2& center)
{
    return center + D * z;
}

Vector2 to_scaled(const Vector2& x, const Matrix2& D, const Vector2& center)
{
    return inverse_diag(D) * (x - center);
}

double polygon_area(const std::vector<Vector2>& v)
{
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vector2& a = v[i];
        const Vector2& b = v[(i + 1) % v.size()];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * std::abs(twice);
}

std::string_view to_string(RoaKind kind)
{
    switch (kind) {
    case RoaKind::MFC1: return "MFC1";
    case RoaKind::MFC2: return "MFC2";
    case RoaKind::SL: return "SL";
    case RoaKind::SLHG: return "SLHG";
    }
    return "?";
}

std::optional<RoaKind> parse_roa_kind(std::string_view name)
{
    for (RoaKind k : {RoaKind::MFC1, RoaKind::MFC2, RoaKind::SL, RoaKind::SLHG})
        if (name == to_string(k))
            return k;
    return std::nullopt;
}

double RoaEstimate::lyapunov(const Vector2& x, const Vector2& x_star) const
{
    const Matrix2 Di = inverse_diag(D);
    switch (kind) {
    case RoaKind::SL: {
        const Vector2 e = x - x_s;
        return e.dot(P * e);
    }
    case RoaKind::SLHG: {
        const Vector2 z = Di * (x - x_s);
        return z.dot(P * z);
    }
    case RoaKind::MFC2: {
        const Vector2 z = Di * ((x - x_s) - (x_star - x_d));
        return z.dot(P * z);
    }
    case RoaKind::MFC1: {
        const Vector2 xt = x_star - x_d;
        const Vector2 z = Di * ((x - x_s) - xt);
        return vartheta * xt.dot(P * xt) + z.dot(P * z);
    }
    }
    return 0.0;
}

bool RoaEstimate::contains(const Vector2& x, const Vector2& x_star) const
{
    return valid && lyapunov(x, x_star) <= level;
}

Matrix2 RoaEstimate::physical_form() const
{
    if (kind == RoaKind::SL)
        return P;
    const Matrix2 Di = inverse_diag(D);
    return Di * P * Di;
}

std::vector<Vector2> RoaEstimate::boundary(std::size_t points) const
{
    if (!valid)
        throw std::logic_error("boundary: estimate is not valid: " + reason);
    return ellipse_boundary(physical_form(), level, center, points);
}

Matrix RoaEstimate::sampling_form() const
{
    if (kind != RoaKind::MFC1)
        return Matrix(P);
    Matrix Q = Matrix::Zero(4, 4);
    Q.topLeftCorner(2, 2) = vartheta * P;
    Q.bottomRightCorner(2, 2) = P;
    return Q;
}

InitialCondition RoaEstimate::from_sampling_coords(const Vector& w) const
{
    if (w.size() != sampling_dimension())
        throw std::invalid_argument("from_sampling_coords: wrong coordinate dimension");
    InitialCondition ic;
    switch (kind) {
    case RoaKind::SL:
        ic.x0_star = x_d;
        ic.x0 = x_s + Vector2(w(0), w(1));
        break;
    case RoaKind::SLHG:
        ic.x0_star = x_d;
        ic.x0 = to_physical(Vector2(w(0), w(1)), D, x_s);
        break;
    case RoaKind::MFC2:
        ic.x0_star = x0_star;
        ic.x0 = to_physical(Vector2(w(0), w(1)), D, center);
        break;
    case RoaKind::MFC1: {
        const Vector2 xt(w(0), w(1));
        ic.x0_star = x_d + xt;
        ic.x0 = to_physical(Vector2(w(2), w(3)), D, x_s + xt);
        break;
    }
    }
    return ic;
}

namespace {

RoaEstimate base_estimate(RoaKind kind, const RoaInputs& in, LoopKind loop)
{
    if (in.gains.dimension() != 2)
        throw std::invalid_argument("ROA estimates are implemented for the two-dimensional mass-spring-damper");
    RoaEstimate e;
    e.kind = kind;
    e.x_d = Vector2(in.y_d, 0.0);
    e.x_s = solve_steady_state(in.params, in.gains, loop, in.y_d).steady_state();
    e.center = e.x_s;
    e.x0_star = e.x_d;
    e.P = as2(in.cert.P);
    e.vartheta = in.cert.vartheta;
    e.epsilon = in.gains.epsilon;
    e.D = as2(in.gains.D);
    return e;
}

void apply_radius(RoaEstimate& e, const Radius& r, double lambda)
{
    if (!r.valid()) {
        e.valid = false;
        e.reason = r.reason;
        return;
    }
    e.valid = true;
    e.radius_aux = *r.value;
    e.level = lambda * e.radius_aux * e.radius_aux;
}

} // namespace

RoaEstimate estimate_sl(const RoaInputs& in)
{
    RoaEstimate e = base_estimate(RoaKind::SL, in, LoopKind::SL);
    e.frame = "x_e = x - x_s";
    apply_radius(e, r_sl(in.params, in.cert.gamma_sl, e.x_s.norm()), in.cert.lambda_min);
    return e;
}

RoaEstimate estimate_slhg(const RoaInputs& in)
{
    RoaEstimate e = base_estimate(RoaKind::SLHG, in, LoopKind::SLHG);
    e.frame = "z_SL = D^-1 (x - x_s)";
    apply_radius(e, r_slhg(in.params, in.cert.gamma_slhg, e.x_s.norm()), in.cert.lambda_min);
    return e;
}

RoaEstimate estimate_mfc1(const RoaInputs& in)
{
    RoaEstimate e = base_estimate(RoaKind::MFC1, in, LoopKind::MFC);
    e.frame = "(x~*, z~), x~* = x* - x_d, z~ = D^-1 ((x - x_s) - x~*)";
    apply_radius(e, r_mfc1(in.params, in.cert.gamma_mfc, e.x_s.norm()), in.cert.lambda_min);
    return e;
}

RoaEstimate estimate_mfc2(const RoaInputs& in)
{
    RoaEstimate e = base_estimate(RoaKind::MFC2, in, LoopKind::MFC);
    e.frame = "z~ = D^-1 ((x - x_s) - (x0* - x_d))";
    e.x0_star = in.x0_star;
    const Vector2 xt = in.x0_star - e.x_d;
    e.center = e.x_s + xt;
    e.c_star = c_star(in.cert.vartheta, in.cert.P, Vector(xt));
    apply_radius(e,
                 r_mfc2(in.params, in.cert.gamma_mfc, e.x_s.norm(), e.c_star, in.cert.vartheta, in.cert.lambda_min),
                 in.cert.lambda_min);
    e.c_tilde = e.level;
    return e;
}

RoaEstimate estimate(RoaKind kind, const RoaInputs& in)
{
    switch (kind) {
    case RoaKind::MFC1: return estimate_mfc1(in);
    case RoaKind::MFC2: return estimate_mfc2(in);
    case RoaKind::SL: return estimate_sl(in);
    case RoaKind::SLHG: return estimate_slhg(in);
    }
    throw std::invalid_argument("unknown ROA kind");
}

bool Ellipse::contains(const Vector2& x) const
{
    const Vector2 d = x - center;
    return d.dot(F * d) <= level;
}

bool union_contains(const std::vector<Ellipse>& parts, const Vector2& x)
{
    return std::any_of(parts.begin(), parts.end(), [&](const Ellipse& e) { return e.contains(x); });
}

RegionPolygon union_boundary(const std::vector<Ellipse>& parts, std::size_t rays)
{
    if (parts.empty())
        throw std::invalid_argument("union_boundary: no ellipses");
    if (rays < 3)
        throw std::invalid_argument("union_boundary: need at least three rays");

    RegionPolygon poly;
    poly.ellipse_count = parts.size();
    poly.centroid = Vector2::Zero();
    for (const auto& e : parts)
        poly.centroid += e.center;
    poly.centroid /= static_cast<double>(parts.size());

    const Vector2 o = poly.centroid;
    for (std::size_t k = 0; k < rays; ++k) {
        const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(rays);
        const Vector2 d(std::cos(th), std::sin(th));
        double t_max = -1.0;
        for (const auto& e : parts) {
            // |o + t d - c|_F^2 = level
            const Vector2 oc = o - e.center;
            const double a = d.dot(e.F * d);
            const double b = 2.0 * d.dot(e.F * oc);
            const double c = oc.dot(e.F * oc) - e.level;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0)
                continue;
            const double t2 = (-b + std::sqrt(disc)) / (2.0 * a);
            t_max = std::max(t_max, t2);
        }
        if (t_max <= 0.0)
            continue;
        // Step back a hair so the vertex is inside despite rounding.
        poly.vertices.push_back(o + t_max * (1.0 - 1e-11) * d);
    }
    poly.area = polygon_area(poly.vertices);
    return poly;
}

Mfc2Region mfc2_region_sweep(const RoaInputs& in, double c_star_level, std::size_t samples, std::size_t c_star_grid)
{
    if (samples < 16)
        throw std::invalid_argument("mfc2_region_sweep: need at least 16 samples");
    if (c_star_level < 0.0)
        throw std::invalid_argument("mfc2_region_sweep: c* level must be non-negative");

    const RoaEstimate ref = estimate_mfc2(RoaInputs{in.params, in.gains, in.cert, in.y_d, Vector2(in.y_d, 0.0)});
    const double n = ref.x_s.norm();
    const double vartheta = in.cert.vartheta;
    const double lambda = in.cert.lambda_min;
    const Matrix2 F = ref.physical_form();
    const Matrix2 model_root = Matrix2(linalg::symmetric_inverse_sqrt(in.cert.P));

    auto add_ring = [&](std::vector<Ellipse>& out, double cs) {
        const Radius r = r_mfc2(in.params, in.cert.gamma_mfc, n, cs, vartheta, lambda);
        if (!r.valid() || *r.value <= 0.0)
            return;
        const double ct = lambda * *r.value * *r.value;
        const std::size_t count = cs == 0.0 ? 1 : samples;
        for (std::size_t k = 0; k < count; ++k) {
            const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
            const Vector2 xt = std::sqrt(cs / vartheta) * model_root * Vector2(std::cos(th), std::sin(th));
            out.push_back(Ellipse{ref.x_s + xt, F, ct});
        }
    };

    Mfc2Region region;
    add_ring(region.green_parts, c_star_level);
    if (region.green_parts.empty())
        throw NumericalError("mfc2_region_sweep: c* level leaves no valid process-state set");
    region.green = union_boundary(region.green_parts);

    const Radius ra = r_aux(in.params, in.cert.gamma_mfc, n);
    if (ra.valid()) {
        const double upper = c_star_upper_bound(*ra.value, vartheta, lambda);
        for (std::size_t i = 0; i < c_star_grid; ++i)
            add_ring(region.grey_parts, upper * static_cast<double>(i) / static_cast<double>(c_star_grid));
    }
    if (!region.grey_parts.empty())
        region.grey = union_boundary(region.grey_parts);
    return region;
}

} // namespace mfc
