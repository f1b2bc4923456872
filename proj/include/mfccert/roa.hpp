#pragma once

#include "mfccert/plant.hpp"
#include "mfccert/synthesis.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfc {

/// A certified radius, or the reason no valid estimate exists.
struct Radius {
    std::optional<double> value;
    std::string reason;

    bool valid() const { return value.has_value(); }
};

/// Level-set parameterised Lipschitz bound of the shifted uncertainty when
/// |x~*| + |z~| <= state_norm_sum around a steady state of norm x_ref_norm:
///   (1/m) sqrt([|dk| + sigma1_bar((s + 3/2 n)^2 + 3/4 n^2)]^2 + dc_d^2).
double gamma_level_bound(const MsdParams& p, double state_norm_sum, double x_ref_norm);

/// Shared auxiliary radius
///   sqrt((sqrt((m Gamma)^2 - dc_d^2) - |dk|)/sigma1_bar - 3/4 n^2) - 3/2 n.
/// Throws std::domain_error when sigma1_bar is zero (linear uncertainty is
/// outside the scope of these formulas).
Radius r_aux(const MsdParams& p, double gamma, double x_ref_norm);

/// Combined-state radius of the first two-loop estimate; c1 = lambda_min r^2.
Radius r_mfc1(const MsdParams& p, double gamma, double x_ref_norm);

/// vartheta x~0*^T P x~0*.
double c_star(double vartheta, const Matrix& P, const Vector& x_tilde_star_0);

/// Process-error radius of the second two-loop estimate (r_aux minus the
/// model-loop share sqrt(c*/(vartheta lambda_min))); c~ = lambda_min r^2.
Radius r_mfc2(const MsdParams& p, double gamma, double x_ref_norm, double c_star, double vartheta, double lambda_min);

/// Single-loop radii; identical formula with |x_s| in place of the reference norm.
Radius r_sl(const MsdParams& p, double gamma_sl, double x_s_norm);
Radius r_slhg(const MsdParams& p, double gamma_slhg, double x_s_norm);

/// Largest c* for which r_mfc2 stays non-negative: vartheta lambda_min r_a^2.
double c_star_upper_bound(double r_a, double vartheta, double lambda_min);

struct LevelComparison {
    double c_tilde_1 = 0.0;
    double c_tilde_2 = 0.0;
    double difference = 0.0;
    bool second_larger = false;
};

/// c~1 = lambda (r_a/sqrt2)^2 - c*, c~2 = lambda (r_a - sqrt(c*/(vartheta lambda)))^2.
/// Requires vartheta > 1.
LevelComparison compare_levels(double c_star, double r_a, double vartheta, double lambda_min);

// ---- geometry ----------------------------------------------------------

/// `points` states x with (x - center)^T F (x - center) = level, at angles
/// 2 pi k / points in the symmetric square-root frame of F.
std::vector<Vector2> ellipse_boundary(const Matrix2& F, double level, const Vector2& center, std::size_t points);

/// x = center + D z  and its inverse.
Vector2 to_physical(const Vector2& z, const Matrix2& D, const Vector2& center);
Vector2 to_scaled(const Vector2& x, const Matrix2& D, const Vector2& center);

/// Shoelace area of a simple polygon.
double polygon_area(const std::vector<Vector2>& vertices);

enum class RoaKind { MFC1, MFC2, SL, SLHG };

std::string_view to_string(RoaKind kind);
std::optional<RoaKind> parse_roa_kind(std::string_view name);

/// Initial data of one closed-loop run: process state and model state.
struct InitialCondition {
    Vector2 x0;
    Vector2 x0_star;
};

/// Certified level set at t = 0.
///  SL:   V = x_e^T P x_e,           x_e  = x - x_s
///  SLHG: V = z^T P z,               z    = D^-1 (x - x_s)
///  MFC2: V~ = z~^T P z~ <= c~,      z~   = D^-1 ((x - x_s) - (x* - x_d)), x* = x0*
///  MFC1: V = vartheta x~*^T P x~* + z~^T P z~ <= c1 over (x*, x)
struct RoaEstimate {
    RoaKind kind = RoaKind::SL;
    bool valid = false;
    std::string reason;

    double level = 0.0;      // c_SL, c_SLHG, c1, or c~ for MFC2
    double c_star = 0.0;     // MFC2 only
    double c_tilde = 0.0;    // MFC2 only
    double radius_aux = 0.0; // r the level derives from

    Vector2 center;  // physical centre of the process-state set
    Vector2 x_d;
    Vector2 x_s;
    Vector2 x0_star; // model initial state (MFC2), x_d otherwise
    Matrix2 P;
    double vartheta = 1.0;
    double epsilon = 1.0;
    Matrix2 D;
    std::string frame;

    /// c* + c~ for MFC2, the level otherwise: the bound on the full
    /// Lyapunov function recorded along simulations.
    double total_level() const { return kind == RoaKind::MFC2 ? c_star + c_tilde : level; }

    /// Lyapunov value whose sublevel set this estimate describes.
    double lyapunov(const Vector2& x, const Vector2& x_star) const;
    bool contains(const Vector2& x, const Vector2& x_star) const;

    /// Quadratic form of the process-state set in physical coordinates
    /// (for MFC1: the slice x* = x_d).
    Matrix2 physical_form() const;
    std::vector<Vector2> boundary(std::size_t points) const;

    /// Sampling coordinates w (dimension 4 for MFC1, 2 otherwise) with the
    /// set being w^T Q w <= level.
    int sampling_dimension() const { return kind == RoaKind::MFC1 ? 4 : 2; }
    Matrix sampling_form() const;
    InitialCondition from_sampling_coords(const Vector& w) const;
};

/// Inputs shared by every estimate builder.
struct RoaInputs {
    MsdParams params;
    GainSet gains;
    LyapunovCertificate cert;
    double y_d = 0.0;
    Vector2 x0_star = Vector2::Zero();
};

RoaEstimate estimate_sl(const RoaInputs& in);
RoaEstimate estimate_slhg(const RoaInputs& in);
RoaEstimate estimate_mfc1(const RoaInputs& in);
RoaEstimate estimate_mfc2(const RoaInputs& in);
RoaEstimate estimate(RoaKind kind, const RoaInputs& in);

/// Ellipse { x : (x - center)^T F (x - center) <= level } in physical coordinates.
struct Ellipse {
    Vector2 center;
    Matrix2 F;
    double level = 0.0;

    bool contains(const Vector2& x) const;
};

struct RegionPolygon {
    std::vector<Vector2> vertices;
    Vector2 centroid;
    double area = 0.0;
    std::size_t ellipse_count = 0;
};

/// Outer boundary of a union of ellipses from a 720-ray fan around the mean
/// centre. Each vertex sits on the farthest ellipse crossing of its ray.
RegionPolygon union_boundary(const std::vector<Ellipse>& parts, std::size_t rays = 720);
bool union_contains(const std::vector<Ellipse>& parts, const Vector2& x);

struct Mfc2Region {
    std::vector<Ellipse> green_parts;
    std::vector<Ellipse> grey_parts;
    RegionPolygon green;
    RegionPolygon grey;
};

/// Union of the process-state sets over model initial states x0* on
/// vartheta x~0*^T P x~0* = c_star_level (green) and, for the envelope, over
/// a grid of c* in [0, vartheta lambda_min r_a^2) (grey). `samples` angles per level.
Mfc2Region mfc2_region_sweep(const RoaInputs& in, double c_star_level, std::size_t samples, std::size_t c_star_grid = 48);

} // namespace mfc
