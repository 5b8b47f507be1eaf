#pragma once

#include "otma/convex_target.hpp"
#include "otma/grid.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace otma {

/// Raised when the target density drops below the evaluation floor.
class DensityFloorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDensityFloor = 1e-10;

/// A nonnegative density on the plane, either analytic or gridded.
///
/// Every density carries a quadrature grid; masses are composite trapezoid
/// sums on that grid. `profile` is the formula without the support cut-off
/// and is what the target density is evaluated with (arguments are always
/// projected onto Y first).
class Density {
public:
    enum class Kind { analytic, gridded };
    using Profile = std::function<double(const Vec2&)>;
    using Gradient = std::function<Vec2(const Vec2&)>;
    using Region = std::function<bool(const Vec2&)>;

    Density() = default;

    /// Throws std::invalid_argument if any quadrature sample is negative.
    static Density analytic(std::string name, Profile profile, Gradient gradient, Region support,
                            Grid quadrature_grid);

    /// Bilinear interpolant of nodal values; throws on negative values.
    static Density gridded(GridFunction values, std::string name = "gridded");

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const Grid& quadrature_grid() const { return quad_grid_; }

    /// Support-restricted value.
    double operator()(const Vec2& x) const;
    double profile(const Vec2& y) const;
    Vec2 gradient(const Vec2& y) const;
    bool in_support(const Vec2& x) const;

    double total_mass() const;
    Density scaled(double factor) const;
    double scale() const { return scale_; }

    std::optional<ConvexTarget> support_hint;

private:
    Kind kind_ = Kind::analytic;
    std::string name_;
    Profile profile_;
    Gradient gradient_;
    Region support_;
    Grid quad_grid_;
    std::optional<GridFunction> samples_;
    double scale_ = 1.0;
};

/// Composite trapezoid rule on the grid (weights ½ on edges, ¼ at corners).
double trapezoid_mass(const GridFunction& f);

// Analytic catalog ---------------------------------------------------------

Density uniform_density(Density::Region support, const Grid& quadrature_grid, std::string name = "uniform");
Density uniform_density(const ConvexTarget& support, const Grid& quadrature_grid);
/// c0 + g·y restricted to the region.
Density affine_density(double c0, const Vec2& g, Density::Region support, const Grid& quadrature_grid);
/// exp(−‖y − center‖² / 2σ²) restricted to the region.
Density gaussian_density(const Vec2& center, double sigma, Density::Region support, const Grid& quadrature_grid);

/// Quadrature grid over a target's bounding box with a 2% margin.
Grid target_quadrature_grid(const ConvexTarget& target, int n_per_side);

// Operations ---------------------------------------------------------------

/// Rescales both densities to unit trapezoid mass on their own grids.
/// Throws std::invalid_argument if either mass is not positive.
std::pair<Density, Density> normalize_masses(const Density& rho_x, const Density& rho_y);

struct RatioValue {
    double value;
    Vec2 dp;  // derivative with respect to p
};

/// ρ_X(x) / ρ_Y(π_Y(p)) with π_Y the closest-point projection onto Y.
/// Throws DensityFloorError if the denominator is ≤ kDensityFloor.
double eval_ratio(const Density& rho_x, const Density& rho_y, const Vec2& x, const Vec2& p,
                  const ConvexTarget& target);

/// Same ratio from a precomputed numerator, with its p-derivative.
RatioValue ratio_with_derivative(double rho_x_value, const Density& rho_y, const Vec2& p,
                                 const ConvexTarget& target);

/// K = max ρ_X · max‖∇ρ_Y‖ / (min ρ_Y)², gradients by centered differences on
/// the ρ_Y quadrature grid restricted to Y. Zero for constant ρ_Y.
double estimate_lipschitz(const Density& rho_x, const Density& rho_y, const ConvexTarget& target);

}  // namespace otma
