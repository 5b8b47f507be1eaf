#include "otma/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otma {

double trapezoid_mass(const GridFunction& f)
{
    const Grid& g = f.grid;
    const int n = g.n();
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double wj = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        for (int i = 0; i < n; ++i) {
            const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            sum += wi * wj * f(i, j);
        }
    }
    return sum * g.h() * g.h();
}

Density Density::analytic(std::string name, Profile profile, Gradient gradient, Region support,
                          Grid quadrature_grid)
{
    Density d;
    d.kind_ = Kind::analytic;
    d.name_ = std::move(name);
    d.profile_ = std::move(profile);
    d.gradient_ = std::move(gradient);
    d.support_ = std::move(support);
    d.quad_grid_ = quadrature_grid;
    for (std::size_t k = 0; k < quadrature_grid.size(); ++k) {
        const Vec2 x = quadrature_grid.point(k);
        if (d.support_(x) && !(d.profile_(x) >= 0.0)) {
            throw std::invalid_argument("density '" + d.name_ + "' is negative on its support");
        }
    }
    return d;
}

Density Density::gridded(GridFunction values, std::string name)
{
    for (double v : values.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("gridded density must be finite and nonnegative");
        }
    }
    Density d;
    d.kind_ = Kind::gridded;
    d.name_ = std::move(name);
    d.quad_grid_ = values.grid;
    d.samples_ = std::move(values);
    return d;
}

bool Density::in_support(const Vec2& x) const
{
    if (kind_ == Kind::gridded) {
        const Grid& g = quad_grid_;
        return x.x() >= g.lower() && x.x() <= g.upper() && x.y() >= g.lower() && x.y() <= g.upper();
    }
    return support_(x);
}

double Density::profile(const Vec2& y) const
{
    if (kind_ == Kind::gridded) {
        return scale_ * quad_grid_.interpolate(samples_->values, y);
    }
    return scale_ * profile_(y);
}

double Density::operator()(const Vec2& x) const { return in_support(x) ? profile(x) : 0.0; }

Vec2 Density::gradient(const Vec2& y) const
{
    if (kind_ == Kind::analytic) {
        return gradient_ ? Vec2(scale_ * gradient_(y)) : Vec2::Zero();
    }
    // Gradient of the bilinear interpolant inside the cell containing y.
    const Grid& g = quad_grid_;
    const auto s = g.interpolation_stencil(y);
    const auto& v = samples_->values;
    const double h = g.h();
    const auto c00 = g.node(s.nodes[0]);
    const double tx = std::clamp((y.x() - g.coord(c00.i)) / h, 0.0, 1.0);
    const double ty = std::clamp((y.y() - g.coord(c00.j)) / h, 0.0, 1.0);
    const double dx = ((1 - ty) * (v[s.nodes[1]] - v[s.nodes[0]]) + ty * (v[s.nodes[3]] - v[s.nodes[2]])) / h;
    const double dy = ((1 - tx) * (v[s.nodes[2]] - v[s.nodes[0]]) + tx * (v[s.nodes[3]] - v[s.nodes[1]])) / h;
    return scale_ * Vec2(dx, dy);
}

double Density::total_mass() const
{
    if (kind_ == Kind::gridded) {
        return scale_ * trapezoid_mass(*samples_);
    }
    return trapezoid_mass(GridFunction::sample(quad_grid_, [&](const Vec2& x) { return (*this)(x); }));
}

Density Density::scaled(double factor) const
{
    Density d = *this;
    d.scale_ *= factor;
    return d;
}

// ---------------------------------------------------------------------------
// Catalog

Density uniform_density(Density::Region support, const Grid& quadrature_grid, std::string name)
{
    return Density::analytic(
        std::move(name), [](const Vec2&) { return 1.0; }, [](const Vec2&) { return Vec2(0.0, 0.0); },
        std::move(support), quadrature_grid);
}

Density uniform_density(const ConvexTarget& support, const Grid& quadrature_grid)
{
    Density d = uniform_density([support](const Vec2& y) { return support.contains(y, 1e-12); }, quadrature_grid,
                                "uniform");
    d.support_hint = support;
    return d;
}

Density affine_density(double c0, const Vec2& g, Density::Region support, const Grid& quadrature_grid)
{
    return Density::analytic(
        "affine", [c0, g](const Vec2& y) { return c0 + g.dot(y); }, [g](const Vec2&) { return g; },
        std::move(support), quadrature_grid);
}

Density gaussian_density(const Vec2& center, double sigma, Density::Region support, const Grid& quadrature_grid)
{
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("gaussian density needs sigma > 0");
    }
    const double s2 = sigma * sigma;
    return Density::analytic(
        "gaussian", [center, s2](const Vec2& y) { return std::exp(-(y - center).squaredNorm() / (2 * s2)); },
        [center, s2](const Vec2& y) {
            return Vec2(-(y - center) / s2 * std::exp(-(y - center).squaredNorm() / (2 * s2)));
        },
        std::move(support), quadrature_grid);
}

Grid target_quadrature_grid(const ConvexTarget& target, int n_per_side)
{
    const auto box = target.bounding_box();
    const double lo = box.min().minCoeff();
    const double hi = box.max().maxCoeff();
    const double margin = 0.02 * (hi - lo);
    return Grid(lo - margin, hi + margin, n_per_side);
}

// ---------------------------------------------------------------------------
// Operations

std::pair<Density, Density> normalize_masses(const Density& rho_x, const Density& rho_y)
{
    const double mx = rho_x.total_mass();
    const double my = rho_y.total_mass();
    if (!(mx > 0.0) || !(my > 0.0)) {
        throw std::invalid_argument("normalize_masses: density with zero mass");
    }
    return {rho_x.scaled(1.0 / mx), rho_y.scaled(1.0 / my)};
}

RatioValue ratio_with_derivative(double rho_x_value, const Density& rho_y, const Vec2& p,
                                 const ConvexTarget& target)
{
    const Projection proj = target.project(p);
    const double denom = rho_y.profile(proj.point);
    if (!(denom > kDensityFloor)) {
        throw DensityFloorError("target density below floor at projected gradient");
    }
    RatioValue r{rho_x_value / denom, Vec2::Zero()};
    if (rho_x_value == 0.0) {
        return r;
    }
    Vec2 grad = rho_y.gradient(proj.point);
    switch (proj.feature) {
    case Projection::Feature::interior:
        break;
    case Projection::Feature::edge:
        grad = proj.tangent * proj.tangent.dot(grad);
        break;
    case Projection::Feature::vertex:
        grad.setZero();
        break;
    }
    r.dp = -rho_x_value / (denom * denom) * grad;
    return r;
}

double eval_ratio(const Density& rho_x, const Density& rho_y, const Vec2& x, const Vec2& p,
                  const ConvexTarget& target)
{
    return ratio_with_derivative(rho_x(x), rho_y, p, target).value;
}

double estimate_lipschitz(const Density& rho_x, const Density& rho_y, const ConvexTarget& target)
{
    double max_x = 0.0;
    const Grid& gx = rho_x.quadrature_grid();
    for (std::size_t k = 0; k < gx.size(); ++k) {
        max_x = std::max(max_x, rho_x(gx.point(k)));
    }

    const Grid& gy = rho_y.quadrature_grid();
    const double h = gy.h();
    double max_grad = 0.0;
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = 0.0;
    for (int j = 1; j < gy.n() - 1; ++j) {
        for (int i = 1; i < gy.n() - 1; ++i) {
            const Vec2 y = gy.point(i, j);
            if (!target.contains(y, 1e-12)) {
                continue;
            }
            const double v = rho_y.profile(y);
            min_y = std::min(min_y, v);
            max_y = std::max(max_y, v);
            const Vec2 e = gy.point(i + 1, j);
            const Vec2 w = gy.point(i - 1, j);
            const Vec2 n = gy.point(i, j + 1);
            const Vec2 s = gy.point(i, j - 1);
            if (!target.contains(e, 1e-12) || !target.contains(w, 1e-12) || !target.contains(n, 1e-12) ||
                !target.contains(s, 1e-12)) {
                continue;
            }
            const Vec2 grad((rho_y.profile(e) - rho_y.profile(w)) / (2 * h),
                            (rho_y.profile(n) - rho_y.profile(s)) / (2 * h));
            max_grad = std::max(max_grad, grad.norm());
        }
    }
    if (!(min_y > 0.0) || !std::isfinite(min_y)) {
        throw DensityFloorError("estimate_lipschitz: target density not positive on its support");
    }
    if (max_grad <= 1e-12 * std::max(1.0, max_y)) {
        return 0.0;
    }
    return max_x * max_grad / (min_y * min_y);
}

}  // namespace otma
