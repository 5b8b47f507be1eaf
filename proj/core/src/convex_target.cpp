#include "otma/convex_target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace otma {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double angle_of(const Vec2& v)
{
    double a = std::atan2(v.y(), v.x());
    return a < 0.0 ? a + kTwoPi : a;
}

double max_angular_gap(const std::vector<Vec2>& dirs)
{
    if (dirs.size() < 2) {
        return kTwoPi;
    }
    std::vector<double> angles;
    angles.reserve(dirs.size());
    for (const auto& d : dirs) {
        angles.push_back(angle_of(d));
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + kTwoPi - angles.back();
    for (std::size_t k = 1; k < angles.size(); ++k) {
        gap = std::max(gap, angles[k] - angles[k - 1]);
    }
    return gap;
}

void require_unit(const Vec2& n, double tol, const char* what)
{
    if (!(std::abs(n.norm() - 1.0) <= tol)) {
        throw std::invalid_argument(std::string(what) + ": direction must have unit length");
    }
}

void require_spd(const Mat2& m)
{
    if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * (1.0 + m.norm())) {
        throw std::invalid_argument("ellipse matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat2> eig(m);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("ellipse matrix must be positive definite");
    }
}

std::vector<Vec2> ellipse_samples(const Mat2& m, const Vec2& c, std::size_t samples)
{
    if (samples < 3) {
        throw std::invalid_argument("need at least three boundary samples");
    }
    std::vector<Vec2> pts;
    pts.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
        pts.emplace_back(c + m * Vec2(std::cos(t), std::sin(t)));
    }
    return pts;
}

// Closest point on segment [a, b] to y, with the parameter in [0, 1].
std::pair<Vec2, double> project_segment(const Vec2& y, const Vec2& a, const Vec2& b)
{
    const Vec2 e = b - a;
    const double len2 = e.squaredNorm();
    double t = len2 > 0.0 ? (y - a).dot(e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return {a + t * e, t};
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectionSet

DirectionSet::DirectionSet(std::vector<Vec2> directions)
    : directions_(std::move(directions))
{
    for (const auto& d : directions_) {
        require_unit(d, 1e-12, "DirectionSet");
    }
    dalpha_ = max_angular_gap(directions_);
}

DirectionSet::DirectionSet(std::vector<Vec2> directions, double dalpha)
    : directions_(std::move(directions)), dalpha_(dalpha)
{
}

DirectionSet DirectionSet::uniform(double dalpha)
{
    if (!(dalpha > 0.0) || dalpha > std::numbers::pi / 2.0) {
        throw std::invalid_argument("dalpha must lie in (0, pi/2]");
    }
    const auto count = static_cast<std::size_t>(std::ceil(kTwoPi / dalpha - 1e-9));
    return uniform_count(count);
}

DirectionSet DirectionSet::uniform_count(std::size_t count)
{
    if (count < 4) {
        throw std::invalid_argument("need at least four directions");
    }
    std::vector<Vec2> dirs;
    dirs.reserve(count);
    const double step = kTwoPi / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double a = step * static_cast<double>(k);
        Vec2 d(std::cos(a), std::sin(a));
        // Axis directions must be exact so upwind stencils see zero components.
        for (int c = 0; c < 2; ++c) {
            if (std::abs(d[c]) < 1e-14) {
                d[c] = 0.0;
            }
        }
        dirs.push_back(d.normalized());
    }
    return DirectionSet(std::move(dirs), step);
}

DirectionSet restrict_directions(const DirectionSet& dirs, const Vec2& n_x, double margin)
{
    require_unit(n_x, 1e-12, "restrict_directions");
    std::vector<Vec2> kept;
    for (const auto& n : dirs.directions()) {
        if (n.dot(n_x) > margin) {
            kept.push_back(n);
        }
    }
    if (kept.empty()) {
        throw std::invalid_argument("restrict_directions: no admissible direction");
    }
    return DirectionSet(std::move(kept), dirs.dalpha());
}

// ---------------------------------------------------------------------------
// ConvexTarget

ConvexTarget ConvexTarget::polygon(std::vector<Vec2> points)
{
    // Drop repeated points (including a closing duplicate).
    std::vector<Vec2> pts;
    for (const auto& p : points) {
        if (!p.allFinite()) {
            throw std::invalid_argument("polygon point is not finite");
        }
        if (pts.empty() || (p - pts.back()).norm() > 1e-14) {
            pts.push_back(p);
        }
    }
    while (pts.size() > 1 && (pts.front() - pts.back()).norm() <= 1e-14) {
        pts.pop_back();
    }
    if (pts.size() < 3) {
        throw std::invalid_argument("polygon needs at least three distinct points");
    }

    double scale = 0.0;
    for (const auto& p : pts) {
        scale = std::max(scale, p.norm());
    }
    const double tol = 1e-12 * std::max(1.0, scale * scale);
    const std::size_t n = pts.size();
    int positive = 0;
    int negative = 0;
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = pts[(i + 1) % n] - pts[i];
        const Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
        const double c = cross(e0, e1);
        if (c > tol) {
            ++positive;
        } else if (c < -tol) {
            ++negative;
        }
        turning += std::atan2(c, e0.dot(e1));
    }
    if ((positive > 0 && negative > 0) || (positive == 0 && negative == 0)) {
        throw std::invalid_argument("polygon is not convex");
    }
    if (std::abs(std::abs(turning) - kTwoPi) > 1e-6) {
        throw std::invalid_argument("polygon boundary winds more than once");
    }
    if (negative > 0) {
        std::reverse(pts.begin(), pts.end());
    }

    ConvexTarget t;
    t.kind_ = ShapeKind::polygon;
    t.points_ = std::move(pts);
    return t;
}

ConvexTarget ConvexTarget::hull(std::vector<Vec2> points)
{
    // Andrew's monotone chain, collinear points dropped.
    std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    if (points.size() < 3) {
        throw std::invalid_argument("hull needs at least three points");
    }
    std::vector<Vec2> h(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0) {
            --k;
        }
        h[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], points[i] - h[k - 2]) <= 0) {
            --k;
        }
        h[k++] = points[i];
    }
    h.resize(k - 1);
    return polygon(std::move(h));
}

ConvexTarget ConvexTarget::ellipse(const Mat2& matrix, std::size_t samples)
{
    require_spd(matrix);
    ConvexTarget t = polygon(ellipse_samples(matrix, Vec2::Zero(), samples));
    t.kind_ = ShapeKind::ellipse;
    t.matrix_ = matrix;
    return t;
}

ConvexTarget ConvexTarget::circle(const Vec2& center, double radius, std::size_t samples)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("circle radius must be positive");
    }
    ConvexTarget t = polygon(ellipse_samples(radius * Mat2::Identity(), center, samples));
    t.kind_ = ShapeKind::circle;
    t.center_ = center;
    t.radius_ = radius;
    t.matrix_ = radius * Mat2::Identity();
    return t;
}

ConvexTarget ConvexTarget::sampled_ellipse(const Mat2& matrix, std::size_t samples)
{
    require_spd(matrix);
    return polygon(ellipse_samples(matrix, Vec2::Zero(), samples));
}

ConvexTarget ConvexTarget::sampled_circle(const Vec2& center, double radius, std::size_t samples)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("circle radius must be positive");
    }
    return polygon(ellipse_samples(radius * Mat2::Identity(), center, samples));
}

double ConvexTarget::support_function(const Vec2& n) const
{
    require_unit(n, 1e-9, "support_function");
    switch (kind_) {
    case ShapeKind::circle:
        return center_.dot(n) + radius_;
    case ShapeKind::ellipse:
        return (matrix_ * n).norm();
    case ShapeKind::polygon:
        break;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : points_) {
        best = std::max(best, n.dot(y));
    }
    return best;
}

bool ConvexTarget::contains(const Vec2& y, double tol) const
{
    switch (kind_) {
    case ShapeKind::circle:
        return (y - center_).norm() <= radius_ + tol;
    case ShapeKind::ellipse:
        return (matrix_.inverse() * y).norm() <= 1.0 + tol;
    case ShapeKind::polygon:
        break;
    }
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % n];
        const Vec2 e = b - a;
        // Signed distance of y to the edge line, positive on the outside.
        if (cross(e, y - a) < -tol * e.norm()) {
            return false;
        }
    }
    return true;
}

double ConvexTarget::polygon_signed_distance(const Vec2& y) const
{
    const std::size_t n = points_.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto [q, t] = project_segment(y, points_[i], points_[(i + 1) % n]);
        best = std::min(best, (y - q).norm());
    }
    return contains(y, 0.0) ? -best : best;
}

double ConvexTarget::ellipse_signed_distance(const Vec2& y) const
{
    // Minimize |y − M(cos t, sin t)|² over t: coarse sweep, then golden section.
    auto dist2 = [&](double t) { return (y - matrix_ * Vec2(std::cos(t), std::sin(t))).squaredNorm(); };
    constexpr int kSweep = 1440;
    const double step = kTwoPi / kSweep;
    double best_t = 0.0;
    double best = dist2(0.0);
    for (int k = 1; k < kSweep; ++k) {
        const double t = step * k;
        const double d = dist2(t);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_t - step;
    double hi = best_t + step;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = dist2(a);
    double fb = dist2(b);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = dist2(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = dist2(b);
        }
    }
    const double d = std::sqrt(std::min({best, fa, fb}));
    const bool inside = (matrix_.inverse() * y).norm() < 1.0;
    return inside ? -d : d;
}

double ConvexTarget::signed_distance(const Vec2& y) const
{
    switch (kind_) {
    case ShapeKind::circle:
        return (y - center_).norm() - radius_;
    case ShapeKind::ellipse:
        return ellipse_signed_distance(y);
    case ShapeKind::polygon:
        break;
    }
    return polygon_signed_distance(y);
}

Projection ConvexTarget::project(const Vec2& y) const
{
    if (contains(y, 0.0)) {
        return {y, Projection::Feature::interior, Vec2::Zero()};
    }
    const std::size_t n = points_.size();
    Projection best{y, Projection::Feature::vertex, Vec2::Zero()};
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = points_[i];
        const Vec2& b = points_[(i + 1) % n];
        const auto [q, t] = project_segment(y, a, b);
        const double d = (y - q).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best.point = q;
            if (t > 0.0 && t < 1.0) {
                best.feature = Projection::Feature::edge;
                best.tangent = (b - a).normalized();
            } else {
                best.feature = Projection::Feature::vertex;
                best.tangent = Vec2::Zero();
            }
        }
    }
    return best;
}

double ConvexTarget::area() const
{
    switch (kind_) {
    case ShapeKind::circle:
        return std::numbers::pi * radius_ * radius_;
    case ShapeKind::ellipse:
        return std::numbers::pi * matrix_.determinant();
    case ShapeKind::polygon:
        break;
    }
    double a = 0.0;
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i) {
        a += cross(points_[i], points_[(i + 1) % n]);
    }
    return 0.5 * a;
}

Vec2 ConvexTarget::centroid() const
{
    if (kind_ == ShapeKind::circle) {
        return center_;
    }
    if (kind_ == ShapeKind::ellipse) {
        return Vec2::Zero();
    }
    Vec2 c = Vec2::Zero();
    double a = 0.0;
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = points_[i];
        const Vec2& q = points_[(i + 1) % n];
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    return c / (3.0 * a);
}

double ConvexTarget::diameter() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            d = std::max(d, (points_[i] - points_[j]).norm());
        }
    }
    return d;
}

Eigen::AlignedBox2d ConvexTarget::bounding_box() const
{
    Eigen::AlignedBox2d box;
    for (const auto& p : points_) {
        box.extend(p);
    }
    if (kind_ == ShapeKind::circle || kind_ == ShapeKind::ellipse) {
        // Inscribed samples underestimate the extent; use the support function.
        const Vec2 c = kind_ == ShapeKind::circle ? center_ : Vec2::Zero();
        const double rx = support_function(Vec2::UnitX()) - c.x();
        const double ry = support_function(Vec2::UnitY()) - c.y();
        box.extend(c + Vec2(rx, ry));
        box.extend(c - Vec2(rx, ry));
    }
    return box;
}

Vec2 ConvexTarget::bounding_center() const { return bounding_box().center(); }

double ConvexTarget::bounding_radius() const
{
    const Vec2 c = bounding_center();
    double r = 0.0;
    for (const auto& p : points_) {
        r = std::max(r, (p - c).norm());
    }
    if (kind_ != ShapeKind::polygon) {
        r = std::max(r, 0.5 * bounding_box().diagonal().norm());
    }
    return r;
}

// ---------------------------------------------------------------------------
// SupportTable / hamiltonian

SupportTable::SupportTable(const ConvexTarget& target, const DirectionSet& dirs)
    : dirs_(dirs)
{
    values_.reserve(dirs.size());
    for (const auto& n : dirs.directions()) {
        values_.push_back(target.support_function(n));
    }
}

HamiltonianValue hamiltonian(const Vec2& p, const SupportTable& table)
{
    if (table.size() == 0) {
        throw std::invalid_argument("hamiltonian: empty direction set");
    }
    const auto dirs = table.directions().directions();
    HamiltonianValue best{p.dot(dirs[0]) - table[0], 0};
    for (std::size_t k = 1; k < dirs.size(); ++k) {
        const double v = p.dot(dirs[k]) - table[k];
        if (v > best.value) {
            best = {v, k};
        }
    }
    return best;
}

double hamiltonian(const Vec2& p, const ConvexTarget& target, const DirectionSet& dirs)
{
    return hamiltonian(p, SupportTable(target, dirs)).value;
}

}  // namespace otma
