#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace otma {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// A finite set of unit directions in the plane.
///
/// Full sets built by `uniform` are sorted by angle in [0, 2π) with spacing
/// `dalpha`. Subsets produced by `restrict_directions` keep the parent's
/// nominal spacing and ordering.
class DirectionSet {
public:
    DirectionSet() = default;

    /// Explicit directions; each must be unit length within 1e-12.
    /// The recorded spacing is the largest angular gap between consecutive
    /// entries (sorted by angle, wrap-around included).
    explicit DirectionSet(std::vector<Vec2> directions);

    /// Uniform sweep of the circle. The spacing is snapped to 2π/K with
    /// K = ceil(2π / dalpha) so the sweep closes exactly.
    static DirectionSet uniform(double dalpha);
    static DirectionSet uniform_count(std::size_t count);

    std::span<const Vec2> directions() const { return directions_; }
    std::size_t size() const { return directions_.size(); }
    bool empty() const { return directions_.empty(); }
    const Vec2& operator[](std::size_t k) const { return directions_[k]; }
    double dalpha() const { return dalpha_; }

private:
    friend DirectionSet restrict_directions(const DirectionSet&, const Vec2&, double);
    DirectionSet(std::vector<Vec2> directions, double dalpha);

    std::vector<Vec2> directions_;
    double dalpha_ = 0.0;
};

enum class ShapeKind { polygon, ellipse, circle };

/// Closest point of a convex polygon, with the boundary feature it lies on.
struct Projection {
    enum class Feature { interior, edge, vertex };
    Vec2 point;
    Feature feature = Feature::interior;
    Vec2 tangent = Vec2::Zero();  // unit edge direction when feature == edge
};

/// Convex target set stored as a counterclockwise boundary polygon.
///
/// Circle and ellipse kinds keep their exact description next to the
/// sampled polygon; `support_function` and `signed_distance` use the exact
/// formulas for those kinds, everything else works on the polygon.
class ConvexTarget {
public:
    /// Throws std::invalid_argument unless the points form a convex polygon
    /// with at least three vertices. Clockwise input is reversed.
    static ConvexTarget polygon(std::vector<Vec2> points);

    /// Polygon-kind target bounding the convex hull of arbitrary points.
    static ConvexTarget hull(std::vector<Vec2> points);

    /// Exact ellipse M·B₁ (M symmetric positive definite), sampled with
    /// `samples` boundary points.
    static ConvexTarget ellipse(const Mat2& matrix, std::size_t samples = 256);
    static ConvexTarget circle(const Vec2& center, double radius, std::size_t samples = 256);

    /// Polygon-kind target inscribed in the ellipse M·B₁. This is what the
    /// solver consumes when the target is an ellipse.
    static ConvexTarget sampled_ellipse(const Mat2& matrix, std::size_t samples);
    static ConvexTarget sampled_circle(const Vec2& center, double radius, std::size_t samples);

    ShapeKind kind() const { return kind_; }
    std::span<const Vec2> boundary_points() const { return points_; }
    const Mat2& ellipse_matrix() const { return matrix_; }
    const Vec2& center() const { return center_; }
    double radius() const { return radius_; }

    /// H*(n) = sup_{y ∈ ∂Y} n·y. Throws std::invalid_argument if ‖n‖ is not
    /// 1 within 1e-9.
    double support_function(const Vec2& n) const;

    /// Positive outside, negative inside.
    double signed_distance(const Vec2& y) const;

    /// Point-in-set test on the boundary polygon, closed with tolerance.
    bool contains(const Vec2& y, double tol = 1e-12) const;

    /// Euclidean projection onto the polygon (identity inside).
    Projection project(const Vec2& y) const;

    double area() const;
    Vec2 centroid() const;
    double diameter() const;
    /// Center and radius of a ball around the bounding-box center containing Y.
    Vec2 bounding_center() const;
    double bounding_radius() const;
    Eigen::AlignedBox2d bounding_box() const;

private:
    ConvexTarget() = default;
    double polygon_signed_distance(const Vec2& y) const;
    double ellipse_signed_distance(const Vec2& y) const;

    ShapeKind kind_ = ShapeKind::polygon;
    std::vector<Vec2> points_;
    Mat2 matrix_ = Mat2::Identity();
    Vec2 center_ = Vec2::Zero();
    double radius_ = 0.0;
};

/// Support function values aligned with a direction set. Immutable, so it
/// can be shared across threads once built.
class SupportTable {
public:
    SupportTable() = default;
    SupportTable(const ConvexTarget& target, const DirectionSet& dirs);

    const DirectionSet& directions() const { return dirs_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

private:
    DirectionSet dirs_;
    std::vector<double> values_;
};

struct HamiltonianValue {
    double value;
    std::size_t argmax;  // first maximizing index
};

/// max_{n ∈ dirs} (p·n − H*(n)); a lower bound for signed_distance(p).
HamiltonianValue hamiltonian(const Vec2& p, const SupportTable& table);
double hamiltonian(const Vec2& p, const ConvexTarget& target, const DirectionSet& dirs);

/// Directions with n·n_x > margin, in their original order. Throws
/// std::invalid_argument if n_x is not unit or the result is empty.
DirectionSet restrict_directions(const DirectionSet& dirs, const Vec2& n_x, double margin = 0.0);

}  // namespace otma
