#pragma once

#include "otma/convex_target.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace otma {

enum class NodeClass { interior, boundary, exterior };

/// Integer grid offset (a stencil direction in units of h).
struct Offset {
    int dx = 0;
    int dy = 0;

    int norm2() const { return dx * dx + dy * dy; }
    Offset operator-() const { return {-dx, -dy}; }
    friend bool operator==(const Offset&, const Offset&) = default;
};

struct NodeIndex {
    int i = 0;  // x index
    int j = 0;  // y index
    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Uniform grid on the square [lower, upper]², n nodes per side.
/// Nodes are numbered row-major: k = j·n + i.
class Grid {
public:
    Grid() = default;

    /// Throws std::invalid_argument for n < 4 or lower >= upper.
    Grid(double lower, double upper, int n_per_side);

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
    std::size_t index(NodeIndex p) const { return index(p.i, p.j); }
    NodeIndex node(std::size_t k) const
    {
        return {static_cast<int>(k % static_cast<std::size_t>(n_)), static_cast<int>(k / static_cast<std::size_t>(n_))};
    }

    double coord(int i) const { return i == n_ - 1 ? upper_ : lower_ + h_ * i; }
    Vec2 point(int i, int j) const { return {coord(i), coord(j)}; }
    Vec2 point(std::size_t k) const
    {
        const auto p = node(k);
        return point(p.i, p.j);
    }

    bool in_grid(int i, int j) const { return i >= 0 && j >= 0 && i < n_ && j < n_; }
    NodeClass classify(int i, int j) const;
    NodeClass classify(std::size_t k) const
    {
        const auto p = node(k);
        return classify(p.i, p.j);
    }
    std::size_t count(NodeClass c) const;

    /// Node nearest to a point (clamped to the grid).
    std::size_t nearest(const Vec2& x) const;

    /// Bilinear interpolation of nodal values at x (clamped to the square).
    /// Weights are nonnegative.
    double interpolate(std::span<const double> values, const Vec2& x) const;

    /// Bilinear interpolation returning the (up to four) nodes and weights.
    struct Stencil4 {
        std::array<std::size_t, 4> nodes{};
        std::array<double, 4> weights{};
    };
    Stencil4 interpolation_stencil(const Vec2& x) const;

private:
    double lower_ = 0.0;
    double upper_ = 1.0;
    int n_ = 0;
    double h_ = 0.0;
};

Grid build_grid(double lower, double upper, int n_per_side);

/// Scalar field on grid nodes.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(Grid g, double fill = 0.0)
        : grid(g), values(g.size(), fill)
    {
    }
    GridFunction(Grid g, std::vector<double> v);

    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& operator[](std::size_t k) { return values[k]; }

    template <class F>
    static GridFunction sample(const Grid& g, F&& f)
    {
        GridFunction u(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            u.values[k] = f(g.point(k));
        }
        return u;
    }
};

/// Orthogonal pair of grid directions used by the wide-stencil operator.
struct StencilPair {
    Offset first;
    Offset second;
};

struct StencilSet {
    int width = 1;
    std::vector<StencilPair> pairs;
    double dtheta = 0.0;

    /// Largest |component| over all directions in the set.
    int reach() const;
};

/// Pairs (ν, ν⊥) of gcd-reduced integer vectors with max-norm ≤ width,
/// one pair per orthogonal frame, with the first vector's angle in [0, π/2).
/// Throws std::invalid_argument for width outside {1, 2, 3}.
StencilSet build_stencil(int width);

/// Largest gap (radians) between the line directions of a set of pairs.
double stencil_dtheta(const std::vector<StencilPair>& pairs);

/// Pairs whose four neighbors x ± ν₁h, x ± ν₂h lie on the grid.
StencilSet trim_stencil(NodeIndex node, const StencilSet& stencil, const Grid& grid);

/// (u(x+νh) + u(x−νh) − 2u(x)) / (‖ν‖²h²). Throws std::out_of_range if a
/// neighbor is off the grid.
double second_difference(const GridFunction& u, NodeIndex node, Offset nu);

/// (u(x+h e_axis) − u(x−h e_axis)) / 2h, axis ∈ {0, 1}. Throws
/// std::out_of_range off the grid.
double centered_first_difference(const GridFunction& u, NodeIndex node, int axis);

/// CSV with header `i,j,x,y,value`, row-major, 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& u);
void write_csv(const std::string& path, const GridFunction& u);

/// Reads the CSV format above. The grid bounds are recovered from the first
/// and last rows; rows must cover a square grid.
GridFunction read_grid_csv(std::istream& is);
GridFunction read_grid_csv(const std::string& path);

}  // namespace otma
