#include "otma/bc_scheme.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace otma {

namespace {

constexpr double kZeroComponent = 1e-14;

}  // namespace

BoundaryScheme parse_boundary_scheme(std::string_view name)
{
    if (name == "compact") {
        return BoundaryScheme::compact;
    }
    if (name == "wide") {
        return BoundaryScheme::wide;
    }
    throw std::invalid_argument("unknown boundary scheme '" + std::string(name) + "'");
}

std::string_view to_string(BoundaryScheme scheme)
{
    return scheme == BoundaryScheme::compact ? "compact" : "wide";
}

Vec2 boundary_normal(const Grid& grid, NodeIndex node)
{
    Vec2 n = Vec2::Zero();
    if (node.i == 0) {
        n.x() = -1.0;
    } else if (node.i == grid.n() - 1) {
        n.x() = 1.0;
    }
    if (node.j == 0) {
        n.y() = -1.0;
    } else if (node.j == grid.n() - 1) {
        n.y() = 1.0;
    }
    if (n.isZero()) {
        throw std::invalid_argument("boundary_normal: node is not on the boundary");
    }
    return n.normalized();
}

std::shared_ptr<const SupportTable> admissible_table(const Vec2& normal, const DirectionSet& dirs,
                                                     const ConvexTarget& target)
{
    const bool corner = std::abs(normal.x()) > kZeroComponent && std::abs(normal.y()) > kZeroComponent;
    DirectionSet kept;
    if (corner) {
        const Vec2 ex(normal.x() > 0 ? 1.0 : -1.0, 0.0);
        const Vec2 ey(0.0, normal.y() > 0 ? 1.0 : -1.0);
        kept = restrict_directions(restrict_directions(dirs, ex, -kZeroComponent), ey, -kZeroComponent);
    } else {
        kept = restrict_directions(dirs, normal, std::sin(0.5 * dirs.dalpha()));
    }
    return std::make_shared<const SupportTable>(target, kept);
}

BoundaryNodeContext make_boundary_context(const Grid& grid, NodeIndex node, const DirectionSet& dirs,
                                          const ConvexTarget& target)
{
    BoundaryNodeContext ctx;
    ctx.node = grid.index(node);
    ctx.normal = boundary_normal(grid, node);
    ctx.admissible = admissible_table(ctx.normal, dirs, target);
    return ctx;
}

namespace {

struct Term {
    std::size_t node;
    double coeff;
};

// Linear form approximating ∇u(x)·n by upwind differences: at most 3 terms.
struct UpwindForm {
    std::array<Term, 4> terms{};
    int count = 0;
    bool valid = true;

    void add(std::size_t node, double c) { terms[count++] = {node, c}; }
};

UpwindForm compact_form(const Grid& g, NodeIndex x, const Vec2& n)
{
    UpwindForm f;
    const double h = g.h();
    const std::size_t c = g.index(x);
    double center = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        const double comp = n[axis];
        if (std::abs(comp) <= kZeroComponent) {
            continue;
        }
        const int di = axis == 0 ? 1 : 0;
        const int dj = axis == 0 ? 0 : 1;
        if (comp > 0.0) {
            // comp·(u(x) − u(x − h e))/h
            if (!g.in_grid(x.i - di, x.j - dj)) {
                f.valid = false;
                return f;
            }
            f.add(g.index(x.i - di, x.j - dj), -comp / h);
            center += comp / h;
        } else {
            // comp·(u(x + h e) − u(x))/h
            if (!g.in_grid(x.i + di, x.j + dj)) {
                f.valid = false;
                return f;
            }
            f.add(g.index(x.i + di, x.j + dj), comp / h);
            center -= comp / h;
        }
    }
    f.add(c, center);
    return f;
}

double apply(const UpwindForm& f, const GridFunction& u)
{
    double v = 0.0;
    for (int k = 0; k < f.count; ++k) {
        v += f.terms[k].coeff * u.values[f.terms[k].node];
    }
    return v;
}

double compact_impl(const GridFunction& u, const BoundaryNodeContext& ctx, std::vector<LinearTerm>* grad)
{
    const Grid& g = u.grid;
    const NodeIndex x = g.node(ctx.node);
    const SupportTable& table = *ctx.admissible;
    const auto dirs = table.directions().directions();
    if (dirs.empty()) {
        throw std::invalid_argument("upwind_hj_compact: empty admissible set");
    }
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = dirs.size();
    UpwindForm best_form;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const UpwindForm f = compact_form(g, x, dirs[k]);
        if (!f.valid) {
            throw std::logic_error("upwind_hj_compact: admissible direction points out of the square");
        }
        const double v = apply(f, u) - table[k];
        if (best_k == dirs.size() || v > best) {
            best = v;
            best_k = k;
            best_form = f;
        }
    }
    if (grad != nullptr && best_k < dirs.size()) {
        for (int q = 0; q < best_form.count; ++q) {
            grad->push_back({best_form.terms[q].node, best_form.terms[q].coeff});
        }
    }
    return best;
}

double wide_impl(const GridFunction& u, const BoundaryNodeContext& ctx, std::vector<LinearTerm>* grad)
{
    const Grid& g = u.grid;
    const double h = g.h();
    const Vec2 x = g.point(ctx.node);
    const SupportTable& table = *ctx.admissible;
    const auto dirs = table.directions().directions();
    const double tol = 1e-12 * (g.upper() - g.lower());

    double best = -std::numeric_limits<double>::infinity();
    Grid::Stencil4 best_stencil;
    bool found = false;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        const Vec2 foot = x - h * dirs[k];
        if (foot.x() < g.lower() - tol || foot.x() > g.upper() + tol || foot.y() < g.lower() - tol ||
            foot.y() > g.upper() + tol) {
            continue;
        }
        const auto s = g.interpolation_stencil(foot);
        double interp = 0.0;
        for (int q = 0; q < 4; ++q) {
            interp += s.weights[q] * u.values[s.nodes[q]];
        }
        const double v = (u.values[ctx.node] - interp) / h - table[k];
        if (!found || v > best) {
            best = v;
            best_stencil = s;
            found = true;
        }
    }
    if (!found) {
        throw std::runtime_error("upwind_hj_wide: every admissible direction leaves the square");
    }
    if (grad != nullptr) {
        grad->push_back({ctx.node, 1.0 / h});
        for (int q = 0; q < 4; ++q) {
            if (best_stencil.weights[q] != 0.0) {
                grad->push_back({best_stencil.nodes[q], -best_stencil.weights[q] / h});
            }
        }
    }
    return best;
}

}  // namespace

double upwind_hj_compact(const GridFunction& u, const BoundaryNodeContext& ctx)
{
    return compact_impl(u, ctx, nullptr);
}

double upwind_hj_wide(const GridFunction& u, const BoundaryNodeContext& ctx) { return wide_impl(u, ctx, nullptr); }

Linearized upwind_hj_compact_linearized(const GridFunction& u, const BoundaryNodeContext& ctx)
{
    Linearized out;
    out.value = compact_impl(u, ctx, &out.gradient);
    return out;
}

Linearized upwind_hj_wide_linearized(const GridFunction& u, const BoundaryNodeContext& ctx)
{
    Linearized out;
    out.value = wide_impl(u, ctx, &out.gradient);
    return out;
}

}  // namespace otma
