#pragma once

#include "otma/convex_target.hpp"
#include "otma/grid.hpp"
#include "otma/ma_scheme.hpp"

#include <memory>
#include <string_view>

namespace otma {

enum class BoundaryScheme { compact, wide };

BoundaryScheme parse_boundary_scheme(std::string_view name);
std::string_view to_string(BoundaryScheme scheme);

/// Boundary node of the computational square together with the directions
/// the upwind Hamilton-Jacobi scheme may use there.
///
/// Edge nodes carry the axis normal and the uniform directions with
/// n·n_x > sin(dα/2). Corner nodes carry the normalized diagonal and the
/// closed quadrant between the two adjacent edge normals, so every upwind
/// difference points into the square.
struct BoundaryNodeContext {
    std::size_t node = 0;
    Vec2 normal = Vec2::Zero();
    std::shared_ptr<const SupportTable> admissible;
};

/// Outward normal at a boundary node (diagonal at corners).
Vec2 boundary_normal(const Grid& grid, NodeIndex node);

/// Admissible directions and their support values for a given outward normal.
std::shared_ptr<const SupportTable> admissible_table(const Vec2& normal, const DirectionSet& dirs,
                                                     const ConvexTarget& target);

BoundaryNodeContext make_boundary_context(const Grid& grid, NodeIndex node, const DirectionSet& dirs,
                                          const ConvexTarget& target);

/// max_n [ Σ_a upwind_a(n) − H*(n) ] with one-sided differences taken on the
/// side opposite to n in each axis.
double upwind_hj_compact(const GridFunction& u, const BoundaryNodeContext& ctx);

/// max_n [ (u(x) − I[u](x − n·h)) / h − H*(n) ] with bilinear I, over the
/// directions whose foot point stays in the square. Throws
/// std::runtime_error if none does.
double upwind_hj_wide(const GridFunction& u, const BoundaryNodeContext& ctx);

/// Values with the derivative of the active direction's linear form.
Linearized upwind_hj_compact_linearized(const GridFunction& u, const BoundaryNodeContext& ctx);
Linearized upwind_hj_wide_linearized(const GridFunction& u, const BoundaryNodeContext& ctx);

}  // namespace otma
