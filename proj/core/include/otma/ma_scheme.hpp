#pragma once

#include "otma/density.hpp"
#include "otma/grid.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace otma {

/// Discretization parameters shared by the interior and boundary schemes.
struct SchemeParams {
    double h = 0.0;
    int stencil_width = 2;
    double dtheta = 0.0;
    /// Lax-Friedrichs coefficient, always > K·h when K > 0.
    double delta = 0.0;
    double dalpha = 0.0;
    /// r in the filtered scheme; must shrink with h + dθ.
    double filter_scale = 1.0;
    /// Reference node whose value is subtracted in every interior equation.
    std::size_t u0_index = 0;
    bool monotone_only = false;

    /// delta = max(user_delta, 1.1·K·h); filter_scale = filter_c·(h + dθ);
    /// u0 defaults to the grid center node.
    static SchemeParams make(const Grid& grid, int stencil_width, double dalpha, double lipschitz,
                             double user_delta = 0.0, double filter_c = 10.0,
                             std::optional<std::size_t> u0_index = std::nullopt);
};

/// d(row)/du entry. Rows may list a node more than once; entries add.
struct LinearTerm {
    std::size_t node;
    double coeff;
};

struct Linearized {
    double value = 0.0;
    std::vector<LinearTerm> gradient;
};

/// Everything an interior equation reads besides u itself.
struct InteriorData {
    double rho_x = 0.0;  // source density at the node
    const Density* rho_y = nullptr;
    const ConvexTarget* target = nullptr;
};

/// S(s): identity on [−1, 1], zero outside [−2, 2], linear ramps between.
double filter(double s);
/// One-sided slope of S used by the Newton linearization.
double filter_slope(double s);

/// Smoothed positive/negative parts (a ± √(a² + ε²)) / 2, Jacobian only.
double smooth_max0(double a, double eps);
double smooth_min0(double a, double eps);

/// Monotone wide-stencil operator at an interior node: the minimum over the
/// stencil pairs that fit on the grid of
///   Π max{D_νν u, 0} + Σ min{D_νν u, 0}
/// plus −ρ_X/ρ_Y(D_x u) + δ·ΔU − u(x₀).
double monotone_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data);

/// u_xx·u_yy − u_xy² − ρ_X/ρ_Y(D_x u) − u(x₀) with centered differences.
/// Nodes without a full 3×3 neighborhood return the monotone value.
double accurate_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data);

/// monotone + r·S((accurate − monotone)/r).
double filtered_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data);

/// Value (exact max/min) and derivative with respect to nodal values. The
/// active stencil pair and filter branch are frozen at u; max/min inside the
/// pair are smoothed with ε = h².
Linearized monotone_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data);
Linearized accurate_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data);
Linearized filtered_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data);

}  // namespace otma
