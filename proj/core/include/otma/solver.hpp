#pragma once

#include "otma/bc_scheme.hpp"
#include "otma/convex_target.hpp"
#include "otma/density.hpp"
#include "otma/grid.hpp"
#include "otma/ma_scheme.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace otma {

struct ProblemOptions {
    int stencil_width = 2;
    double dalpha = 0.0491;
    double user_delta = 0.0;
    double filter_c = 10.0;
    std::optional<std::size_t> u0_index;
    bool monotone_only = false;
    BoundaryScheme bc = BoundaryScheme::compact;
    /// Rescale both densities to unit mass before solving.
    bool normalize = true;
};

/// Discrete second boundary value problem on the padded square. Immutable
/// after `build`; everything the residual needs is precomputed.
class Problem {
public:
    static Problem build(const Grid& grid, const Density& rho_x, const Density& rho_y, const ConvexTarget& target,
                         const ProblemOptions& options = {});

    const Grid& grid() const { return grid_; }
    const Density& rho_x() const { return rho_x_; }
    const Density& rho_y() const { return rho_y_; }
    const ConvexTarget& target() const { return target_; }
    const SchemeParams& params() const { return params_; }
    const StencilSet& stencil() const { return stencil_; }
    const DirectionSet& directions() const { return directions_; }
    BoundaryScheme boundary_scheme() const { return bc_; }
    double lipschitz() const { return lipschitz_; }

    /// ρ_X sampled at the nodes.
    std::span<const double> source_values() const { return rho_x_nodes_; }
    /// Nodes with ρ_X > 0.
    std::vector<bool> support_mask() const;
    const BoundaryNodeContext& boundary_context(std::size_t node) const;
    InteriorData interior_data(std::size_t node) const;

    /// Same problem with a different reference node.
    Problem with_pin(std::size_t u0_index) const;
    Problem with_monotone_only(bool monotone_only) const;

private:
    explicit Problem(ConvexTarget target) : target_(std::move(target)) {}

    Grid grid_;
    Density rho_x_;
    Density rho_y_;
    ConvexTarget target_;
    SchemeParams params_;
    StencilSet stencil_;
    DirectionSet directions_;
    BoundaryScheme bc_ = BoundaryScheme::compact;
    double lipschitz_ = 0.0;
    std::vector<double> rho_x_nodes_;
    std::vector<BoundaryNodeContext> boundary_;
    std::vector<int> boundary_slot_;
};

struct SolveReport {
    int iterations = 0;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    std::vector<double> damping;
    std::vector<double> residual_history;
    int fallback_steps = 0;
    double wall_time = 0.0;
    bool converged = false;
    std::string message;
};

struct SolverOptions {
    /// Defaults to max(1e-8, h²).
    std::optional<double> tolerance;
    int max_iterations = 200;
    double min_damping = 1.0 / 1024.0;
    int fallback_step_cap = 10000;
    int max_fallback_rounds = 3;
    bool verbose = false;
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// Filtered Monge-Ampère rows at interior nodes, upwind Hamilton-Jacobi
/// rows on the square's boundary.
GridFunction assemble_residual(const GridFunction& u, const Problem& problem);

/// Semi-smooth Jacobian of `assemble_residual` (active stencil pair,
/// boundary direction and filter branch frozen at u).
Eigen::SparseMatrix<double> assemble_jacobian(const GridFunction& u, const Problem& problem,
                                              GridFunction* residual = nullptr);

/// Quadratic whose gradient sweeps a ball around Y as x sweeps the square.
GridFunction initial_guess(const Problem& problem);

/// Damped semi-smooth Newton with an explicit relaxation fallback.
SolveResult solve(const Problem& problem, std::optional<GridFunction> u_init = std::nullopt,
                  const SolverOptions& options = {});

double max_norm(std::span<const double> v);

/// Gradient samples on the grid nodes.
struct VectorField {
    Grid grid;
    std::vector<Vec2> values;
};

/// ∇u by centered differences inside, second-order one-sided differences
/// across the square's boundary.
VectorField extract_map(const GridFunction& u);

using ExactMap = std::function<Vec2(const Vec2&)>;

/// max over masked nodes of ‖field − exact‖₂ (0 for an empty mask).
double map_error(const VectorField& field, const ExactMap& exact, const std::vector<bool>& mask);

}  // namespace otma
