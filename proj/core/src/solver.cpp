#include "otma/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

namespace otma {

// ---------------------------------------------------------------------------
// Problem

Problem Problem::build(const Grid& grid, const Density& rho_x, const Density& rho_y, const ConvexTarget& target,
                       const ProblemOptions& options)
{
    Problem p(target);
    p.grid_ = grid;
    if (options.normalize) {
        std::tie(p.rho_x_, p.rho_y_) = normalize_masses(rho_x, rho_y);
    } else {
        p.rho_x_ = rho_x;
        p.rho_y_ = rho_y;
    }
    p.lipschitz_ = estimate_lipschitz(p.rho_x_, p.rho_y_, target);
    p.directions_ = DirectionSet::uniform(options.dalpha);
    p.params_ = SchemeParams::make(grid, options.stencil_width, p.directions_.dalpha(), p.lipschitz_,
                                   options.user_delta, options.filter_c, options.u0_index);
    p.params_.monotone_only = options.monotone_only;
    p.stencil_ = build_stencil(options.stencil_width);
    p.bc_ = options.bc;

    p.rho_x_nodes_.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        p.rho_x_nodes_[k] = p.rho_x_(grid.point(k));
    }

    // Eight distinct normals on a square; share their tables.
    std::map<std::pair<int, int>, std::shared_ptr<const SupportTable>> tables;
    p.boundary_slot_.assign(grid.size(), -1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.classify(k) != NodeClass::boundary) {
            continue;
        }
        BoundaryNodeContext ctx;
        ctx.node = k;
        ctx.normal = boundary_normal(grid, grid.node(k));
        const std::pair<int, int> key{static_cast<int>(std::lround(ctx.normal.x() * 2)),
                                      static_cast<int>(std::lround(ctx.normal.y() * 2))};
        auto it = tables.find(key);
        if (it == tables.end()) {
            it = tables.emplace(key, admissible_table(ctx.normal, p.directions_, p.target_)).first;
        }
        ctx.admissible = it->second;
        p.boundary_slot_[k] = static_cast<int>(p.boundary_.size());
        p.boundary_.push_back(std::move(ctx));
    }
    return p;
}

std::vector<bool> Problem::support_mask() const
{
    std::vector<bool> mask(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        mask[k] = rho_x_nodes_[k] > 0.0;
    }
    return mask;
}

const BoundaryNodeContext& Problem::boundary_context(std::size_t node) const
{
    const int slot = boundary_slot_.at(node);
    if (slot < 0) {
        throw std::invalid_argument("node is not on the boundary");
    }
    return boundary_[static_cast<std::size_t>(slot)];
}

InteriorData Problem::interior_data(std::size_t node) const
{
    return {rho_x_nodes_[node], &rho_y_, &target_};
}

Problem Problem::with_pin(std::size_t u0_index) const
{
    if (u0_index >= grid_.size()) {
        throw std::invalid_argument("u0 index outside the grid");
    }
    Problem p = *this;
    p.params_.u0_index = u0_index;
    return p;
}

Problem Problem::with_monotone_only(bool monotone_only) const
{
    Problem p = *this;
    p.params_.monotone_only = monotone_only;
    return p;
}

// ---------------------------------------------------------------------------
// Residual and Jacobian

double max_norm(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        if (std::isnan(x)) {
            return x;
        }
        m = std::max(m, std::abs(x));
    }
    return m;
}

GridFunction assemble_residual(const GridFunction& u, const Problem& problem)
{
    const Grid& g = problem.grid();
    if (u.grid.n() != g.n()) {
        throw std::invalid_argument("assemble_residual: grid mismatch");
    }
    GridFunction r(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.classify(k) == NodeClass::interior) {
            r.values[k] = filtered_ma(u, g.node(k), problem.params(), problem.stencil(), problem.interior_data(k));
        } else {
            const auto& ctx = problem.boundary_context(k);
            r.values[k] = problem.boundary_scheme() == BoundaryScheme::compact ? upwind_hj_compact(u, ctx)
                                                                               : upwind_hj_wide(u, ctx);
        }
    }
    return r;
}

Eigen::SparseMatrix<double> assemble_jacobian(const GridFunction& u, const Problem& problem, GridFunction* residual)
{
    const Grid& g = problem.grid();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.size() * 24);
    if (residual != nullptr) {
        *residual = GridFunction(g);
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        Linearized row;
        if (g.classify(k) == NodeClass::interior) {
            row = filtered_ma_linearized(u, g.node(k), problem.params(), problem.stencil(), problem.interior_data(k));
        } else {
            const auto& ctx = problem.boundary_context(k);
            row = problem.boundary_scheme() == BoundaryScheme::compact ? upwind_hj_compact_linearized(u, ctx)
                                                                       : upwind_hj_wide_linearized(u, ctx);
        }
        for (const auto& t : row.gradient) {
            triplets.emplace_back(static_cast<int>(k), static_cast<int>(t.node), t.coeff);
        }
        if (residual != nullptr) {
            residual->values[k] = row.value;
        }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::SparseMatrix<double> jac(n, n);
    jac.setFromTriplets(triplets.begin(), triplets.end());
    jac.makeCompressed();
    return jac;
}

// ---------------------------------------------------------------------------
// Newton

GridFunction initial_guess(const Problem& problem)
{
    const Grid& g = problem.grid();
    const double half = 0.5 * (g.upper() - g.lower());
    const double mid = 0.5 * (g.upper() + g.lower());
    const Vec2 cx(mid, mid);
    const Vec2 cy = problem.target().bounding_center();
    const double m = problem.target().bounding_radius() / half;
    return GridFunction::sample(g, [&](const Vec2& x) { return 0.5 * m * (x - cx).squaredNorm() + cy.dot(x); });
}

namespace {

bool all_finite(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// u ← u + τ·σ·F with σ = +1 on interior rows (decreasing in the center
// value) and −1 on boundary rows (increasing in the center value).
int relax(GridFunction& u, GridFunction& residual, double& norm, const Problem& problem, int cap)
{
    const Grid& g = problem.grid();
    const double h = g.h();
    const double start = norm;
    int steps = 0;
    for (; steps < cap; ++steps) {
        double hess = 1.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.classify(k) != NodeClass::interior) {
                continue;
            }
            const auto p = g.node(k);
            const double uxx = (u(p.i + 1, p.j) + u(p.i - 1, p.j) - 2 * u(p.i, p.j)) / (h * h);
            const double uyy = (u(p.i, p.j + 1) + u(p.i, p.j - 1) - 2 * u(p.i, p.j)) / (h * h);
            hess = std::max({hess, std::abs(uxx), std::abs(uyy)});
        }
        const double tau = h * h / (4.0 * hess);
        const double tau_boundary = 0.5 * h;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.classify(k) == NodeClass::interior) {
                u.values[k] += tau * residual.values[k];
            } else {
                u.values[k] -= tau_boundary * residual.values[k];
            }
        }
        residual = assemble_residual(u, problem);
        norm = max_norm(residual.values);
        if (!std::isfinite(norm) || norm < 0.5 * start) {
            ++steps;
            break;
        }
    }
    return steps;
}

}  // namespace

SolveResult solve(const Problem& problem, std::optional<GridFunction> u_init, const SolverOptions& options)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Grid& g = problem.grid();
    SolveResult result{u_init ? std::move(*u_init) : initial_guess(problem), {}};
    GridFunction& u = result.u;
    SolveReport& report = result.report;
    if (u.grid.n() != g.n()) {
        throw std::invalid_argument("solve: initial guess on a different grid");
    }
    report.tolerance = options.tolerance.value_or(std::max(1e-8, g.h() * g.h()));

    auto finish = [&](bool converged, std::string message) {
        report.converged = converged;
        report.message = std::move(message);
        report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::move(result);
    };

    GridFunction residual(g);
    Eigen::SparseMatrix<double> jac = assemble_jacobian(u, problem, &residual);
    double norm = max_norm(residual.values);
    report.residual_history.push_back(norm);
    int fallback_rounds = 0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    while (true) {
        report.residual_norm = norm;
        if (!std::isfinite(norm)) {
            return finish(false, "non-finite residual");
        }
        if (norm <= report.tolerance) {
            return finish(true, "converged");
        }
        if (report.iterations >= options.max_iterations) {
            return finish(false, "iteration limit reached");
        }
        ++report.iterations;

        bool stalled = false;
        lu.compute(jac);
        Eigen::VectorXd step;
        if (lu.info() != Eigen::Success) {
            stalled = true;
        } else {
            const Eigen::Map<const Eigen::VectorXd> f(residual.values.data(), static_cast<Eigen::Index>(g.size()));
            step = lu.solve(-f);
            if (lu.info() != Eigen::Success || !step.allFinite()) {
                stalled = true;
            }
        }

        if (!stalled) {
            double lambda = 1.0;
            bool accepted = false;
            GridFunction trial(g);
            GridFunction trial_residual(g);
            while (lambda >= options.min_damping) {
                for (std::size_t k = 0; k < g.size(); ++k) {
                    trial.values[k] = u.values[k] + lambda * step[static_cast<Eigen::Index>(k)];
                }
                trial_residual = assemble_residual(trial, problem);
                const double trial_norm = max_norm(trial_residual.values);
                if (std::isfinite(trial_norm) && trial_norm < (1.0 - 1e-4 * lambda) * norm) {
                    accepted = true;
                    u = std::move(trial);
                    residual = std::move(trial_residual);
                    norm = trial_norm;
                    break;
                }
                lambda *= 0.5;
            }
            if (accepted) {
                report.damping.push_back(lambda);
            } else {
                stalled = true;
            }
        }

        if (stalled) {
            if (fallback_rounds >= options.max_fallback_rounds) {
                report.residual_history.push_back(norm);
                report.residual_norm = norm;
                return finish(false, "Newton stalled and relaxation did not recover");
            }
            ++fallback_rounds;
            report.damping.push_back(0.0);
            report.fallback_steps += relax(u, residual, norm, problem, options.fallback_step_cap);
        }
        report.residual_history.push_back(norm);
        if (options.verbose) {
            std::cerr << "newton " << report.iterations << " residual " << norm << " damping "
                      << report.damping.back() << '\n';
        }
        if (!all_finite(u.values)) {
            report.residual_norm = norm;
            return finish(false, "non-finite iterate");
        }
        jac = assemble_jacobian(u, problem, &residual);
        norm = max_norm(residual.values);
    }
}

// ---------------------------------------------------------------------------
// Maps

VectorField extract_map(const GridFunction& u)
{
    const Grid& g = u.grid;
    const int n = g.n();
    const double h = g.h();
    VectorField field{g, std::vector<Vec2>(g.size())};
    auto derivative = [&](int i, int j, int axis) {
        auto at = [&](int s) { return axis == 0 ? u(i + s, j) : u(i, j + s); };
        const int c = axis == 0 ? i : j;
        if (c == 0) {
            return (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
        }
        if (c == n - 1) {
            return (3 * at(0) - 4 * at(-1) + at(-2)) / (2 * h);
        }
        return (at(1) - at(-1)) / (2 * h);
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            field.values[g.index(i, j)] = Vec2(derivative(i, j, 0), derivative(i, j, 1));
        }
    }
    return field;
}

double map_error(const VectorField& field, const ExactMap& exact, const std::vector<bool>& mask)
{
    const Grid& g = field.grid;
    if (mask.size() != g.size()) {
        throw std::invalid_argument("map_error: mask size mismatch");
    }
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (mask[k]) {
            err = std::max(err, (field.values[k] - exact(g.point(k))).norm());
        }
    }
    return err;
}

}  // namespace otma
