#pragma once

#include "otma/solver.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace otma {

/// Linear optimal map A = M_y R_θ M_x⁻¹ between the uniform densities on
/// the ellipses M_x·B₁ and M_y·B₁. The rotation angle comes from
/// tan θ = tr(M_x⁻¹M_y⁻¹J) / tr(M_x⁻¹M_y⁻¹); its sign is fixed by requiring
/// A to be symmetric positive definite. Throws std::invalid_argument for
/// non-SPD inputs.
Mat2 exact_ellipse_map(const Mat2& mx, const Mat2& my);

/// A reproducible source → target problem family.
struct ExperimentSpec {
    std::string name;
    /// Computational square [lower, upper]²; N_X + 1 nodes per side.
    double lower = -1.0;
    double upper = 1.0;
    /// Support of the uniform source density.
    std::function<bool(const Vec2&)> source_region;
    /// Target polygon sampled at resolution N_Y.
    std::function<ConvexTarget(int ny)> target;
    std::optional<ExactMap> exact_map;
    std::vector<int> nx_values;
    std::vector<int> ny_values;
};

/// Ellipse M_x·B₁ → ellipse M_y·B₁ with the matrices of the reference run.
ExperimentSpec ellipse_spec();
ExperimentSpec ellipse_spec(const Mat2& mx, const Mat2& my);

/// Two half-disks of radius 0.85 (cut at x₁ = −0.2 and x₁ = 0.1) → the disk
/// of radius 0.85. The exact map translates the left piece by +0.2 and the
/// right piece by −0.1 along x₁.
ExperimentSpec split_domain_spec();
Vec2 split_exact_map(const Vec2& x);

/// Uniform square [−1, 1]² → a convex shape. Shapes: square (identity),
/// circle, triangle, diamond, icecream, bowl.
ExperimentSpec gallery_spec(const std::string& shape);
std::vector<std::string> gallery_shapes();

/// Resolve "ellipse", "split" or "gallery:<shape>".
ExperimentSpec experiment_by_name(const std::string& name);

struct RunOptions {
    ProblemOptions problem;
    SolverOptions solver;
    /// Nodes per side of the target-density quadrature grid.
    int target_quadrature = 513;
};

Problem build_experiment_problem(const ExperimentSpec& spec, int nx, int ny, const RunOptions& options = {});

struct RunResult {
    int nx = 0;
    int ny = 0;
    SolveResult solution;
    VectorField map;
    std::vector<bool> support;
    /// NaN without an exact map.
    double map_error = 0.0;
    /// max signed distance of ∇u(node) to Y over support nodes.
    double containment = 0.0;
};

RunResult run_experiment(const ExperimentSpec& spec, int nx, int ny, const RunOptions& options = {});
/// Continues from a previous run's potential (e.g. a second pin location).
RunResult run_experiment(const Problem& problem, const ExperimentSpec& spec, int nx, int ny,
                         const RunOptions& options, std::optional<GridFunction> u_init);

/// max over support nodes of signed_distance(∇u(node), Y).
double pushforward_containment(const VectorField& map, const std::vector<bool>& support, const ConvexTarget& target);

struct TableResult {
    std::string name;
    std::vector<int> nx_values;
    std::vector<int> ny_values;
    /// errors[a][b] for (nx_values[a], ny_values[b]); NaN on solver failure.
    std::vector<std::vector<double>> errors;
    std::vector<std::vector<SolveReport>> reports;
    bool all_converged() const;
};

/// Map errors over the (N_X, N_Y) table. Failed cells are NaN; the run
/// continues. Throws std::invalid_argument without an exact map.
TableResult run_table(const ExperimentSpec& spec, const std::vector<int>& nx_values,
                      const std::vector<int>& ny_values, const RunOptions& options = {});

/// Rows are N_X, columns N_Y: header `N_X,<ny>...`.
void write_table_csv(std::ostream& os, const TableResult& table);

}  // namespace otma
