#pragma once

#include "otma/convex_target.hpp"
#include "otma/solver.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace otma {

/// Equal-mass atoms; every weight is 1/m.
struct DiscreteMeasure {
    std::vector<Vec2> points;

    std::size_t size() const { return points.size(); }
    double weight() const { return points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()); }
};

struct Assignment {
    /// sigma[i] is the destination atom of source atom i.
    std::vector<std::size_t> sigma;
    /// Σ‖x_i − y_σ(i)‖² (unweighted).
    double cost = 0.0;
};

inline constexpr std::size_t kMaxAssignmentSize = 400;

/// Exact minimizer of the quadratic matching cost (Hungarian method with
/// potentials, O(m³)). Throws std::invalid_argument on a size mismatch or
/// m > kMaxAssignmentSize.
Assignment optimal_assignment(const DiscreteMeasure& src, const DiscreteMeasure& dst);

/// Brute force over all m! permutations, m ≤ 8.
Assignment exhaustive_assignment(const DiscreteMeasure& src, const DiscreteMeasure& dst);

/// Σ w·|x_i − y_σ(i)|² with the uniform atom weight w = 1/m.
double assignment_cost(const DiscreteMeasure& src, const DiscreteMeasure& dst, const std::vector<std::size_t>& sigma);

/// Exactly m points of a shifted square lattice restricted to the region.
/// The spacing is tuned by bisection; surplus points are thinned evenly.
/// Deterministic. Throws std::invalid_argument if m lattice points cannot
/// be found inside the box.
DiscreteMeasure stratified_sample(const std::function<bool(const Vec2&)>& region, const Eigen::AlignedBox2d& box,
                                  std::size_t m);

struct CrossValidation {
    DiscreteMeasure source;
    DiscreteMeasure target;
    Assignment assignment;
    /// ∇u interpolated at the source atoms.
    std::vector<Vec2> predicted;
    double max_discrepancy = 0.0;
    double mean_discrepancy = 0.0;
};

/// Compares the interpolated map with the discrete optimal matching of m
/// stratified samples from the source region and the target.
CrossValidation cross_validate(const std::function<bool(const Vec2&)>& source_region, const ConvexTarget& target,
                               const VectorField& map, std::size_t m);

}  // namespace otma
