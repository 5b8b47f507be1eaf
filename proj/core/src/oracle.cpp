#include "otma/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otma {

double assignment_cost(const DiscreteMeasure& src, const DiscreteMeasure& dst, const std::vector<std::size_t>& sigma)
{
    double c = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        c += (src.points[i] - dst.points[sigma[i]]).squaredNorm();
    }
    return c * src.weight();
}

Assignment optimal_assignment(const DiscreteMeasure& src, const DiscreteMeasure& dst)
{
    const std::size_t m = src.size();
    if (dst.size() != m) {
        throw std::invalid_argument("optimal_assignment: measures have different sizes");
    }
    if (m > kMaxAssignmentSize) {
        throw std::invalid_argument("optimal_assignment: too many atoms");
    }
    Assignment out;
    if (m == 0) {
        return out;
    }

    // 1-based rows/columns; column 0 is the virtual start.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);
    for (std::size_t i = 1; i <= m; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = (src.points[i0 - 1] - dst.points[j - 1]).squaredNorm() - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    out.sigma.assign(m, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        out.sigma[p[j] - 1] = j - 1;
    }
    out.cost = assignment_cost(src, dst, out.sigma);
    return out;
}

Assignment exhaustive_assignment(const DiscreteMeasure& src, const DiscreteMeasure& dst)
{
    if (dst.size() != src.size()) {
        throw std::invalid_argument("exhaustive_assignment: measures have different sizes");
    }
    if (src.size() > 8) {
        throw std::invalid_argument("exhaustive_assignment: at most 8 atoms");
    }
    std::vector<std::size_t> perm(src.size());
    std::iota(perm.begin(), perm.end(), 0);
    Assignment best{perm, assignment_cost(src, dst, perm)};
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double c = assignment_cost(src, dst, perm);
        if (c < best.cost) {
            best = {perm, c};
        }
    }
    return best;
}

namespace {

std::vector<Vec2> lattice(const std::function<bool(const Vec2&)>& region, const Eigen::AlignedBox2d& box,
                          double spacing)
{
    // Irrational offsets keep lattice rows off symmetry axes of the region.
    const Vec2 origin = box.min() + spacing * Vec2(0.5 * (std::sqrt(5.0) - 1.0), 0.5 * (std::sqrt(2.0) - 1.0));
    std::vector<Vec2> pts;
    for (double y = origin.y(); y <= box.max().y(); y += spacing) {
        for (double x = origin.x(); x <= box.max().x(); x += spacing) {
            const Vec2 p(x, y);
            if (region(p)) {
                pts.push_back(p);
            }
        }
    }
    return pts;
}

}  // namespace

DiscreteMeasure stratified_sample(const std::function<bool(const Vec2&)>& region, const Eigen::AlignedBox2d& box,
                                  std::size_t m)
{
    if (m == 0) {
        return {};
    }
    const double side = box.sizes().maxCoeff();
    double hi = side;
    double lo = side / (4.0 * std::sqrt(static_cast<double>(m)) + 4.0);
    if (lattice(region, box, lo).size() < m) {
        lo /= 8.0;
        if (lattice(region, box, lo).size() < m) {
            throw std::invalid_argument("stratified_sample: region too small for the requested count");
        }
    }
    // Smallest count ≥ m found along the bisection.
    std::vector<Vec2> best = lattice(region, box, lo);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto pts = lattice(region, box, mid);
        if (pts.size() >= m) {
            lo = mid;
            if (pts.size() < best.size()) {
                best = std::move(pts);
            }
            if (best.size() == m) {
                break;
            }
        } else {
            hi = mid;
        }
    }
    DiscreteMeasure out;
    out.points.reserve(m);
    const std::size_t n = best.size();
    for (std::size_t k = 0; k < m; ++k) {
        out.points.push_back(best[(2 * k + 1) * n / (2 * m)]);
    }
    return out;
}

CrossValidation cross_validate(const std::function<bool(const Vec2&)>& source_region, const ConvexTarget& target,
                               const VectorField& map, std::size_t m)
{
    const Grid& g = map.grid;
    const Eigen::AlignedBox2d square(Vec2::Constant(g.lower()), Vec2::Constant(g.upper()));

    CrossValidation cv;
    cv.source = stratified_sample(source_region, square, m);
    cv.target = stratified_sample([&target](const Vec2& y) { return target.contains(y); }, target.bounding_box(), m);
    cv.assignment = optimal_assignment(cv.source, cv.target);

    std::vector<double> tx(map.values.size()), ty(map.values.size());
    for (std::size_t k = 0; k < map.values.size(); ++k) {
        tx[k] = map.values[k].x();
        ty[k] = map.values[k].y();
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& x = cv.source.points[i];
        const Vec2 p(g.interpolate(tx, x), g.interpolate(ty, x));
        cv.predicted.push_back(p);
        const double d = (p - cv.target.points[cv.assignment.sigma[i]]).norm();
        cv.max_discrepancy = std::max(cv.max_discrepancy, d);
        total += d;
    }
    cv.mean_discrepancy = m > 0 ? total / static_cast<double>(m) : 0.0;
    return cv;
}

}  // namespace otma
