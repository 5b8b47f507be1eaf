#include "otma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace otma {

Grid::Grid(double lower, double upper, int n_per_side)
    : lower_(lower), upper_(upper), n_(n_per_side)
{
    if (n_per_side < 4) {
        throw std::invalid_argument("grid needs at least 4 nodes per side");
    }
    if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("degenerate grid bounds");
    }
    h_ = (upper - lower) / (n_per_side - 1);
}

Grid build_grid(double lower, double upper, int n_per_side) { return Grid(lower, upper, n_per_side); }

NodeClass Grid::classify(int i, int j) const
{
    if (!in_grid(i, j)) {
        return NodeClass::exterior;
    }
    if (i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1) {
        return NodeClass::boundary;
    }
    return NodeClass::interior;
}

std::size_t Grid::count(NodeClass c) const
{
    std::size_t total = 0;
    for (std::size_t k = 0; k < size(); ++k) {
        total += classify(k) == c ? 1 : 0;
    }
    return total;
}

std::size_t Grid::nearest(const Vec2& x) const
{
    auto snap = [&](double v) {
        return std::clamp(static_cast<int>(std::lround((v - lower_) / h_)), 0, n_ - 1);
    };
    return index(snap(x.x()), snap(x.y()));
}

Grid::Stencil4 Grid::interpolation_stencil(const Vec2& x) const
{
    auto locate = [&](double v, int& cell, double& t) {
        const double s = std::clamp((v - lower_) / h_, 0.0, static_cast<double>(n_ - 1));
        cell = std::min(static_cast<int>(std::floor(s)), n_ - 2);
        t = s - cell;
    };
    int ci = 0;
    int cj = 0;
    double tx = 0.0;
    double ty = 0.0;
    locate(x.x(), ci, tx);
    locate(x.y(), cj, ty);
    Stencil4 s;
    s.nodes = {index(ci, cj), index(ci + 1, cj), index(ci, cj + 1), index(ci + 1, cj + 1)};
    s.weights = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    return s;
}

double Grid::interpolate(std::span<const double> values, const Vec2& x) const
{
    const auto s = interpolation_stencil(x);
    double v = 0.0;
    for (int q = 0; q < 4; ++q) {
        v += s.weights[q] * values[s.nodes[q]];
    }
    return v;
}

GridFunction::GridFunction(Grid g, std::vector<double> v)
    : grid(g), values(std::move(v))
{
    if (values.size() != grid.size()) {
        throw std::invalid_argument("grid function size does not match grid");
    }
}

// ---------------------------------------------------------------------------
// Stencils

int StencilSet::reach() const
{
    int r = 0;
    for (const auto& p : pairs) {
        r = std::max({r, std::abs(p.first.dx), std::abs(p.first.dy), std::abs(p.second.dx), std::abs(p.second.dy)});
    }
    return r;
}

double stencil_dtheta(const std::vector<StencilPair>& pairs)
{
    // Line directions live in [0, π).
    std::vector<double> angles;
    for (const auto& p : pairs) {
        for (const Offset& o : {p.first, p.second}) {
            double a = std::atan2(static_cast<double>(o.dy), static_cast<double>(o.dx));
            if (a < 0.0) {
                a += M_PI;
            }
            if (a >= M_PI - 1e-14) {
                a -= M_PI;
            }
            angles.push_back(a);
        }
    }
    if (angles.empty()) {
        return M_PI;
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + M_PI - angles.back();
    for (std::size_t k = 1; k < angles.size(); ++k) {
        gap = std::max(gap, angles[k] - angles[k - 1]);
    }
    return gap;
}

StencilSet build_stencil(int width)
{
    if (width < 1 || width > 3) {
        throw std::invalid_argument("stencil width must be 1, 2 or 3");
    }
    struct Candidate {
        Offset v;
        double angle;
    };
    std::vector<Candidate> firsts;
    for (int dx = 0; dx <= width; ++dx) {
        for (int dy = 0; dy <= width; ++dy) {
            if (dx == 0) {
                continue;  // angle π/2 belongs to the partner of (1, 0)
            }
            if (std::gcd(dx, dy) != 1) {
                continue;
            }
            firsts.push_back({{dx, dy}, std::atan2(static_cast<double>(dy), static_cast<double>(dx))});
        }
    }
    std::sort(firsts.begin(), firsts.end(), [](const Candidate& a, const Candidate& b) { return a.angle < b.angle; });

    StencilSet s;
    s.width = width;
    for (const auto& c : firsts) {
        s.pairs.push_back({c.v, {-c.v.dy, c.v.dx}});
    }
    s.dtheta = stencil_dtheta(s.pairs);
    return s;
}

StencilSet trim_stencil(NodeIndex node, const StencilSet& stencil, const Grid& grid)
{
    auto fits = [&](Offset o) {
        return grid.in_grid(node.i + o.dx, node.j + o.dy) && grid.in_grid(node.i - o.dx, node.j - o.dy);
    };
    StencilSet out;
    out.width = stencil.width;
    for (const auto& p : stencil.pairs) {
        if (fits(p.first) && fits(p.second)) {
            out.pairs.push_back(p);
        }
    }
    out.dtheta = stencil_dtheta(out.pairs);
    return out;
}

double second_difference(const GridFunction& u, NodeIndex node, Offset nu)
{
    const Grid& g = u.grid;
    if (!g.in_grid(node.i, node.j) || !g.in_grid(node.i + nu.dx, node.j + nu.dy) ||
        !g.in_grid(node.i - nu.dx, node.j - nu.dy)) {
        throw std::out_of_range("second_difference: neighbor outside the grid");
    }
    const double h = g.h();
    return (u(node.i + nu.dx, node.j + nu.dy) + u(node.i - nu.dx, node.j - nu.dy) - 2.0 * u(node.i, node.j)) /
           (nu.norm2() * h * h);
}

double centered_first_difference(const GridFunction& u, NodeIndex node, int axis)
{
    const Grid& g = u.grid;
    const int di = axis == 0 ? 1 : 0;
    const int dj = axis == 0 ? 0 : 1;
    if (axis < 0 || axis > 1) {
        throw std::invalid_argument("axis must be 0 or 1");
    }
    if (!g.in_grid(node.i + di, node.j + dj) || !g.in_grid(node.i - di, node.j - dj)) {
        throw std::out_of_range("centered_first_difference: neighbor outside the grid");
    }
    return (u(node.i + di, node.j + dj) - u(node.i - di, node.j - dj)) / (2.0 * g.h());
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& os, const GridFunction& u)
{
    os << "i,j,x,y,value\n";
    os << std::setprecision(17);
    const Grid& g = u.grid;
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            os << i << ',' << j << ',' << g.coord(i) << ',' << g.coord(j) << ',' << u(i, j) << '\n';
        }
    }
}

void write_csv(const std::string& path, const GridFunction& u)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_csv(os, u);
}

GridFunction read_grid_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("grid csv: empty input");
    }
    if (line.rfind("i,j,x,y,value", 0) != 0) {
        throw std::runtime_error("grid csv: unexpected header '" + line + "'");
    }
    struct Row {
        int i, j;
        double x, y, v;
    };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        Row r{};
        if (!(ss >> r.i >> r.j >> r.x >> r.y >> r.v)) {
            throw std::runtime_error("grid csv: malformed row");
        }
        rows.push_back(r);
    }
    const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
    if (n < 4 || static_cast<std::size_t>(n) * n != rows.size()) {
        throw std::runtime_error("grid csv: rows do not form a square grid");
    }
    double lo = rows.front().x;
    double hi = rows.front().x;
    for (const auto& r : rows) {
        lo = std::min({lo, r.x, r.y});
        hi = std::max({hi, r.x, r.y});
    }
    Grid g(lo, hi, n);
    GridFunction u(g);
    for (const auto& r : rows) {
        if (!g.in_grid(r.i, r.j)) {
            throw std::runtime_error("grid csv: index out of range");
        }
        u(r.i, r.j) = r.v;
    }
    return u;
}

GridFunction read_grid_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_grid_csv(is);
}

}  // namespace otma
