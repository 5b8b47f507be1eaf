#include "otma/ma_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otma {

SchemeParams SchemeParams::make(const Grid& grid, int stencil_width, double dalpha, double lipschitz,
                                double user_delta, double filter_c, std::optional<std::size_t> u0_index)
{
    if (!(dalpha > 0.0)) {
        throw std::invalid_argument("dalpha must be positive");
    }
    if (!(filter_c > 0.0)) {
        throw std::invalid_argument("filter constant must be positive");
    }
    SchemeParams p;
    p.h = grid.h();
    p.stencil_width = stencil_width;
    p.dtheta = build_stencil(stencil_width).dtheta;
    p.delta = std::max(user_delta, 1.1 * lipschitz * p.h);
    p.dalpha = dalpha;
    p.filter_scale = filter_c * (p.h + p.dtheta);
    p.u0_index = u0_index.value_or(grid.index(grid.n() / 2, grid.n() / 2));
    if (p.u0_index >= grid.size()) {
        throw std::invalid_argument("u0 index outside the grid");
    }
    return p;
}

double filter(double s)
{
    const double a = std::abs(s);
    if (a <= 1.0) {
        return s;
    }
    if (a >= 2.0) {
        return 0.0;
    }
    return s > 0.0 ? 2.0 - s : -s - 2.0;
}

double filter_slope(double s)
{
    const double a = std::abs(s);
    if (a <= 1.0) {
        return 1.0;
    }
    if (a >= 2.0) {
        return 0.0;
    }
    return -1.0;
}

double smooth_max0(double a, double eps) { return 0.5 * (a + std::sqrt(a * a + eps * eps)); }
double smooth_min0(double a, double eps) { return 0.5 * (a - std::sqrt(a * a + eps * eps)); }

namespace {

double smooth_max0_slope(double a, double eps) { return 0.5 * (1.0 + a / std::sqrt(a * a + eps * eps)); }
double smooth_min0_slope(double a, double eps) { return 0.5 * (1.0 - a / std::sqrt(a * a + eps * eps)); }

class Sink {
public:
    explicit Sink(std::vector<LinearTerm>* out) : out_(out) {}
    bool active() const { return out_ != nullptr; }
    void add(std::size_t node, double c)
    {
        if (out_ != nullptr) {
            out_->push_back({node, c});
        }
    }

private:
    std::vector<LinearTerm>* out_;
};

void require_interior(const Grid& g, NodeIndex node)
{
    if (g.classify(node.i, node.j) != NodeClass::interior) {
        throw std::invalid_argument("interior scheme evaluated at a non-interior node");
    }
}

// −ρ_X/ρ_Y(D_x u) [+ δ·Δu] − u(x₀)
double gradient_terms(const GridFunction& u, NodeIndex node, const SchemeParams& params, const InteriorData& data,
                      bool lax_friedrichs, Sink& sink)
{
    const Grid& g = u.grid;
    const int i = node.i;
    const int j = node.j;
    const double h = g.h();
    const std::size_t c = g.index(i, j);
    const std::size_t e = g.index(i + 1, j);
    const std::size_t w = g.index(i - 1, j);
    const std::size_t n = g.index(i, j + 1);
    const std::size_t s = g.index(i, j - 1);

    double value = -u.values[params.u0_index];
    sink.add(params.u0_index, -1.0);

    if (data.rho_x != 0.0) {
        const Vec2 p((u.values[e] - u.values[w]) / (2 * h), (u.values[n] - u.values[s]) / (2 * h));
        const RatioValue r = ratio_with_derivative(data.rho_x, *data.rho_y, p, *data.target);
        value -= r.value;
        if (sink.active() && (r.dp.x() != 0.0 || r.dp.y() != 0.0)) {
            sink.add(e, -r.dp.x() / (2 * h));
            sink.add(w, r.dp.x() / (2 * h));
            sink.add(n, -r.dp.y() / (2 * h));
            sink.add(s, r.dp.y() / (2 * h));
        }
    }
    if (lax_friedrichs && params.delta != 0.0) {
        const double lap = (u.values[e] + u.values[w] + u.values[n] + u.values[s] - 4 * u.values[c]) / (h * h);
        value += params.delta * lap;
        const double k = params.delta / (h * h);
        sink.add(e, k);
        sink.add(w, k);
        sink.add(n, k);
        sink.add(s, k);
        sink.add(c, -4 * k);
    }
    return value;
}

bool pair_fits(const Grid& g, NodeIndex node, const StencilPair& p)
{
    auto fits = [&](Offset o) {
        return g.in_grid(node.i + o.dx, node.j + o.dy) && g.in_grid(node.i - o.dx, node.j - o.dy);
    };
    return fits(p.first) && fits(p.second);
}

double directional(const GridFunction& u, NodeIndex node, Offset nu)
{
    const double h = u.grid.h();
    return (u(node.i + nu.dx, node.j + nu.dy) + u(node.i - nu.dx, node.j - nu.dy) - 2.0 * u(node.i, node.j)) /
           (nu.norm2() * h * h);
}

void add_directional(const Grid& g, NodeIndex node, Offset nu, double coeff, Sink& sink)
{
    const double k = coeff / (nu.norm2() * g.h() * g.h());
    sink.add(g.index(node.i + nu.dx, node.j + nu.dy), k);
    sink.add(g.index(node.i - nu.dx, node.j - nu.dy), k);
    sink.add(g.index(node.i, node.j), -2 * k);
}

double monotone_impl(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                     const InteriorData& data, Sink& sink)
{
    const Grid& g = u.grid;
    require_interior(g, node);

    double best = std::numeric_limits<double>::infinity();
    const StencilPair* active = nullptr;
    double active_a = 0.0;
    double active_b = 0.0;
    for (const auto& pair : stencil.pairs) {
        if (!pair_fits(g, node, pair)) {
            continue;
        }
        const double a = directional(u, node, pair.first);
        const double b = directional(u, node, pair.second);
        const double v = std::max(a, 0.0) * std::max(b, 0.0) + std::min(a, 0.0) + std::min(b, 0.0);
        if (active == nullptr || v < best) {
            best = v;
            active = &pair;
            active_a = a;
            active_b = b;
        }
    }
    if (active == nullptr) {
        throw std::logic_error("monotone_ma: no stencil pair fits at an interior node");
    }
    if (sink.active()) {
        const double eps = params.h * params.h;
        const double ca = smooth_max0_slope(active_a, eps) * smooth_max0(active_b, eps) + smooth_min0_slope(active_a, eps);
        const double cb = smooth_max0_slope(active_b, eps) * smooth_max0(active_a, eps) + smooth_min0_slope(active_b, eps);
        add_directional(g, node, active->first, ca, sink);
        add_directional(g, node, active->second, cb, sink);
    }
    return best + gradient_terms(u, node, params, data, true, sink);
}

bool has_full_neighborhood(const Grid& g, NodeIndex node)
{
    return g.in_grid(node.i - 1, node.j - 1) && g.in_grid(node.i + 1, node.j + 1);
}

double accurate_impl(const GridFunction& u, NodeIndex node, const SchemeParams& params, const InteriorData& data,
                     Sink& sink)
{
    const Grid& g = u.grid;
    const int i = node.i;
    const int j = node.j;
    const double h2 = g.h() * g.h();
    const double uxx = (u(i + 1, j) + u(i - 1, j) - 2 * u(i, j)) / h2;
    const double uyy = (u(i, j + 1) + u(i, j - 1) - 2 * u(i, j)) / h2;
    const double uxy = (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4 * h2);
    if (sink.active()) {
        // d(uxx·uyy − uxy²) = uyy·d(uxx) + uxx·d(uyy) − 2·uxy·d(uxy)
        sink.add(g.index(i + 1, j), uyy / h2);
        sink.add(g.index(i - 1, j), uyy / h2);
        sink.add(g.index(i, j + 1), uxx / h2);
        sink.add(g.index(i, j - 1), uxx / h2);
        sink.add(g.index(i, j), -2 * (uxx + uyy) / h2);
        const double k = -2 * uxy / (4 * h2);
        sink.add(g.index(i + 1, j + 1), k);
        sink.add(g.index(i - 1, j - 1), k);
        sink.add(g.index(i + 1, j - 1), -k);
        sink.add(g.index(i - 1, j + 1), -k);
    }
    return uxx * uyy - uxy * uxy + gradient_terms(u, node, params, data, false, sink);
}

}  // namespace

double monotone_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data)
{
    Sink none(nullptr);
    return monotone_impl(u, node, params, stencil, data, none);
}

double accurate_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data)
{
    require_interior(u.grid, node);
    Sink none(nullptr);
    if (!has_full_neighborhood(u.grid, node)) {
        return monotone_impl(u, node, params, stencil, data, none);
    }
    return accurate_impl(u, node, params, data, none);
}

double filtered_ma(const GridFunction& u, NodeIndex node, const SchemeParams& params, const StencilSet& stencil,
                   const InteriorData& data)
{
    const double m = monotone_ma(u, node, params, stencil, data);
    if (params.monotone_only) {
        return m;
    }
    const double a = accurate_ma(u, node, params, stencil, data);
    const double r = params.filter_scale;
    return m + r * filter((a - m) / r);
}

Linearized monotone_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data)
{
    Linearized out;
    Sink sink(&out.gradient);
    out.value = monotone_impl(u, node, params, stencil, data, sink);
    return out;
}

Linearized accurate_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data)
{
    require_interior(u.grid, node);
    Linearized out;
    Sink sink(&out.gradient);
    if (!has_full_neighborhood(u.grid, node)) {
        out.value = monotone_impl(u, node, params, stencil, data, sink);
    } else {
        out.value = accurate_impl(u, node, params, data, sink);
    }
    return out;
}

Linearized filtered_ma_linearized(const GridFunction& u, NodeIndex node, const SchemeParams& params,
                                  const StencilSet& stencil, const InteriorData& data)
{
    Linearized m = monotone_ma_linearized(u, node, params, stencil, data);
    if (params.monotone_only) {
        return m;
    }
    Linearized a = accurate_ma_linearized(u, node, params, stencil, data);
    const double r = params.filter_scale;
    const double s = (a.value - m.value) / r;
    const double slope = filter_slope(s);

    Linearized out;
    out.value = m.value + r * filter(s);
    out.gradient = std::move(m.gradient);
    if (slope != 0.0) {
        const std::size_t nm = out.gradient.size();
        out.gradient.reserve(nm * 2 + a.gradient.size());
        for (std::size_t k = 0; k < nm; ++k) {
            out.gradient.push_back({out.gradient[k].node, -slope * out.gradient[k].coeff});
        }
        for (const auto& t : a.gradient) {
            out.gradient.push_back({t.node, slope * t.coeff});
        }
    }
    return out;
}

}  // namespace otma
