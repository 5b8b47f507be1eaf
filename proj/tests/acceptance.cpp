// Acceptance suite. Prints one PASS/FAIL line per criterion.
//   otma_acceptance            run all criteria
//   otma_acceptance 4 7        run the listed criteria only

#include "otma/experiments.hpp"
#include "otma/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace otma;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void append(Outcome& o, bool ok, const std::string& s)
{
    o.pass = o.pass && ok;
    if (!o.detail.empty()) {
        o.detail += "; ";
    }
    o.detail += s;
}

RunOptions mode_options(bool monotone_only)
{
    RunOptions o;
    o.problem.monotone_only = monotone_only;
    // The monotone scheme alone has an O(dθ) consistency floor; the width-3
    // stencil keeps that floor below the table's error level.
    o.problem.stencil_width = monotone_only ? 3 : 2;
    return o;
}

const char* mode_name(bool monotone_only) { return monotone_only ? "monotone" : "filtered"; }

// 1 -------------------------------------------------------------------------

Outcome filter_exactness()
{
    Outcome o;
    const bool values = filter(0.5) == 0.5 && filter(1.5) == 0.5 && filter(-1.5) == -0.5 && filter(3.0) == 0.0 &&
                        filter(-3.0) == 0.0;
    append(o, values, "S(0.5)=0.5, S(±1.5)=±0.5, S(±3)=0");
    double jump = 0.0;
    for (double s : {-2.0, -1.0, 1.0, 2.0}) {
        const double e = 1e-12;
        jump = std::max({jump, std::abs(filter(s + e) - filter(s)), std::abs(filter(s - e) - filter(s))});
    }
    append(o, jump <= 1e-11, fmt("max jump at ±1, ±2 = %.1e", jump));
    return o;
}

// 2 -------------------------------------------------------------------------

Outcome ellipticity()
{
    const Grid grid(-1.0, 1.0, 7);
    const ConvexTarget target = ConvexTarget::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
    const Grid quad = target_quadrature_grid(target, 65);
    const auto inside = [&target](const Vec2& y) { return target.contains(y); };
    const std::vector<Density> targets = {uniform_density(target, quad),
                                          affine_density(1.0, Vec2(0.5, 0.0), inside, quad)};
    const Density source = uniform_density([](const Vec2&) { return true; }, grid);

    std::mt19937 rng(20);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const NodeIndex node{3, 3};
    const std::size_t pin = grid.index(1, 4);
    int violations = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Density& rho_y = targets[trial % 2];
        const double k = estimate_lipschitz(source, rho_y, target);
        const SchemeParams params = SchemeParams::make(grid, 2, 0.0491, k, 0.0, 10.0, pin);
        const StencilSet stencil = build_stencil(2);
        const InteriorData data{1.0, &rho_y, &target};

        GridFunction u(grid), v(grid);
        const double a = 0.2 + 2.0 * unit(rng), b = 0.2 + 2.0 * unit(rng), c = unit(rng) - 0.5;
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const Vec2 x = grid.point(n);
            u[n] = 0.5 * (a * x.x() * x.x() + b * x.y() * x.y()) + c * x.x() * x.y() + 0.05 * (unit(rng) - 0.5);
            v[n] = u[n] + (unit(rng) < 0.5 ? 0.0 : 0.3 * unit(rng));
        }
        v[grid.index(node)] = u[grid.index(node)];
        v[pin] = u[pin];
        const double mu = monotone_ma(u, node, params, stencil, data);
        const double mv = monotone_ma(v, node, params, stencil, data);
        if (mu > mv + 1e-12 * (1.0 + std::abs(mu))) {
            ++violations;
            worst = std::max(worst, mu - mv);
        }
    }
    Outcome o;
    append(o, violations == 0, fmt("%d violations of MA[u] <= MA[v] in 1000 pairs (worst %.2e)", violations, worst));
    return o;
}

// 3 -------------------------------------------------------------------------

Outcome boundary_monotonicity()
{
    const Grid grid(-1.0, 1.0, 9);
    const ConvexTarget target = ConvexTarget::sampled_circle(Vec2(0.1, -0.05), 0.9, 64);
    const DirectionSet dirs = DirectionSet::uniform(0.0491);
    const int m = grid.n() - 1, c = m / 2;
    const std::vector<NodeIndex> nodes = {{0, c}, {m, c}, {c, 0}, {c, m}, {0, 0}, {m, 0}, {0, m}, {m, m}};

    std::mt19937 rng(30);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0, checks = 0;
    for (const NodeIndex& node : nodes) {
        const BoundaryNodeContext ctx = make_boundary_context(grid, node, dirs, target);
        for (int trial = 0; trial < 500; ++trial) {
            GridFunction u(grid);
            for (auto& x : u.values) {
                x = unit(rng) - 0.5;
            }
            const double base = upwind_hj_compact(u, ctx);
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (!grid.in_grid(node.i + di, node.j + dj)) {
                        continue;
                    }
                    GridFunction w = u;
                    w(node.i + di, node.j + dj) += 0.5 * unit(rng) + 1e-3;
                    const double val = upwind_hj_compact(w, ctx);
                    const bool center = di == 0 && dj == 0;
                    const bool bad = center ? val < base - 1e-12 : val > base + 1e-12;
                    violations += bad ? 1 : 0;
                    ++checks;
                }
            }
        }
    }
    Outcome o;
    append(o, violations == 0, fmt("%d violations in %d perturbations (4 edges, 4 corners)", violations, checks));
    return o;
}

// 4 -------------------------------------------------------------------------

Outcome consistency()
{
    Outcome o;
    double prev_interior = INFINITY, prev_boundary = INFINITY;
    bool trend = true;
    for (int n : {32, 64, 128}) {
        const ExperimentSpec spec = gallery_spec("square");
        const Problem p = build_experiment_problem(spec, n, n);
        const double h = p.grid().h();
        const GridFunction u = GridFunction::sample(p.grid(), [](const Vec2& x) { return 0.5 * x.squaredNorm(); });
        const GridFunction r = assemble_residual(u, p);
        double ri = 0.0, rb = 0.0;
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            double& target = p.grid().classify(k) == NodeClass::interior ? ri : rb;
            target = std::max(target, std::abs(r[k]));
        }
        const double dalpha = p.directions().dalpha();
        append(o, ri <= 5 * h && rb <= 5 * (h + dalpha),
               fmt("h=1/%d interior %.2e (<= %.3f) boundary %.2e (<= %.3f)", n / 2, ri, 5 * h, rb, 5 * (h + dalpha)));
        trend = trend && ri <= prev_interior && rb < prev_boundary;
        prev_interior = ri;
        prev_boundary = rb;
    }
    append(o, trend, trend ? "residuals decrease under refinement" : "residuals do not decrease");
    return o;
}

// 5 -------------------------------------------------------------------------

Outcome hamiltonian_fidelity()
{
    const DirectionSet dirs = DirectionSet::uniform(0.0491);
    const double dalpha = dirs.dalpha();
    const std::vector<std::pair<const char*, ConvexTarget>> shapes = {
        {"square", ConvexTarget::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})},
        {"triangle", ConvexTarget::polygon({{-1.2, -0.8}, {1.2, -0.8}, {0.0, 1.2}})},
        {"diamond", ConvexTarget::polygon({{1.3, 0.0}, {0.0, 1.0}, {-1.3, 0.0}, {0.0, -1.0}})},
        {"skew", ConvexTarget::polygon({{0.0, 0.0}, {2.0, 0.3}, {2.2, 1.0}, {0.4, 1.5}})},
        {"circle64", ConvexTarget::sampled_circle(Vec2(0.3, -0.2), 0.85, 64)},
    };
    std::mt19937 rng(50);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Outcome o;
    for (const auto& [name, y] : shapes) {
        const SupportTable table(y, dirs);
        const auto box = y.bounding_box();
        const Vec2 lo = box.min() - 0.5 * box.sizes(), span = 2.0 * box.sizes();
        const auto draw = [&] { return Vec2(lo.x() + span.x() * unit(rng), lo.y() + span.y() * unit(rng)); };
        const double bound = 3 * dalpha * y.diameter();
        double worst = 0.0, lip = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const Vec2 p = draw(), q = draw();
            const double hp = hamiltonian(p, table).value;
            worst = std::max(worst, std::abs(hp - y.signed_distance(p)));
            lip = std::max(lip, (std::abs(hp - hamiltonian(q, table).value) - (p - q).norm()));
        }
        append(o, worst <= bound && lip <= 1e-12,
               fmt("%s |H-d| %.2e (<= %.2e), Lipschitz excess %.1e", name, worst, bound, std::max(lip, 0.0)));
    }
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome identity_transport()
{
    Outcome o;
    for (bool mono : {false, true}) {
        const RunResult r = run_experiment(gallery_spec("square"), 64, 64, mode_options(mono));
        const double h = r.solution.u.grid.h();
        const double bound = 2 * (h + DirectionSet::uniform(0.0491).dalpha());
        append(o, r.solution.report.converged && r.map_error <= bound,
               fmt("%s error %.4f (<= %.4f)", mode_name(mono), r.map_error, bound));
    }
    return o;
}

// 7 -------------------------------------------------------------------------

Outcome ellipse_table()
{
    Outcome o;
    const ExperimentSpec spec = ellipse_spec();
    for (bool mono : {false, true}) {
        const RunResult r64 = run_experiment(spec, 64, 64, mode_options(mono));
        const RunResult r128 = run_experiment(spec, 128, 128, mode_options(mono));
        const auto within = [](double e, double ref) { return e >= ref / 2 && e <= 2 * ref; };
        const bool ok = r64.solution.report.converged && r128.solution.report.converged &&
                        within(r64.map_error, 0.0291) && within(r128.map_error, 0.0168) &&
                        r128.map_error < r64.map_error;
        append(o, ok,
               fmt("%s (64,64) %.4f vs 0.0291, (128,128) %.4f vs 0.0168", mode_name(mono), r64.map_error,
                   r128.map_error));
    }
    return o;
}

// 8 -------------------------------------------------------------------------

// The translation map must push the uniform measure on the two half-disks
// onto the uniform disk and be the gradient of a convex potential.
Outcome verify_split_map()
{
    const ExperimentSpec spec = split_domain_spec();
    const double r = 0.85, s = 0.002;
    long in_x = 0, in_y = 0, outside = 0, covered = 0;
    double left_max = -INFINITY, right_min = INFINITY;
    for (double a = -1.1 + s / 2; a < 1.1; a += s) {
        for (double b = -1.1 + s / 2; b < 1.1; b += s) {
            const Vec2 x(a, b);
            if (spec.source_region(x)) {
                ++in_x;
                const Vec2 t = split_exact_map(x);
                outside += t.norm() > r + 1e-12 ? 1 : 0;
                (x.x() < 0 ? left_max : right_min) =
                    x.x() < 0 ? std::max(left_max, t.x()) : std::min(right_min, t.x());
            }
            if (x.norm() < r) {
                ++in_y;
                const Vec2 pre = x.x() < 0 ? Vec2(x.x() - 0.2, x.y()) : Vec2(x.x() + 0.1, x.y());
                covered += spec.source_region(pre) ? 1 : 0;
            }
        }
    }
    Outcome o;
    const double mass_gap = std::abs(double(in_x - in_y)) / double(in_y);
    const double coverage = double(covered) / double(in_y);
    append(o, outside == 0 && mass_gap < 1e-2 && coverage > 0.995 && left_max <= right_min,
           fmt("oracle: T(X) in Y, mass gap %.1e, coverage %.4f, dT1 monotone", mass_gap, coverage));
    return o;
}

Outcome split_table()
{
    Outcome o = verify_split_map();
    if (!o.pass) {
        return o;
    }
    for (bool mono : {false, true}) {
        const RunResult r = run_experiment(split_domain_spec(), 64, 64, mode_options(mono));
        append(o, r.solution.report.converged && r.map_error >= 0.0146 / 2.5 && r.map_error <= 0.0146 * 2.5,
               fmt("%s (64,64) %.4f vs 0.0146", mode_name(mono), r.map_error));
    }
    return o;
}

// 9 -------------------------------------------------------------------------

Outcome containment()
{
    Outcome o;
    for (bool mono : {false, true}) {
        std::string line = mode_name(mono);
        bool ok = true;
        for (const auto& shape : gallery_shapes()) {
            const RunResult r = run_experiment(gallery_spec(shape), 64, 64, mode_options(mono));
            const double bound = 2 * r.solution.u.grid.h();
            ok = ok && r.solution.report.converged && r.containment <= bound;
            line += fmt(" %s %.4f", shape.c_str(), r.containment);
        }
        append(o, ok, line + " (<= 2h = 0.0625)");
    }
    return o;
}

// 10 ------------------------------------------------------------------------

Outcome jacobian_check()
{
    Outcome o;
    std::mt19937 rng(100);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ExperimentSpec specs[] = {ellipse_spec(), gallery_spec("triangle")};
    double worst = 0.0;
    int states = 0;
    for (const auto& spec : specs) {
        for (bool mono : {false, true}) {
            const Problem p = build_experiment_problem(spec, 32, 32, mode_options(mono));
            // 13 + 12 + 13 + 12 = 50 states
            for (int s = 0; s < (mono ? 12 : 13); ++s, ++states) {
                // Anisotropic random Hessian: an isotropic one puts every
                // stencil pair on a tie, where the operator is not differentiable.
                const double l1 = 0.4 + 2 * unit(rng), l2 = 0.4 + 2 * unit(rng), phi = std::numbers::pi * unit(rng);
                const Vec2 e(std::cos(phi), std::sin(phi)), b(0.2 * gauss(rng), 0.2 * gauss(rng));
                const double f1 = 1 + 3 * unit(rng), f2 = 1 + 3 * unit(rng), amp = 0.05 * unit(rng);
                GridFunction u(p.grid());
                for (std::size_t k = 0; k < u.values.size(); ++k) {
                    const Vec2 x = p.grid().point(k);
                    const double along = e.dot(x), across = e.x() * x.y() - e.y() * x.x();
                    u[k] = 0.5 * (l1 * along * along + l2 * across * across) + b.dot(x) +
                           amp * std::sin(f1 * x.x() + 0.7) * std::cos(f2 * x.y() - 0.3);
                }
                Eigen::VectorXd v(u.values.size());
                for (auto& x : v) {
                    x = gauss(rng);
                }
                const Eigen::SparseMatrix<double> j = assemble_jacobian(u, p);
                const Eigen::VectorXd jv = j * v;
                // The residual is piecewise quadratic in u and the Jacobian is
                // the derivative of the piece containing u. Central and
                // three-point one-sided differences are exact on a piece, so a
                // stencil that does not cross a min/max switch reproduces it.
                const double t = 1e-8;
                const auto shifted = [&](double step) {
                    GridFunction w = u;
                    for (std::size_t k = 0; k < u.values.size(); ++k) {
                        w[k] += step * v[static_cast<Eigen::Index>(k)];
                    }
                    return assemble_residual(w, p);
                };
                const GridFunction r0 = assemble_residual(u, p);
                const GridFunction rp = shifted(t), rp2 = shifted(2 * t), rm = shifted(-t), rm2 = shifted(-2 * t);
                double err = 0.0;
                for (std::size_t k = 0; k < u.values.size(); ++k) {
                    const double c = (rp[k] - rm[k]) / (2 * t);
                    const double f = (-3 * r0[k] + 4 * rp[k] - rp2[k]) / (2 * t);
                    const double b = (3 * r0[k] - 4 * rm[k] + rm2[k]) / (2 * t);
                    const double jk = jv[static_cast<Eigen::Index>(k)];
                    err = std::max(err, std::min({std::abs(c - jk), std::abs(f - jk), std::abs(b - jk)}));
                }
                worst = std::max(worst, err / jv.lpNorm<Eigen::Infinity>());
            }
        }
    }
    append(o, worst <= 1e-4, fmt("%d states, max relative error %.2e (<= 1e-4)", states, worst));
    return o;
}

// 11 ------------------------------------------------------------------------

Outcome oracle_cross_validation()
{
    Outcome o;
    for (const ExperimentSpec& spec : {ellipse_spec(), split_domain_spec()}) {
        const Problem p = build_experiment_problem(spec, 64, 64);
        const RunResult r = run_experiment(p, spec, 64, 64, {}, std::nullopt);
        const CrossValidation cv = cross_validate(spec.source_region, p.target(), r.map, 100);

        // Same oracle applied to the exact map: the quantization floor of m = 100 atoms.
        VectorField exact = r.map;
        for (std::size_t k = 0; k < exact.values.size(); ++k) {
            exact.values[k] = (*spec.exact_map)(exact.grid.point(k));
        }
        const CrossValidation floor = cross_validate(spec.source_region, p.target(), exact, 100);
        append(o, r.solution.report.converged && cv.max_discrepancy <= 0.1,
               fmt("%s max %.4f (<= 0.1), mean %.4f; exact-map floor max %.4f", spec.name.c_str(),
                   cv.max_discrepancy, cv.mean_discrepancy, floor.max_discrepancy));
    }
    return o;
}

// 12 ------------------------------------------------------------------------

Outcome gauge_invariance()
{
    Outcome o;
    const ExperimentSpec spec = ellipse_spec();
    for (bool mono : {false, true}) {
        const RunOptions opts = mode_options(mono);
        const Problem p = build_experiment_problem(spec, 64, 64, opts);
        const Problem q = p.with_pin(p.grid().nearest(Vec2(0.3, 0.1)));
        const RunResult a = run_experiment(p, spec, 64, 64, opts, std::nullopt);
        const RunResult b = run_experiment(q, spec, 64, 64, opts, std::nullopt);
        const double bound = 10 * a.solution.report.tolerance / p.grid().h();
        double diff = 0.0;
        for (std::size_t k = 0; k < a.map.values.size(); ++k) {
            if (a.support[k]) {
                diff = std::max(diff, (a.map.values[k] - b.map.values[k]).norm());
            }
        }
        append(o, a.solution.report.converged && b.solution.report.converged && diff <= bound,
               fmt("%s map difference %.2e (<= %.2e)", mode_name(mono), diff, bound));
    }
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {1, "filter exactness", 1e-3, filter_exactness},
        {2, "monotone MA ellipticity", 10, ellipticity},
        {3, "boundary scheme monotonicity", 10, boundary_monotonicity},
        {4, "consistency rates", 30, consistency},
        {5, "Hamiltonian fidelity", 10, hamiltonian_fidelity},
        {6, "identity transport", 60, identity_transport},
        {7, "ellipse table", 600, ellipse_table},
        {8, "split-domain table", 300, split_table},
        {9, "pushforward containment", 600, containment},
        {10, "Jacobian correctness", 60, jacobian_check},
        {11, "oracle cross-validation", 300, oracle_cross_validation},
        {12, "gauge invariance", 120, gauge_invariance},
    };

    std::vector<int> wanted;
    for (int a = 1; a < argc; ++a) {
        wanted.push_back(std::atoi(argv[a]));
    }

    int failures = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            append(out, false, fmt("over time budget (%.3g s > %.3g s)", secs, c.budget_seconds));
        }
        failures += out.pass ? 0 : 1;
        std::printf("[%s] %2d %-30s %8.3fs  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
