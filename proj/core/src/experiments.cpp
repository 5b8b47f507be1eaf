#include "otma/experiments.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace otma {

namespace {

Mat2 rotation(double theta)
{
    Mat2 r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

bool is_spd(const Mat2& m)
{
    if (std::abs(m(0, 1) - m(1, 0)) > 1e-12 * (1.0 + m.norm())) {
        return false;
    }
    return Eigen::SelfAdjointEigenSolver<Mat2>(m).eigenvalues().minCoeff() > 0.0;
}

std::vector<Vec2> arc(const Vec2& c, double r, double t0, double t1, int samples)
{
    std::vector<Vec2> pts;
    for (int k = 0; k <= samples; ++k) {
        const double t = t0 + (t1 - t0) * k / samples;
        pts.emplace_back(c + r * Vec2(std::cos(t), std::sin(t)));
    }
    return pts;
}

}  // namespace

Mat2 exact_ellipse_map(const Mat2& mx, const Mat2& my)
{
    if (!is_spd(mx) || !is_spd(my)) {
        throw std::invalid_argument("exact_ellipse_map: matrices must be symmetric positive definite");
    }
    const Mat2 j = rotation(std::numbers::pi / 2);
    const Mat2 k = mx.inverse() * my.inverse();
    const double theta = std::atan(( k * j).trace() / k.trace());
    // tan θ fixes θ only up to sign convention; keep the symmetric branch.
    for (double t : {theta, -theta}) {
        const Mat2 a = my * rotation(t) * mx.inverse();
        if (std::abs(a(0, 1) - a(1, 0)) <= 1e-10 * a.norm() && is_spd(0.5 * (a + a.transpose()))) {
            return 0.5 * (a + a.transpose());
        }
    }
    throw std::logic_error("exact_ellipse_map: no symmetric branch found");
}

ExperimentSpec ellipse_spec(const Mat2& mx, const Mat2& my)
{
    const Mat2 a = exact_ellipse_map(mx, my);
    const Mat2 mx_inv = mx.inverse();
    ExperimentSpec s;
    s.name = "ellipse";
    s.lower = -1.0;
    s.upper = 1.0;
    s.source_region = [mx_inv](const Vec2& x) { return (mx_inv * x).norm() <= 1.0; };
    s.target = [my](int ny) { return ConvexTarget::sampled_ellipse(my, static_cast<std::size_t>(ny)); };
    s.exact_map = [a](const Vec2& x) { return Vec2(a * x); };
    s.nx_values = {32, 64, 128, 256, 362};
    s.ny_values = {8, 16, 32, 64, 128, 256};
    return s;
}

ExperimentSpec ellipse_spec()
{
    Mat2 mx;
    mx << 0.8, 0.0, 0.0, 0.4;
    Mat2 my;
    my << 0.6, 0.2, 0.2, 0.8;
    return ellipse_spec(mx, my);
}

Vec2 split_exact_map(const Vec2& x)
{
    // The gap −0.2 ≤ x₁ ≤ 0.1 carries no mass; split it at its midpoint.
    return x.x() < -0.05 ? Vec2(x.x() + 0.2, x.y()) : Vec2(x.x() - 0.1, x.y());
}

ExperimentSpec split_domain_spec()
{
    constexpr double r = 0.85;
    ExperimentSpec s;
    s.name = "split";
    s.lower = -1.1;
    s.upper = 1.1;
    s.source_region = [](const Vec2& x) {
        const bool left = x.x() < -0.2 && (x.x() + 0.2) * (x.x() + 0.2) + x.y() * x.y() < r * r;
        const bool right = x.x() > 0.1 && (x.x() - 0.1) * (x.x() - 0.1) + x.y() * x.y() < r * r;
        return left || right;
    };
    s.target = [](int ny) { return ConvexTarget::sampled_circle(Vec2::Zero(), r, static_cast<std::size_t>(ny)); };
    s.exact_map = split_exact_map;
    s.nx_values = {32, 64, 128, 256, 362};
    s.ny_values = {8, 16, 32, 64, 128, 256};
    return s;
}

std::vector<std::string> gallery_shapes() { return {"square", "circle", "triangle", "diamond", "icecream", "bowl"}; }

ExperimentSpec gallery_spec(const std::string& shape)
{
    ExperimentSpec s;
    s.name = "gallery:" + shape;
    s.lower = -1.0;
    s.upper = 1.0;
    s.source_region = [](const Vec2&) { return true; };
    s.nx_values = {64};
    s.ny_values = {64};
    if (shape == "square") {
        s.target = [](int) { return ConvexTarget::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}); };
        s.exact_map = [](const Vec2& x) { return x; };
    } else if (shape == "circle") {
        s.target = [](int ny) { return ConvexTarget::sampled_circle(Vec2::Zero(), 1.0, static_cast<std::size_t>(ny)); };
    } else if (shape == "triangle") {
        s.target = [](int) { return ConvexTarget::polygon({{-1.2, -0.8}, {1.2, -0.8}, {0.0, 1.2}}); };
    } else if (shape == "diamond") {
        s.target = [](int) { return ConvexTarget::polygon({{1.3, 0.0}, {0.0, 1.0}, {-1.3, 0.0}, {0.0, -1.0}}); };
    } else if (shape == "icecream") {
        // Scoop of radius 0.7 on a cone with apex (0, −1.2).
        s.target = [](int ny) {
            auto pts = arc(Vec2(0.0, 0.3), 0.7, 0.0, 2 * std::numbers::pi, std::max(ny, 8));
            pts.emplace_back(0.0, -1.2);
            return ConvexTarget::hull(std::move(pts));
        };
    } else if (shape == "bowl") {
        // Lower half-disk of radius 1.2 with a flat rim.
        s.target = [](int ny) {
            auto pts = arc(Vec2(0.0, 0.4), 1.2, std::numbers::pi, 2 * std::numbers::pi, std::max(ny / 2, 4));
            return ConvexTarget::hull(std::move(pts));
        };
    } else {
        throw std::invalid_argument("unknown gallery shape '" + shape + "'");
    }
    return s;
}

ExperimentSpec experiment_by_name(const std::string& name)
{
    if (name == "ellipse") {
        return ellipse_spec();
    }
    if (name == "split") {
        return split_domain_spec();
    }
    if (name.rfind("gallery:", 0) == 0) {
        return gallery_spec(name.substr(8));
    }
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

Problem build_experiment_problem(const ExperimentSpec& spec, int nx, int ny, const RunOptions& options)
{
    if (nx < 3 || ny < 3) {
        throw std::invalid_argument("N_X and N_Y must be at least 3");
    }
    const Grid grid(spec.lower, spec.upper, nx + 1);
    const ConvexTarget target = spec.target(ny);
    const Density rho_x = uniform_density(spec.source_region, grid, "uniform-source");
    const Density rho_y = uniform_density(target, target_quadrature_grid(target, options.target_quadrature));
    return Problem::build(grid, rho_x, rho_y, target, options.problem);
}

double pushforward_containment(const VectorField& map, const std::vector<bool>& support, const ConvexTarget& target)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < map.values.size(); ++k) {
        if (support[k]) {
            worst = std::max(worst, target.signed_distance(map.values[k]));
        }
    }
    return worst;
}

RunResult run_experiment(const Problem& problem, const ExperimentSpec& spec, int nx, int ny,
                         const RunOptions& options, std::optional<GridFunction> u_init)
{
    RunResult r;
    r.nx = nx;
    r.ny = ny;
    r.solution = solve(problem, std::move(u_init), options.solver);
    r.map = extract_map(r.solution.u);
    r.support = problem.support_mask();
    r.map_error = spec.exact_map ? map_error(r.map, *spec.exact_map, r.support)
                                 : std::numeric_limits<double>::quiet_NaN();
    r.containment = pushforward_containment(r.map, r.support, problem.target());
    return r;
}

RunResult run_experiment(const ExperimentSpec& spec, int nx, int ny, const RunOptions& options)
{
    const Problem problem = build_experiment_problem(spec, nx, ny, options);
    return run_experiment(problem, spec, nx, ny, options, std::nullopt);
}

bool TableResult::all_converged() const
{
    for (const auto& row : reports) {
        for (const auto& rep : row) {
            if (!rep.converged) {
                return false;
            }
        }
    }
    return true;
}

TableResult run_table(const ExperimentSpec& spec, const std::vector<int>& nx_values,
                      const std::vector<int>& ny_values, const RunOptions& options)
{
    if (!spec.exact_map) {
        throw std::invalid_argument("run_table: experiment has no exact map");
    }
    TableResult t;
    t.name = spec.name;
    t.nx_values = nx_values;
    t.ny_values = ny_values;
    for (int nx : nx_values) {
        std::vector<double> errors;
        std::vector<SolveReport> reports;
        for (int ny : ny_values) {
            try {
                RunResult r = run_experiment(spec, nx, ny, options);
                errors.push_back(r.solution.report.converged ? r.map_error : std::numeric_limits<double>::quiet_NaN());
                reports.push_back(std::move(r.solution.report));
            } catch (const std::exception& e) {
                SolveReport failed;
                failed.message = e.what();
                errors.push_back(std::numeric_limits<double>::quiet_NaN());
                reports.push_back(std::move(failed));
            }
        }
        t.errors.push_back(std::move(errors));
        t.reports.push_back(std::move(reports));
    }
    return t;
}

void write_table_csv(std::ostream& os, const TableResult& table)
{
    os << "N_X";
    for (int ny : table.ny_values) {
        os << ',' << ny;
    }
    os << '\n' << std::setprecision(6);
    for (std::size_t a = 0; a < table.nx_values.size(); ++a) {
        os << table.nx_values[a];
        for (double e : table.errors[a]) {
            os << ',';
            if (std::isnan(e)) {
                os << "nan";
            } else {
                os << e;
            }
        }
        os << '\n';
    }
}

}  // namespace otma
