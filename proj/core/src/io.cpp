#include "otma/io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace otma {

using nlohmann::json;

namespace {

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

Vec2 as_vec2(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(std::string(what) + ": expected [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& j, const char* key)
{
    if (!j.contains(key)) {
        throw ConfigError(std::string("missing key '") + key + "'");
    }
    return j.at(key);
}

double as_number(const json& j, const char* what)
{
    if (!j.is_number()) {
        throw ConfigError(std::string(what) + ": expected a number");
    }
    return j.get<double>();
}

ConvexTarget target_from(const json& j, std::size_t samples)
{
    const std::string kind = require(j, "kind").get<std::string>();
    try {
        if (kind == "polygon") {
            std::vector<Vec2> pts;
            for (const auto& p : require(j, "points")) {
                pts.push_back(as_vec2(p, "points"));
            }
            return ConvexTarget::polygon(std::move(pts));
        }
        if (kind == "ellipse") {
            const json& m = require(j, "matrix");
            if (!m.is_array() || m.size() != 2) {
                throw ConfigError("matrix: expected [[a, b], [b, c]]");
            }
            const Vec2 r0 = as_vec2(m[0], "matrix"), r1 = as_vec2(m[1], "matrix");
            Mat2 mat;
            mat << r0.x(), r0.y(), r1.x(), r1.y();
            return ConvexTarget::sampled_ellipse(mat, samples);
        }
        if (kind == "circle") {
            return ConvexTarget::sampled_circle(as_vec2(require(j, "center"), "center"),
                                                as_number(require(j, "radius"), "radius"), samples);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("target: ") + e.what());
    }
    throw ConfigError("unknown target kind '" + kind + "'");
}

}  // namespace

ConvexTarget parse_target(const std::string& json_text, std::size_t samples)
{
    return target_from(parse(json_text), samples);
}

Density parse_density(const std::string& json_text, Density::Region support, const Grid& quadrature)
{
    const json j = parse(json_text);
    const std::string name = require(j, "name").get<std::string>();
    if (name == "uniform") {
        return uniform_density(std::move(support), quadrature);
    }
    if (name == "affine") {
        return affine_density(as_number(require(j, "c0"), "c0"), as_vec2(require(j, "gradient"), "gradient"),
                              std::move(support), quadrature);
    }
    if (name == "gaussian") {
        return gaussian_density(as_vec2(require(j, "center"), "center"), as_number(require(j, "sigma"), "sigma"),
                                std::move(support), quadrature);
    }
    if (name == "gridded") {
        return Density::gridded(read_grid_csv(require(j, "path").get<std::string>()));
    }
    throw ConfigError("unknown density '" + name + "'");
}

RunOptions RunConfig::run_options() const
{
    RunOptions o;
    o.problem.stencil_width = stencil_width;
    o.problem.dalpha = dalpha;
    o.problem.filter_c = filter_c;
    o.problem.user_delta = delta;
    o.problem.monotone_only = monotone_only;
    o.problem.bc = bc;
    o.solver.max_iterations = max_iterations;
    o.solver.tolerance = tolerance;
    return o;
}

void apply_config(RunConfig& c, const std::string& json_text)
{
    const json j = parse(json_text);
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "experiment") {
                c.experiment = value.get<std::string>();
            } else if (key == "nx") {
                c.nx = value.get<int>();
            } else if (key == "ny") {
                c.ny = value.get<int>();
            } else if (key == "stencil_width") {
                c.stencil_width = value.get<int>();
            } else if (key == "dalpha") {
                c.dalpha = value.get<double>();
            } else if (key == "filter_c") {
                c.filter_c = value.get<double>();
            } else if (key == "delta") {
                c.delta = value.get<double>();
            } else if (key == "monotone_only") {
                c.monotone_only = value.get<bool>();
            } else if (key == "max_iterations") {
                c.max_iterations = value.get<int>();
            } else if (key == "tolerance") {
                c.tolerance = value.get<double>();
            } else if (key == "bc") {
                if (value.is_string()) {
                    c.bc = parse_boundary_scheme(value.get<std::string>());
                } else {
                    if (value.contains("scheme")) {
                        c.bc = parse_boundary_scheme(value.at("scheme").get<std::string>());
                    }
                    if (value.contains("dalpha")) {
                        c.dalpha = value.at("dalpha").get<double>();
                    }
                }
            } else if (key == "target") {
                c.target_json = value.dump();
            } else if (key == "source_density") {
                c.source_density_json = value.dump();
            } else if (key == "target_density") {
                c.target_density_json = value.dump();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config(config, ss.str());
}

ExperimentSpec configured_spec(const RunConfig& config)
{
    ExperimentSpec spec = experiment_by_name(config.experiment);
    if (config.target_json) {
        const json j = parse(*config.target_json);
        spec.target = [j](int ny) { return target_from(j, static_cast<std::size_t>(ny)); };
        spec.exact_map.reset();
    }
    return spec;
}

Problem build_configured_problem(const ExperimentSpec& spec, const RunConfig& config)
{
    const RunOptions options = config.run_options();
    if (!config.source_density_json && !config.target_density_json) {
        return build_experiment_problem(spec, config.nx, config.ny, options);
    }
    if (config.nx < 3 || config.ny < 3) {
        throw std::invalid_argument("N_X and N_Y must be at least 3");
    }
    const Grid grid(spec.lower, spec.upper, config.nx + 1);
    const ConvexTarget target = spec.target(config.ny);
    const Grid quad = target_quadrature_grid(target, options.target_quadrature);
    const Density rho_x = config.source_density_json ? parse_density(*config.source_density_json, spec.source_region, grid)
                                                     : uniform_density(spec.source_region, grid, "uniform-source");
    Density rho_y = config.target_density_json
                        ? parse_density(*config.target_density_json,
                                        [target](const Vec2& y) { return target.contains(y); }, quad)
                        : uniform_density(target, quad);
    return Problem::build(grid, rho_x, rho_y, target, options.problem);
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("not an integer: '" + item + "'");
        }
        if (used != item.size()) {
            throw ConfigError("not an integer: '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("empty list");
    }
    return out;
}

void write_map_csv(std::ostream& os, const VectorField& map)
{
    const Grid& g = map.grid;
    os << "i,j,x,y,Tx,Ty\n" << std::setprecision(17);
    for (std::size_t k = 0; k < map.values.size(); ++k) {
        const auto [i, j] = g.node(k);
        os << i << ',' << j << ',' << g.coord(i) << ',' << g.coord(j) << ',' << map.values[k].x() << ','
           << map.values[k].y() << '\n';
    }
}

void write_error_csv(std::ostream& os, const VectorField& map, const ExactMap& exact, const std::vector<bool>& mask)
{
    const Grid& g = map.grid;
    os << "i,j,x,y,error\n" << std::setprecision(17);
    for (std::size_t k = 0; k < map.values.size(); ++k) {
        if (!mask[k]) {
            continue;
        }
        const auto [i, j] = g.node(k);
        const Vec2 x(g.coord(i), g.coord(j));
        os << i << ',' << j << ',' << x.x() << ',' << x.y() << ',' << (map.values[k] - exact(x)).norm() << '\n';
    }
}

std::string report_json(const SolveReport& r, int indent)
{
    json j;
    j["iterations"] = r.iterations;
    j["residual_norm"] = r.residual_norm;
    j["tolerance"] = r.tolerance;
    j["damping"] = r.damping;
    j["residual_history"] = r.residual_history;
    j["fallback_steps"] = r.fallback_steps;
    j["wall_time"] = r.wall_time;
    j["converged"] = r.converged;
    j["message"] = r.message;
    return j.dump(indent);
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& run, const ExperimentSpec& spec)
{
    std::filesystem::create_directories(dir);
    write_csv((dir / "u.csv").string(), run.solution.u);
    {
        std::ofstream os(dir / "map.csv");
        write_map_csv(os, run.map);
    }
    {
        json j = json::parse(report_json(run.solution.report));
        j["experiment"] = spec.name;
        j["nx"] = run.nx;
        j["ny"] = run.ny;
        j["containment"] = run.containment;
        if (spec.exact_map) {
            j["map_error"] = run.map_error;
        }
        std::ofstream os(dir / "report.json");
        os << j.dump(2) << '\n';
    }
    if (spec.exact_map) {
        std::ofstream os(dir / "error.csv");
        write_error_csv(os, run.map, *spec.exact_map, run.support);
    }
}

}  // namespace otma
