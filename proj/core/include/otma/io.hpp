#pragma once

#include "otma/experiments.hpp"
#include "otma/oracle.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace otma {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"kind":"polygon","points":[[x,y],...]}, {"kind":"ellipse","matrix":[[a,b],[b,c]]}
/// or {"kind":"circle","center":[x,y],"radius":r}. Ellipses and circles are
/// sampled with `samples` boundary points (polygon kind).
ConvexTarget parse_target(const std::string& json_text, std::size_t samples = 256);

/// Density catalog entry by name: "uniform", "affine" (c0, gradient),
/// "gaussian" (center, sigma) or "gridded" (path to a GridFunction CSV).
/// Analytic entries live on `support` and are tabulated on `quadrature`.
Density parse_density(const std::string& json_text, Density::Region support, const Grid& quadrature);

/// Everything `otma run` needs. Fields mirror the command line flags.
struct RunConfig {
    std::string experiment = "ellipse";
    int nx = 64;
    int ny = 64;
    int stencil_width = 2;
    double dalpha = 0.0491;
    double filter_c = 10.0;
    double delta = 0.0;
    bool monotone_only = false;
    BoundaryScheme bc = BoundaryScheme::compact;
    int max_iterations = 200;
    std::optional<double> tolerance;
    /// Raw JSON for optional overrides of the experiment's target and densities.
    std::optional<std::string> target_json;
    std::optional<std::string> source_density_json;
    std::optional<std::string> target_density_json;

    RunOptions run_options() const;
};

/// Applies the keys present in a JSON document on top of `config`.
/// Unknown keys throw ConfigError. `bc` may be a string or
/// {"scheme": ..., "dalpha": ...}.
void apply_config(RunConfig& config, const std::string& json_text);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// The experiment with any target override from the config applied. A
/// replaced target drops the exact map.
ExperimentSpec configured_spec(const RunConfig& config);
Problem build_configured_problem(const ExperimentSpec& spec, const RunConfig& config);

std::vector<int> parse_int_list(const std::string& text);

void write_map_csv(std::ostream& os, const VectorField& map);
void write_error_csv(std::ostream& os, const VectorField& map, const ExactMap& exact, const std::vector<bool>& mask);
std::string report_json(const SolveReport& report, int indent = 2);

/// u.csv, map.csv, report.json and (with an exact map) error.csv.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& run, const ExperimentSpec& spec);

}  // namespace otma
