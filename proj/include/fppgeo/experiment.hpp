#pragma once

#include "fppgeo/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fppgeo {

inline constexpr std::string_view kExperiments[] = {"direction-curve", "coalescence", "sandwich",
                                                    "bigeodesic",      "cone",        "oracle-sweep"};

// Zero-valued sizes mean "use the experiment's default" (see resolve()).
struct ExperimentConfig {
    std::string experiment;
    double p = 0.7;
    std::vector<double> p_list;      // oracle-sweep cycles through these when set
    double q = 0.5;
    std::vector<double> q_grid;      // direction-curve; default 0, 0.1, ..., 1
    ExcessDistribution excess = ExcessDistribution::atom(2.0);
    std::int32_t width = 0;
    std::int32_t height = 0;
    std::int32_t escape_margin = 64;
    std::int64_t depth = 4000;       // path steps
    std::size_t replicas = 0;
    std::uint64_t seed = 1;
    std::vector<std::int64_t> separations{2, 10, 50};
    std::size_t max_fields = 0;      // coalescence: field budget, default 4 * replicas
    std::vector<std::int64_t> drift_separations{20, 40, 80, 160};
    std::vector<std::int64_t> drift_buckets{20, 40, 80};
    double bucket_halfwidth = 0.25;
    std::size_t pilot_replicas = 0;  // coalescence drift pilot fields (m0 selection)
    std::size_t drift_replicas = 0;  // coalescence drift test fields
    std::size_t alpha_replicas = 100;
    std::size_t subpath_checks = 8;
    std::size_t sites_per_replica = 25;
    std::int64_t continuation = 300;
    bool threshold_band = false;
    std::size_t threads = 0;         // 0: hardware concurrency
    std::string out_dir = "out";
    bool render = false;
};

// Sets one key from its text form. Throws Error(Config) on unknown keys or
// out-of-range values.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// "key = value" lines, '#' or ';' comments, optional [section] headers with
// names general, lattice, paths, statistics, output. Errors carry
// "<source>:<line>:".
ExperimentConfig parse_config(std::istream& is, const std::string& source, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

// Fills experiment-dependent defaults and validates cross-field constraints.
ExperimentConfig resolve(ExperimentConfig config);

// Canonical form used for hashing: every result-affecting field, no paths or
// thread counts.
nlohmann::json config_json(const ExperimentConfig& config);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct RunOutcome {
    bool check_passed = true;
    nlohmann::json manifest;
};

// Runs the configured experiment, writes its artifacts and manifest.json to
// out_dir and returns the manifest.
RunOutcome run_experiment(const ExperimentConfig& config);

// Column documentation of each experiment's CSV outputs, for --help.
std::string csv_documentation(std::string_view experiment);

} // namespace fppgeo
