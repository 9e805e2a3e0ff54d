#pragma once

#include "fppgeo/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fppgeo::detail {

// Files written by one run, in creation order.
class Artifacts {
public:
    explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}
    void write(const std::string& name, const std::string& content);
    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

struct Result {
    bool passed = true;
    nlohmann::json summary = nlohmann::json::object();
    nlohmann::json censoring = nlohmann::json::object();
    nlohmann::json checks = nlohmann::json::array();

    void check(const std::string& name, bool ok, nlohmann::json detail = nlohmann::json::object()) {
        passed = passed && ok;
        checks.push_back({{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
    }
};

std::size_t thread_count(const ExperimentConfig& config);

Result run_direction_curve(const ExperimentConfig& config, Artifacts& art);
Result run_coalescence(const ExperimentConfig& config, Artifacts& art);
Result run_sandwich(const ExperimentConfig& config, Artifacts& art);
Result run_bigeodesic(const ExperimentConfig& config, Artifacts& art);
Result run_cone(const ExperimentConfig& config, Artifacts& art);
Result run_oracle_sweep(const ExperimentConfig& config, Artifacts& art);

} // namespace fppgeo::detail
