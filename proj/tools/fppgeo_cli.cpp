#include "fppgeo/error.hpp"
#include "fppgeo/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
    std::vector<std::string> sets;
    bool check = false;
    bool render = false;
};

const char* summary_of(std::string_view e) {
    if (e == "direction-curve") return "theta(q) over a q grid with cone endpoints, monotonicity and symmetry";
    if (e == "coalescence") return "coalescence of q-path pairs and the log-distance drift diagnostic";
    if (e == "sandwich") return "geodesics through non-percolating origins via the enclosed region";
    if (e == "bigeodesic") return "two-sided geodesics through bi-directional sites";
    if (e == "cone") return "rightmost-path speed alpha and the cone angles";
    return "shortest paths and level tables against exhaustive enumeration";
}

int exit_code(fppgeo::ErrorCode code) {
    switch (code) {
    case fppgeo::ErrorCode::Config: return 2;
    case fppgeo::ErrorCode::Io: return 3;
    default: return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments on first-passage percolation geodesics"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (auto name : fppgeo::kExperiments) {
        auto* sub = app.add_subcommand(std::string(name), summary_of(name));
        sub->add_option("--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_option("--replicas", flags.replicas, "number of independent replicas");
        sub->add_option("--out-dir", flags.out_dir, "directory for artifacts and manifest.json");
        sub->add_option("--threads", flags.threads, "worker threads (0: all cores)");
        sub->add_option("--set", flags.sets, "override a config key, key=value (repeatable)");
        sub->add_flag("--check", flags.check, "exit with status 1 when an acceptance check fails");
        sub->add_flag("--render", flags.render, "also write SVG snapshots");
        sub->footer("Outputs:\n" + fppgeo::csv_documentation(name) +
                    "\nmanifest.json: config, config hash, censoring counts, summary, checks, file hashes");
        sub->callback([&chosen, name] { chosen = std::string(name); });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        fppgeo::ExperimentConfig config;
        if (!flags.config.empty())
            config = fppgeo::load_config(flags.config);
        if (!config.experiment.empty() && config.experiment != chosen)
            throw fppgeo::Error(fppgeo::ErrorCode::Config,
                                flags.config + ": experiment '" + config.experiment + "' does not match '" +
                                    chosen + "'");
        config.experiment = chosen;
        for (const auto& s : flags.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw fppgeo::Error(fppgeo::ErrorCode::Config, "--set expects key=value, got '" + s + "'");
            try {
                fppgeo::set_config_value(config, s.substr(0, eq), s.substr(eq + 1));
            } catch (const fppgeo::Error& e) {
                throw fppgeo::Error(e.code(), "--set " + s + ": " + e.message());
            }
        }
        if (flags.seed) config.seed = *flags.seed;
        if (flags.replicas) config.replicas = *flags.replicas;
        if (flags.out_dir) config.out_dir = *flags.out_dir;
        if (flags.threads) config.threads = *flags.threads;
        if (flags.render) config.render = true;

        const auto outcome = fppgeo::run_experiment(config);
        for (const auto& c : outcome.manifest["check"]["criteria"])
            std::cout << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << '\n';
        std::cout << "manifest: " << config.out_dir << "/manifest.json\n";
        return flags.check && !outcome.check_passed ? 1 : 0;
    } catch (const fppgeo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
