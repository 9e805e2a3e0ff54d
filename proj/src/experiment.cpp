#include "fppgeo/experiment.hpp"

#include "fppgeo/error.hpp"
#include "runners.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fppgeo {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
    throw Error(ErrorCode::Config,
                "invalid value '" + std::string(value) + "' for " + std::string(key) + ": " + std::string(why));
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        bad_value(key, v, "expected a real number");
    return out;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        bad_value(key, v, "expected an integer");
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    bad_value(key, v, "expected true or false");
}

template <class F>
auto to_list(std::string_view key, std::string_view v, F item) {
    std::vector<decltype(item(key, v))> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto part = trim(v.substr(0, comma));
        if (part.empty())
            bad_value(key, v, "empty list element");
        out.push_back(item(key, part));
        if (comma == std::string_view::npos)
            break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

void require(bool ok, std::string_view key, std::string_view v, std::string_view why) {
    if (!ok)
        bad_value(key, v, why);
}

bool known_experiment(std::string_view name) {
    return std::find(std::begin(kExperiments), std::end(kExperiments), name) != std::end(kExperiments);
}

} // namespace

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view v) {
    v = trim(v);
    if (key == "experiment") {
        require(known_experiment(v), key, v, "unknown experiment");
        c.experiment = std::string(v);
    } else if (key == "p") {
        c.p = to_double(key, v);
        require(c.p > 0.0 && c.p <= 1.0, key, v, "must lie in (0, 1]");
    } else if (key == "p_list") {
        c.p_list = to_list(key, v, to_double);
        for (auto p : c.p_list)
            require(p > 0.0 && p <= 1.0, key, v, "entries must lie in (0, 1]");
    } else if (key == "q") {
        c.q = to_double(key, v);
        require(c.q >= 0.0 && c.q <= 1.0, key, v, "must lie in [0, 1]");
    } else if (key == "q_grid") {
        c.q_grid = to_list(key, v, to_double);
        require(std::is_sorted(c.q_grid.begin(), c.q_grid.end()) && c.q_grid.front() >= 0.0 &&
                    c.q_grid.back() <= 1.0,
                key, v, "must be sorted inside [0, 1]");
    } else if (key == "excess") {
        c.excess = ExcessDistribution::parse(std::string(v));
    } else if (key == "width" || key == "height") {
        const auto n = to_int<std::int32_t>(key, v);
        require(n >= 2 && n <= 20000, key, v, "must lie in [2, 20000]");
        (key == "width" ? c.width : c.height) = n;
    } else if (key == "escape_margin") {
        c.escape_margin = to_int<std::int32_t>(key, v);
        require(c.escape_margin >= 0, key, v, "must be non-negative");
    } else if (key == "depth") {
        c.depth = to_int<std::int64_t>(key, v);
        require(c.depth >= 1, key, v, "must be positive");
    } else if (key == "replicas") {
        c.replicas = to_int<std::size_t>(key, v);
        require(c.replicas >= 1, key, v, "must be positive");
    } else if (key == "seed") {
        c.seed = to_int<std::uint64_t>(key, v);
    } else if (key == "separations" || key == "drift_separations") {
        auto list = to_list(key, v, to_int<std::int64_t>);
        for (auto s : list)
            require(s > 0 && s % 2 == 0 && s <= 4000, key, v, "entries must be even, positive and at most 4000");
        (key == "separations" ? c.separations : c.drift_separations) = std::move(list);
    } else if (key == "max_fields") {
        c.max_fields = to_int<std::size_t>(key, v);
    } else if (key == "drift_buckets") {
        c.drift_buckets = to_list(key, v, to_int<std::int64_t>);
        for (auto m : c.drift_buckets)
            require(m > 0, key, v, "entries must be positive");
    } else if (key == "bucket_halfwidth") {
        c.bucket_halfwidth = to_double(key, v);
        require(c.bucket_halfwidth >= 0.0 && c.bucket_halfwidth < 1.0, key, v, "must lie in [0, 1)");
    } else if (key == "pilot_replicas") {
        c.pilot_replicas = to_int<std::size_t>(key, v);
    } else if (key == "drift_replicas") {
        c.drift_replicas = to_int<std::size_t>(key, v);
    } else if (key == "alpha_replicas") {
        c.alpha_replicas = to_int<std::size_t>(key, v);
        require(c.alpha_replicas >= 2, key, v, "must be at least 2");
    } else if (key == "subpath_checks") {
        c.subpath_checks = to_int<std::size_t>(key, v);
    } else if (key == "sites_per_replica") {
        c.sites_per_replica = to_int<std::size_t>(key, v);
        require(c.sites_per_replica >= 1, key, v, "must be positive");
    } else if (key == "continuation") {
        c.continuation = to_int<std::int64_t>(key, v);
        require(c.continuation >= 1, key, v, "must be positive");
    } else if (key == "threshold_band") {
        c.threshold_band = to_bool(key, v);
    } else if (key == "threads") {
        c.threads = to_int<std::size_t>(key, v);
    } else if (key == "out_dir") {
        require(!v.empty(), key, v, "must not be empty");
        c.out_dir = std::string(v);
    } else if (key == "render") {
        c.render = to_bool(key, v);
    } else {
        throw Error(ErrorCode::Config, "unknown key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& is, const std::string& source, ExperimentConfig base) {
    static constexpr std::array<std::string_view, 5> sections{"general", "lattice", "paths", "statistics",
                                                              "output"};
    std::string line;
    std::size_t number = 0;
    while (std::getline(is, line)) {
        ++number;
        const auto where = source + ":" + std::to_string(number) + ": ";
        auto text = trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';')
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw Error(ErrorCode::Config, where + "unterminated section header");
            const auto name = trim(text.substr(1, text.size() - 2));
            if (std::find(sections.begin(), sections.end(), name) == sections.end())
                throw Error(ErrorCode::Config, where + "unknown section [" + std::string(name) + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::Config, where + "expected 'key = value'");
        const auto key = trim(text.substr(0, eq));
        auto value = trim(text.substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string_view::npos)
            value = trim(value.substr(0, hash));
        try {
            set_config_value(base, key, value);
        } catch (const Error& e) {
            throw Error(e.code(), where + e.message());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open config " + path.string());
    return parse_config(in, path.string(), std::move(base));
}

ExperimentConfig resolve(ExperimentConfig c) {
    if (!known_experiment(c.experiment))
        throw Error(ErrorCode::Config, "experiment not set or unknown: '" + c.experiment + "'");
    const auto square = [&](std::int32_t side) {
        if (!c.width)
            c.width = side;
        if (!c.height)
            c.height = side;
    };
    const auto defaults = [&](std::size_t replicas) {
        if (!c.replicas)
            c.replicas = replicas;
    };
    const auto margin = std::int64_t{c.escape_margin};
    if (c.experiment == "direction-curve") {
        square(std::int32_t(std::ceil(0.7 * double(c.depth)) + 2 * margin));
        defaults(40);
        if (c.q_grid.empty())
            for (int i = 0; i <= 10; ++i)
                c.q_grid.push_back(i / 10.0);
    } else if (c.experiment == "coalescence") {
        std::int64_t widest = 0;
        for (auto s : c.separations)
            widest = std::max(widest, s);
        for (auto s : c.drift_separations)
            widest = std::max(widest, s);
        square(std::int32_t(widest / 2 + 8 + c.depth / 2 + margin + 256));
        defaults(1000);
        if (!c.max_fields)
            c.max_fields = 4 * c.replicas;
        if (c.separations.empty())
            throw Error(ErrorCode::Config, "coalescence needs at least one separation");
    } else if (c.experiment == "sandwich") {
        square(1200);
        defaults(60);
    } else if (c.experiment == "bigeodesic") {
        square(800);
        defaults(40);
    } else if (c.experiment == "cone") {
        if (!c.width)
            c.width = std::int32_t(std::ceil(0.7 * double(c.depth)) + 2 * margin);
        if (!c.height)
            c.height = std::int32_t(std::ceil(0.45 * double(c.depth)) + 2 * margin);
        defaults(100);
    } else if (c.experiment == "oracle-sweep") {
        square(5);
        defaults(500);
        if (c.p_list.empty())
            c.p_list = {0.3, 0.7, 1.0};
        if (std::size_t(c.width) * std::size_t(c.height) > 25)
            throw Error(ErrorCode::Config, "oracle-sweep windows are limited to 25 sites");
    }
    if (c.experiment != "oracle-sweep" && (c.width <= 2 * c.escape_margin || c.height <= 2 * c.escape_margin))
        throw Error(ErrorCode::Config, "window must exceed twice the escape margin");
    return c;
}

nlohmann::json config_json(const ExperimentConfig& c) {
    return {{"experiment", c.experiment},
            {"p", c.p},
            {"p_list", c.p_list},
            {"q", c.q},
            {"q_grid", c.q_grid},
            {"excess", c.excess.to_string()},
            {"width", c.width},
            {"height", c.height},
            {"escape_margin", c.escape_margin},
            {"depth", c.depth},
            {"replicas", c.replicas},
            {"seed", c.seed},
            {"separations", c.separations},
            {"max_fields", c.max_fields},
            {"drift_separations", c.drift_separations},
            {"drift_buckets", c.drift_buckets},
            {"bucket_halfwidth", c.bucket_halfwidth},
            {"pilot_replicas", c.pilot_replicas},
            {"drift_replicas", c.drift_replicas},
            {"alpha_replicas", c.alpha_replicas},
            {"subpath_checks", c.subpath_checks},
            {"sites_per_replica", c.sites_per_replica},
            {"continuation", c.continuation},
            {"threshold_band", c.threshold_band},
            {"render", c.render}};
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
        throw Error(ErrorCode::Io, "sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

RunOutcome run_experiment(const ExperimentConfig& raw) {
    const auto config = resolve(raw);
    const std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

    detail::Artifacts art(dir);
    detail::Result res;
    const auto& e = config.experiment;
    if (e == "direction-curve") res = detail::run_direction_curve(config, art);
    else if (e == "coalescence") res = detail::run_coalescence(config, art);
    else if (e == "sandwich") res = detail::run_sandwich(config, art);
    else if (e == "bigeodesic") res = detail::run_bigeodesic(config, art);
    else if (e == "cone") res = detail::run_cone(config, art);
    else res = detail::run_oracle_sweep(config, art);

    const auto cfg = config_json(config);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& name : art.files()) {
        const auto path = dir / name;
        files.push_back({{"path", name},
                         {"sha256", sha256_file(path)},
                         {"bytes", std::filesystem::file_size(path)}});
    }
    RunOutcome out;
    out.check_passed = res.passed;
    out.manifest = {{"experiment", e},
                    {"config", cfg},
                    {"config_hash", sha256_hex(cfg.dump())},
                    {"censoring", res.censoring},
                    {"summary", res.summary},
                    {"check", {{"passed", res.passed}, {"criteria", res.checks}}},
                    {"files", files}};
    std::ofstream m(dir / "manifest.json");
    m << out.manifest.dump(2) << '\n';
    if (!m)
        throw Error(ErrorCode::Io, "cannot write manifest.json");
    return out;
}

std::string csv_documentation(std::string_view e) {
    if (e == "direction-curve")
        return "regenerations.csv: replica,q,j,T_j,Y_j_x,Y_j_t,censored\n"
               "  one row per regeneration of the q-path of each replica and grid point\n"
               "curve.json: cone estimate, theta_hat(q) with CIs, symmetry and endpoint checks";
    if (e == "coalescence")
        return "coalescence_sep<S>.csv: replica,q,j,tau_j,Z_j,absorbed\n"
               "  joint regenerations of the pair at initial L1 separation S\n"
               "pairs.csv: replica,separation,status,n0,depth,regenerations\n"
               "  status is coalesced, exhausted, censored or discarded (an origin did not percolate)\n"
               "drift.json: pilot profile, selected m0, test profile, sign test";
    if (e == "sandwich")
        return "sandwich.csv: replica,origin_x,origin_t,status,j_r,j_l,n0,n0_anti,delta_size,\n"
               "  restricted_time,unrestricted_time,splice_x,splice_t,subpaths_checked,subpath_failures\n"
               "  status is ok or censored (window exhausted)";
    if (e == "bigeodesic")
        return "bigeodesic.csv: replica,site_x,site_t,anti_length,forward_length,total_time,\n"
               "  subpaths_checked,subpath_failures";
    if (e == "cone")
        return "cone.json: alpha_hat with CI, M, N, theta_minus, theta_plus, optional threshold band";
    if (e == "oracle-sweep")
        return "oracle.csv: replica,p,source_x,source_t,target_x,target_t,dijkstra,enumeration\n"
               "levels.csv: replica,p,orientation,x,t,dp,enumeration (-1 marks an escaping site)";
    return {};
}

} // namespace fppgeo
