#include "runners.hpp"

#include "fppgeo/brute.hpp"
#include "fppgeo/coalescence.hpp"
#include "fppgeo/cone.hpp"
#include "fppgeo/error.hpp"
#include "fppgeo/geodesic.hpp"
#include "fppgeo/parallel.hpp"
#include "fppgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fppgeo::detail {

namespace {

Window window_of(const ExperimentConfig& c) { return Window::make(0, c.width - 1, 0, c.height - 1); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json direction_json(const DirectionEstimate& d) {
    return {{"q", d.q},
            {"theta_hat", d.theta_hat},
            {"ci", {d.ci_low, d.ci_high}},
            {"ci_halfwidth", d.ci_halfwidth},
            {"mean_T", d.mean_T},
            {"mean_Y", {d.mean_Y.x, d.mean_Y.t}},
            {"n_regenerations", d.n_regenerations}};
}

nlohmann::json drift_json(const DriftProfile& p) {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : p.estimates)
        est.push_back({{"m", e.m},
                       {"drift", e.drift},
                       {"stderr", e.stderr_},
                       {"n", e.n},
                       {"absorptions", e.absorptions},
                       {"absorption_probability", e.absorption_probability}});
    return {{"estimates", est}, {"omitted", p.omitted}, {"transitions", p.transitions}, {"absorbing", p.absorbing}};
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::uint64_t child(std::uint64_t seed, std::uint64_t stream) { return rng::derive(seed, stream << 40); }

} // namespace

void Artifacts::write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
    out.close();
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + (dir_ / name).string());
    files_.push_back(name);
}

std::size_t thread_count(const ExperimentConfig& c) { return c.threads ? c.threads : default_threads(); }

Result run_direction_curve(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    ConeOptions co;
    co.window = window_of(c);
    co.excess = c.excess;
    co.trace = {c.escape_margin, c.depth};
    co.threads = thread_count(c);
    co.keep_traces = true;
    auto curve = theta_curve(c.p, c.q_grid, c.replicas, c.seed, co);

    std::ostringstream csv;
    csv << "replica,q,j,T_j,Y_j_x,Y_j_t,censored\n";
    for (std::size_t i = 0; i < curve.traces.size(); ++i)
        for (const auto& t : curve.traces[i])
            write_regeneration_csv(csv, t, curve.replica_ids[i]);
    art.write("regenerations.csv", csv.str());

    const auto sym = symmetry_checks(curve, co.resamples, co.level, child(c.seed, 5));
    ConeOptions ao = co;
    ao.keep_traces = false;
    ao.min_replicas = std::min<std::size_t>(ao.min_replicas, c.alpha_replicas);
    const auto cone = estimate_alpha(c.p, c.alpha_replicas, child(c.seed, 6), ao);

    auto report = cone_report(cone, &curve);
    report["monotonicity_violations"] = curve.monotonicity_violations;
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : sym) {
        sj.push_back({{"q", s.q}, {"sum", s.sum}, {"ci", {s.ci_low, s.ci_high}}, {"pass", s.pass}});
        res.check("symmetry q=" + label(s.q), s.pass, sj.back());
    }
    report["symmetry"] = sj;
    res.check("monotone per replica", curve.monotonicity_violations == 0,
              {{"violations", curve.monotonicity_violations}, {"replicas", curve.replica_ids.size()}});
    const auto endpoint = [&](const char* name, const DirectionEstimate& d, double angle) {
        const auto e = endpoint_check(d, angle, cone.theta_ci_halfwidth);
        nlohmann::json j{{"theta_hat", e.theta_hat},
                         {"cone_angle", e.cone_angle},
                         {"difference", e.difference},
                         {"joint_halfwidth", e.joint_halfwidth},
                         {"pass", e.pass}};
        report[name] = j;
        res.check(name, e.pass, j);
    };
    if (c.q_grid.front() == 0.0)
        endpoint("endpoint theta(0) vs theta_plus", curve.points.front(), cone.theta_plus);
    if (c.q_grid.back() == 1.0)
        endpoint("endpoint theta(1) vs theta_minus", curve.points.back(), cone.theta_minus);
    art.write("curve.json", report.dump(2) + "\n");

    res.summary = report;
    res.censoring = {{"censored_traces", curve.censored},
                     {"replicas_without_origin", c.replicas - curve.replica_ids.size()},
                     {"alpha_censored_traces", cone.censored}};

    if (c.render && !curve.replica_ids.empty()) {
        const auto r = curve.replica_ids.front();
        const auto field = sample_field(co.window, c.p, c.excess, rng::derive(c.seed, r));
        const auto table = level_table(field, Orientation::Forward);
        std::size_t tried = 0;
        const auto origin = find_origin(table, c.escape_margin, co.origin_scan, tried);
        const auto side = std::min({c.width, c.height, std::int32_t(240)});
        const auto view = Window::make(0, side - 1, 0, side - 1);
        std::vector<SvgLayer> layers;
        const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728"};
        int k = 0;
        for (double q : {0.0, 0.5, 1.0})
            layers.push_back({stabilized_path(field, table, *origin, q, {c.escape_margin, 2 * side}).steps,
                              colors[k++], 2.0});
        std::ostringstream svg;
        write_svg(svg, field, view, layers);
        art.write("paths.svg", svg.str());
    }
    return res;
}

Result run_coalescence(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    const auto window = window_of(c);
    const auto threads = thread_count(c);
    std::int64_t widest = 0;
    for (auto s : c.separations)
        widest = std::max(widest, s);
    for (auto s : c.drift_separations)
        widest = std::max(widest, s);
    const auto b = std::int32_t(widest / 2 + 8);
    const Site base{b, b};
    JointOptions jo;
    jo.trace = {c.escape_margin, c.depth};

    enum class Status { Coalesced, Exhausted, Censored, Discarded };
    struct PairOut {
        Status status = Status::Discarded;
        std::int64_t n0 = -1;
        std::int64_t depth = 0;
        std::size_t regenerations = 0;
        bool bound_ok = true;
        bool parity_ok = true;
        std::string csv;
    };
    const auto nsep = c.separations.size();
    std::vector<std::vector<PairOut>> fields;
    std::vector<std::size_t> valid(nsep, 0);
    const std::size_t batch = 32;
    const auto enough = [&] {
        return std::all_of(valid.begin(), valid.end(), [&](auto v) { return v >= c.replicas; });
    };
    while (!enough() && fields.size() < c.max_fields) {
        const auto start = fields.size();
        const auto n = std::min(batch, c.max_fields - start);
        std::vector<std::vector<PairOut>> out(n, std::vector<PairOut>(nsep));
        parallel_for(n, threads, [&](std::size_t i) {
            const auto r = start + i;
            const auto field = sample_field(window, c.p, c.excess, rng::derive(c.seed, r));
            const auto table = level_table(field, Orientation::Forward);
            for (std::size_t k = 0; k < nsep; ++k) {
                const auto s = std::int32_t(c.separations[k]);
                const Site other = base + Site{s / 2, -s / 2};
                auto& o = out[i][k];
                if (perc_status(table, base, c.escape_margin).kind != PercStatus::Kind::Escapes ||
                    perc_status(table, other, c.escape_margin).kind != PercStatus::Kind::Escapes)
                    continue;
                auto tr = joint_trace(field, table, base, other, c.q, jo);
                o.status = tr.n0 ? Status::Coalesced : tr.censored ? Status::Censored : Status::Exhausted;
                o.n0 = tr.n0.value_or(-1);
                o.depth = tr.depth;
                o.regenerations = tr.taus.size() - 1;
                o.bound_ok = increment_bound_holds(tr);
                for (auto z : tr.zs)
                    o.parity_ok = o.parity_ok && (z % 2 == tr.zs.front() % 2);
                std::ostringstream os;
                write_coalescence_csv(os, tr, r);
                o.csv = os.str();
            }
        });
        for (auto& f : out) {
            for (std::size_t k = 0; k < nsep; ++k)
                valid[k] += f[k].status == Status::Coalesced || f[k].status == Status::Exhausted;
            fields.push_back(std::move(f));
        }
    }

    static constexpr const char* names[] = {"coalesced", "exhausted", "censored", "discarded"};
    std::ostringstream pairs;
    pairs << "replica,separation,status,n0,depth,regenerations\n";
    bool bound_ok = true, parity_ok = true;
    nlohmann::json per_sep = nlohmann::json::array();
    nlohmann::json cens = nlohmann::json::object();
    for (std::size_t k = 0; k < nsep; ++k) {
        std::ostringstream csv;
        csv << "replica,q,j,tau_j,Z_j,absorbed\n";
        std::size_t counts[4] = {0, 0, 0, 0};
        for (std::size_t r = 0; r < fields.size(); ++r) {
            const auto& o = fields[r][k];
            ++counts[int(o.status)];
            csv << o.csv;
            bound_ok = bound_ok && o.bound_ok;
            parity_ok = parity_ok && o.parity_ok;
            pairs << r << ',' << c.separations[k] << ',' << names[int(o.status)] << ',' << o.n0 << ',' << o.depth
                  << ',' << o.regenerations << '\n';
        }
        art.write("coalescence_sep" + std::to_string(c.separations[k]) + ".csv", csv.str());
        const auto uncensored = counts[0] + counts[1];
        const double rate = uncensored ? double(counts[0]) / double(uncensored) : 0.0;
        nlohmann::json j{{"separation", c.separations[k]},
                         {"coalesced", counts[0]},
                         {"exhausted", counts[1]},
                         {"censored", counts[2]},
                         {"discarded", counts[3]},
                         {"rate", rate}};
        per_sep.push_back(j);
        cens["separation " + std::to_string(c.separations[k])] = {{"censored", counts[2]},
                                                                  {"discarded_non_percolating", counts[3]}};
        res.check("coalescence rate >= 0.99 at separation " + std::to_string(c.separations[k]),
                  uncensored >= c.replicas && rate >= 0.99, j);
    }
    art.write("pairs.csv", pairs.str());
    res.summary["fields"] = fields.size();
    res.summary["separations"] = per_sep;

    if (c.pilot_replicas > 0 && c.drift_replicas > 0) {
        const auto collect = [&](std::uint64_t seed, std::size_t count) {
            std::vector<std::vector<CoalescenceTrace>> out(count);
            parallel_for(count, threads, [&](std::size_t r) {
                const auto field = sample_field(window, c.p, c.excess, rng::derive(seed, r));
                const auto table = level_table(field, Orientation::Forward);
                for (auto s : c.drift_separations) {
                    const Site other = base + Site{std::int32_t(s / 2), -std::int32_t(s / 2)};
                    if (perc_status(table, base, c.escape_margin).kind != PercStatus::Kind::Escapes ||
                        perc_status(table, other, c.escape_margin).kind != PercStatus::Kind::Escapes)
                        continue;
                    auto tr = joint_trace(field, table, base, other, c.q, jo);
                    tr.path_x = {};
                    tr.path_y = {};
                    out[r].push_back(std::move(tr));
                }
            });
            std::vector<CoalescenceTrace> flat;
            for (auto& v : out)
                for (auto& t : v)
                    flat.push_back(std::move(t));
            return flat;
        };
        DriftOptions dopt;
        dopt.relative_halfwidth = c.bucket_halfwidth;
        const auto pilot = collect(child(c.seed, 7), c.pilot_replicas);
        const auto test = collect(child(c.seed, 8), c.drift_replicas);
        std::vector<std::int64_t> grid;
        const auto top = *std::max_element(c.drift_buckets.begin(), c.drift_buckets.end());
        for (std::int64_t m = 2; m <= top; m += 2)
            grid.push_back(m);
        const auto pilot_profile = drift_profile(pilot, grid, dopt);
        const auto m0 = select_m0(pilot_profile);
        const auto test_profile = drift_profile(test, c.drift_buckets, dopt);
        bool ok = m0.has_value();
        std::size_t tested = 0;
        if (m0) {
            for (auto m : c.drift_buckets) {
                if (m <= *m0)
                    continue;
                const auto it = std::find_if(test_profile.estimates.begin(), test_profile.estimates.end(),
                                             [&](const auto& e) { return e.m == m; });
                if (it == test_profile.estimates.end()) {
                    ok = false;
                    continue;
                }
                ++tested;
                ok = ok && it->drift + 2.0 * it->stderr_ <= 0.0;
            }
        }
        ok = ok && tested > 0;
        for (const auto* set : {&pilot, &test})
            for (const auto& t : *set)
                bound_ok = bound_ok && increment_bound_holds(t);
        const auto signs = short_interval_signs(test);
        nlohmann::json dj{{"pilot", drift_json(pilot_profile)},
                          {"m0", m0 ? nlohmann::json(*m0) : nlohmann::json(nullptr)},
                          {"test", drift_json(test_profile)},
                          {"tested_buckets", tested},
                          {"pass", ok},
                          {"sign_test", {{"positive", signs.positive},
                                         {"negative", signs.negative},
                                         {"zero", signs.zero},
                                         {"p_value", sign_test_pvalue(signs.positive, signs.negative)}}}};
        art.write("drift.json", dj.dump(2) + "\n");
        res.summary["drift"] = {{"m0", dj["m0"]}, {"tested_buckets", tested}, {"pass", ok}};
        res.check("drift + 2 stderr <= 0 above m0", ok, res.summary["drift"]);
    }
    res.check("increment bound |dZ| <= 2 dtau", bound_ok);
    res.check("parity of Z conserved", parity_ok);
    res.censoring = cens;
    return res;
}

Result run_sandwich(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    const auto window = window_of(c);
    struct Row {
        std::string csv;
        bool ok = false;
        bool equal = false;
        std::size_t checked = 0, failures = 0;
        RenewalSums direction;
    };
    struct Out {
        std::vector<Row> rows;
        RenewalSums reference;
        bool has_reference = false;
        std::string svg;
    };
    std::vector<Out> out(c.replicas);
    parallel_for(c.replicas, thread_count(c), [&](std::size_t r) {
        const auto field = sample_field(window, c.p, c.excess, rng::derive(c.seed, r));
        const auto fwd = level_table(field, Orientation::Forward);
        const auto anti = level_table(field, Orientation::Anti);
        SandwichOptions so;
        so.trace = {c.escape_margin, -1};
        so.continuation_steps = c.continuation;
        so.subpath_checks = c.subpath_checks;
        const auto cx = window.x_min + window.width() / 2, ct = window.t_min + window.height() / 2;
        const std::int32_t reach = 120, stride = 17;
        auto& o = out[r];
        std::size_t k = 0;
        for (auto dt = -reach; dt <= reach && o.rows.size() < c.sites_per_replica; dt += stride)
            for (auto dx = -reach; dx <= reach && o.rows.size() < c.sites_per_replica; dx += stride) {
                const Site s{cx + dx, ct + dt};
                const auto st = perc_status(fwd, s, c.escape_margin);
                if (st.kind == PercStatus::Kind::Escapes && !o.has_reference) {
                    TraceOptions t{c.escape_margin, c.continuation};
                    for (const auto& rs : renewal_samples(stabilized_path(field, fwd, s, c.q, t)))
                        o.reference.add(rs);
                    o.has_reference = true;
                }
                if (st.kind != PercStatus::Kind::Finite)
                    continue;
                Row row;
                std::ostringstream os;
                os << r << ',' << s.x << ',' << s.t << ',';
                so.check_seed = rng::derive(c.seed, (r << 20) + k++);
                try {
                    const auto sw = sandwich_geodesic(field, fwd, anti, s, c.q, so);
                    const auto& g = *sw.region;
                    row.ok = true;
                    row.equal = std::abs(sw.restricted_time - sw.unrestricted_time) <=
                                1e-9 * (1.0 + sw.unrestricted_time);
                    row.checked = sw.checks.checked;
                    row.failures = sw.checks.failures;
                    for (const auto& rs : renewal_samples(sw.continuation))
                        row.direction.add(rs);
                    os << "ok," << g.j_r << ',' << g.j_l << ',' << g.n0 << ',' << g.n0_anti << ',' << g.size << ','
                       << num(sw.restricted_time) << ',' << num(sw.unrestricted_time) << ',' << sw.splice.x << ','
                       << sw.splice.t << ',' << sw.checks.checked << ',' << sw.checks.failures << '\n';
                    if (c.render && o.svg.empty()) {
                        Window box = Window::make(s.x, s.x, s.t, s.t);
                        for (const auto* path : {&g.left_path, &g.right_path, &g.left_anti, &g.right_anti})
                            for (auto p : *path) {
                                box.x_min = std::min(box.x_min, p.x);
                                box.x_max = std::max(box.x_max, p.x);
                                box.t_min = std::min(box.t_min, p.t);
                                box.t_max = std::max(box.t_max, p.t);
                            }
                        box = Window::make(box.x_min - 5, box.x_max + 5, box.t_min - 5, box.t_max + 5);
                        const std::vector<SvgLayer> layers{{g.left_path, "#1f77b4", 1.5},
                                                           {g.right_path, "#1f77b4", 1.5},
                                                           {g.left_anti, "#2ca02c", 1.5},
                                                           {g.right_anti, "#2ca02c", 1.5},
                                                           {sw.path.sites, "#d62728", 2.5}};
                        std::ostringstream svg;
                        write_svg(svg, field, box, layers, 8.0);
                        o.svg = svg.str();
                    }
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::WindowExhausted)
                        throw;
                    os << "censored,,,,,,,,,,,\n";
                }
                row.csv = os.str();
                o.rows.push_back(std::move(row));
            }
    });

    std::ostringstream csv;
    csv << "replica,origin_x,origin_t,status,j_r,j_l,n0,n0_anti,delta_size,restricted_time,unrestricted_time,"
           "splice_x,splice_t,subpaths_checked,subpath_failures\n";
    std::size_t attempts = 0, ok = 0, equal = 0, checked = 0, failures = 0;
    std::vector<RenewalSums> outputs, reference;
    std::string svg;
    for (const auto& o : out) {
        for (const auto& row : o.rows) {
            csv << row.csv;
            ++attempts;
            ok += row.ok;
            equal += row.equal;
            checked += row.checked;
            failures += row.failures;
            if (row.ok && row.direction.count > 0)
                outputs.push_back(row.direction);
        }
        if (o.has_reference && o.reference.count > 0)
            reference.push_back(o.reference);
        if (svg.empty())
            svg = o.svg;
    }
    art.write("sandwich.csv", csv.str());
    if (!svg.empty())
        art.write("sandwich.svg", svg);

    res.summary = {{"non_percolating_origins", attempts},
                   {"constructed", ok},
                   {"restricted_equals_unrestricted", equal},
                   {"subpaths_checked", checked},
                   {"subpath_failures", failures}};
    DirectionOptions dopt;
    dopt.seed = child(c.seed, 9);
    if (outputs.size() >= 2 && reference.size() >= 2) {
        try {
            const auto a = estimate_direction_grouped(outputs, c.q, dopt);
            const auto b = estimate_direction_grouped(reference, c.q, dopt);
            const auto joint = std::hypot(a.ci_halfwidth, b.ci_halfwidth);
            res.summary["direction"] = {{"sandwich", direction_json(a)},
                                        {"percolating", direction_json(b)},
                                        {"joint_halfwidth", joint},
                                        {"match", std::abs(a.theta_hat - b.theta_hat) <= joint}};
        } catch (const Error&) {
            res.summary["direction"] = nullptr;
        }
    }
    res.censoring = {{"window_exhausted", attempts - ok}};
    res.check("restricted time equals unrestricted time", ok > 0 && equal == ok, res.summary);
    res.check("sampled subpaths are geodesics", failures == 0, {{"checked", checked}, {"failures", failures}});
    return res;
}

Result run_bigeodesic(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    const auto window = window_of(c);
    std::vector<std::string> rows(c.replicas);
    std::vector<std::size_t> sites(c.replicas, 0), checked(c.replicas, 0), failures(c.replicas, 0);
    parallel_for(c.replicas, thread_count(c), [&](std::size_t r) {
        const auto field = sample_field(window, c.p, c.excess, rng::derive(c.seed, r));
        const auto fwd = level_table(field, Orientation::Forward);
        const auto anti = level_table(field, Orientation::Anti);
        const auto inset = c.escape_margin + std::int32_t(c.continuation * 0.6);
        const auto candidates = bidirectional_scan(fwd, anti, inset);
        if (candidates.empty())
            return;
        SandwichOptions so;
        so.trace = {c.escape_margin, -1};
        so.continuation_steps = c.continuation;
        so.subpath_checks = c.subpath_checks;
        const auto n = std::min(c.sites_per_replica, candidates.size());
        const auto offset = rng::derive(c.seed, r) % candidates.size();
        std::ostringstream os;
        for (std::size_t k = 0; k < n; ++k) {
            const auto s = candidates[(offset + k * candidates.size() / n) % candidates.size()];
            so.check_seed = rng::derive(c.seed, (r << 20) + k);
            const auto g = bi_infinite_geodesic(field, fwd, anti, s, c.q, so);
            os << r << ',' << s.x << ',' << s.t << ',' << g.anti.stabilized_upto << ','
               << g.forward.stabilized_upto << ',' << num(g.path.total_time) << ',' << g.checks.checked << ','
               << g.checks.failures << '\n';
            ++sites[r];
            checked[r] += g.checks.checked;
            failures[r] += g.checks.failures;
        }
        rows[r] = os.str();
    });
    std::ostringstream csv;
    csv << "replica,site_x,site_t,anti_length,forward_length,total_time,subpaths_checked,subpath_failures\n";
    std::size_t ns = 0, nc = 0, nf = 0, empty = 0;
    for (std::size_t r = 0; r < c.replicas; ++r) {
        csv << rows[r];
        ns += sites[r];
        nc += checked[r];
        nf += failures[r];
        empty += sites[r] == 0;
    }
    art.write("bigeodesic.csv", csv.str());
    res.summary = {{"sites", ns}, {"subpaths_checked", nc}, {"subpath_failures", nf}};
    res.censoring = {{"replicas_without_bidirectional_site", empty}};
    res.check("bi-infinite subpaths are geodesics", ns > 0 && nf == 0, res.summary);
    return res;
}

Result run_cone(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    ConeOptions co;
    co.window = window_of(c);
    co.excess = c.excess;
    co.trace = {c.escape_margin, c.depth};
    co.threads = thread_count(c);
    co.min_replicas = std::min<std::size_t>(co.min_replicas, c.replicas);
    const auto cone = estimate_alpha(c.p, c.replicas, c.seed, co);
    auto report = cone_report(cone);
    if (c.threshold_band) {
        const auto band = threshold_band(256, c.escape_margin, 0.05, 6, 4, child(c.seed, 10));
        report["threshold_band"] = {{"low", band.low}, {"high", band.high}, {"iterations", band.iterations}};
    }
    art.write("cone.json", report.dump(2) + "\n");
    res.summary = report;
    res.censoring = {{"censored_traces", cone.censored}, {"origins_tried", cone.origins_tried}};
    const bool algebra = std::abs(cone.theta_minus + cone.theta_plus - std::numbers::pi / 2) < 1e-12 &&
                         std::abs(cone.M.x + cone.M.t - 1.0) < 1e-12;
    res.check("cone algebra", algebra);
    return res;
}

Result run_oracle_sweep(const ExperimentConfig& c, Artifacts& art) {
    Result res;
    const auto window = window_of(c);
    std::ostringstream csv, levels;
    csv << "replica,p,source_x,source_t,target_x,target_t,dijkstra,enumeration\n";
    levels << "replica,p,orientation,x,t,dp,enumeration\n";
    std::size_t mismatches = 0, guided_mismatches = 0, level_mismatches = 0, pairs = 0;
    const auto show = [](std::int32_t v) { return v == LevelTable::escapes ? -1 : v; };
    for (std::size_t r = 0; r < c.replicas; ++r) {
        const double p = c.p_list.empty() ? c.p : c.p_list[r % c.p_list.size()];
        const auto field = sample_field(window, p, c.excess, rng::derive(c.seed, r));
        const auto source = window.site_at(rng::derive(c.seed, r) % window.area());
        const auto brute = enumerate_passage_times(field, source);
        GeodesicOracle oracle(field);
        std::vector<Site> targets;
        for (std::size_t i = 0; i < window.area(); ++i)
            targets.push_back(window.site_at(i));
        const auto dij = oracle.passage_times(source, targets);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            ++pairs;
            mismatches += dij[i] != brute[i];
            guided_mismatches += oracle.passage_time(source, targets[i]) != brute[i];
            csv << r << ',' << p << ',' << source.x << ',' << source.t << ',' << targets[i].x << ','
                << targets[i].t << ',' << num(dij[i]) << ',' << num(brute[i]) << '\n';
        }
        for (auto o : {Orientation::Forward, Orientation::Anti}) {
            const auto dp = level_table(field, o);
            const auto ref = enumerate_level_table(field, o);
            for (std::size_t i = 0; i < window.area(); ++i) {
                level_mismatches += dp.values()[i] != ref[i];
                const auto s = window.site_at(i);
                levels << r << ',' << p << ',' << (o == Orientation::Forward ? "forward" : "anti") << ',' << s.x
                       << ',' << s.t << ',' << show(dp.values()[i]) << ',' << show(ref[i]) << '\n';
            }
        }
    }
    art.write("oracle.csv", csv.str());
    art.write("levels.csv", levels.str());
    res.summary = {{"windows", c.replicas},
                   {"pairs", pairs},
                   {"dijkstra_mismatches", mismatches},
                   {"guided_mismatches", guided_mismatches},
                   {"level_mismatches", level_mismatches}};
    res.censoring = {{"censored", 0}};
    res.check("passage times equal enumeration", mismatches == 0 && guided_mismatches == 0, res.summary);
    res.check("level tables equal enumeration", level_mismatches == 0, res.summary);
    return res;
}

} // namespace fppgeo::detail
