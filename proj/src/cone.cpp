#include "fppgeo/cone.hpp"

#include "fppgeo/error.hpp"
#include "fppgeo/parallel.hpp"
#include "fppgeo/percolation.hpp"
#include "fppgeo/rng.hpp"

#include <cmath>
#include <numbers>

namespace fppgeo {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double alpha_of(const RenewalSums& s) { return (s.x - s.t) / s.time / kSqrt2; }
double theta_of(const RenewalSums& s) { return std::atan2(s.t, s.x); }

struct ReplicaField {
    PassageField field;
    LevelTable forward;
};

ReplicaField make_replica(double p, std::uint64_t seed, std::size_t r, const ConeOptions& o) {
    auto field = sample_field(o.window, p, o.excess, rng::derive(seed, r));
    auto table = level_table(field, Orientation::Forward);
    return {std::move(field), std::move(table)};
}

} // namespace

ConeEstimate cone_from_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0 / kSqrt2 + 1e-12))
        throw Error(ErrorCode::Config, "alpha must lie in [0, 1/sqrt(2)]");
    alpha = std::min(alpha, 1.0 / kSqrt2);
    ConeEstimate c;
    c.alpha_hat = alpha;
    c.M = {0.5 + alpha / kSqrt2, 0.5 - alpha / kSqrt2};
    c.N = {c.M.t, c.M.x};
    c.theta_minus = std::atan2(c.M.t, c.M.x);
    c.theta_plus = std::atan2(c.N.t, c.N.x);
    return c;
}

std::optional<Site> find_origin(const LevelTable& forward, std::int32_t escape_margin, std::int32_t scan,
                                std::size_t& tried) {
    const auto& w = forward.window();
    for (std::int32_t i = 0; i < scan; ++i) {
        const Site s{w.x_min + i, w.t_min + i};
        if (!w.contains(s))
            break;
        ++tried;
        const auto st = perc_status(forward, s, escape_margin);
        if (st.kind == PercStatus::Kind::Censored)
            break;
        if (st.kind == PercStatus::Kind::Escapes)
            return s;
    }
    return std::nullopt;
}

ConeEstimate estimate_alpha(double p, std::size_t replicas, std::uint64_t seed, const ConeOptions& options) {
    if (replicas < options.min_replicas)
        throw Error(ErrorCode::Config, "estimate_alpha needs at least " + std::to_string(options.min_replicas) +
                                           " replicas");
    struct Out {
        RenewalSums sums;
        std::size_t tried = 0;
        bool found = false;
        bool censored = false;
    };
    std::vector<Out> out(replicas);
    parallel_for(replicas, options.threads, [&](std::size_t r) {
        const auto rep = make_replica(p, seed, r, options);
        auto& o = out[r];
        const auto origin = find_origin(rep.forward, options.trace.escape_margin, options.origin_scan, o.tried);
        if (!origin)
            return;
        o.found = true;
        const auto trace = stabilized_path(rep.field, rep.forward, *origin, 1.0, options.trace);
        o.censored = trace.censored;
        for (const auto& s : renewal_samples(trace))
            o.sums.add(s);
    });

    ConeEstimate c;
    std::vector<RenewalSums> groups;
    std::size_t found = 0;
    for (const auto& o : out) {
        c.origins_tried += o.tried;
        found += o.found;
        c.censored += o.censored;
        if (o.found && o.sums.count > 0)
            groups.push_back(o.sums);
    }
    c.escape_rate = c.origins_tried ? double(found) / double(c.origins_tried) : 0.0;
    if (c.escape_rate < options.escape_floor || groups.size() < 2)
        throw Error(ErrorCode::SubcriticalSuspected,
                    "percolating origin rate " + std::to_string(c.escape_rate) + " below the floor");

    const auto pooled = pool(groups);
    const auto a = alpha_of(pooled);
    // Finite samples can land a hair outside the admissible range.
    const auto clamped = std::clamp(a, 0.0, 1.0 / kSqrt2);
    auto base = cone_from_alpha(clamped);
    base.p = p;
    base.replicas = replicas;
    base.censored = c.censored;
    base.origins_tried = c.origins_tried;
    base.escape_rate = c.escape_rate;
    base.regenerations = pooled.count;

    const auto boot = bootstrap_groups(groups, options.resamples, rng::derive(seed, 0xA1FA), alpha_of);
    const double tail = (1.0 - options.level) / 2.0;
    base.alpha_ci_low = quantile(boot, tail);
    base.alpha_ci_high = quantile(boot, 1.0 - tail);
    base.alpha_ci_halfwidth = (base.alpha_ci_high - base.alpha_ci_low) / 2.0;
    const auto tboot = bootstrap_groups(groups, options.resamples, rng::derive(seed, 0xA1FA), theta_of);
    base.theta_ci_halfwidth = (quantile(tboot, 1.0 - tail) - quantile(tboot, tail)) / 2.0;
    return base;
}

ThetaCurve theta_curve(double p, std::span<const double> q_grid, std::size_t replicas, std::uint64_t seed,
                       const ConeOptions& options) {
    if (q_grid.empty() || !std::is_sorted(q_grid.begin(), q_grid.end()) || q_grid.front() < 0.0 ||
        q_grid.back() > 1.0)
        throw Error(ErrorCode::Config, "q grid must be sorted inside [0, 1]");
    const auto g = q_grid.size();
    ThetaCurve curve;
    curve.p = p;
    curve.q_grid.assign(q_grid.begin(), q_grid.end());
    curve.replicas = replicas;

    struct Out {
        std::vector<RenewalSums> sums;
        std::vector<double> angles;
        std::vector<QPathTrace> kept;
        std::int64_t length = 0;
        std::size_t tried = 0;
        std::size_t censored = 0;
        bool found = false;
    };
    std::vector<Out> out(replicas);
    parallel_for(replicas, options.threads, [&](std::size_t r) {
        const auto rep = make_replica(p, seed, r, options);
        auto& o = out[r];
        const auto origin = find_origin(rep.forward, options.trace.escape_margin, options.origin_scan, o.tried);
        if (!origin)
            return;
        o.found = true;
        o.sums.resize(g);
        std::vector<QPathTrace> traces;
        traces.reserve(g);
        for (std::size_t k = 0; k < g; ++k) {
            traces.push_back(stabilized_path(rep.field, rep.forward, *origin, q_grid[k], options.trace));
            o.censored += traces.back().censored;
            for (const auto& s : renewal_samples(traces.back()))
                o.sums[k].add(s);
        }
        o.length = traces.front().stabilized_upto;
        for (const auto& t : traces)
            o.length = std::min(o.length, t.stabilized_upto);
        for (const auto& t : traces) {
            const auto d = t.steps[std::size_t(o.length)] - *origin;
            o.angles.push_back(std::atan2(double(d.t), double(d.x)));
        }
        if (options.keep_traces)
            for (auto& t : traces) {
                t.steps = {};
                o.kept.push_back(std::move(t));
            }
    });

    curve.sums.assign(g, {});
    for (std::size_t r = 0; r < replicas; ++r) {
        auto& o = out[r];
        curve.origins_tried += o.tried;
        curve.censored += o.censored;
        if (!o.found)
            continue;
        curve.replica_ids.push_back(r);
        if (options.keep_traces)
            curve.traces.push_back(std::move(o.kept));
        for (std::size_t k = 0; k < g; ++k)
            curve.sums[k].push_back(o.sums[k]);
        curve.common_angles.push_back(o.angles);
        curve.common_length.push_back(o.length);
        for (std::size_t k = 1; k < g; ++k)
            if (o.angles[k] > o.angles[k - 1])
                ++curve.monotonicity_violations;
    }
    DirectionOptions dopt;
    dopt.resamples = options.resamples;
    dopt.level = options.level;
    for (std::size_t k = 0; k < g; ++k) {
        dopt.seed = rng::derive(seed, 0xC0FFEE + k);
        curve.points.push_back(estimate_direction_grouped(curve.sums[k], q_grid[k], dopt));
    }
    return curve;
}

std::vector<SymmetryCheck> symmetry_checks(const ThetaCurve& curve, std::size_t resamples, double level,
                                           std::uint64_t seed) {
    std::vector<SymmetryCheck> out;
    const auto& grid = curve.q_grid;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        if (grid[a] > 0.5 + 1e-12)
            break;
        std::size_t b = grid.size();
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (std::abs(grid[k] - (1.0 - grid[a])) < 1e-9)
                b = k;
        if (b == grid.size())
            continue;
        const auto& sa = curve.sums[a];
        const auto& sb = curve.sums[b];
        const auto n = sa.size();
        std::mt19937_64 gen(rng::derive(seed, a));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> boot;
        boot.reserve(resamples);
        for (std::size_t r = 0; r < resamples; ++r) {
            RenewalSums pa, pb;
            for (std::size_t i = 0; i < n; ++i) {
                const auto j = pick(gen);
                pa.add(sa[j]);
                pb.add(sb[j]);
            }
            boot.push_back(theta_of(pa) + theta_of(pb));
        }
        SymmetryCheck c;
        c.q = grid[a];
        c.sum = theta_of(pool(sa)) + theta_of(pool(sb));
        const double tail = (1.0 - level) / 2.0;
        c.ci_low = quantile(boot, tail);
        c.ci_high = quantile(boot, 1.0 - tail);
        c.pass = c.ci_low <= std::numbers::pi / 2 && std::numbers::pi / 2 <= c.ci_high;
        out.push_back(c);
    }
    return out;
}

EndpointCheck endpoint_check(const DirectionEstimate& estimate, double cone_angle, double cone_halfwidth) {
    EndpointCheck c;
    c.theta_hat = estimate.theta_hat;
    c.cone_angle = cone_angle;
    c.difference = estimate.theta_hat - cone_angle;
    c.joint_halfwidth = std::hypot(estimate.ci_halfwidth, cone_halfwidth);
    c.pass = std::abs(c.difference) <= c.joint_halfwidth;
    return c;
}

ThresholdBand threshold_band(std::int32_t side, std::int32_t escape_margin, double floor, std::size_t iterations,
                             std::size_t replicas, std::uint64_t seed) {
    ThresholdBand band{0.0, 1.0, 0};
    const auto escape_fraction = [&](double p) {
        std::size_t interior = 0, escapes = 0;
        for (std::size_t r = 0; r < replicas; ++r) {
            const auto field = sample_field(Window::square(side), p, ExcessDistribution::atom(2.0), rng::derive(seed, r));
            const auto table = level_table(field, Orientation::Forward);
            const auto& w = field.window();
            for (std::size_t i = 0; i < w.area(); ++i) {
                const auto st = perc_status(table, w.site_at(i), escape_margin);
                if (st.kind == PercStatus::Kind::Censored)
                    continue;
                ++interior;
                escapes += st.kind == PercStatus::Kind::Escapes;
            }
        }
        return interior ? double(escapes) / double(interior) : 0.0;
    };
    for (std::size_t it = 0; it < iterations; ++it) {
        const double mid = (band.low + band.high) / 2.0;
        (escape_fraction(mid) < floor ? band.low : band.high) = mid;
        ++band.iterations;
    }
    return band;
}

nlohmann::json cone_report(const ConeEstimate& cone, const ThetaCurve* curve) {
    nlohmann::json j{{"p", cone.p},
                     {"alpha_hat", cone.alpha_hat},
                     {"ci", {{"alpha_low", cone.alpha_ci_low},
                             {"alpha_high", cone.alpha_ci_high},
                             {"alpha_halfwidth", cone.alpha_ci_halfwidth},
                             {"theta_halfwidth", cone.theta_ci_halfwidth}}},
                     {"M", {cone.M.x, cone.M.t}},
                     {"N", {cone.N.x, cone.N.t}},
                     {"theta_minus", cone.theta_minus},
                     {"theta_plus", cone.theta_plus},
                     {"replicas", cone.replicas},
                     {"censored", cone.censored},
                     {"regenerations", cone.regenerations},
                     {"escape_rate", cone.escape_rate}};
    nlohmann::json pts = nlohmann::json::array();
    if (curve)
        for (const auto& d : curve->points)
            pts.push_back({{"q", d.q},
                           {"theta_hat", d.theta_hat},
                           {"ci", {d.ci_low, d.ci_high}},
                           {"ci_halfwidth", d.ci_halfwidth},
                           {"n_regenerations", d.n_regenerations}});
    j["curve"] = std::move(pts);
    return j;
}

} // namespace fppgeo
