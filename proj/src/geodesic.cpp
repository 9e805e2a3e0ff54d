#include "fppgeo/geodesic.hpp"

#include "fppgeo/error.hpp"
#include "fppgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>

namespace fppgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); }

} // namespace

double path_time(const PassageField& field, std::span<const Site> sites) {
    double total = 0.0;
    for (std::size_t i = 1; i < sites.size(); ++i)
        total += field.edge_between(sites[i - 1], sites[i]);
    return total;
}

GeodesicOracle::GeodesicOracle(const PassageField& field)
    : field_(field), dist_(field.window().area(), kInf), stamp_(field.window().area(), 0),
      done_(field.window().area(), 0) {}

void GeodesicOracle::search(Site x, std::span<const Site> targets, const std::uint8_t* allowed) {
    const auto& w = field_.window();
    if (!w.contains(x))
        throw Error(ErrorCode::Bounds, "oracle source outside the window");
    for (auto y : targets)
        if (!w.contains(y))
            throw Error(ErrorCode::Bounds, "oracle target outside the window");

    if (++generation_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        generation_ = 1;
    }
    const auto width = std::size_t(w.width());
    const auto height = std::size_t(w.height());
    const auto right = field_.weights_right();
    const auto up = field_.weights_up();

    std::size_t pending = 0;
    for (auto y : targets) {
        const auto i = w.index(y);
        if (stamp_[i] != generation_) {
            stamp_[i] = generation_;
            dist_[i] = kInf;
            done_[i] = 2; // unsettled target
            ++pending;
        }
    }

    // A single target is searched with the L1 lower bound as heuristic; it is
    // consistent because every edge weighs at least 1.
    const bool guided = targets.size() == 1;
    const Site goal = guided ? targets[0] : Site{};
    const auto h = [&](std::size_t i) {
        if (!guided)
            return 0.0;
        const auto cx = std::int64_t(i % width) + w.x_min;
        const auto ct = std::int64_t(i / width) + w.t_min;
        return double(std::abs(cx - goal.x) + std::abs(ct - goal.t));
    };

    struct Entry {
        double f;
        double g;
        std::uint32_t i;
        bool operator>(const Entry& o) const { return f != o.f ? f > o.f : i > o.i; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    const auto src = w.index(x);
    if (allowed && !allowed[src])
        return;
    if (stamp_[src] != generation_) {
        stamp_[src] = generation_;
        done_[src] = 0;
    }
    dist_[src] = 0.0;
    heap.push({h(src), 0.0, std::uint32_t(src)});

    const auto relax = [&](std::size_t j, double d) {
        if (allowed && !allowed[j])
            return;
        if (stamp_[j] != generation_) {
            stamp_[j] = generation_;
            done_[j] = 0;
            dist_[j] = kInf;
        }
        if (d < dist_[j] && done_[j] != 1) {
            dist_[j] = d;
            heap.push({d + h(j), d, std::uint32_t(j)});
        }
    };

    // After the last target settles, keep settling entries of equal priority so
    // every site on every shortest path is final for the predecessor walk.
    double last_f = kInf;
    while (!heap.empty()) {
        const auto [f, d, i32] = heap.top();
        if (pending == 0 && !(f <= last_f || same_time(f, last_f)))
            break;
        heap.pop();
        const std::size_t i = i32;
        if (done_[i] == 1 || d > dist_[i])
            continue;
        if (done_[i] == 2 && --pending == 0)
            last_f = f;
        done_[i] = 1;
        const auto cx = i % width;
        const auto ct = i / width;
        if (cx + 1 < width) relax(i + 1, d + right[i]);
        if (ct + 1 < height) relax(i + width, d + up[i]);
        if (cx > 0) relax(i - 1, d + right[i - 1]);
        if (ct > 0) relax(i - width, d + up[i - width]);
    }
}

GeodesicPath GeodesicOracle::trace_back(Site x, Site y, const std::uint8_t* allowed) const {
    const auto& w = field_.window();
    GeodesicPath out;
    Site v = y;
    out.sites.push_back(v);
    while (v != x) {
        const double dv = dist_[w.index(v)];
        // Predecessors ordered by the step they take into v: right, up, left, down.
        const Site cands[4] = {v - Site{1, 0}, v - Site{0, 1}, v + Site{1, 0}, v + Site{0, 1}};
        bool found = false;
        for (auto u : cands) {
            if (!w.contains(u))
                continue;
            const auto ui = w.index(u);
            if (!reached(ui) || done_[ui] != 1 || (allowed && !allowed[ui]))
                continue;
            if (dist_[ui] < dv && same_time(dist_[ui] + field_.edge_between(u, v), dv)) {
                v = u;
                found = true;
                break;
            }
        }
        if (!found)
            throw Error(ErrorCode::Disconnected, "broken predecessor chain");
        out.sites.push_back(v);
    }
    std::reverse(out.sites.begin(), out.sites.end());
    out.total_time = path_time(field_, out.sites);
    return out;
}

double GeodesicOracle::passage_time(Site x, Site y) {
    const Site t[1] = {y};
    search(x, t, nullptr);
    return dist_[field_.window().index(y)];
}

std::vector<double> GeodesicOracle::passage_times(Site x, std::span<const Site> targets) {
    search(x, targets, nullptr);
    std::vector<double> out;
    out.reserve(targets.size());
    for (auto y : targets)
        out.push_back(dist_[field_.window().index(y)]);
    return out;
}

GeodesicPath GeodesicOracle::geodesic(Site x, Site y) {
    const Site t[1] = {y};
    search(x, t, nullptr);
    return trace_back(x, y, nullptr);
}

GeodesicPath GeodesicOracle::constrained_geodesic(Site x, Site y, std::span<const std::uint8_t> allowed) {
    const auto& w = field_.window();
    if (allowed.size() != w.area())
        throw Error(ErrorCode::Config, "allowed mask does not cover the window");
    if (!w.contains(x) || !w.contains(y))
        throw Error(ErrorCode::Bounds, "constrained geodesic endpoints outside the window");
    if (!allowed[w.index(x)] || !allowed[w.index(y)])
        throw Error(ErrorCode::Disconnected, "endpoint not in the allowed set");
    const Site t[1] = {y};
    search(x, t, allowed.data());
    if (dist_[w.index(y)] == kInf)
        throw Error(ErrorCode::Disconnected, "no path inside the allowed set");
    return trace_back(x, y, allowed.data());
}

double passage_time(const PassageField& field, Site x, Site y) {
    GeodesicOracle o(field);
    return o.passage_time(x, y);
}

GeodesicPath geodesic(const PassageField& field, Site x, Site y) {
    GeodesicOracle o(field);
    return o.geodesic(x, y);
}

GeodesicPath constrained_geodesic(const PassageField& field, Site x, Site y, std::span<const std::uint8_t> allowed) {
    GeodesicOracle o(field);
    return o.constrained_geodesic(x, y, allowed);
}

bool verify_oriented_geodesic(GeodesicOracle& oracle, std::span<const Site> path) {
    if (path.empty())
        throw Error(ErrorCode::NotOrientedOpen, "empty path");
    const auto& field = oracle.field();
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto d = path[i] - path[i - 1];
        Step s;
        if (d == Site{1, 0}) s = Step::Right;
        else if (d == Site{0, 1}) s = Step::Up;
        else throw Error(ErrorCode::NotOrientedOpen, "step is not oriented");
        if (!is_open(field, path[i - 1], s))
            throw Error(ErrorCode::NotOrientedOpen, "step uses a closed edge");
    }
    const auto tau = oracle.passage_time(path.front(), path.back());
    return tau == double(l1_distance(path.front(), path.back()));
}

bool verify_oriented_geodesic(const PassageField& field, std::span<const Site> path) {
    GeodesicOracle o(field);
    return verify_oriented_geodesic(o, path);
}

SubpathReport verify_subpaths(GeodesicOracle& oracle, std::span<const Site> sites, std::size_t count,
                              std::size_t max_span, std::uint64_t seed,
                              std::span<const std::pair<std::size_t, std::size_t>> required) {
    SubpathReport rep;
    if (sites.size() < 2)
        return rep;
    const auto& field = oracle.field();
    std::vector<double> prefix(sites.size(), 0.0);
    for (std::size_t i = 1; i < sites.size(); ++i)
        prefix[i] = prefix[i - 1] + field.edge_between(sites[i - 1], sites[i]);

    const auto check = [&](std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        ++rep.checked;
        const double cost = prefix[j] - prefix[i];
        const double tau = oracle.passage_time(sites[i], sites[j]);
        if (!(cost <= tau || same_time(cost, tau)))
            ++rep.failures;
    };
    for (auto [i, j] : required)
        check(std::min(i, sites.size() - 1), std::min(j, sites.size() - 1));
    const auto n = sites.size();
    const auto span = std::max<std::size_t>(1, std::min(max_span, n - 1));
    for (std::size_t k = 0; k < count; ++k) {
        const auto h = rng::mix64(seed + 0x9e3779b97f4a7c15ULL * (k + 1));
        const auto len = 1 + (h >> 32) % span;
        const auto start = (h & 0xffffffffULL) % (n - len);
        check(start, start + len);
    }
    return rep;
}

std::vector<Site> SandwichRegion::sites(const Window& w) const {
    std::vector<Site> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            out.push_back(w.site_at(i));
    return out;
}

namespace {

void rasterize(const Window& w, std::span<const Site> a, std::span<const Site> b, std::vector<std::uint8_t>& mask,
               std::size_t& size) {
    for (std::size_t s = 0; s < a.size() && s < b.size(); ++s) {
        const auto lev = level(a[s]);
        const auto lo = std::min(a[s].x, b[s].x);
        const auto hi = std::max(a[s].x, b[s].x);
        for (auto x = lo; x <= hi; ++x) {
            const Site site{x, std::int32_t(lev - x)};
            auto& m = mask[w.index(site)];
            if (!m) {
                m = 1;
                ++size;
            }
        }
    }
}

QPathTrace continuation_path(const PassageField& field, const LevelTable& table, Site from, double q,
                             const SandwichOptions& options) {
    TraceOptions t = options.trace;
    t.max_steps = options.continuation_steps;
    try {
        return stabilized_path(field, table, from, q, t);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::OriginNotPercolating)
            throw Error(ErrorCode::WindowExhausted, "continuation start lies in the censored margin");
        throw;
    }
}

} // namespace

SandwichRegion build_sandwich(const PassageField& field, const LevelTable& forward, const LevelTable& anti,
                              Site origin, double q, const SandwichOptions& options) {
    const auto& w = field.window();
    SandwichRegion r;
    r.origin = origin;
    AntidiagonalNeighbors nb;
    try {
        nb = nearest_bidirectional_on_antidiagonal(forward, anti, origin, options.trace.escape_margin);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CensoredBeforeFound)
            throw Error(ErrorCode::WindowExhausted, "no bi-directional anchor before the censored margin");
        throw;
    }
    r.j_r = nb.j_r;
    r.j_l = nb.j_l;
    const Site right = origin + Site{nb.j_r, -nb.j_r};
    const Site left = origin + Site{nb.j_l, -nb.j_l};

    JointOptions jo;
    jo.trace = options.trace;
    jo.stop_at_coalescence = true;
    const auto fw = joint_trace(field, forward, left, right, q, jo);
    if (!fw.n0)
        throw Error(ErrorCode::WindowExhausted, "forward anchors did not coalesce inside the window");
    const auto an = joint_trace(field, anti, left, right, q, jo);
    if (!an.n0)
        throw Error(ErrorCode::WindowExhausted, "anti anchors did not coalesce inside the window");

    r.n0 = *fw.n0;
    r.n0_anti = *an.n0;
    r.left_path.assign(fw.path_x.begin(), fw.path_x.begin() + r.n0 + 1);
    r.right_path.assign(fw.path_y.begin(), fw.path_y.begin() + r.n0 + 1);
    r.left_anti.assign(an.path_x.begin(), an.path_x.begin() + r.n0_anti + 1);
    r.right_anti.assign(an.path_y.begin(), an.path_y.begin() + r.n0_anti + 1);

    r.mask.assign(w.area(), 0);
    rasterize(w, r.left_path, r.right_path, r.mask, r.size);
    rasterize(w, r.left_anti, r.right_anti, r.mask, r.size);
    return r;
}

SandwichResult sandwich_geodesic(const PassageField& field, const LevelTable& forward, const LevelTable& anti,
                                 Site origin, double q, const SandwichOptions& options) {
    const auto st = perc_status(forward, origin, options.trace.escape_margin);
    if (st.kind == PercStatus::Kind::Censored)
        throw Error(ErrorCode::WindowExhausted, "origin lies in the censored margin");

    GeodesicOracle oracle(field);
    SandwichResult out;
    if (st.kind == PercStatus::Kind::Escapes) {
        out.bypass = true;
        out.splice = origin;
        out.continuation = continuation_path(field, forward, origin, q, options);
        out.path.sites = out.continuation.steps;
        out.path.total_time = path_time(field, out.path.sites);
        out.checks = verify_subpaths(oracle, out.path.sites, options.subpath_checks, options.subpath_span,
                                     options.check_seed);
        return out;
    }

    auto region = build_sandwich(field, forward, anti, origin, q, options);
    out.splice = region.right_path.back();
    const auto restricted = oracle.constrained_geodesic(origin, out.splice, region.mask);
    out.restricted_time = restricted.total_time;
    out.unrestricted_time = oracle.passage_time(origin, out.splice);
    out.continuation = continuation_path(field, forward, out.splice, q, options);

    out.path.sites = restricted.sites;
    out.splice_index = out.path.sites.size() - 1;
    out.path.sites.insert(out.path.sites.end(), out.continuation.steps.begin() + 1, out.continuation.steps.end());
    out.path.total_time = path_time(field, out.path.sites);
    out.region = std::move(region);

    const std::pair<std::size_t, std::size_t> required[] = {
        {0, out.splice_index}, {0, out.splice_index + options.subpath_span / 2}};
    out.checks = verify_subpaths(oracle, out.path.sites, options.subpath_checks, options.subpath_span,
                                 options.check_seed, required);
    return out;
}

BiGeodesicResult bi_infinite_geodesic(const PassageField& field, const LevelTable& forward,
                                      const LevelTable& anti, Site site, double q,
                                      const SandwichOptions& options) {
    if (!is_bidirectional(forward, anti, site, options.trace.escape_margin))
        throw Error(ErrorCode::NotBidirectional, "site is not an uncensored bi-directional point");
    BiGeodesicResult out;
    out.forward = continuation_path(field, forward, site, q, options);
    out.anti = continuation_path(field, anti, site, q, options);
    out.path.sites.assign(out.anti.steps.rbegin(), out.anti.steps.rend());
    out.center_index = out.path.sites.size() - 1;
    out.path.sites.insert(out.path.sites.end(), out.forward.steps.begin() + 1, out.forward.steps.end());
    out.path.total_time = path_time(field, out.path.sites);

    GeodesicOracle oracle(field);
    const auto c = out.center_index;
    const auto half = options.subpath_span / 2;
    const std::pair<std::size_t, std::size_t> required[] = {
        {c == 0 ? 0 : c - 1, c + 1}, {c > half ? c - half : 0, c + half}};
    out.checks = verify_subpaths(oracle, out.path.sites, options.subpath_checks, options.subpath_span,
                                 options.check_seed, required);
    return out;
}

nlohmann::json to_json(const GeodesicPath& path) {
    nlohmann::json sites = nlohmann::json::array();
    for (auto s : path.sites)
        sites.push_back({s.x, s.t});
    return {{"total_time", path.total_time}, {"sites", std::move(sites)}};
}

void write_svg(std::ostream& os, const PassageField& field, const Window& view, std::span<const SvgLayer> layers,
               double scale) {
    const auto& w = field.window();
    const auto px = [&](std::int32_t x) { return (x - view.x_min) * scale + scale; };
    const auto py = [&](std::int32_t t) { return (view.t_max - t) * scale + scale; };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (view.width() + 1) * scale << "\" height=\""
       << (view.height() + 1) * scale << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g stroke=\"#cccccc\" stroke-width=\""
       << scale / 8 << "\">\n";
    for (auto t = view.t_min; t <= view.t_max; ++t)
        for (auto x = view.x_min; x <= view.x_max; ++x) {
            const Site s{x, t};
            if (!w.contains(s))
                continue;
            const auto i = w.index(s);
            if (x < view.x_max && x < w.x_max && field.open(i, Step::Right))
                os << "<line x1=\"" << px(x) << "\" y1=\"" << py(t) << "\" x2=\"" << px(x + 1) << "\" y2=\""
                   << py(t) << "\"/>\n";
            if (t < view.t_max && t < w.t_max && field.open(i, Step::Up))
                os << "<line x1=\"" << px(x) << "\" y1=\"" << py(t) << "\" x2=\"" << px(x) << "\" y2=\""
                   << py(t + 1) << "\"/>\n";
        }
    os << "</g>\n";
    for (const auto& layer : layers) {
        os << "<polyline fill=\"none\" stroke=\"" << layer.color << "\" stroke-width=\"" << layer.width * scale / 4
           << "\" points=\"";
        for (auto s : layer.sites)
            if (view.contains(s))
                os << px(s.x) << ',' << py(s.t) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace fppgeo
