#include "doctest.h"
#include "helpers.hpp"

#include "fppgeo/brute.hpp"
#include "fppgeo/error.hpp"
#include "fppgeo/geodesic.hpp"

#include <random>
#include <sstream>

using namespace fppgeo;
using testutil::random_field;

namespace {

std::vector<std::vector<double>> floyd_warshall(const PassageField& f) {
    const auto& w = f.window();
    const auto n = w.area();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
        auto s = w.site_at(i);
        for (Site nb : {s + Site{1, 0}, s + Site{0, 1}, s - Site{1, 0}, s - Site{0, 1}})
            if (w.contains(nb)) d[i][w.index(nb)] = f.edge_between(s, nb);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

ExcessDistribution excess_for(int r) {
    switch (r % 3) {
    case 0: return ExcessDistribution::atom(2.0);
    case 1: return ExcessDistribution::shifted_exponential(1.0);
    default: return ExcessDistribution::shifted_uniform(1.2, 3.0);
    }
}

std::optional<Site> escaping_site(const LevelTable& t, Site from, std::int32_t margin) {
    for (std::int32_t i = 0; i < 200; ++i)
        if (perc_status(t, from + Site{i, i}, margin).kind == PercStatus::Kind::Escapes) return from + Site{i, i};
    return std::nullopt;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); }

} // namespace

TEST_SUITE("geodesic") {

TEST_CASE("trivial queries") {
    auto f = random_field(Window::square(10), 0.5, 1, ExcessDistribution::shifted_exponential(1.0));
    GeodesicOracle o(f);
    CHECK(o.passage_time({3, 3}, {3, 3}) == 0.0);
    auto g = o.geodesic({3, 3}, {3, 3});
    CHECK(g.sites.size() == 1);
    CHECK(o.passage_time({3, 3}, {4, 3}) <= f.edge_between({3, 3}, {4, 3}));
    CHECK_THROWS_AS(o.passage_time({3, 3}, {30, 3}), Error);
    CHECK_THROWS_AS(o.passage_time({-1, 3}, {3, 3}), Error);
}

TEST_CASE("oracle matches enumeration and Floyd-Warshall on small windows") {
    for (int r = 0; r < 90; ++r) {
        auto w = r % 2 ? Window::square(5) : Window::square(4);
        const double p = r % 4 == 0 ? 0.3 : (r % 4 == 1 ? 0.7 : (r % 4 == 2 ? 1.0 : 0.5));
        auto f = random_field(w, p, 1000 + r, excess_for(r));
        auto fw = floyd_warshall(f);
        GeodesicOracle o(f);
        std::vector<Site> all;
        for (std::size_t i = 0; i < w.area(); ++i) all.push_back(w.site_at(i));
        for (std::size_t s = 0; s < w.area(); ++s) {
            auto enumerated = enumerate_passage_times(f, w.site_at(s));
            auto many = o.passage_times(w.site_at(s), all);
            for (std::size_t t = 0; t < w.area(); ++t) {
                REQUIRE(close(many[t], fw[s][t]));
                REQUIRE(close(enumerated[t], fw[s][t]));
                REQUIRE(close(o.passage_time(w.site_at(s), w.site_at(t)), fw[s][t]));
            }
        }
    }
}

TEST_CASE("single-target search equals the full Dijkstra") {
    std::mt19937_64 gen(4);
    for (int r = 0; r < 6; ++r) {
        auto w = Window::make(0, 79, 0, 59);
        auto f = random_field(w, 0.6, 50 + r, excess_for(r));
        GeodesicOracle o(f);
        std::uniform_int_distribution<std::size_t> pick(0, w.area() - 1);
        for (int k = 0; k < 40; ++k) {
            auto a = w.site_at(pick(gen)), b = w.site_at(pick(gen));
            Site targets[] = {b, a, w.site_at(0)};
            auto many = o.passage_times(a, targets);
            auto one = o.passage_time(a, b);
            CHECK(one == many[0]);
            CHECK(many[1] == 0.0);
            auto g = o.geodesic(a, b);
            CHECK(g.sites.front() == a);
            CHECK(g.sites.back() == b);
            CHECK(close(g.total_time, one));
            CHECK(close(path_time(f, g.sites), one));
            CHECK(one >= double(l1_distance(a, b)));
            for (std::size_t i = 1; i < g.sites.size(); ++i) CHECK(l1_distance(g.sites[i - 1], g.sites[i]) == 1);
        }
    }
}

TEST_CASE("ties break deterministically") {
    auto f = random_field(Window::square(6), 1.0, 1);
    auto g = geodesic(f, {0, 0}, {3, 2});
    std::vector<Site> expect{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {3, 2}};
    CHECK(g.sites == expect);
    CHECK(g.total_time == 5.0);
}

TEST_CASE("enlarging the window far from the pair changes nothing") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto small = random_field(Window::make(0, 99, 0, 99), 0.6, seed);
        auto big = random_field(Window::make(-150, 249, -150, 249), 0.6, seed);
        GeodesicOracle os(small), ob(big);
        std::mt19937_64 gen(seed);
        std::uniform_int_distribution<std::int32_t> c(35, 64);
        for (int k = 0; k < 30; ++k) {
            Site a{c(gen), c(gen)}, b{c(gen), c(gen)};
            // leaving the small window costs >= 70 > 2 * separation
            if (l1_distance(a, b) > 30) continue;
            CHECK(os.passage_time(a, b) == ob.passage_time(a, b));
        }
        Site a{2, 2}, b{97, 97};
        CHECK(os.passage_time(a, b) >= ob.passage_time(a, b));
    }
}

TEST_CASE("q-path prefixes are geodesics") {
    auto f = random_field(Window::square(500), 0.7, 6);
    auto t = level_table(f, Orientation::Forward);
    auto o = escaping_site(t, {30, 30}, 64);
    REQUIRE(o);
    GeodesicOracle oracle(f);
    for (double q : {0.0, 0.5, 1.0}) {
        auto tr = stabilized_path(f, t, *o, q, {64, 300});
        for (std::size_t len : {1u, 10u, 100u, 300u}) {
            std::span<const Site> pre(tr.steps.data(), len + 1);
            CHECK(verify_oriented_geodesic(oracle, pre));
            CHECK(path_time(f, pre) == double(len));
        }
    }
}

TEST_CASE("oriented verification rejects bad paths") {
    auto w = Window::square(3);
    std::vector<double> ones(w.area(), 1.0), u(w.area(), 0.5);
    auto right = ones;
    right[w.index({0, 0})] = 2.0;
    auto f = PassageField::from_arrays(w, 0.5, right, ones, u);
    const Site closed[] = {{0, 0}, {1, 0}};
    const Site down[] = {{0, 1}, {0, 0}};
    const Site ok[] = {{0, 0}, {0, 1}, {1, 1}};
    CHECK_THROWS_AS(verify_oriented_geodesic(f, closed), Error);
    CHECK_THROWS_AS(verify_oriented_geodesic(f, down), Error);
    CHECK_THROWS_AS(verify_oriented_geodesic(f, std::span<const Site>{}), Error);
    CHECK(verify_oriented_geodesic(f, ok));
}

TEST_CASE("constrained search") {
    auto f = random_field(Window::square(40), 0.6, 7, ExcessDistribution::shifted_exponential(1.0));
    const auto& w = f.window();
    std::vector<std::uint8_t> all(w.area(), 1);
    GeodesicOracle o(f);
    auto a = o.constrained_geodesic({2, 3}, {30, 35}, all);
    CHECK(close(a.total_time, o.passage_time({2, 3}, {30, 35})));

    // an L-shaped corridor forces the unique corridor path
    std::vector<std::uint8_t> corridor(w.area(), 0);
    for (std::int32_t x = 2; x <= 30; ++x) corridor[w.index({x, 3})] = 1;
    for (std::int32_t t = 3; t <= 35; ++t) corridor[w.index({30, t})] = 1;
    auto c = o.constrained_geodesic({2, 3}, {30, 35}, corridor);
    CHECK(c.sites.size() == 28 + 32 + 1);
    CHECK(c.total_time >= a.total_time);
    for (auto s : c.sites) CHECK(corridor[w.index(s)] == 1);

    corridor[w.index({15, 3})] = 0;
    CHECK_THROWS_AS(o.constrained_geodesic({2, 3}, {30, 35}, corridor), Error);
    CHECK_THROWS_AS(o.constrained_geodesic({2, 4}, {30, 35}, corridor), Error);
    std::vector<std::uint8_t> short_mask(10, 1);
    CHECK_THROWS_AS(o.constrained_geodesic({2, 3}, {30, 35}, short_mask), Error);
}

TEST_CASE("subpath verification") {
    auto f = random_field(Window::square(400), 0.7, 8);
    auto t = level_table(f, Orientation::Forward);
    auto o = escaping_site(t, {30, 30}, 64);
    REQUIRE(o);
    auto tr = stabilized_path(f, t, *o, 0.5, {64, 250});
    GeodesicOracle oracle(f);
    const std::pair<std::size_t, std::size_t> req[] = {{0, 100}, {5, 1000}};
    auto rep = verify_subpaths(oracle, tr.steps, 10, 120, 3, req);
    CHECK(rep.checked == 12);
    CHECK(rep.failures == 0);

    // a detour through a closed edge is not a geodesic
    std::vector<Site> bad{{100, 100}, {100, 101}, {101, 101}, {101, 100}, {102, 100}};
    auto r2 = verify_subpaths(oracle, bad, 0, 10, 1, std::span<const std::pair<std::size_t, std::size_t>>(req, 1));
    CHECK(r2.failures == 1);
}

TEST_CASE("sandwich geodesic equals the unrestricted geodesic") {
    auto w = Window::square(1000);
    std::size_t built = 0, bypassed = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        auto f = random_field(w, 0.7, 900 + seed);
        auto fwd = level_table(f, Orientation::Forward);
        auto anti = level_table(f, Orientation::Anti);
        SandwichOptions opts;
        opts.trace = {64, 2500};
        opts.continuation_steps = 120;
        opts.subpath_span = 120;
        for (std::int32_t k = 0; k < 6; ++k) {
            Site origin{400 + 11 * k, 560 - 9 * k};
            SandwichResult r;
            try {
                r = sandwich_geodesic(f, fwd, anti, origin, 0.5, opts);
            } catch (const Error& e) {
                REQUIRE(e.code() == ErrorCode::WindowExhausted);
                continue;
            }
            CHECK(r.checks.failures == 0);
            CHECK(r.path.sites.front() == origin);
            if (r.bypass) {
                ++bypassed;
                CHECK(perc_status(fwd, origin, 64).kind == PercStatus::Kind::Escapes);
                CHECK(r.path.sites == r.continuation.steps);
                continue;
            }
            ++built;
            REQUIRE(r.region);
            const auto& reg = *r.region;
            CHECK(reg.j_r > 0);
            CHECK(reg.j_l < 0);
            CHECK(reg.contains(w, origin));
            CHECK(reg.right_path.back() == reg.left_path.back());
            CHECK(reg.right_anti.back() == reg.left_anti.back());
            for (auto s : reg.right_path) CHECK(reg.contains(w, s));
            for (auto s : reg.left_anti) CHECK(reg.contains(w, s));
            CHECK(reg.sites(w).size() == reg.size);
            CHECK(r.splice == reg.right_path.back());
            CHECK(r.path.sites[r.splice_index] == r.splice);
            CHECK(close(r.restricted_time, r.unrestricted_time));
            for (std::size_t i = 0; i <= r.splice_index; ++i) CHECK(reg.contains(w, r.path.sites[i]));
            GeodesicOracle oracle(f);
            CHECK(close(path_time(f, std::span<const Site>(r.path.sites.data(), r.splice_index + 1)),
                        oracle.passage_time(origin, r.splice)));
        }
    }
    CHECK(built >= 5);
    CHECK(bypassed >= 1);
}

TEST_CASE("percolating field takes the bypass") {
    auto f = random_field(Window::square(300), 1.0, 3);
    auto fwd = level_table(f, Orientation::Forward);
    auto anti = level_table(f, Orientation::Anti);
    SandwichOptions opts;
    opts.continuation_steps = 50;
    auto r = sandwich_geodesic(f, fwd, anti, {100, 100}, 1.0, opts);
    CHECK(r.bypass);
    CHECK_FALSE(r.region);
    CHECK(r.path.sites.back() == Site{150, 100});
    CHECK_THROWS_AS(sandwich_geodesic(f, fwd, anti, {290, 290}, 1.0, opts), Error);
}

TEST_CASE("bi-infinite geodesic through a bi-directional site") {
    auto f = random_field(Window::square(300), 1.0, 3);
    auto fwd = level_table(f, Orientation::Forward);
    auto anti = level_table(f, Orientation::Anti);
    SandwichOptions opts;
    opts.continuation_steps = 40;
    auto r = bi_infinite_geodesic(f, fwd, anti, {150, 150}, 1.0, opts);
    REQUIRE(r.path.sites.size() == 81);
    CHECK(r.center_index == 40);
    for (std::size_t i = 0; i < r.path.sites.size(); ++i)
        CHECK(r.path.sites[i] == Site{110 + std::int32_t(i), 150});
    CHECK(r.checks.failures == 0);
    CHECK(r.path.total_time == 80.0);

    auto g = random_field(Window::square(600), 0.7, 12);
    auto gf = level_table(g, Orientation::Forward);
    auto ga = level_table(g, Orientation::Anti);
    auto sites = bidirectional_scan(gf, ga, 200);
    REQUIRE(sites.size() > 10);
    opts.continuation_steps = 150;
    opts.subpath_span = 200;
    GeodesicOracle oracle(g);
    for (std::size_t k = 0; k < 10; ++k) {
        auto b = bi_infinite_geodesic(g, gf, ga, sites[k * 7], 0.5, opts);
        CHECK(b.path.sites[b.center_index] == sites[k * 7]);
        CHECK(b.checks.failures == 0);
        CHECK(verify_oriented_geodesic(oracle, b.path.sites));
    }
    std::optional<Site> finite;
    for (std::int32_t x = 200; x < 400 && !finite; ++x)
        if (!is_bidirectional(gf, ga, {x, 300}, 200)) finite = Site{x, 300};
    REQUIRE(finite);
    CHECK_THROWS_AS(bi_infinite_geodesic(g, gf, ga, *finite, 0.5, opts), Error);
}

TEST_CASE("json and svg output") {
    GeodesicPath p{{{0, 0}, {1, 0}}, 1.0};
    auto j = to_json(p);
    CHECK(j["total_time"] == 1.0);
    CHECK(j["sites"].size() == 2);
    CHECK(j["sites"][1][0] == 1);
    auto f = random_field(Window::square(20), 0.7, 1);
    std::ostringstream os;
    SvgLayer layer{p.sites, "red", 1.0};
    write_svg(os, f, f.window(), std::span<const SvgLayer>(&layer, 1));
    CHECK(os.str().rfind("<svg", 0) == 0);
    CHECK(os.str().find("red") != std::string::npos);
    CHECK(os.str().find("</svg>") != std::string::npos);
}

}
