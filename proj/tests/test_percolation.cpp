#include "doctest.h"
#include "helpers.hpp"

#include "fppgeo/brute.hpp"
#include "fppgeo/error.hpp"
#include "fppgeo/percolation.hpp"

#include <sstream>

using namespace fppgeo;
using testutil::pattern_field;
using testutil::random_field;

namespace {

constexpr auto inf = LevelTable::escapes;

// Walks every open oriented path explicitly; no memoization.
std::int32_t walk(const PassageField& f, Site s, Orientation o, std::int32_t len, bool& touched) {
    const auto& w = f.window();
    const bool far = o == Orientation::Forward ? (s.x == w.x_max || s.t == w.t_max)
                                               : (s.x == w.x_min || s.t == w.t_min);
    if (far) touched = true;
    std::int32_t best = len;
    for (bool first : {true, false}) {
        Site y = first ? first_neighbor(s, o) : second_neighbor(s, o);
        if (w.contains(y) && oriented_open(f, s, o, first))
            best = std::max(best, walk(f, y, o, len + 1, touched));
    }
    return best;
}

std::vector<std::int32_t> walk_table(const PassageField& f, Orientation o) {
    const auto& w = f.window();
    std::vector<std::int32_t> out(w.area());
    for (std::size_t i = 0; i < w.area(); ++i) {
        bool touched = false;
        auto l = walk(f, w.site_at(i), o, 0, touched);
        out[i] = touched ? inf : l;
    }
    return out;
}

std::vector<std::int32_t> values(const LevelTable& t) { return {t.values().begin(), t.values().end()}; }

} // namespace

TEST_SUITE("percolation") {

TEST_CASE("level tables match path enumeration on every 3x3 pattern") {
    auto w = Window::square(3);
    for (std::uint64_t bits = 0; bits < (1u << 12); ++bits) {
        auto f = pattern_field(w, bits);
        for (auto o : {Orientation::Forward, Orientation::Anti}) {
            auto dp = values(level_table(f, o));
            REQUIRE(dp == walk_table(f, o));
            REQUIRE(dp == enumerate_level_table(f, o));
        }
    }
}

TEST_CASE("level tables match path enumeration on sampled 5x4 patterns") {
    auto w = Window::make(0, 4, 0, 3);
    for (std::uint64_t r = 0; r < 2000; ++r) {
        auto f = pattern_field(w, rng::mix64(r + 99));
        for (auto o : {Orientation::Forward, Orientation::Anti}) {
            auto dp = values(level_table(f, o));
            REQUIRE(dp == walk_table(f, o));
            REQUIRE(dp == enumerate_level_table(f, o));
        }
    }
}

TEST_CASE("p = 1 escapes everywhere") {
    auto f = random_field(Window::square(30), 1.0, 1);
    for (auto v : level_table(f, Orientation::Forward).values()) CHECK(v == inf);
    for (auto v : level_table(f, Orientation::Anti).values()) CHECK(v == inf);
}

TEST_CASE("anti table is the forward table of the point-reflected field") {
    auto w = Window::make(0, 59, 0, 44);
    auto f = random_field(w, 0.62, 31);
    const auto W = w.width(), H = w.height();
    std::vector<double> right(w.area(), 2.0), up(w.area(), 2.0), u(w.area(), 0.5);
    for (std::size_t i = 0; i < w.area(); ++i) {
        auto s = w.site_at(i);
        if (s.x <= W - 2)
            right[i] = f.weight(w.index({W - 2 - s.x, H - 1 - s.t}), Step::Right);
        if (s.t <= H - 2)
            up[i] = f.weight(w.index({W - 1 - s.x, H - 2 - s.t}), Step::Up);
    }
    auto g = PassageField::from_arrays(w, 0.62, right, up, u);
    auto anti = level_table(f, Orientation::Anti);
    auto fwd = level_table(g, Orientation::Forward);
    for (std::size_t i = 0; i < w.area(); ++i) {
        auto s = w.site_at(i);
        REQUIRE(anti[i] == fwd.at({W - 1 - s.x, H - 1 - s.t}));
    }
}

TEST_CASE("truncated lengths and maximizer sets") {
    auto w = Window::make(0, 5, 0, 4);
    for (std::uint64_t r = 0; r < 300; ++r) {
        auto f = pattern_field(w, rng::mix64(r * 3 + 1));
        for (auto o : {Orientation::Forward, Orientation::Anti}) {
            auto table = level_table(f, o);
            auto ref = walk_table(f, o);
            auto trunc = [&](Site s, std::int64_t k) -> std::int64_t {
                auto l = ref[w.index(s)];
                return l == inf ? k : std::min<std::int64_t>(l, k);
            };
            for (std::size_t i = 0; i < w.area(); ++i) {
                auto s = w.site_at(i);
                for (std::int64_t k = 1; k <= 6; ++k) {
                    CHECK(truncated_length(table, s, k) == trunc(s, k));
                    auto m = maximizer_set(f, table, s, k);
                    for (bool first : {true, false}) {
                        Site y = first ? first_neighbor(s, o) : second_neighbor(s, o);
                        bool expect = w.contains(y) && oriented_open(f, s, o, first) &&
                                      trunc(y, k - 1) + 1 == trunc(s, k);
                        CHECK((first ? m.has_first : m.has_second) == expect);
                    }
                }
            }
        }
    }
    auto f = pattern_field(w, 0);
    CHECK_THROWS_AS(maximizer_set(f, level_table(f, Orientation::Forward), {0, 0}, 0), Error);
}

TEST_CASE("perc_status censors near the far boundary") {
    auto f = random_field(Window::square(100), 0.7, 4);
    auto fwd = level_table(f, Orientation::Forward);
    auto anti = level_table(f, Orientation::Anti);
    CHECK(perc_status(fwd, {80, 10}, 21).kind == PercStatus::Kind::Censored);
    CHECK(perc_status(fwd, {78, 10}, 21).kind != PercStatus::Kind::Censored);
    CHECK(perc_status(anti, {80, 10}, 11).kind == PercStatus::Kind::Censored);
    CHECK(perc_status(anti, {80, 11}, 11).kind != PercStatus::Kind::Censored);
    CHECK(perc_status(fwd, {500, 0}, 1).kind == PercStatus::Kind::Censored);
    CHECK_THROWS_AS(perc_status(fwd, {5, 5}, 0), Error);
}

TEST_CASE("finite status survives window enlargement") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto small = random_field(Window::make(0, 149, 0, 149), 0.6, seed);
        auto big = random_field(Window::make(-100, 399, -100, 399), 0.6, seed);
        auto ts = level_table(small, Orientation::Forward);
        auto tb = level_table(big, Orientation::Forward);
        std::size_t finite = 0;
        for (std::int32_t t = 0; t < 150; ++t)
            for (std::int32_t x = 0; x < 150; ++x) {
                auto a = perc_status(ts, {x, t}, 32);
                if (a.kind != PercStatus::Kind::Finite) continue;
                ++finite;
                REQUIRE(perc_status(tb, {x, t}, 32) == a);
            }
        CHECK(finite > 0);
    }
}

TEST_CASE("bi-directional scans agree with the pointwise predicate") {
    auto f = random_field(Window::square(160), 0.7, 12);
    auto fwd = level_table(f, Orientation::Forward);
    auto anti = level_table(f, Orientation::Anti);
    const std::int32_t m = 40;
    auto list = bidirectional_scan(fwd, anti, m);
    auto counts = count_bidirectional(fwd, anti, m);
    std::size_t direct = 0, interior = 0, fcount = 0, acount = 0;
    const auto& w = f.window();
    for (std::size_t i = 0; i < w.area(); ++i) {
        auto s = w.site_at(i);
        auto a = perc_status(fwd, s, m), b = perc_status(anti, s, m);
        if (a.kind == PercStatus::Kind::Censored || b.kind == PercStatus::Kind::Censored) continue;
        ++interior;
        fcount += a.kind == PercStatus::Kind::Escapes;
        acount += b.kind == PercStatus::Kind::Escapes;
        direct += is_bidirectional(fwd, anti, s, m);
    }
    CHECK(list.size() == direct);
    CHECK(counts.bidirectional == direct);
    CHECK(counts.interior == interior);
    CHECK(counts.forward == fcount);
    CHECK(counts.anti == acount);
    CHECK(direct > 0);
    for (auto s : list) CHECK(is_bidirectional(fwd, anti, s, m));
}

TEST_CASE("nearest bi-directional points on the anti-diagonal") {
    auto f = random_field(Window::square(400), 0.7, 3);
    auto fwd = level_table(f, Orientation::Forward);
    auto anti = level_table(f, Orientation::Anti);
    const std::int32_t m = 64;
    std::size_t tested = 0;
    for (std::int32_t i = 150; i < 250; i += 7) {
        Site o{i, 400 - i};
        auto n = nearest_bidirectional_on_antidiagonal(fwd, anti, o, m);
        CHECK(n.j_r > 0);
        CHECK(n.j_l < 0);
        CHECK(is_bidirectional(fwd, anti, o + Site{n.j_r, -n.j_r}, m));
        CHECK(is_bidirectional(fwd, anti, o + Site{n.j_l, -n.j_l}, m));
        for (std::int32_t j = n.j_l + 1; j < n.j_r; ++j)
            if (j != 0) CHECK_FALSE(is_bidirectional(fwd, anti, o + Site{j, -j}, m));
        ++tested;
    }
    CHECK(tested > 0);

    // no bi-directional site at all: the scan runs into the censored region
    auto g = pattern_field(Window::square(5), 0);
    auto gf = level_table(g, Orientation::Forward);
    auto ga = level_table(g, Orientation::Anti);
    CHECK_THROWS_AS(nearest_bidirectional_on_antidiagonal(gf, ga, {2, 2}, 1), Error);
}

TEST_CASE("level table dump") {
    auto f = pattern_field(Window::square(3), 0xFFF);
    std::ostringstream os;
    write_level_tables(os, level_table(f, Orientation::Forward), level_table(f, Orientation::Anti));
    auto text = os.str();
    CHECK(text.find("inf") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

}
