#include "doctest.h"
#include "helpers.hpp"

#include "fppgeo/error.hpp"
#include "fppgeo/qpath.hpp"

#include <optional>
#include <sstream>

using namespace fppgeo;
using testutil::random_field;

namespace {

std::optional<Site> escaping_site(const LevelTable& t, Site from, std::int32_t margin) {
    for (std::int32_t i = 0; i < 200; ++i) {
        Site s = from + Site{i, i};
        if (perc_status(t, s, margin).kind == PercStatus::Kind::Escapes) return s;
    }
    return std::nullopt;
}

// Transposed field (x <-> t) with uniforms mirrored to 1 - U.
PassageField transpose(const PassageField& f) {
    const auto& w = f.window();
    std::vector<double> right(w.area()), up(w.area()), u(w.area());
    for (std::size_t i = 0; i < w.area(); ++i) {
        auto s = w.site_at(i);
        auto j = w.index({s.t, s.x});
        right[i] = f.weight(j, Step::Up);
        up[i] = f.weight(j, Step::Right);
        u[i] = 1.0 - f.uniforms()[j];
    }
    return PassageField::from_arrays(w, f.p(), right, up, u);
}

} // namespace

TEST_SUITE("qpath") {

TEST_CASE("q-rule on a hand-built tie") {
    // 3x3, everything open: from (0,0) both neighbours maximize.
    auto w = Window::square(3);
    std::vector<double> ones(w.area(), 1.0), u(w.area(), 0.4);
    auto f = PassageField::from_arrays(w, 1.0, ones, ones, u);
    auto t = level_table(f, Orientation::Forward);
    CHECK(select_step(f, t, {0, 0}, 2, 0.4) == Site{1, 0});
    CHECK(select_step(f, t, {0, 0}, 2, 0.39) == Site{0, 1});

    // close the up edge: only the first neighbour remains, whatever q is
    auto up = ones;
    up[w.index({0, 0})] = 2.0;
    auto g = PassageField::from_arrays(w, 1.0, ones, up, u);
    auto tg = level_table(g, Orientation::Forward);
    CHECK(select_step(g, tg, {0, 0}, 2, 0.0) == Site{1, 0});

    std::vector<double> closed(w.area(), 2.0);
    auto h = PassageField::from_arrays(w, 0.5, closed, closed, u);
    CHECK_THROWS_AS(select_step(h, level_table(h, Orientation::Forward), {0, 0}, 1, 0.5), Error);
}

TEST_CASE("gamma_k is an open oriented path of maximizers") {
    auto f = random_field(Window::square(300), 0.7, 2);
    auto t = level_table(f, Orientation::Forward);
    auto o = escaping_site(t, {10, 10}, 64);
    REQUIRE(o);
    for (double q : {0.0, 0.3, 0.5, 1.0}) {
        const std::int64_t k = 150;
        auto path = build_gamma_k(f, t, *o, q, k);
        REQUIRE(path.size() == std::size_t(k + 1));
        for (std::int64_t j = 0; j < k; ++j) {
            auto d = path[j + 1] - path[j];
            bool right = d == Site{1, 0};
            REQUIRE((right || d == Site{0, 1}));
            CHECK(is_open(f, path[j], right ? Step::Right : Step::Up));
            CHECK(maximizer_set(f, t, path[j], k - j).contains(path[j + 1]));
        }
    }
    CHECK_THROWS_AS(build_gamma_k(f, t, *o, 0.5, 0), Error);
}

TEST_CASE("gamma_k error cases") {
    auto w = Window::square(3);
    std::vector<double> ones(w.area(), 1.0), closed(w.area(), 2.0), u(w.area(), 0.5);
    auto f = PassageField::from_arrays(w, 1.0, ones, ones, u);
    auto t = level_table(f, Orientation::Forward);
    CHECK(build_gamma_k(f, t, {0, 0}, 1.0, 4).back() == Site{2, 2});
    CHECK_THROWS_WITH_AS(build_gamma_k(f, t, {0, 0}, 1.0, 5), doctest::Contains("boundary"), Error);
    auto g = PassageField::from_arrays(w, 0.5, closed, closed, u);
    CHECK_THROWS_WITH_AS(build_gamma_k(g, level_table(g, Orientation::Forward), {0, 0}, 0.5, 1),
                         doctest::Contains("length"), Error);
}

TEST_CASE("p = 1 extreme q give axis paths") {
    auto f = random_field(Window::square(200), 1.0, 5);
    auto t = level_table(f, Orientation::Forward);
    auto right = stabilized_path(f, t, {3, 3}, 1.0, {20, 100});
    auto up = stabilized_path(f, t, {3, 3}, 0.0, {20, 100});
    REQUIRE(right.steps.size() == 101);
    for (std::size_t n = 0; n < right.steps.size(); ++n) {
        CHECK(right.steps[n] == Site{3 + std::int32_t(n), 3});
        CHECK(up.steps[n] == Site{3, 3 + std::int32_t(n)});
    }
    CHECK(right.regenerations.size() == 100);
}

TEST_CASE("frozen prefixes do not change when gamma_k is extended") {
    auto w = Window::square(700);
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto f = random_field(w, 0.7, seed);
        auto t = level_table(f, Orientation::Forward);
        auto o = escaping_site(t, {40, 40}, 64);
        REQUIRE(o);
        double q = 0.1 + 0.07 * double(seed);
        QPathBuilder b(f, t, *o, q, {64, -1});
        while (b.trace().stabilized_upto < 80 && b.advance()) {
        }
        REQUIRE_FALSE(b.trace().censored);
        const auto frozen = b.trace().steps;
        const auto upto = b.trace().stabilized_upto;
        for (std::int64_t d = 1; d <= 60; ++d) {
            auto g = build_gamma_k(f, t, *o, q, upto + d);
            REQUIRE(std::equal(frozen.begin(), frozen.end(), g.begin()));
        }
        while (b.trace().stabilized_upto < upto + 200 && b.advance()) {
        }
        CHECK(std::equal(frozen.begin(), frozen.end(), b.trace().steps.begin()));
    }
}

TEST_CASE("regeneration bookkeeping") {
    auto f = random_field(Window::square(900), 0.7, 77);
    auto t = level_table(f, Orientation::Forward);
    auto o = escaping_site(t, {64, 64}, 64);
    REQUIRE(o);
    auto tr = stabilized_path(f, t, *o, 0.5, {64, 500});
    CHECK_FALSE(tr.censored);
    CHECK(tr.stabilized_upto >= 500);
    CHECK(tr.steps.size() == std::size_t(tr.stabilized_upto + 1));
    CHECK(tr.regenerations.back().time == tr.stabilized_upto);
    Site total{};
    std::int64_t prev = 0;
    for (auto& r : tr.regenerations) {
        CHECK(r.time > prev);
        CHECK(l1_norm(r.increment) == r.time - prev);
        CHECK(t.at(tr.steps[r.time]) == LevelTable::escapes);
        total = total + r.increment;
        prev = r.time;
    }
    CHECK(total == tr.steps.back() - tr.origin);
    // every stabilized step is a forward step on an open edge
    for (std::size_t n = 0; n + 1 < tr.steps.size(); ++n) {
        auto d = tr.steps[n + 1] - tr.steps[n];
        CHECK(is_open(f, tr.steps[n], d == Site{1, 0} ? Step::Right : Step::Up));
    }
}

TEST_CASE("paths are ordered in q") {
    auto w = Window::square(900);
    const double qs[] = {0.0, 0.2, 0.5, 0.51, 0.8, 1.0};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto f = random_field(w, 0.7, seed * 13);
        auto t = level_table(f, Orientation::Forward);
        auto o = escaping_site(t, {64, 64}, 64);
        REQUIRE(o);
        std::vector<QPathTrace> traces;
        for (double q : qs) traces.push_back(stabilized_path(f, t, *o, q, {64, 400}));
        std::size_t common = traces[0].steps.size();
        for (auto& tr : traces) common = std::min(common, tr.steps.size());
        for (std::size_t i = 0; i + 1 < traces.size(); ++i)
            for (std::size_t n = 0; n < common; ++n)
                REQUIRE(traces[i].steps[n].x <= traces[i + 1].steps[n].x);
    }
}

TEST_CASE("transposing the field mirrors q") {
    auto w = Window::square(500);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto f = random_field(w, 0.7, seed + 100);
        auto g = transpose(f);
        auto tf = level_table(f, Orientation::Forward);
        auto tg = level_table(g, Orientation::Forward);
        auto o = escaping_site(tf, {40, 40}, 64);
        REQUIRE(o);
        const double q = 0.3;
        auto a = stabilized_path(f, tf, *o, q, {64, 300});
        auto b = stabilized_path(g, tg, {o->t, o->x}, 1.0 - q, {64, 300});
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t n = 0; n < a.steps.size(); ++n)
            REQUIRE(b.steps[n] == Site{a.steps[n].t, a.steps[n].x});
        REQUIRE(a.regenerations.size() == b.regenerations.size());
        for (std::size_t j = 0; j < a.regenerations.size(); ++j)
            CHECK(a.regenerations[j].time == b.regenerations[j].time);
    }
}

TEST_CASE("anti orientation walks down and left") {
    auto f = random_field(Window::square(600), 0.7, 8);
    auto t = level_table(f, Orientation::Anti);
    std::optional<Site> o;
    for (std::int32_t i = 0; i < 200 && !o; ++i)
        if (perc_status(t, {500 - i, 500 - i}, 64).kind == PercStatus::Kind::Escapes) o = Site{500 - i, 500 - i};
    REQUIRE(o);
    auto tr = stabilized_path(f, t, *o, 0.5, {64, 200});
    CHECK(tr.orientation == Orientation::Anti);
    for (std::size_t n = 0; n + 1 < tr.steps.size(); ++n) {
        auto d = tr.steps[n] - tr.steps[n + 1];
        REQUIRE((d == Site{1, 0} || d == Site{0, 1}));
        CHECK(is_open(f, tr.steps[n + 1], d == Site{1, 0} ? Step::Right : Step::Up));
    }
}

TEST_CASE("origin and margin handling") {
    auto f = random_field(Window::square(200), 0.7, 9);
    auto t = level_table(f, Orientation::Forward);
    std::optional<Site> finite;
    for (std::size_t i = 0; i < f.window().area() && !finite; ++i) {
        auto s = f.window().site_at(i);
        if (perc_status(t, s, 64).kind == PercStatus::Kind::Finite) finite = s;
    }
    REQUIRE(finite);
    CHECK_THROWS_AS(QPathBuilder(f, t, *finite, 0.5, {}), Error);
    CHECK_THROWS_AS(QPathBuilder(f, t, {190, 190}, 0.5, {}), Error);
    auto o = escaping_site(t, {5, 5}, 64);
    REQUIRE(o);
    CHECK_THROWS_AS(QPathBuilder(f, t, *o, 1.5, {}), Error);
    auto tr = stabilized_path(f, t, *o, 0.5, {64, -1});
    CHECK(tr.censored);
    for (auto s : tr.steps) CHECK(f.window().far_distance(s) >= 64);
}

TEST_CASE("regeneration csv") {
    auto f = random_field(Window::square(300), 0.7, 10);
    auto t = level_table(f, Orientation::Forward);
    auto o = escaping_site(t, {5, 5}, 64);
    REQUIRE(o);
    auto tr = stabilized_path(f, t, *o, 0.5, {64, 50});
    std::ostringstream os;
    write_regeneration_csv(os, tr, 3, true);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "replica,q,j,T_j,Y_j_x,Y_j_t,censored");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("3,0.5,", 0) == 0);
        ++rows;
    }
    CHECK(rows == tr.regenerations.size());
}

}
