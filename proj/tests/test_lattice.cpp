#include "doctest.h"
#include "helpers.hpp"

#include "fppgeo/error.hpp"
#include "fppgeo/lattice.hpp"

#include <cmath>
#include <sstream>

using namespace fppgeo;
using testutil::random_field;

TEST_SUITE("lattice") {

TEST_CASE("window geometry") {
    auto w = Window::make(-3, 4, 2, 6);
    CHECK(w.width() == 8);
    CHECK(w.height() == 5);
    CHECK(w.area() == 40);
    for (std::size_t i = 0; i < w.area(); ++i)
        CHECK(w.index(w.site_at(i)) == i);
    CHECK(w.far_distance({0, 3}) == 3);
    CHECK(w.far_distance({0, 3}, Orientation::Anti) == 1);
    CHECK_THROWS_AS(Window::make(3, 2, 0, 1), Error);
}

TEST_CASE("excess distributions") {
    auto a = ExcessDistribution::parse("atom:2");
    CHECK(a.sample(0.3) == 2.0);
    CHECK(a.min_gap() == doctest::Approx(1.0));
    auto e = ExcessDistribution::parse("exp:1.5");
    CHECK(e.sample(1e-300) > 1.0);
    CHECK(e.sample(0.5) == doctest::Approx(1.0 + std::log(2.0) / 1.5));
    auto u = ExcessDistribution::parse("uniform:1.5:3");
    CHECK(u.sample(0.0) == 1.5);
    CHECK(ExcessDistribution::parse(u.to_string()) == u);
    CHECK(ExcessDistribution::parse(e.to_string()) == e);
    CHECK_THROWS_AS(ExcessDistribution::parse("atom:1"), Error);
    CHECK_THROWS_AS(ExcessDistribution::parse("exp:-1"), Error);
    CHECK_THROWS_AS(ExcessDistribution::parse("uniform:3:2"), Error);
    CHECK_THROWS_AS(ExcessDistribution::parse("gamma:2"), Error);
}

TEST_CASE("same seed gives the same field") {
    auto w = Window::square(64);
    auto f = random_field(w, 0.7, 42);
    auto g = random_field(w, 0.7, 42);
    auto h = random_field(w, 0.7, 43);
    CHECK(std::equal(f.weights_right().begin(), f.weights_right().end(), g.weights_right().begin()));
    CHECK(std::equal(f.uniforms().begin(), f.uniforms().end(), g.uniforms().begin()));
    CHECK_FALSE(std::equal(f.weights_up().begin(), f.weights_up().end(), h.weights_up().begin()));
}

TEST_CASE("open fraction matches p") {
    auto w = Window::make(0, 999, 0, 499);
    auto f = random_field(w, 0.7, 7);
    std::size_t open = 0, total = 0;
    for (std::size_t i = 0; i < w.area(); ++i) {
        open += f.open(i, Step::Right) + f.open(i, Step::Up);
        total += 2;
    }
    CHECK(double(open) / double(total) == doctest::Approx(0.7).epsilon(0.002 / 0.7));
}

TEST_CASE("closed edges weigh at least 1 + gap") {
    for (auto ex : {ExcessDistribution::atom(2.0), ExcessDistribution::shifted_exponential(1.0),
                    ExcessDistribution::shifted_uniform(1.25, 2.0)}) {
        auto f = random_field(Window::square(50), 0.6, 3, ex);
        for (std::size_t i = 0; i < f.window().area(); ++i)
            for (auto s : {Step::Right, Step::Up}) {
                double wgt = f.weight(i, s);
                if (f.open(i, s))
                    CHECK(wgt == 1.0);
                else
                    CHECK(wgt >= 1.0 + ex.min_gap());
            }
    }
}

TEST_CASE("p = 1 opens everything") {
    auto f = random_field(Window::square(40), 1.0, 9);
    for (std::size_t i = 0; i < f.window().area(); ++i)
        CHECK(f.open_mask()[i] == 3);
}

TEST_CASE("raising p only opens edges") {
    auto w = Window::square(120);
    auto lo = random_field(w, 0.55, 11);
    auto hi = random_field(w, 0.8, 11);
    std::size_t strictly = 0;
    for (std::size_t i = 0; i < w.area(); ++i)
        for (auto s : {Step::Right, Step::Up}) {
            if (lo.open(i, s))
                CHECK(hi.open(i, s));
            strictly += hi.open(i, s) && !lo.open(i, s);
        }
    CHECK(strictly > 0);
    CHECK(std::equal(lo.uniforms().begin(), lo.uniforms().end(), hi.uniforms().begin()));
}

TEST_CASE("nested windows agree on shared sites") {
    auto big = random_field(Window::make(-50, 80, -20, 90), 0.7, 5, ExcessDistribution::shifted_exponential(1.0));
    auto small = random_field(Window::make(3, 40, 10, 33), 0.7, 5, ExcessDistribution::shifted_exponential(1.0));
    const auto& ws = small.window();
    for (std::size_t i = 0; i < ws.area(); ++i) {
        auto s = ws.site_at(i);
        auto j = big.window().index(s);
        CHECK(small.weight(i, Step::Right) == big.weight(j, Step::Right));
        CHECK(small.weight(i, Step::Up) == big.weight(j, Step::Up));
        CHECK(small.uniform(s) == big.uniform(s));
    }
}

TEST_CASE("uniform stream is independent of the weight stream") {
    auto w = Window::make(0, 999, 0, 999);
    auto f = sample_field(w, 0.7, ExcessDistribution::atom(2.0), 17, 17);
    auto g = sample_field(w, 0.7, ExcessDistribution::atom(2.0), 17, 18);
    CHECK(std::equal(f.weights_right().begin(), f.weights_right().end(), g.weights_right().begin()));
    CHECK_FALSE(f.uniforms()[0] == g.uniforms()[0]);

    // correlation between U(site) and the right edge being open
    double su = 0, so = 0, suo = 0, suu = 0;
    const double n = double(w.area());
    for (std::size_t i = 0; i < w.area(); ++i) {
        double u = f.uniforms()[i], o = f.open(i, Step::Right);
        su += u;
        so += o;
        suo += u * o;
        suu += u * u;
    }
    double cov = suo / n - su / n * so / n;
    double r = cov / std::sqrt((suu / n - su / n * su / n) * (so / n) * (1 - so / n));
    CHECK(std::abs(r) < 0.005);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.002));
}

TEST_CASE("from_arrays validates input") {
    auto w = Window::square(2);
    std::vector<double> ok(4, 1.0), u(4, 0.5);
    CHECK_NOTHROW(PassageField::from_arrays(w, 0.5, ok, ok, u));
    auto bad = ok;
    bad[2] = 0.5;
    CHECK_THROWS_AS(PassageField::from_arrays(w, 0.5, bad, ok, u), Error);
    auto badu = u;
    badu[1] = 1.0;
    CHECK_THROWS_AS(PassageField::from_arrays(w, 0.5, ok, ok, badu), Error);
    CHECK_THROWS_AS(PassageField::from_arrays(w, 0.0, ok, ok, u), Error);
    CHECK_THROWS_AS(PassageField::from_arrays(w, 0.5, std::vector<double>(3, 1.0), ok, u), Error);
}

TEST_CASE("edge lookups") {
    auto f = random_field(Window::square(10), 0.5, 21, ExcessDistribution::shifted_exponential(2.0));
    Site a{3, 4};
    CHECK(f.edge_between(a, {4, 4}) == f.edge_weight(a, Step::Right));
    CHECK(f.edge_between({4, 4}, a) == f.edge_weight(a, Step::Right));
    CHECK(f.edge_between(a, {3, 3}) == f.edge_weight({3, 3}, Step::Up));
    CHECK(is_open(f, a, Step::Up) == (f.edge_weight(a, Step::Up) == 1.0));
    CHECK(oriented_open(f, a, Orientation::Anti, true) == is_open(f, {2, 4}, Step::Right));
    CHECK(oriented_open(f, a, Orientation::Anti, false) == is_open(f, {3, 3}, Step::Up));
    CHECK_THROWS_AS(f.edge_between(a, {5, 5}), Error);
    CHECK_THROWS_AS(f.edge_weight({9, 0}, Step::Right), Error);
}

TEST_CASE("snapshot round trip") {
    auto f = random_field(Window::make(-2, 5, 1, 4), 0.6, 8, ExcessDistribution::shifted_uniform(1.5, 2.5));
    std::stringstream ss;
    write_field_snapshot(ss, f);
    auto g = read_field_snapshot(ss);
    CHECK(g.window() == f.window());
    CHECK(g.p() == f.p());
    CHECK(g.excess() == f.excess());
    CHECK(std::equal(f.weights_right().begin(), f.weights_right().end(), g.weights_right().begin()));
    CHECK(std::equal(f.weights_up().begin(), f.weights_up().end(), g.weights_up().begin()));
    CHECK(std::equal(f.uniforms().begin(), f.uniforms().end(), g.uniforms().begin()));
    std::stringstream bad("not json\n");
    CHECK_THROWS_AS(read_field_snapshot(bad), Error);
}

}
