#pragma once

#include "fppgeo/lattice.hpp"
#include "fppgeo/rng.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

using namespace fppgeo;

// Field with every edge weight, openness and uniform taken from a hash of seed.
inline PassageField random_field(const Window& w, double p, std::uint64_t seed,
                                 ExcessDistribution excess = ExcessDistribution::atom(2.0)) {
    return sample_field(w, p, excess, seed);
}

// Field built from an explicit bit pattern over the window's interior edges:
// right edges first (row-major), then up edges. Open edges weigh 1, closed 2.
inline PassageField pattern_field(const Window& w, std::uint64_t bits, std::uint64_t useed = 0) {
    std::vector<double> right(w.area(), 2.0), up(w.area(), 2.0), u(w.area());
    std::size_t bit = 0;
    for (auto t = w.t_min; t <= w.t_max; ++t)
        for (auto x = w.x_min; x < w.x_max; ++x)
            right[w.index({x, t})] = (bits >> bit++) & 1 ? 1.0 : 2.0;
    for (auto t = w.t_min; t < w.t_max; ++t)
        for (auto x = w.x_min; x <= w.x_max; ++x)
            up[w.index({x, t})] = (bits >> bit++) & 1 ? 1.0 : 2.0;
    for (std::size_t i = 0; i < w.area(); ++i)
        u[i] = rng::to_unit(rng::mix64(useed * 7919 + i));
    return PassageField::from_arrays(w, 0.5, right, up, u);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* env = std::getenv("FPPGEO_TMP");
    auto base = env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "fppgeo_tests";
    auto dir = base / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil
