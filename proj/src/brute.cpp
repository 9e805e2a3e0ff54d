#include "fppgeo/brute.hpp"

#include "fppgeo/error.hpp"

#include <algorithm>
#include <limits>

namespace fppgeo {

namespace {

void require_tiny(const Window& w) {
    if (w.area() > 25)
        throw Error(ErrorCode::Config, "exhaustive enumeration is limited to 25 sites");
}

struct PathDfs {
    const PassageField& field;
    const Window& w;
    std::vector<double>& best;
    std::vector<std::uint8_t> on_path;

    void run(Site s, double acc) {
        const auto i = w.index(s);
        best[i] = std::min(best[i], acc);
        on_path[i] = 1;
        const Site next[4] = {s + Site{1, 0}, s + Site{0, 1}, s - Site{1, 0}, s - Site{0, 1}};
        for (auto n : next)
            if (w.contains(n) && !on_path[w.index(n)])
                run(n, acc + field.edge_between(s, n));
        on_path[i] = 0;
    }
};

bool on_far_boundary(const Window& w, Site s, Orientation o) {
    return o == Orientation::Forward ? (s.x == w.x_max || s.t == w.t_max) : (s.x == w.x_min || s.t == w.t_min);
}

// Longest oriented open path from s; escapes if any path touches the far boundary.
std::int32_t longest(const PassageField& field, Site s, Orientation o) {
    const auto& w = field.window();
    if (on_far_boundary(w, s, o))
        return LevelTable::escapes;
    std::int32_t best = 0;
    for (bool first : {true, false}) {
        if (!oriented_open(field, s, o, first))
            continue;
        const Site n = first ? first_neighbor(s, o) : second_neighbor(s, o);
        const auto l = longest(field, n, o);
        if (l == LevelTable::escapes)
            return l;
        best = std::max(best, l + 1);
    }
    return best;
}

} // namespace

std::vector<double> enumerate_passage_times(const PassageField& field, Site source) {
    const auto& w = field.window();
    require_tiny(w);
    if (!w.contains(source))
        throw Error(ErrorCode::Bounds, "enumeration source outside the window");
    std::vector<double> best(w.area(), std::numeric_limits<double>::infinity());
    PathDfs dfs{field, w, best, std::vector<std::uint8_t>(w.area(), 0)};
    dfs.run(source, 0.0);
    return best;
}

std::vector<std::int32_t> enumerate_level_table(const PassageField& field, Orientation orientation) {
    const auto& w = field.window();
    require_tiny(w);
    std::vector<std::int32_t> out(w.area());
    for (std::size_t i = 0; i < w.area(); ++i)
        out[i] = longest(field, w.site_at(i), orientation);
    return out;
}

} // namespace fppgeo
