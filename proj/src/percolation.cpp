#include "fppgeo/percolation.hpp"

#include "fppgeo/error.hpp"

#include <ostream>

namespace fppgeo {

LevelTable::LevelTable(const Window& window, Orientation orientation, site_vector<std::int32_t> values)
    : window_(window), orientation_(orientation), values_(std::move(values)) {
    if (values_.size() != window_.area())
        throw Error(ErrorCode::Config, "level table size does not match window");
}

std::int32_t LevelTable::at(Site s) const {
    if (!window_.contains(s))
        throw Error(ErrorCode::Bounds, "site outside level table window");
    return values_[window_.index(s)];
}

namespace {

// -1 (no open edge) -> 0, sentinel stays, otherwise +1.
constexpr std::int32_t extend_or_zero(std::int32_t best) {
    return best == LevelTable::escapes ? best : best + 1;
}

} // namespace

// Reverse row-major order is a topological order for forward steps (both
// neighbours are visited earlier), and forward row-major order for anti steps.
LevelTable level_table(const PassageField& field, Orientation orientation) {
    const auto& w = field.window();
    const auto width = std::size_t(w.width());
    const auto height = std::size_t(w.height());
    const std::uint8_t* open = field.open_mask().data();
    site_vector<std::int32_t> table(w.area());
    std::int32_t* l = table.data();
    constexpr auto inf = LevelTable::escapes;

    if (orientation == Orientation::Forward) {
        const auto last = w.area() - 1;
        for (std::size_t c = 0; c < width; ++c)
            l[last - c] = inf;
        for (std::size_t r = height - 1; r-- > 0;) {
            const auto row = r * width;
            l[row + width - 1] = inf;
            for (std::size_t c = width - 1; c-- > 0;) {
                const auto i = row + c;
                const std::int32_t a = (open[i] & 1U) ? l[i + 1] : -1;
                const std::int32_t b = (open[i] & 2U) ? l[i + width] : -1;
                l[i] = extend_or_zero(std::max(a, b));
            }
        }
    } else {
        for (std::size_t c = 0; c < width; ++c)
            l[c] = inf;
        for (std::size_t r = 1; r < height; ++r) {
            const auto row = r * width;
            l[row] = inf;
            for (std::size_t c = 1; c < width; ++c) {
                const auto i = row + c;
                const std::int32_t a = (open[i - 1] & 1U) ? l[i - 1] : -1;
                const std::int32_t b = (open[i - width] & 2U) ? l[i - width] : -1;
                l[i] = extend_or_zero(std::max(a, b));
            }
        }
    }
    return LevelTable(w, orientation, std::move(table));
}

std::int64_t truncated_length(const LevelTable& table, Site site, std::int64_t k) {
    const auto l = table.at(site);
    return l == LevelTable::escapes ? k : std::min<std::int64_t>(l, k);
}

MaximizerSet maximizer_set(const PassageField& field, const LevelTable& table, Site site, std::int64_t k) {
    if (k < 1)
        throw Error(ErrorCode::Config, "maximizer set needs k >= 1");
    const auto& w = table.window();
    const auto target = truncated_length(table, site, k);
    const auto o = table.orientation();
    MaximizerSet m;
    const auto consider = [&](Site y, bool first) {
        if (!w.contains(y) || !oriented_open(field, site, o, first))
            return false;
        return truncated_length(table, y, k - 1) + 1 == target;
    };
    m.first = first_neighbor(site, o);
    m.second = second_neighbor(site, o);
    m.has_first = consider(m.first, true);
    m.has_second = consider(m.second, false);
    return m;
}

PercStatus perc_status(const LevelTable& table, Site site, std::int32_t escape_margin) {
    if (escape_margin < 1)
        throw Error(ErrorCode::Config, "escape margin must be >= 1");
    const auto& w = table.window();
    if (!w.contains(site) || w.far_distance(site, table.orientation()) < escape_margin)
        return PercStatus::censored();
    const auto l = table[w.index(site)];
    return l == LevelTable::escapes ? PercStatus::escapes() : PercStatus::finite(l);
}

bool is_bidirectional(const LevelTable& forward, const LevelTable& anti, Site site,
                      std::int32_t escape_margin) {
    return perc_status(forward, site, escape_margin).kind == PercStatus::Kind::Escapes &&
           perc_status(anti, site, escape_margin).kind == PercStatus::Kind::Escapes;
}

namespace {

void check_pair(const LevelTable& forward, const LevelTable& anti) {
    if (forward.orientation() != Orientation::Forward || anti.orientation() != Orientation::Anti ||
        !(forward.window() == anti.window()))
        throw Error(ErrorCode::Config, "expected forward and anti tables over the same window");
}

} // namespace

std::vector<Site> bidirectional_scan(const LevelTable& forward, const LevelTable& anti,
                                     std::int32_t escape_margin) {
    check_pair(forward, anti);
    std::vector<Site> out;
    const auto& w = forward.window();
    for (std::int32_t t = w.t_min + escape_margin; t <= w.t_max - escape_margin; ++t)
        for (std::int32_t x = w.x_min + escape_margin; x <= w.x_max - escape_margin; ++x) {
            const auto i = w.index({x, t});
            if (forward[i] == LevelTable::escapes && anti[i] == LevelTable::escapes)
                out.push_back({x, t});
        }
    return out;
}

BidirectionalCounts count_bidirectional(const LevelTable& forward, const LevelTable& anti,
                                        std::int32_t escape_margin) {
    check_pair(forward, anti);
    BidirectionalCounts c;
    const auto& w = forward.window();
    for (std::int32_t t = w.t_min + escape_margin; t <= w.t_max - escape_margin; ++t)
        for (std::int32_t x = w.x_min + escape_margin; x <= w.x_max - escape_margin; ++x) {
            const auto i = w.index({x, t});
            const bool f = forward[i] == LevelTable::escapes;
            const bool a = anti[i] == LevelTable::escapes;
            ++c.interior;
            c.forward += f;
            c.anti += a;
            c.bidirectional += f && a;
        }
    return c;
}

AntidiagonalNeighbors nearest_bidirectional_on_antidiagonal(const LevelTable& forward,
                                                            const LevelTable& anti, Site origin,
                                                            std::int32_t escape_margin) {
    check_pair(forward, anti);
    const auto scan = [&](std::int32_t dir) {
        for (std::int32_t j = dir;; j += dir) {
            const Site s = origin + Site{j, -j};
            const auto f = perc_status(forward, s, escape_margin);
            const auto a = perc_status(anti, s, escape_margin);
            if (f.kind == PercStatus::Kind::Censored || a.kind == PercStatus::Kind::Censored)
                throw Error(ErrorCode::CensoredBeforeFound,
                            "anti-diagonal scan reached the censored region");
            if (f.kind == PercStatus::Kind::Escapes && a.kind == PercStatus::Kind::Escapes)
                return j;
        }
    };
    AntidiagonalNeighbors n;
    n.j_r = scan(+1);
    n.j_l = scan(-1);
    return n;
}

void write_level_tables(std::ostream& os, const LevelTable& forward, const LevelTable& anti) {
    check_pair(forward, anti);
    const auto& w = forward.window();
    const auto put = [&](std::int32_t v) {
        if (v == LevelTable::escapes) os << "inf";
        else os << v;
    };
    for (std::size_t i = 0; i < w.area(); ++i) {
        const Site s = w.site_at(i);
        os << s.x << ' ' << s.t << ' ';
        put(forward[i]);
        os << ' ';
        put(anti[i]);
        os << '\n';
    }
}

} // namespace fppgeo
