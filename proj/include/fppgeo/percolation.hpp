#pragma once

#include "fppgeo/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace fppgeo {

// Longest oriented open path length from every site of a window. A site whose
// oriented open cluster reaches the far boundary of the window carries the
// `escapes` sentinel; far-boundary sites carry it trivially.
class LevelTable {
public:
    static constexpr std::int32_t escapes = std::numeric_limits<std::int32_t>::max();

    LevelTable(const Window& window, Orientation orientation, site_vector<std::int32_t> values);

    const Window& window() const { return window_; }
    Orientation orientation() const { return orientation_; }
    std::span<const std::int32_t> values() const { return values_; }

    std::int32_t operator[](std::size_t index) const { return values_[index]; }
    // Bounds-checked.
    std::int32_t at(Site s) const;
    bool escapes_at(Site s) const { return at(s) == escapes; }

private:
    Window window_;
    Orientation orientation_;
    site_vector<std::int32_t> values_;
};

LevelTable level_table(const PassageField& field, Orientation orientation);

// min(l(site), k); the sentinel truncates to k.
std::int64_t truncated_length(const LevelTable& table, Site site, std::int64_t k);

// Subset of the two oriented neighbours y with an open edge site -> y and
// l_{k-1}(y) + 1 == l_k(site). Neighbours outside the window are never members.
struct MaximizerSet {
    Site first{};
    Site second{};
    bool has_first = false;
    bool has_second = false;

    int size() const { return int(has_first) + int(has_second); }
    bool empty() const { return size() == 0; }
    bool contains(Site s) const { return (has_first && s == first) || (has_second && s == second); }
};

MaximizerSet maximizer_set(const PassageField& field, const LevelTable& table, Site site, std::int64_t k);

struct PercStatus {
    enum class Kind { Escapes, Finite, Censored };
    Kind kind = Kind::Censored;
    std::int32_t length = 0; // meaningful for Finite

    static PercStatus escapes() { return {Kind::Escapes, 0}; }
    static PercStatus finite(std::int32_t l) { return {Kind::Finite, l}; }
    static PercStatus censored() { return {Kind::Censored, 0}; }
    friend bool operator==(const PercStatus&, const PercStatus&) = default;
};

// Censored when the site lies closer than `escape_margin` (L1) to the far
// boundary of the table's orientation; otherwise Escapes or Finite(l).
PercStatus perc_status(const LevelTable& table, Site site, std::int32_t escape_margin);

bool is_bidirectional(const LevelTable& forward, const LevelTable& anti, Site site,
                      std::int32_t escape_margin);

// Sites uncensored in both orientations and escaping in both, row-major order.
std::vector<Site> bidirectional_scan(const LevelTable& forward, const LevelTable& anti,
                                     std::int32_t escape_margin);

struct BidirectionalCounts {
    std::size_t interior = 0;      // sites uncensored in both orientations
    std::size_t forward = 0;       // of which escape forward
    std::size_t anti = 0;          // of which escape anti
    std::size_t bidirectional = 0; // of which escape both ways
};
BidirectionalCounts count_bidirectional(const LevelTable& forward, const LevelTable& anti,
                                        std::int32_t escape_margin);

struct AntidiagonalNeighbors {
    std::int32_t j_r = 0; // > 0
    std::int32_t j_l = 0; // < 0
};

// Nearest bi-directional points origin + (j, -j) on both sides of the origin.
// Throws Error(CensoredBeforeFound) if a scan leaves the uncensored region first.
AntidiagonalNeighbors nearest_bidirectional_on_antidiagonal(const LevelTable& forward,
                                                            const LevelTable& anti, Site origin,
                                                            std::int32_t escape_margin);

// "x t l_fwd l_anti" per site; the sentinel is written as "inf".
void write_level_tables(std::ostream& os, const LevelTable& forward, const LevelTable& anti);

} // namespace fppgeo
