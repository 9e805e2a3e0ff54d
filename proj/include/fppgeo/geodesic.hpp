#pragma once

#include "fppgeo/coalescence.hpp"
#include "fppgeo/lattice.hpp"
#include "fppgeo/percolation.hpp"
#include "fppgeo/qpath.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fppgeo {

struct GeodesicPath {
    std::vector<Site> sites;
    double total_time = 0.0;
};

// Sum of edge weights along a 4-neighbour path.
double path_time(const PassageField& field, std::span<const Site> sites);

// Dijkstra over the undirected 4-neighbour lattice of the field's window.
// Buffers are reused across queries; one oracle per thread.
class GeodesicOracle {
public:
    explicit GeodesicOracle(const PassageField& field);

    const PassageField& field() const { return field_; }

    double passage_time(Site x, Site y);
    GeodesicPath geodesic(Site x, Site y);

    // Shortest path using only sites with allowed[index] != 0.
    // Throws Error(Disconnected) when y is unreachable.
    GeodesicPath constrained_geodesic(Site x, Site y, std::span<const std::uint8_t> allowed);

    // Passage times from x to each target, settled in one search.
    std::vector<double> passage_times(Site x, std::span<const Site> targets);

private:
    void search(Site x, std::span<const Site> targets, const std::uint8_t* allowed);
    GeodesicPath trace_back(Site x, Site y, const std::uint8_t* allowed) const;
    bool reached(std::size_t i) const { return stamp_[i] == generation_; }

    const PassageField& field_;
    std::vector<double> dist_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint8_t> done_;
    std::uint32_t generation_ = 0;
};

double passage_time(const PassageField& field, Site x, Site y);
GeodesicPath geodesic(const PassageField& field, Site x, Site y);
GeodesicPath constrained_geodesic(const PassageField& field, Site x, Site y,
                                  std::span<const std::uint8_t> allowed);

// True iff the oracle time between the endpoints equals the L1 displacement.
// Throws Error(NotOrientedOpen) when a step is closed or not a forward step.
bool verify_oriented_geodesic(GeodesicOracle& oracle, std::span<const Site> path);
bool verify_oriented_geodesic(const PassageField& field, std::span<const Site> path);

struct SubpathReport {
    std::size_t checked = 0;
    std::size_t failures = 0;
};

// Checks the listed index pairs plus `count` random contiguous subpaths of at
// most `max_span` steps: each must cost exactly the oracle passage time
// between its endpoints.
SubpathReport verify_subpaths(GeodesicOracle& oracle, std::span<const Site> sites, std::size_t count,
                              std::size_t max_span, std::uint64_t seed,
                              std::span<const std::pair<std::size_t, std::size_t>> required = {});

struct SandwichRegion {
    Site origin{};
    std::int32_t j_r = 0;
    std::int32_t j_l = 0;
    std::vector<Site> right_path; // forward, from origin + (j_r, -j_r), levels 0..n0
    std::vector<Site> left_path;  // forward, from origin + (j_l, -j_l)
    std::vector<Site> right_anti; // anti, levels 0..n0_anti
    std::vector<Site> left_anti;
    std::int64_t n0 = 0;
    std::int64_t n0_anti = 0;
    std::vector<std::uint8_t> mask; // delta sites over the window
    std::size_t size = 0;

    bool contains(const Window& w, Site s) const { return w.contains(s) && mask[w.index(s)] != 0; }
    std::vector<Site> sites(const Window& w) const;
};

struct SandwichOptions {
    TraceOptions trace{};                 // max_steps bounds the coalescence searches
    std::int64_t continuation_steps = 1000;
    std::size_t subpath_checks = 8;
    std::size_t subpath_span = 400;
    std::uint64_t check_seed = 0;
};

// Throws Error(WindowExhausted) when j_r, j_l or a coalescence point cannot be
// found inside the uncensored part of the window.
SandwichRegion build_sandwich(const PassageField& field, const LevelTable& forward, const LevelTable& anti,
                              Site origin, double q, const SandwichOptions& options = {});

struct SandwichResult {
    GeodesicPath path;             // origin -> splice point -> forward q-path
    bool bypass = false;           // the origin percolates; path is its q-path
    std::optional<SandwichRegion> region;
    Site splice{};
    std::size_t splice_index = 0;
    double restricted_time = 0.0;
    double unrestricted_time = 0.0;
    QPathTrace continuation;
    SubpathReport checks;
};

SandwichResult sandwich_geodesic(const PassageField& field, const LevelTable& forward, const LevelTable& anti,
                                 Site origin, double q, const SandwichOptions& options = {});

struct BiGeodesicResult {
    GeodesicPath path;
    std::size_t center_index = 0;
    QPathTrace forward;
    QPathTrace anti;
    SubpathReport checks;
};

// Reversed anti q-path joined to the forward q-path through a bi-directional
// site. Throws Error(NotBidirectional).
BiGeodesicResult bi_infinite_geodesic(const PassageField& field, const LevelTable& forward,
                                      const LevelTable& anti, Site site, double q,
                                      const SandwichOptions& options = {});

nlohmann::json to_json(const GeodesicPath& path);

struct SvgLayer {
    std::vector<Site> sites;
    std::string color;
    double width = 1.0;
};

// Open edges of `view` as a faint raster with path overlays.
void write_svg(std::ostream& os, const PassageField& field, const Window& view, std::span<const SvgLayer> layers,
               double scale = 4.0);

} // namespace fppgeo
