#pragma once

#include "fppgeo/lattice.hpp"
#include "fppgeo/qpath.hpp"
#include "fppgeo/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace fppgeo {

struct ConeEstimate {
    double p = 0.0;
    double alpha_hat = 0.0;
    Vec2 M{};
    Vec2 N{};
    double theta_minus = 0.0;
    double theta_plus = 0.0;
    double alpha_ci_low = 0.0;
    double alpha_ci_high = 0.0;
    double alpha_ci_halfwidth = 0.0;
    double theta_ci_halfwidth = 0.0; // shared by both angles
    std::size_t replicas = 0;
    std::size_t censored = 0;        // traces stopped by the escape margin
    std::size_t regenerations = 0;
    std::size_t origins_tried = 0;
    double escape_rate = 0.0;        // percolating fraction of tried origins
};

// M = (1/2 + a/sqrt2, 1/2 - a/sqrt2), N its swap, angles as atan2 of their
// coordinates. Throws Error(Config) unless 0 <= alpha <= 1/sqrt2.
ConeEstimate cone_from_alpha(double alpha);

struct ConeOptions {
    Window window = Window::square(2800);
    ExcessDistribution excess = ExcessDistribution::atom(2.0);
    TraceOptions trace{64, 4000};
    // Diagonal sites (i, i) scanned for a percolating origin.
    std::int32_t origin_scan = 256;
    double escape_floor = 0.05;
    std::size_t min_replicas = 100;
    std::size_t resamples = 2000;
    double level = 0.95;
    std::size_t threads = 1;
    bool keep_traces = false; // theta_curve keeps regenerations (steps dropped)
};

// First Escapes site on the window diagonal from its lower-left corner.
// `tried` counts the inspected sites.
std::optional<Site> find_origin(const LevelTable& forward, std::int32_t escape_margin, std::int32_t scan,
                                std::size_t& tried);

// Rightmost (q = 1) stabilized paths on independent fields; alpha is the
// (1,-1)/sqrt2 component of the regeneration speed sum(Y)/sum(T), with a
// replica bootstrap interval. Throws Error(SubcriticalSuspected) when the
// percolating fraction of tried origins falls below the floor.
ConeEstimate estimate_alpha(double p, std::size_t replicas, std::uint64_t seed, const ConeOptions& options = {});

struct ThetaCurve {
    double p = 0.0;
    std::vector<double> q_grid;
    std::vector<DirectionEstimate> points;
    std::vector<std::vector<RenewalSums>> sums;     // [grid point][replica]
    std::vector<std::vector<double>> common_angles; // [replica][grid point]
    std::vector<std::int64_t> common_length;        // per replica
    std::vector<std::size_t> replica_ids;           // replicas that found an origin
    std::vector<std::vector<QPathTrace>> traces;    // [replica][grid point] when kept
    std::size_t monotonicity_violations = 0;
    std::size_t replicas = 0;
    std::size_t censored = 0;
    std::size_t origins_tried = 0;
};

// theta_hat(q) for every grid point from the same fields, uniforms and
// origins. Per replica, the displacement angles at the common stabilized
// length must be non-increasing in q.
ThetaCurve theta_curve(double p, std::span<const double> q_grid, std::size_t replicas, std::uint64_t seed,
                       const ConeOptions& options = {});

struct SymmetryCheck {
    double q = 0.0;
    double sum = 0.0; // theta_hat(q) + theta_hat(1 - q)
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool pass = false; // pi/2 inside the interval
};

// Paired replica bootstrap of theta_hat(q) + theta_hat(1 - q) for each grid
// point q <= 1/2 whose mirror is also on the grid.
std::vector<SymmetryCheck> symmetry_checks(const ThetaCurve& curve, std::size_t resamples, double level,
                                           std::uint64_t seed);

struct EndpointCheck {
    double theta_hat = 0.0;
    double cone_angle = 0.0;
    double difference = 0.0;
    double joint_halfwidth = 0.0; // sqrt(h1^2 + h2^2) of independent estimates
    bool pass = false;
};
EndpointCheck endpoint_check(const DirectionEstimate& estimate, double cone_angle, double cone_halfwidth);

struct ThresholdBand {
    double low = 0.0;  // escape fraction below the floor
    double high = 1.0; // escape fraction above the floor
    std::size_t iterations = 0;
};

// Coarse bisection of the oriented threshold on the escape fraction of the
// window's interior sites. A sanity band, not an estimate.
ThresholdBand threshold_band(std::int32_t side, std::int32_t escape_margin, double floor, std::size_t iterations,
                             std::size_t replicas, std::uint64_t seed);

nlohmann::json cone_report(const ConeEstimate& cone, const ThetaCurve* curve = nullptr);

} // namespace fppgeo
