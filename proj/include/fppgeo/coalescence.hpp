#pragma once

#include "fppgeo/qpath.hpp"
#include "fppgeo/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fppgeo {

// Two q-paths built on one field from origins on a common anti-diagonal,
// observed at their joint regeneration times.
struct CoalescenceTrace {
    Site origin_x{};
    Site origin_y{};
    double q = 0.5;
    std::vector<std::int64_t> taus;     // tau_0 = 0
    std::vector<std::int64_t> zs;       // L1 distance of the paths at each tau
    std::optional<std::int64_t> n0;     // first index where the step sequences meet
    bool censored = false;              // a path reached the escape margin
    std::int64_t depth = 0;             // common stabilized length of both paths
    std::vector<Site> path_x;           // stabilized prefixes
    std::vector<Site> path_y;

    bool coalesced() const { return n0.has_value(); }
};

struct JointOptions {
    TraceOptions trace{};
    // Stop at the first joint regeneration with Z == 0.
    bool stop_at_coalescence = true;
};

CoalescenceTrace joint_trace(const PassageField& field, const LevelTable& table, Site origin_x,
                             Site origin_y, double q, const JointOptions& options = {});

// Joint regeneration gaps tau_{j+1} - tau_j of a trace.
std::vector<std::int64_t> joint_intervals(const CoalescenceTrace& trace);

inline TailFit fit_joint_tail(std::span<const std::int64_t> joint_gaps, const TailFitOptions& options = {}) {
    return fit_survival_tail(joint_gaps, options);
}

// |Z_{j+1} - Z_j| <= 2 (tau_{j+1} - tau_j) on every transition.
bool increment_bound_holds(const CoalescenceTrace& trace);

struct DriftEstimate {
    std::int64_t m = 0;
    double drift = 0.0;   // mean of log Z' - log Z over non-absorbing transitions
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::size_t absorptions = 0;
    double absorption_probability = 0.0;
};

struct DriftOptions {
    // A transition from Z belongs to bucket m when |Z - m| <= relative_halfwidth * m.
    double relative_halfwidth = 0.25;
    std::size_t min_transitions = 200;
};

struct DriftProfile {
    std::vector<DriftEstimate> estimates;
    std::vector<std::int64_t> omitted; // buckets below min_transitions
    std::size_t transitions = 0;
    std::size_t absorbing = 0;
};

DriftProfile drift_profile(std::span<const CoalescenceTrace> traces, std::span<const std::int64_t> buckets,
                           const DriftOptions& options = {});

// Largest reported bucket whose drift + 2 stderr is positive (0 when none
// is), so every larger bucket shows significant negative drift. Empty when
// the largest bucket itself fails.
std::optional<std::int64_t> select_m0(const DriftProfile& profile);

// Signs of Z_{j+1} - Z_j over transitions with tau_{j+1} - tau_j < Z_j / 2.
struct SignCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t zero = 0;
};
SignCounts short_interval_signs(std::span<const CoalescenceTrace> traces);

// "replica,q,j,tau_j,Z_j,absorbed" rows.
void write_coalescence_csv(std::ostream& os, const CoalescenceTrace& trace, std::size_t replica,
                           bool header = false);

} // namespace fppgeo
