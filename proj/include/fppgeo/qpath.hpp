#pragma once

#include "fppgeo/lattice.hpp"
#include "fppgeo/percolation.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fppgeo {

// One renewal of a q-path: the regeneration time T_j and the displacement
// Y_j accumulated since the previous regeneration.
struct Regeneration {
    std::int64_t time = 0;
    Site increment{};
};

struct QPathTrace {
    Site origin{};
    double q = 0.5;
    Orientation orientation = Orientation::Forward;
    std::vector<Site> steps;             // stabilized prefix, steps[0] == origin
    std::int64_t stabilized_upto = 0;    // == steps.size() - 1
    std::vector<Regeneration> regenerations;
    bool censored = false;               // stopped because the escape margin was reached
};

struct TraceOptions {
    std::int32_t escape_margin = 64;
    std::int64_t max_steps = -1; // stop at the first regeneration at or beyond this; < 0: no limit
};

// The q-rule: the first neighbour when it is the only maximizer, or when both
// are and U(site) <= q; otherwise the second neighbour.
Site select_step(const PassageField& field, const LevelTable& table, Site site, std::int64_t k, double q);

// gamma_k: k steps from origin, step j+1 chosen with truncation level k - j.
std::vector<Site> build_gamma_k(const PassageField& field, const LevelTable& table, Site origin,
                                double q, std::int64_t k);

// Incremental construction of the stabilized q-path, one regeneration per call.
// After a regeneration at T the construction restarts from gamma(T) with
// truncation levels counted from T, which reproduces gamma_k for all k > T.
class QPathBuilder {
public:
    QPathBuilder(const PassageField& field, const LevelTable& table, Site origin, double q,
                 TraceOptions options);

    // Extends the frozen prefix to the next regeneration. Returns false once
    // the trace is finished (censored or max_steps reached).
    bool advance();
    bool finished() const { return finished_; }
    const QPathTrace& trace() const { return trace_; }
    QPathTrace take() && { return std::move(trace_); }

private:
    bool safe(Site s) const;

    const PassageField& field_;
    const LevelTable& table_;
    TraceOptions options_;
    QPathTrace trace_;
    std::vector<Site> scratch_;
    bool finished_ = false;
};

QPathTrace stabilized_path(const PassageField& field, const LevelTable& table, Site origin, double q,
                           TraceOptions options = {});

// "replica,q,j,T_j,Y_j_x,Y_j_t,censored" rows; writes the header when asked.
void write_regeneration_csv(std::ostream& os, const QPathTrace& trace, std::size_t replica,
                            bool header = false);

} // namespace fppgeo
