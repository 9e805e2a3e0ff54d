#include "fppgeo/coalescence.hpp"

#include "fppgeo/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fppgeo {

CoalescenceTrace joint_trace(const PassageField& field, const LevelTable& table, Site origin_x,
                             Site origin_y, double q, const JointOptions& options) {
    if (level(origin_x) != level(origin_y))
        throw Error(ErrorCode::PreconditionDiagonal, "joint trace origins must share an anti-diagonal");
    QPathBuilder bx(field, table, origin_x, q, options.trace);
    QPathBuilder by(field, table, origin_y, q, options.trace);

    CoalescenceTrace out;
    out.origin_x = origin_x;
    out.origin_y = origin_y;
    out.q = q;
    out.taus.push_back(0);
    out.zs.push_back(l1_distance(origin_x, origin_y));
    if (origin_x == origin_y)
        out.n0 = 0;

    std::int64_t scanned = 0; // step index up to which the prefixes were compared
    const auto times_of = [](const QPathBuilder& b) -> const std::vector<Regeneration>& {
        return b.trace().regenerations;
    };
    const auto has_time = [](const std::vector<Regeneration>& regs, std::int64_t t) {
        return std::binary_search(regs.begin(), regs.end(), t,
                                  [](auto a, auto b) {
                                      if constexpr (std::is_same_v<decltype(a), Regeneration>)
                                          return a.time < b;
                                      else
                                          return a < b.time;
                                  });
    };

    while (!bx.finished() && !by.finished()) {
        const auto ux = bx.trace().stabilized_upto;
        const auto uy = by.trace().stabilized_upto;
        QPathBuilder& lag = ux <= uy ? bx : by;
        const QPathBuilder& other = ux <= uy ? by : bx;
        if (!lag.advance())
            break;
        const auto t = times_of(lag).back().time;
        if (t <= other.trace().stabilized_upto && has_time(times_of(other), t)) {
            out.taus.push_back(t);
            out.zs.push_back(l1_distance(bx.trace().steps[std::size_t(t)], by.trace().steps[std::size_t(t)]));
        }
        const auto common = std::min(bx.trace().stabilized_upto, by.trace().stabilized_upto);
        for (; !out.n0 && scanned < common;) {
            ++scanned;
            if (bx.trace().steps[std::size_t(scanned)] == by.trace().steps[std::size_t(scanned)])
                out.n0 = scanned;
        }
        scanned = std::max(scanned, common);
        if (options.stop_at_coalescence && out.n0 && out.zs.back() == 0)
            break;
    }

    out.censored = bx.trace().censored || by.trace().censored;
    out.depth = std::min(bx.trace().stabilized_upto, by.trace().stabilized_upto);
    out.path_x = bx.trace().steps;
    out.path_y = by.trace().steps;
    return out;
}

std::vector<std::int64_t> joint_intervals(const CoalescenceTrace& trace) {
    std::vector<std::int64_t> out;
    for (std::size_t j = 1; j < trace.taus.size(); ++j)
        out.push_back(trace.taus[j] - trace.taus[j - 1]);
    return out;
}

bool increment_bound_holds(const CoalescenceTrace& trace) {
    for (std::size_t j = 1; j < trace.taus.size(); ++j) {
        const auto dz = trace.zs[j] - trace.zs[j - 1];
        if (std::abs(dz) > 2 * (trace.taus[j] - trace.taus[j - 1]))
            return false;
    }
    return true;
}

DriftProfile drift_profile(std::span<const CoalescenceTrace> traces, std::span<const std::int64_t> buckets,
                           const DriftOptions& options) {
    struct Acc {
        double sum = 0, sum_sq = 0;
        std::size_t n = 0, absorbed = 0;
    };
    std::vector<Acc> acc(buckets.size());
    DriftProfile out;
    for (const auto& tr : traces) {
        for (std::size_t j = 1; j < tr.zs.size(); ++j) {
            const auto z = tr.zs[j - 1];
            const auto next = tr.zs[j];
            if (z <= 0)
                continue;
            ++out.transitions;
            if (next == 0)
                ++out.absorbing;
            for (std::size_t b = 0; b < buckets.size(); ++b) {
                const double m = double(buckets[b]);
                if (std::abs(double(z) - m) > options.relative_halfwidth * m)
                    continue;
                if (next == 0) {
                    ++acc[b].absorbed;
                    continue;
                }
                const double d = std::log(double(next)) - std::log(double(z));
                acc[b].sum += d;
                acc[b].sum_sq += d * d;
                ++acc[b].n;
            }
        }
    }
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        const auto& a = acc[b];
        if (a.n < options.min_transitions || a.n < 2) {
            out.omitted.push_back(buckets[b]);
            continue;
        }
        DriftEstimate e;
        e.m = buckets[b];
        e.n = a.n;
        e.drift = a.sum / double(a.n);
        const double var = (a.sum_sq - double(a.n) * e.drift * e.drift) / double(a.n - 1);
        e.stderr_ = std::sqrt(std::max(var, 0.0) / double(a.n));
        e.absorptions = a.absorbed;
        e.absorption_probability = double(a.absorbed) / double(a.absorbed + a.n);
        out.estimates.push_back(e);
    }
    return out;
}

std::optional<std::int64_t> select_m0(const DriftProfile& profile) {
    if (profile.estimates.empty())
        return std::nullopt;
    auto sorted = profile.estimates;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
    if (sorted.back().drift + 2.0 * sorted.back().stderr_ > 0.0)
        return std::nullopt;
    std::int64_t m0 = 0;
    for (const auto& e : sorted)
        if (e.drift + 2.0 * e.stderr_ > 0.0)
            m0 = e.m;
    return m0 + (m0 % 2);
}

SignCounts short_interval_signs(std::span<const CoalescenceTrace> traces) {
    SignCounts c;
    for (const auto& tr : traces)
        for (std::size_t j = 1; j < tr.zs.size(); ++j) {
            const auto z = tr.zs[j - 1];
            if (z <= 0 || 2 * (tr.taus[j] - tr.taus[j - 1]) >= z)
                continue;
            const auto i = tr.zs[j] - z;
            if (i > 0) ++c.positive;
            else if (i < 0) ++c.negative;
            else ++c.zero;
        }
    return c;
}

void write_coalescence_csv(std::ostream& os, const CoalescenceTrace& trace, std::size_t replica, bool header) {
    if (header)
        os << "replica,q,j,tau_j,Z_j,absorbed\n";
    for (std::size_t j = 0; j < trace.taus.size(); ++j)
        os << replica << ',' << trace.q << ',' << j << ',' << trace.taus[j] << ',' << trace.zs[j] << ','
           << (trace.zs[j] == 0 ? 1 : 0) << '\n';
}

} // namespace fppgeo
