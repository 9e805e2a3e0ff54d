#include "fppgeo/qpath.hpp"

#include "fppgeo/error.hpp"

#include <ostream>

namespace fppgeo {

Site select_step(const PassageField& field, const LevelTable& table, Site site, std::int64_t k, double q) {
    const auto m = maximizer_set(field, table, site, k);
    if (m.empty())
        throw Error(ErrorCode::EmptyMaximizerSet, "q-rule invoked on a site without maximizers");
    if (m.has_first && (!m.has_second || field.uniform(site) <= q))
        return m.first;
    return m.second;
}

std::vector<Site> build_gamma_k(const PassageField& field, const LevelTable& table, Site origin,
                                double q, std::int64_t k) {
    if (k < 1)
        throw Error(ErrorCode::Config, "gamma_k needs k >= 1");
    if (truncated_length(table, origin, k) < k)
        throw Error(ErrorCode::InsufficientLength, "origin has no oriented open path of length k");
    std::vector<Site> path;
    path.reserve(std::size_t(k) + 1);
    path.push_back(origin);
    for (std::int64_t j = 0; j < k; ++j) {
        const auto m = maximizer_set(field, table, path.back(), k - j);
        if (m.empty())
            throw Error(ErrorCode::BoundaryReached, "gamma_k ran into the window boundary");
        path.push_back(select_step(field, table, path.back(), k - j, q));
    }
    return path;
}

QPathBuilder::QPathBuilder(const PassageField& field, const LevelTable& table, Site origin, double q,
                           TraceOptions options)
    : field_(field), table_(table), options_(options) {
    if (!(q >= 0.0 && q <= 1.0))
        throw Error(ErrorCode::Config, "q must lie in [0, 1]");
    if (perc_status(table, origin, options.escape_margin).kind != PercStatus::Kind::Escapes)
        throw Error(ErrorCode::OriginNotPercolating, "q-path origin lacks Escapes status");
    trace_.origin = origin;
    trace_.q = q;
    trace_.orientation = table.orientation();
    trace_.steps.push_back(origin);
}

bool QPathBuilder::safe(Site s) const {
    return table_.window().far_distance(s, table_.orientation()) >= options_.escape_margin;
}

bool QPathBuilder::advance() {
    if (finished_)
        return false;
    if (options_.max_steps >= 0 && trace_.stabilized_upto >= options_.max_steps) {
        finished_ = true;
        return false;
    }
    const Site base = trace_.steps.back();
    const auto& w = table_.window();
    for (std::int64_t k = 1;; ++k) {
        scratch_.clear();
        Site cur = base;
        for (std::int64_t j = 0; j < k; ++j) {
            cur = select_step(field_, table_, cur, k - j, trace_.q);
            if (!safe(cur)) {
                trace_.censored = true;
                finished_ = true;
                return false;
            }
            scratch_.push_back(cur);
        }
        if (table_[w.index(cur)] == LevelTable::escapes) {
            trace_.steps.insert(trace_.steps.end(), scratch_.begin(), scratch_.end());
            trace_.stabilized_upto += k;
            trace_.regenerations.push_back({trace_.stabilized_upto, cur - base});
            return true;
        }
    }
}

QPathTrace stabilized_path(const PassageField& field, const LevelTable& table, Site origin, double q,
                           TraceOptions options) {
    QPathBuilder b(field, table, origin, q, options);
    while (b.advance()) {
    }
    return std::move(b).take();
}

void write_regeneration_csv(std::ostream& os, const QPathTrace& trace, std::size_t replica, bool header) {
    if (header)
        os << "replica,q,j,T_j,Y_j_x,Y_j_t,censored\n";
    for (std::size_t j = 0; j < trace.regenerations.size(); ++j) {
        const auto& r = trace.regenerations[j];
        os << replica << ',' << trace.q << ',' << (j + 1) << ',' << r.time << ',' << r.increment.x << ','
           << r.increment.t << ',' << (trace.censored ? 1 : 0) << '\n';
    }
}

} // namespace fppgeo
