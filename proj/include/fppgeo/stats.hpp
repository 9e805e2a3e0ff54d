#pragma once

#include "fppgeo/lattice.hpp"
#include "fppgeo/qpath.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fppgeo {

struct Vec2 {
    double x = 0.0;
    double t = 0.0;
};

// Exponential tail fit log P(X >= n) ~ log(prefactor) - rate * n.
struct TailFit {
    double rate = 0.0;
    double prefactor = 0.0;
    std::size_t sample_size = 0;
    double goodness = 0.0;   // chi-square p-value of the fitted tail
    std::size_t fit_points = 0;
    bool degenerate = false; // fewer than two survival points above the floor
    double rate_stderr = 0.0;  // bootstrap standard deviation
    double rate_ci_low = 0.0;  // bootstrap percentile interval
    double rate_ci_high = 0.0;

    bool accepted() const { return !degenerate && rate > 0.0; }
};

struct TailFitOptions {
    std::size_t min_samples = 1000;
    std::size_t resamples = 500;
    double level = 0.95;
    std::uint64_t seed = 0x7a11;
};

// Least squares on the log empirical survival over the range where the
// survival count is at least 10. Throws Error(InsufficientSamples).
TailFit fit_survival_tail(std::span<const std::int64_t> samples, const TailFitOptions& options = {});

inline TailFit fit_regeneration_tail(std::span<const std::int64_t> first_regeneration_times,
                                     const TailFitOptions& options = {}) {
    return fit_survival_tail(first_regeneration_times, options);
}

// (T_j - T_{j-1}, Y_j) pairs of a trace.
struct RenewalSample {
    std::int64_t interval = 0;
    Site increment{};
};
std::vector<RenewalSample> renewal_samples(const QPathTrace& trace);

// Sums of renewal samples belonging to one independent unit (a replica).
struct RenewalSums {
    double time = 0.0;
    double x = 0.0;
    double t = 0.0;
    std::size_t count = 0;

    void add(const RenewalSample& s) {
        time += double(s.interval);
        x += s.increment.x;
        t += s.increment.t;
        ++count;
    }
    void add(const RenewalSums& o) {
        time += o.time;
        x += o.x;
        t += o.t;
        count += o.count;
    }
};

enum class CiMethod { Bootstrap, Delta };

struct DirectionOptions {
    CiMethod method = CiMethod::Bootstrap;
    std::size_t resamples = 2000;
    double level = 0.95;
    std::size_t min_regenerations = 100;
    std::uint64_t seed = 0xd1ec;
};

struct DirectionEstimate {
    double q = 0.0;
    double theta_hat = 0.0;
    double mean_T = 0.0;
    Vec2 mean_Y{};
    double ci_halfwidth = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_regenerations = 0;
};

// theta_hat = arg of the sample mean of Y. Samples are treated as i.i.d.
DirectionEstimate estimate_direction(std::span<const RenewalSample> samples, double q,
                                     const DirectionOptions& options = {});
// Same estimator with the interval computed by resampling whole groups.
DirectionEstimate estimate_direction_grouped(std::span<const RenewalSums> groups, double q,
                                             const DirectionOptions& options = {});

// Percentile bootstrap over groups: stat(pooled sums) for each resample.
template <class Stat>
std::vector<double> bootstrap_groups(std::span<const RenewalSums> groups, std::size_t resamples,
                                     std::uint64_t seed, Stat stat) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
    std::vector<double> out;
    out.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        RenewalSums pooled;
        for (std::size_t i = 0; i < groups.size(); ++i)
            pooled.add(groups[pick(gen)]);
        out.push_back(stat(pooled));
    }
    return out;
}

RenewalSums pool(std::span<const RenewalSums> groups);

// Linear-interpolated sample quantile, prob in [0, 1]. Sorts a copy.
double quantile(std::vector<double> values, double prob);
double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);
double normal_quantile(double prob);
// Two-sided exact binomial test of P(success) = 1/2.
double sign_test_pvalue(std::size_t positives, std::size_t negatives);

} // namespace fppgeo
