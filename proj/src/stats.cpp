#include "fppgeo/stats.hpp"

#include "fppgeo/error.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>

namespace fppgeo {

namespace {

struct SurvivalFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

// counts[n] = #{X == n}; fits log survival for n >= 1 while #{X >= n} >= 10.
SurvivalFit fit_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    std::vector<double> xs, ys;
    std::size_t at_least = total;
    for (std::size_t n = 1; n < counts.size() + 1 && at_least >= 10; ++n) {
        xs.push_back(double(n));
        ys.push_back(std::log(double(at_least) / double(total)));
        if (n < counts.size())
            at_least -= counts[n];
    }
    SurvivalFit f;
    f.points = xs.size();
    if (xs.size() < 2)
        return f;
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

std::vector<std::size_t> histogram(std::span<const std::int64_t> samples, std::int64_t max_value) {
    std::vector<std::size_t> counts(std::size_t(max_value) + 1, 0);
    for (auto v : samples)
        ++counts[std::size_t(v)];
    return counts;
}

double chi_square_pvalue(double stat, double dof) {
    if (dof < 1)
        return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

} // namespace

TailFit fit_survival_tail(std::span<const std::int64_t> samples, const TailFitOptions& options) {
    if (samples.size() < options.min_samples || samples.empty())
        throw Error(ErrorCode::InsufficientSamples,
                    "tail fit needs at least " + std::to_string(options.min_samples) + " samples");
    std::int64_t max_value = 0;
    for (auto v : samples) {
        if (v < 1)
            throw Error(ErrorCode::Config, "tail samples must be positive integers");
        max_value = std::max(max_value, v);
    }
    const auto counts = histogram(samples, max_value);
    const auto fit = fit_counts(counts, samples.size());

    TailFit out;
    out.sample_size = samples.size();
    out.fit_points = fit.points;
    out.degenerate = fit.points < 2;
    if (out.degenerate)
        return out;
    out.rate = -fit.slope;
    out.prefactor = std::exp(fit.intercept);

    // Goodness: observed point masses against the geometric law on {1, 2, ...}
    // with the maximum likelihood rate.
    const double total = double(samples.size());
    double sum = 0.0;
    for (auto v : samples)
        sum += double(v);
    const double mean_x = sum / total;
    const double mle = std::log(mean_x / (mean_x - 1.0));
    const auto fitted = [&](double n) { return std::exp(-mle * (n - 1.0)); };
    double chi2 = 0.0;
    std::size_t bins = 0;
    std::size_t tail_observed = samples.size();
    std::size_t n = 1;
    for (; n < fit.points; ++n) {
        const double expected = total * (fitted(double(n)) - fitted(double(n + 1)));
        if (expected >= 5.0) {
            const double o = double(counts[n]);
            chi2 += (o - expected) * (o - expected) / expected;
            ++bins;
        }
        tail_observed -= counts[n];
    }
    const double tail_expected = total * fitted(double(n));
    if (tail_expected >= 5.0) {
        chi2 += (double(tail_observed) - tail_expected) * (double(tail_observed) - tail_expected) / tail_expected;
        ++bins;
    }
    out.goodness = chi_square_pvalue(chi2, double(bins) - 2.0);

    if (options.resamples > 0) {
        std::mt19937_64 gen(options.seed);
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        std::vector<double> rates;
        rates.reserve(options.resamples);
        std::vector<std::size_t> c(counts.size());
        for (std::size_t b = 0; b < options.resamples; ++b) {
            std::fill(c.begin(), c.end(), 0);
            for (std::size_t i = 0; i < samples.size(); ++i)
                ++c[std::size_t(samples[pick(gen)])];
            const auto f = fit_counts(c, samples.size());
            if (f.points >= 2)
                rates.push_back(-f.slope);
        }
        if (rates.size() >= 2) {
            out.rate_stderr = sample_stddev(rates);
            const double a = (1.0 - options.level) / 2.0;
            out.rate_ci_low = quantile(rates, a);
            out.rate_ci_high = quantile(rates, 1.0 - a);
        }
    }
    return out;
}

std::vector<RenewalSample> renewal_samples(const QPathTrace& trace) {
    std::vector<RenewalSample> out;
    out.reserve(trace.regenerations.size());
    std::int64_t prev = 0;
    for (const auto& r : trace.regenerations) {
        out.push_back({r.time - prev, r.increment});
        prev = r.time;
    }
    return out;
}

RenewalSums pool(std::span<const RenewalSums> groups) {
    RenewalSums s;
    for (const auto& g : groups)
        s.add(g);
    return s;
}

namespace {

double angle_of(const RenewalSums& s) { return std::atan2(s.t, s.x); }

DirectionEstimate direction_from_groups(std::span<const RenewalSums> groups, double q,
                                        const DirectionOptions& options) {
    const auto all = pool(groups);
    if (all.count < options.min_regenerations)
        throw Error(ErrorCode::InsufficientSamples,
                    "direction estimate needs at least " + std::to_string(options.min_regenerations) +
                        " regenerations");
    if (groups.size() < 2)
        throw Error(ErrorCode::InsufficientSamples, "direction interval needs at least two groups");
    DirectionEstimate e;
    e.q = q;
    e.n_regenerations = all.count;
    e.mean_T = all.time / double(all.count);
    e.mean_Y = {all.x / double(all.count), all.t / double(all.count)};
    e.theta_hat = std::atan2(e.mean_Y.t, e.mean_Y.x);

    const double a = (1.0 - options.level) / 2.0;
    if (options.method == CiMethod::Bootstrap) {
        const auto boot = bootstrap_groups(groups, options.resamples, options.seed, angle_of);
        e.ci_low = quantile(boot, a);
        e.ci_high = quantile(boot, 1.0 - a);
        e.ci_halfwidth = (e.ci_high - e.ci_low) / 2.0;
    } else {
        // Linearization of the ratio-of-sums mean followed by the gradient of atan2.
        const double g = double(groups.size());
        const double nbar = double(all.count) / g;
        double vxx = 0, vxt = 0, vtt = 0;
        for (const auto& grp : groups) {
            const double ex = (grp.x - double(grp.count) * e.mean_Y.x) / nbar;
            const double et = (grp.t - double(grp.count) * e.mean_Y.t) / nbar;
            vxx += ex * ex;
            vxt += ex * et;
            vtt += et * et;
        }
        const double scale = 1.0 / (g * (g - 1.0));
        vxx *= scale;
        vxt *= scale;
        vtt *= scale;
        const double r2 = e.mean_Y.x * e.mean_Y.x + e.mean_Y.t * e.mean_Y.t;
        const double dx = -e.mean_Y.t / r2;
        const double dt = e.mean_Y.x / r2;
        const double var = dx * dx * vxx + 2 * dx * dt * vxt + dt * dt * vtt;
        e.ci_halfwidth = normal_quantile(1.0 - a) * std::sqrt(std::max(var, 0.0));
        e.ci_low = e.theta_hat - e.ci_halfwidth;
        e.ci_high = e.theta_hat + e.ci_halfwidth;
    }
    return e;
}

} // namespace

DirectionEstimate estimate_direction(std::span<const RenewalSample> samples, double q,
                                     const DirectionOptions& options) {
    std::vector<RenewalSums> groups(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        groups[i].add(samples[i]);
    return direction_from_groups(groups, q, options);
}

DirectionEstimate estimate_direction_grouped(std::span<const RenewalSums> groups, double q,
                                             const DirectionOptions& options) {
    return direction_from_groups(groups, q, options);
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty())
        throw Error(ErrorCode::InsufficientSamples, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = prob * double(values.size() - 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - double(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double mean(std::span<const double> values) {
    if (values.empty())
        return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2)
        return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values)
        ss += (v - m) * (v - m);
    return std::sqrt(ss / double(values.size() - 1));
}

double normal_quantile(double prob) {
    return boost::math::quantile(boost::math::normal(), prob);
}

double sign_test_pvalue(std::size_t positives, std::size_t negatives) {
    const auto n = positives + negatives;
    if (n == 0)
        return 1.0;
    const auto k = std::min(positives, negatives);
    const boost::math::binomial dist(double(n), 0.5);
    const double tail = boost::math::cdf(dist, double(k));
    return std::min(1.0, 2.0 * tail);
}

} // namespace fppgeo
