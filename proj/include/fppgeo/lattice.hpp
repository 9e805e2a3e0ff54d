#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace fppgeo {

// Allocator that leaves trivially constructible elements uninitialized on
// resize; large per-site arrays are always overwritten right after.
template <class T, class A = std::allocator<T>>
class default_init_allocator : public A {
public:
    using A::A;
    template <class U>
    struct rebind {
        using other = default_init_allocator<U, typename std::allocator_traits<A>::template rebind_alloc<U>>;
    };
    template <class U>
    void construct(U* ptr) noexcept(std::is_nothrow_default_constructible_v<U>) {
        ::new (static_cast<void*>(ptr)) U;
    }
    template <class U, class... Args>
    void construct(U* ptr, Args&&... args) {
        std::allocator_traits<A>::construct(static_cast<A&>(*this), ptr, std::forward<Args>(args)...);
    }
};

template <class T>
using site_vector = std::vector<T, default_init_allocator<T>>;

struct Site {
    std::int32_t x = 0;
    std::int32_t t = 0;

    friend constexpr bool operator==(Site, Site) = default;
    friend constexpr auto operator<=>(Site, Site) = default;

    friend constexpr Site operator+(Site a, Site b) { return {a.x + b.x, a.t + b.t}; }
    friend constexpr Site operator-(Site a, Site b) { return {a.x - b.x, a.t - b.t}; }
};

constexpr std::int64_t l1_norm(Site s) {
    return std::int64_t{s.x < 0 ? -s.x : s.x} + std::int64_t{s.t < 0 ? -s.t : s.t};
}
constexpr std::int64_t l1_distance(Site a, Site b) { return l1_norm(a - b); }
inline double arg(Site s) { return std::atan2(double(s.t), double(s.x)); }

// Level of a site along the oriented direction (anti-diagonal index).
constexpr std::int64_t level(Site s) { return std::int64_t{s.x} + s.t; }

enum class Orientation { Forward, Anti };

// Oriented edges leaving a site in the forward orientation.
enum class Step { Right, Up };

// The two neighbours reachable by one oriented step. For the anti orientation
// "first" is (x-1,t), the image of (x+1,t) under point reflection.
constexpr Site first_neighbor(Site s, Orientation o) {
    return o == Orientation::Forward ? Site{s.x + 1, s.t} : Site{s.x - 1, s.t};
}
constexpr Site second_neighbor(Site s, Orientation o) {
    return o == Orientation::Forward ? Site{s.x, s.t + 1} : Site{s.x, s.t - 1};
}

struct Window {
    std::int32_t x_min = 0;
    std::int32_t x_max = 0;
    std::int32_t t_min = 0;
    std::int32_t t_max = 0;

    // Throws Error(Config) on a degenerate rectangle.
    static Window make(std::int32_t x_min, std::int32_t x_max, std::int32_t t_min, std::int32_t t_max);
    static Window square(std::int32_t side) { return make(0, side - 1, 0, side - 1); }

    std::int32_t width() const { return x_max - x_min + 1; }
    std::int32_t height() const { return t_max - t_min + 1; }
    std::size_t area() const { return std::size_t(width()) * std::size_t(height()); }

    bool contains(Site s) const {
        return s.x >= x_min && s.x <= x_max && s.t >= t_min && s.t <= t_max;
    }
    std::size_t index(Site s) const {
        return std::size_t(s.t - t_min) * std::size_t(width()) + std::size_t(s.x - x_min);
    }
    Site site_at(std::size_t i) const {
        const auto w = std::size_t(width());
        return {x_min + std::int32_t(i % w), t_min + std::int32_t(i / w)};
    }

    // L1 distance to the boundary lines a path of the given orientation runs into.
    std::int32_t far_distance(Site s, Orientation o = Orientation::Forward) const {
        return o == Orientation::Forward ? std::min(x_max - s.x, t_max - s.t)
                                         : std::min(s.x - x_min, s.t - t_min);
    }

    friend bool operator==(const Window&, const Window&) = default;
};

class ExcessDistribution {
public:
    enum class Kind { Atom, ShiftedExponential, ShiftedUniform };

    static ExcessDistribution atom(double value);
    static ExcessDistribution shifted_exponential(double rate);
    static ExcessDistribution shifted_uniform(double lo, double hi);
    // "atom:2", "exp:1.5", "uniform:1.5:3".
    static ExcessDistribution parse(const std::string& text);

    Kind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }

    // Maps u in (0,1) to a passage time strictly greater than 1.
    double sample(double u) const {
        switch (kind_) {
        case Kind::Atom: return a_;
        case Kind::ShiftedExponential: return std::max(1.0 - std::log1p(-u) / a_, 1.0 + 0x1.0p-52);
        case Kind::ShiftedUniform: return a_ + (b_ - a_) * u;
        }
        return a_;
    }
    // Smallest possible value of (weight - 1).
    double min_gap() const;
    std::string to_string() const;

    friend bool operator==(const ExcessDistribution&, const ExcessDistribution&) = default;

private:
    ExcessDistribution(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}
    Kind kind_;
    double a_;
    double b_;
};

// Passage times of the two oriented edges leaving every site of a window,
// plus the auxiliary uniforms used for tie-breaking. Immutable once built.
// Edges leaving the window are stored but never consulted.
class PassageField {
public:
    static PassageField from_arrays(const Window& window, double p, const std::vector<double>& right,
                                    const std::vector<double>& up, const std::vector<double>& uniforms,
                                    ExcessDistribution excess = ExcessDistribution::atom(2.0),
                                    std::uint64_t seed = 0);

    const Window& window() const { return window_; }
    double p() const { return p_; }
    const ExcessDistribution& excess() const { return excess_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t uniform_seed() const { return uniform_seed_; }

    std::span<const double> weights_right() const { return right_; }
    std::span<const double> weights_up() const { return up_; }
    std::span<const double> uniforms() const { return uniforms_; }

    // Bit 0: right edge open, bit 1: up edge open.
    std::span<const std::uint8_t> open_mask() const { return open_mask_; }

    double weight(std::size_t index, Step s) const { return s == Step::Right ? right_[index] : up_[index]; }
    double uniform(Site s) const { return uniforms_[window_.index(s)]; }
    bool open(std::size_t index, Step s) const { return (open_mask_[index] >> int(s)) & 1U; }

    // Bounds-checked weight of the edge from `from` in direction `s`; both
    // endpoints must lie in the window.
    double edge_weight(Site from, Step s) const;

    // Weight of the undirected edge between 4-neighbours a and b.
    double edge_between(Site a, Site b) const;

private:
    friend PassageField sample_field(const Window&, double, const ExcessDistribution&, std::uint64_t,
                                     std::uint64_t);
    PassageField(const Window& w, double p, ExcessDistribution excess, std::uint64_t seed,
                 std::uint64_t useed)
        : window_(w), p_(p), excess_(excess), seed_(seed), uniform_seed_(useed) {}

    Window window_;
    double p_;
    ExcessDistribution excess_;
    std::uint64_t seed_;
    std::uint64_t uniform_seed_;
    site_vector<double> right_;
    site_vector<double> up_;
    site_vector<double> uniforms_;
    site_vector<std::uint8_t> open_mask_;
};

// Each oriented edge weighs exactly 1 with probability p, otherwise a draw
// from `excess`. Weights come from stream 0 of `seed`, uniforms from stream 1
// of `uniform_seed`. Openness of an edge is decided by comparing one fixed
// uniform with p, so raising p only opens edges.
PassageField sample_field(const Window& window, double p, const ExcessDistribution& excess,
                          std::uint64_t seed, std::uint64_t uniform_seed);
inline PassageField sample_field(const Window& window, double p, const ExcessDistribution& excess,
                                 std::uint64_t seed) {
    return sample_field(window, p, excess, seed, seed);
}

bool is_open(const PassageField& field, Site from, Step dir);

// Oriented edge from `s` to its first/second neighbour in orientation `o`.
bool oriented_open(const PassageField& field, Site s, Orientation o, bool first);

// First line: JSON header. Then one "x t w_right w_up u" line per site.
void write_field_snapshot(std::ostream& os, const PassageField& field);
PassageField read_field_snapshot(std::istream& is);

} // namespace fppgeo
