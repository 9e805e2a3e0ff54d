#include "fppgeo/lattice.hpp"

#include "fppgeo/error.hpp"
#include "fppgeo/rng.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>
#include "json.hpp"
#include <ostream>
#include <sstream>

namespace fppgeo {

Window Window::make(std::int32_t x_min, std::int32_t x_max, std::int32_t t_min, std::int32_t t_max) {
    if (x_min > x_max || t_min > t_max)
        throw Error(ErrorCode::Config, "window bounds must satisfy x_min <= x_max and t_min <= t_max");
    return Window{x_min, x_max, t_min, t_max};
}

ExcessDistribution ExcessDistribution::atom(double value) {
    if (!(value > 1.0) || !std::isfinite(value))
        throw Error(ErrorCode::Config, "atom value must be finite and > 1");
    return {Kind::Atom, value, 0.0};
}

ExcessDistribution ExcessDistribution::shifted_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(ErrorCode::Config, "exponential rate must be finite and > 0");
    return {Kind::ShiftedExponential, rate, 0.0};
}

ExcessDistribution ExcessDistribution::shifted_uniform(double lo, double hi) {
    if (!(lo > 1.0) || !(hi > lo) || !std::isfinite(hi))
        throw Error(ErrorCode::Config, "shifted uniform needs 1 < lo < hi");
    return {Kind::ShiftedUniform, lo, hi};
}

namespace {

double parse_double(const std::string& s, const std::string& context) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw Error(ErrorCode::Config, "cannot parse number '" + s + "' in " + context);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    return out;
}

} // namespace

ExcessDistribution ExcessDistribution::parse(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "atom")
        return atom(parse_double(parts[1], text));
    if (parts.size() == 2 && parts[0] == "exp")
        return shifted_exponential(parse_double(parts[1], text));
    if (parts.size() == 3 && parts[0] == "uniform")
        return shifted_uniform(parse_double(parts[1], text), parse_double(parts[2], text));
    throw Error(ErrorCode::Config, "unknown excess distribution '" + text +
                                       "' (expected atom:A, exp:RATE or uniform:LO:HI)");
}

double ExcessDistribution::min_gap() const {
    switch (kind_) {
    case Kind::Atom: return a_ - 1.0;
    case Kind::ShiftedExponential: return std::numeric_limits<double>::epsilon();
    case Kind::ShiftedUniform: return a_ - 1.0;
    }
    return 0.0;
}

std::string ExcessDistribution::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case Kind::Atom: os << "atom:" << a_; break;
    case Kind::ShiftedExponential: os << "exp:" << a_; break;
    case Kind::ShiftedUniform: os << "uniform:" << a_ << ':' << b_; break;
    }
    return os.str();
}

PassageField PassageField::from_arrays(const Window& window, double p, const std::vector<double>& right,
                                       const std::vector<double>& up, const std::vector<double>& uniforms,
                                       ExcessDistribution excess, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw Error(ErrorCode::Config, "p must lie in (0, 1]");
    const auto n = window.area();
    if (right.size() != n || up.size() != n || uniforms.size() != n)
        throw Error(ErrorCode::Config, "field arrays must have one entry per window site");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(right[i] >= 1.0) || !(up[i] >= 1.0))
            throw Error(ErrorCode::Config, "passage times must be >= 1");
        if (!(uniforms[i] >= 0.0 && uniforms[i] < 1.0))
            throw Error(ErrorCode::Config, "uniforms must lie in [0, 1)");
    }
    PassageField f(window, p, excess, seed, seed);
    f.right_.assign(right.begin(), right.end());
    f.up_.assign(up.begin(), up.end());
    f.uniforms_.assign(uniforms.begin(), uniforms.end());
    f.open_mask_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        f.open_mask_[i] = std::uint8_t((f.right_[i] == 1.0 ? 1 : 0) | (f.up_[i] == 1.0 ? 2 : 0));
    return f;
}

double PassageField::edge_weight(Site from, Step s) const {
    const Site to = s == Step::Right ? Site{from.x + 1, from.t} : Site{from.x, from.t + 1};
    if (!window_.contains(from) || !window_.contains(to))
        throw Error(ErrorCode::Bounds, "edge leaves the window");
    return weight(window_.index(from), s);
}

double PassageField::edge_between(Site a, Site b) const {
    const Site d = b - a;
    if (d == Site{1, 0}) return edge_weight(a, Step::Right);
    if (d == Site{-1, 0}) return edge_weight(b, Step::Right);
    if (d == Site{0, 1}) return edge_weight(a, Step::Up);
    if (d == Site{0, -1}) return edge_weight(b, Step::Up);
    throw Error(ErrorCode::Bounds, "sites are not lattice neighbours");
}

PassageField sample_field(const Window& window, double p, const ExcessDistribution& excess,
                          std::uint64_t seed, std::uint64_t uniform_seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw Error(ErrorCode::Config, "p must lie in (0, 1]");
    PassageField f(window, p, excess, seed, uniform_seed);
    const auto n = window.area();
    f.right_.resize(n);
    f.up_.resize(n);
    f.uniforms_.resize(n);
    f.open_mask_.resize(n);

    const auto weight_key = rng::stream_key(seed, 0);
    const auto uniform_key = rng::stream_key(uniform_seed, 1);
    const bool atom = excess.kind() == ExcessDistribution::Kind::Atom;
    const double atom_value = excess.a();
    double* right = f.right_.data();
    double* up = f.up_.data();
    double* uni = f.uniforms_.data();
    std::uint8_t* mask = f.open_mask_.data();
    std::size_t i = 0;
    for (std::int32_t t = window.t_min; t <= window.t_max; ++t) {
        for (std::int32_t x = window.x_min; x <= window.x_max; ++x, ++i) {
            const auto code = rng::site_code(x, t);
            // The site hash itself decides openness of the right edge; slot 1
            // the up edge; slots 2/3 the excess values of closed edges.
            const auto h = rng::keyed(weight_key, code);
            const auto hu = rng::slot_hash(h, 1);
            const bool right_open = rng::to_unit(h) < p;
            const bool up_open = rng::to_unit(hu) < p;
            if (atom) {
                right[i] = right_open ? 1.0 : atom_value;
                up[i] = up_open ? 1.0 : atom_value;
            } else {
                right[i] = right_open ? 1.0 : excess.sample(rng::to_open_unit(rng::slot_hash(h, 2)));
                up[i] = up_open ? 1.0 : excess.sample(rng::to_open_unit(rng::slot_hash(h, 3)));
            }
            mask[i] = std::uint8_t(int(right_open) | (int(up_open) << 1));
            uni[i] = rng::to_unit(rng::keyed(uniform_key, code));
        }
    }
    return f;
}

bool is_open(const PassageField& field, Site from, Step dir) {
    return field.edge_weight(from, dir) == 1.0;
}

bool oriented_open(const PassageField& field, Site s, Orientation o, bool first) {
    const auto& w = field.window();
    if (o == Orientation::Forward)
        return field.open(w.index(s), first ? Step::Right : Step::Up);
    const Site from = first ? Site{s.x - 1, s.t} : Site{s.x, s.t - 1};
    return field.open(w.index(from), first ? Step::Right : Step::Up);
}

void write_field_snapshot(std::ostream& os, const PassageField& field) {
    const auto& w = field.window();
    nlohmann::json header = {
        {"window", {{"x_min", w.x_min}, {"x_max", w.x_max}, {"t_min", w.t_min}, {"t_max", w.t_max}}},
        {"p", field.p()},
        {"excess", field.excess().to_string()},
        {"seed", field.seed()},
        {"uniform_seed", field.uniform_seed()},
    };
    os << header.dump() << '\n';
    const auto r = field.weights_right();
    const auto u = field.weights_up();
    const auto un = field.uniforms();
    char buf[160];
    for (std::size_t i = 0; i < w.area(); ++i) {
        const Site s = w.site_at(i);
        std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g\n", s.x, s.t, r[i], u[i], un[i]);
        os << buf;
    }
}

PassageField read_field_snapshot(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw Error(ErrorCode::Io, "empty field snapshot");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("bad snapshot header: ") + e.what());
    }
    const auto& jw = header.at("window");
    const auto w = Window::make(jw.at("x_min"), jw.at("x_max"), jw.at("t_min"), jw.at("t_max"));
    const auto n = w.area();
    std::vector<double> r(n), u(n), un(n);
    std::vector<char> seen(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        Site s;
        double a, b, c;
        if (!(is >> s.x >> s.t >> a >> b >> c))
            throw Error(ErrorCode::Io, "truncated field snapshot at site line " + std::to_string(k + 1));
        if (!w.contains(s))
            throw Error(ErrorCode::Io, "snapshot site outside its window");
        const auto i = w.index(s);
        r[i] = a;
        u[i] = b;
        un[i] = c;
        seen[i] = 1;
    }
    for (char c : seen)
        if (!c) throw Error(ErrorCode::Io, "snapshot does not cover the window");
    auto f = PassageField::from_arrays(w, header.at("p"), r, u, un,
                                       ExcessDistribution::parse(header.at("excess")),
                                       header.at("seed").get<std::uint64_t>());
    return f;
}

} // namespace fppgeo
