#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fppgeo/brute.hpp"
#include "fppgeo/coalescence.hpp"
#include "fppgeo/cone.hpp"
#include "fppgeo/error.hpp"
#include "fppgeo/experiment.hpp"
#include "fppgeo/geodesic.hpp"
#include "fppgeo/percolation.hpp"
#include "fppgeo/qpath.hpp"
#include "fppgeo/stats.hpp"

namespace py = pybind11;
using namespace fppgeo;

namespace {

using SitePair = std::pair<std::int32_t, std::int32_t>;

Site site(SitePair s) { return {s.first, s.second}; }

py::array_t<std::int32_t> sites_array(const std::vector<Site>& sites) {
    py::array_t<std::int32_t> out({py::ssize_t(sites.size()), py::ssize_t(2)});
    auto r = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        r(i, 0) = sites[i].x;
        r(i, 1) = sites[i].t;
    }
    return out;
}

template <class T>
py::array_t<T> grid(const Window& w, std::span<const T> values) {
    py::array_t<T> out({py::ssize_t(w.height()), py::ssize_t(w.width())});
    std::copy(values.begin(), values.end(), out.mutable_data());
    return out;
}

py::dict trace_dict(const QPathTrace& tr) {
    py::list regs;
    for (const auto& r : tr.regenerations) regs.append(py::make_tuple(r.time, r.increment.x, r.increment.t));
    py::dict d;
    d["origin"] = py::make_tuple(tr.origin.x, tr.origin.t);
    d["q"] = tr.q;
    d["steps"] = sites_array(tr.steps);
    d["stabilized_upto"] = tr.stabilized_upto;
    d["regenerations"] = regs;
    d["censored"] = tr.censored;
    return d;
}

py::object json_to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

struct Tables {
    LevelTable forward;
    LevelTable anti;
};

ConeOptions cone_options(std::int32_t side, std::int32_t margin, std::int64_t depth, std::size_t threads,
                         std::size_t min_replicas, std::size_t resamples) {
    ConeOptions o;
    o.window = Window::square(side);
    o.trace = {margin, depth};
    o.threads = threads;
    o.min_replicas = min_replicas;
    o.resamples = resamples;
    return o;
}

} // namespace

PYBIND11_MODULE(_fppgeo, m) {
    m.doc() = "First passage percolation geodesics on Z^2 built from oriented percolation paths.";

    static py::exception<Error> error(m, "FppgeoError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = error;
            py::object inst = exc(e.what());
            inst.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error.ptr(), inst.ptr());
        }
    });

    m.attr("ESCAPES") = LevelTable::escapes;

    py::class_<Window>(m, "Window")
        .def(py::init(&Window::make), py::arg("x_min"), py::arg("x_max"), py::arg("t_min"), py::arg("t_max"))
        .def_static("square", &Window::square)
        .def_readonly("x_min", &Window::x_min)
        .def_readonly("x_max", &Window::x_max)
        .def_readonly("t_min", &Window::t_min)
        .def_readonly("t_max", &Window::t_max)
        .def_property_readonly("width", &Window::width)
        .def_property_readonly("height", &Window::height)
        .def("__repr__", [](const Window& w) {
            return "Window(" + std::to_string(w.x_min) + ", " + std::to_string(w.x_max) + ", " +
                   std::to_string(w.t_min) + ", " + std::to_string(w.t_max) + ")";
        });

    py::class_<ExcessDistribution>(m, "Excess")
        .def_static("atom", &ExcessDistribution::atom)
        .def_static("shifted_exponential", &ExcessDistribution::shifted_exponential)
        .def_static("shifted_uniform", &ExcessDistribution::shifted_uniform)
        .def_static("parse", &ExcessDistribution::parse)
        .def_property_readonly("min_gap", &ExcessDistribution::min_gap)
        .def("__str__", &ExcessDistribution::to_string)
        .def("__eq__", [](const ExcessDistribution& a, const ExcessDistribution& b) { return a == b; });

    py::class_<PassageField>(m, "Field")
        .def_property_readonly("window", &PassageField::window)
        .def_property_readonly("p", &PassageField::p)
        .def_property_readonly("seed", &PassageField::seed)
        .def_property_readonly("right", [](const PassageField& f) { return grid(f.window(), f.weights_right()); })
        .def_property_readonly("up", [](const PassageField& f) { return grid(f.window(), f.weights_up()); })
        .def_property_readonly("uniforms", [](const PassageField& f) { return grid(f.window(), f.uniforms()); })
        .def("edge_between", [](const PassageField& f, SitePair a, SitePair b) { return f.edge_between(site(a), site(b)); });

    m.def(
        "sample_field",
        [](const Window& w, double p, const ExcessDistribution& excess, std::uint64_t seed) {
            py::gil_scoped_release release;
            return sample_field(w, p, excess, seed);
        },
        py::arg("window"), py::arg("p"), py::arg("excess") = ExcessDistribution::atom(2.0), py::arg("seed") = 1);

    py::class_<Tables>(m, "LevelTables")
        .def(py::init([](const PassageField& f) {
                 py::gil_scoped_release release;
                 return Tables{level_table(f, Orientation::Forward), level_table(f, Orientation::Anti)};
             }),
             py::arg("field"))
        .def_property_readonly("forward", [](const Tables& t) { return grid(t.forward.window(), t.forward.values()); })
        .def_property_readonly("anti", [](const Tables& t) { return grid(t.anti.window(), t.anti.values()); })
        .def(
            "status",
            [](const Tables& t, SitePair s, std::int32_t margin, bool anti) {
                const auto st = perc_status(anti ? t.anti : t.forward, site(s), margin);
                const char* kind = st.kind == PercStatus::Kind::Escapes  ? "escapes"
                                   : st.kind == PercStatus::Kind::Finite ? "finite"
                                                                         : "censored";
                return py::make_tuple(kind, st.length);
            },
            py::arg("site"), py::arg("margin") = 64, py::arg("anti") = false)
        .def(
            "bidirectional",
            [](const Tables& t, std::int32_t margin) { return sites_array(bidirectional_scan(t.forward, t.anti, margin)); },
            py::arg("margin") = 64)
        .def(
            "bidirectional_counts",
            [](const Tables& t, std::int32_t margin) {
                const auto c = count_bidirectional(t.forward, t.anti, margin);
                py::dict d;
                d["interior"] = c.interior;
                d["forward"] = c.forward;
                d["anti"] = c.anti;
                d["bidirectional"] = c.bidirectional;
                return d;
            },
            py::arg("margin") = 64);

    m.def(
        "q_path",
        [](const PassageField& f, const Tables& t, SitePair origin, double q, std::int32_t margin,
           std::int64_t max_steps, bool anti) {
            QPathTrace tr;
            {
                py::gil_scoped_release release;
                tr = stabilized_path(f, anti ? t.anti : t.forward, site(origin), q, {margin, max_steps});
            }
            return trace_dict(tr);
        },
        py::arg("field"), py::arg("tables"), py::arg("origin"), py::arg("q") = 0.5, py::arg("margin") = 64,
        py::arg("max_steps") = 1000, py::arg("anti") = false);

    m.def(
        "gamma_k",
        [](const PassageField& f, const Tables& t, SitePair origin, double q, std::int64_t k) {
            return sites_array(build_gamma_k(f, t.forward, site(origin), q, k));
        },
        py::arg("field"), py::arg("tables"), py::arg("origin"), py::arg("q"), py::arg("k"));

    m.def(
        "joint_trace",
        [](const PassageField& f, const Tables& t, SitePair x, SitePair y, double q, std::int32_t margin,
           std::int64_t depth, bool stop_at_coalescence) {
            CoalescenceTrace tr;
            {
                py::gil_scoped_release release;
                tr = joint_trace(f, t.forward, site(x), site(y), q, {{margin, depth}, stop_at_coalescence});
            }
            py::dict d;
            d["taus"] = tr.taus;
            d["zs"] = tr.zs;
            d["n0"] = tr.n0 ? py::object(py::int_(*tr.n0)) : py::object(py::none());
            d["censored"] = tr.censored;
            d["depth"] = tr.depth;
            d["increment_bound"] = increment_bound_holds(tr);
            return d;
        },
        py::arg("field"), py::arg("tables"), py::arg("x"), py::arg("y"), py::arg("q") = 0.5,
        py::arg("margin") = 64, py::arg("depth") = 4000, py::arg("stop_at_coalescence") = true);

    m.def(
        "passage_time", [](const PassageField& f, SitePair x, SitePair y) { return passage_time(f, site(x), site(y)); },
        py::arg("field"), py::arg("x"), py::arg("y"));
    m.def(
        "geodesic",
        [](const PassageField& f, SitePair x, SitePair y) {
            const auto g = geodesic(f, site(x), site(y));
            return py::make_tuple(g.total_time, sites_array(g.sites));
        },
        py::arg("field"), py::arg("x"), py::arg("y"));
    m.def(
        "passage_times",
        [](const PassageField& f, SitePair source) {
            GeodesicOracle oracle(f);
            std::vector<Site> all;
            for (std::size_t i = 0; i < f.window().area(); ++i) all.push_back(f.window().site_at(i));
            const auto times = oracle.passage_times(site(source), all);
            return grid<double>(f.window(), times);
        },
        py::arg("field"), py::arg("source"));
    m.def(
        "enumerate_passage_times",
        [](const PassageField& f, SitePair source) {
            const auto times = enumerate_passage_times(f, site(source));
            return grid<double>(f.window(), times);
        },
        py::arg("field"), py::arg("source"));
    m.def(
        "is_oriented_geodesic",
        [](const PassageField& f, const std::vector<SitePair>& path) {
            std::vector<Site> s;
            for (auto p : path) s.push_back(site(p));
            return verify_oriented_geodesic(f, s);
        },
        py::arg("field"), py::arg("path"));

    m.def(
        "sandwich_geodesic",
        [](const PassageField& f, const Tables& t, SitePair origin, double q, std::int32_t margin,
           std::int64_t continuation, std::uint64_t check_seed) {
            SandwichOptions so;
            so.trace = {margin, -1};
            so.continuation_steps = continuation;
            so.check_seed = check_seed;
            SandwichResult r;
            {
                py::gil_scoped_release release;
                r = sandwich_geodesic(f, t.forward, t.anti, site(origin), q, so);
            }
            py::dict d;
            d["sites"] = sites_array(r.path.sites);
            d["total_time"] = r.path.total_time;
            d["bypass"] = r.bypass;
            d["splice"] = py::make_tuple(r.splice.x, r.splice.t);
            d["restricted_time"] = r.restricted_time;
            d["unrestricted_time"] = r.unrestricted_time;
            d["subpaths_checked"] = r.checks.checked;
            d["subpath_failures"] = r.checks.failures;
            if (r.region) {
                d["j_r"] = r.region->j_r;
                d["j_l"] = r.region->j_l;
                d["n0"] = r.region->n0;
                d["region_size"] = r.region->size;
            }
            return d;
        },
        py::arg("field"), py::arg("tables"), py::arg("origin"), py::arg("q") = 0.5, py::arg("margin") = 64,
        py::arg("continuation") = 300, py::arg("check_seed") = 0);

    m.def(
        "bi_infinite_geodesic",
        [](const PassageField& f, const Tables& t, SitePair s, double q, std::int32_t margin,
           std::int64_t continuation) {
            SandwichOptions so;
            so.trace = {margin, -1};
            so.continuation_steps = continuation;
            BiGeodesicResult r;
            {
                py::gil_scoped_release release;
                r = bi_infinite_geodesic(f, t.forward, t.anti, site(s), q, so);
            }
            py::dict d;
            d["sites"] = sites_array(r.path.sites);
            d["center_index"] = r.center_index;
            d["total_time"] = r.path.total_time;
            d["subpath_failures"] = r.checks.failures;
            return d;
        },
        py::arg("field"), py::arg("tables"), py::arg("site"), py::arg("q") = 0.5, py::arg("margin") = 64,
        py::arg("continuation") = 300);

    m.def(
        "estimate_alpha",
        [](double p, std::size_t replicas, std::uint64_t seed, std::int32_t side, std::int32_t margin,
           std::int64_t depth, std::size_t threads) {
            ConeEstimate c;
            {
                py::gil_scoped_release release;
                c = estimate_alpha(p, replicas, seed,
                                   cone_options(side, margin, depth, threads, std::min<std::size_t>(100, replicas), 2000));
            }
            return json_to_py(cone_report(c));
        },
        py::arg("p"), py::arg("replicas") = 100, py::arg("seed") = 1, py::arg("side") = 2800, py::arg("margin") = 64,
        py::arg("depth") = 4000, py::arg("threads") = 1);

    m.def(
        "theta_curve",
        [](double p, const std::vector<double>& q_grid, std::size_t replicas, std::uint64_t seed, std::int32_t side,
           std::int32_t margin, std::int64_t depth, std::size_t threads) {
            ThetaCurve c;
            {
                py::gil_scoped_release release;
                c = theta_curve(p, q_grid, replicas, seed,
                                cone_options(side, margin, depth, threads, std::min<std::size_t>(100, replicas), 2000));
            }
            py::list pts;
            for (const auto& e : c.points)
                pts.append(py::make_tuple(e.q, e.theta_hat, e.ci_low, e.ci_high, e.n_regenerations));
            py::dict d;
            d["points"] = pts;
            d["monotonicity_violations"] = c.monotonicity_violations;
            d["replicas"] = c.replica_ids.size();
            return d;
        },
        py::arg("p"), py::arg("q_grid"), py::arg("replicas"), py::arg("seed") = 1, py::arg("side") = 2800,
        py::arg("margin") = 64, py::arg("depth") = 4000, py::arg("threads") = 1);

    m.def(
        "fit_tail",
        [](const std::vector<std::int64_t>& samples, std::size_t resamples, std::uint64_t seed) {
            TailFitOptions o;
            o.resamples = resamples;
            o.seed = seed;
            const auto f = fit_survival_tail(samples, o);
            py::dict d;
            d["rate"] = f.rate;
            d["prefactor"] = f.prefactor;
            d["goodness"] = f.goodness;
            d["ci"] = py::make_tuple(f.rate_ci_low, f.rate_ci_high);
            d["fit_points"] = f.fit_points;
            d["accepted"] = f.accepted();
            return d;
        },
        py::arg("samples"), py::arg("resamples") = 500, py::arg("seed") = 0x7a11);

    m.def(
        "run_experiment",
        [](const std::string& experiment, const std::map<std::string, std::string>& settings) {
            ExperimentConfig c;
            c.experiment = experiment;
            for (const auto& [k, v] : settings) set_config_value(c, k, v);
            RunOutcome out;
            {
                py::gil_scoped_release release;
                out = run_experiment(c);
            }
            return py::make_tuple(out.check_passed, json_to_py(out.manifest));
        },
        py::arg("experiment"), py::arg("settings") = std::map<std::string, std::string>{});
}
