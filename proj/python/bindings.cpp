#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "warpflow/commands.hpp"
#include "warpflow/initial_data.hpp"

namespace py = pybind11;
using namespace warpflow;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict summary_dict(const GeoSummary& g) {
    py::dict d;
    d["time"] = g.time;
    d["time_ext"] = g.time_ext;
    d["ell"] = g.ell;
    d["h"] = g.h;
    d["area"] = g.area;
    d["d"] = g.d;
    d["girth"] = g.girth.length;
    d["girth_candidate"] = to_string(g.girth.candidate);
    d["sc_max"] = g.sc_max;
    d["lambda_hat"] = g.lambda_hat;
    d["curvature_scale"] = g.curvature_scale;
    d["ordering_margins"] = g.ordering_margins;
    d["gradient_margins"] = g.gradient_margins;
    d["cylinder_gap"] = g.gaps.cylinder_gap;
    d["cigar_gap"] = g.gaps.cigar_gap;
    return d;
}

Gauge gauge_from(const std::string& s) {
    if (s == "coordinate") return Gauge::coordinate;
    if (s == "arclength") return Gauge::arclength;
    throw py::value_error("gauge must be 'coordinate' or 'arclength'");
}

}  // namespace

PYBIND11_MODULE(_warpflow, m) {
    m.doc() = "Reduced Ricci flow of O(2) x O(n-1)-invariant metrics on S^n";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<Grid>(m, "Grid")
        .def(py::init([](int node_count, int order, double stretch, double bias) {
                 return make_stretched_grid(node_count, stretch, order, bias);
             }),
             py::arg("node_count"), py::arg("order") = 4, py::arg("stretch") = 0.0, py::arg("bias") = 0.0)
        .def_readonly("node_count", &Grid::node_count)
        .def_readonly("order", &Grid::order)
        .def_property_readonly("nodes", [](const Grid& g) { return as_array(g.nodes); });

    py::class_<Profile>(m, "Profile")
        .def(py::init([](const Grid& g, int n, py::array_t<double> chi, py::array_t<double> psi,
                         py::array_t<double> phi) {
                 Profile p{g, n, as_vector(chi), as_vector(psi), as_vector(phi)};
                 check_profile(p);
                 return p;
             }),
             py::arg("grid"), py::arg("n"), py::arg("chi"), py::arg("psi"), py::arg("phi"))
        .def_readonly("n", &Profile::n)
        .def_readonly("grid", &Profile::grid)
        .def_property_readonly("chi", [](const Profile& p) { return as_array(p.chi); })
        .def_property_readonly("psi", [](const Profile& p) { return as_array(p.psi); })
        .def_property_readonly("phi", [](const Profile& p) { return as_array(p.phi); });

    m.def("sausage_slice",
          [](double tau, int n, const Grid& g, const std::string& gauge) {
              return sausage_slice(tau, n, g, gauge_from(gauge));
          },
          py::arg("tau"), py::arg("n"), py::arg("grid"), py::arg("gauge") = "coordinate");
    m.def("round_sphere", &round_sphere, py::arg("rho"), py::arg("grid"), py::arg("n"));
    m.def("hypersausage_exact", &hypersausage_exact, py::arg("t"), py::arg("grid"));
    m.attr("HYPERSAUSAGE_TIME_SCALE") = kHypersausageTimeScale;

    m.def("curvatures", [](const Profile& p) {
        CurvatureField c = sectional_curvatures(p);
        py::dict d;
        d["k_top"] = as_array(c.k_top);
        d["k1_perp"] = as_array(c.k1_perp);
        d["k2_perp"] = as_array(c.k2_perp);
        d["l_sec"] = as_array(c.l_sec);
        return d;
    });
    m.def("validate_smoothness", [](const Profile& p, double tol) {
        SmoothnessReport r = validate_smoothness(p, tol);
        py::list checks;
        for (const auto& c : r.checks) {
            checks.append(py::dict(py::arg("name") = c.name, py::arg("condition") = c.condition,
                                   py::arg("violation") = c.violation, py::arg("pass") = c.pass));
        }
        return py::make_tuple(r.pass, checks);
    }, py::arg("profile"), py::arg("tol") = kDefaultSmoothTol);
    m.def("summary", [](const Profile& p, double t) { return summary_dict(geometric_summary(p, t)); },
          py::arg("profile"), py::arg("time") = 0.0);

    // The ordering monitor only applies to sausage data; pass monitor_invariants=True there.
    m.def("evolve",
          [](const Profile& p, double t_end, const std::string& gauge, double cfl, int monitor_every,
             bool monitor_invariants) {
              FlowConfig fc;
              fc.gauge = gauge_from(gauge);
              fc.cfl = cfl;
              fc.t_end = t_end;
              fc.monitor_every = monitor_every;
              fc.monitor_invariants = monitor_invariants;
              FlowTrajectory tr;
              {
                  py::gil_scoped_release release;
                  tr = run(p, fc);
              }
              py::list sums;
              for (const auto& g : tr.summaries) sums.append(summary_dict(g));
              py::dict d;
              d["termination"] = to_string(tr.termination);
              d["message"] = tr.message;
              d["extinction_time"] = tr.extinction_time ? py::cast(*tr.extinction_time) : py::none();
              d["final"] = tr.last.profile;
              d["final_time"] = tr.last.time;
              d["steps"] = tr.last.step_index;
              d["summaries"] = sums;
              return d;
          },
          py::arg("profile"), py::arg("t_end") = std::numeric_limits<double>::infinity(),
          py::arg("gauge") = "coordinate", py::arg("cfl") = 0.8, py::arg("monitor_every") = 50,
          py::arg("monitor_invariants") = false);

    m.def("encode_profile", [](const Profile& p, const std::string& generator) {
        return py::bytes(encode_profile(p, {ProvenanceEntry{generator, {}, {}}}));
    }, py::arg("profile"), py::arg("generator") = "python");
    m.def("decode_profile", [](const py::bytes& b, double tol) { return decode_profile(std::string(b), tol).profile; },
          py::arg("data"), py::arg("smooth_tol") = kDefaultSmoothTol);

    m.def("parse_config", [](const std::string& text) {
        RunConfig rc = parse_config(text);
        return py::dict(py::arg("initial") = to_string(rc.initial), py::arg("n") = rc.n, py::arg("tau") = rc.tau,
                        py::arg("node_count") = rc.node_count, py::arg("order") = rc.order,
                        py::arg("taus") = rc.taus);
    });
    m.def("summary_header", [] { return std::string(kSummaryHeader); });
}
