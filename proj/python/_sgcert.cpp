// Python bindings. Reports cross the boundary as JSON text and are decoded
// into dicts by the pure-Python wrapper, so both sides share one schema.

#include "sgcert/cli.hpp"
#include "sgcert/conic.hpp"
#include "sgcert/error.hpp"
#include "sgcert/json_io.hpp"
#include "sgcert/lmi.hpp"
#include "sgcert/stability.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace sgcert;

namespace {

std::string dumps(const Json& j) { return j.dump(); }

CertifyOptions certify_options(const std::string& backend) {
  CertifyOptions o;
  o.backend = backend;
  return o;
}

}  // namespace

PYBIND11_MODULE(_sgcert, m) {
  m.doc() = "Scaled graph containment and feedback stability certificates";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<UnstableSystem>(m, "UnstableSystem", PyExc_ValueError);

  py::class_<StateSpace>(m, "StateSpace")
      .def(py::init<Matrix, Matrix, Matrix, Matrix>(), py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"))
      .def_static("static_gain", &StateSpace::static_gain, py::arg("D"))
      .def_property_readonly("A", &StateSpace::A)
      .def_property_readonly("B", &StateSpace::B)
      .def_property_readonly("C", &StateSpace::C)
      .def_property_readonly("D", &StateSpace::D)
      .def_property_readonly("states", &StateSpace::states)
      .def_property_readonly("ports", &StateSpace::ports)
      .def("__repr__", [](const StateSpace& s) {
        return "<StateSpace states=" + std::to_string(s.states()) + " ports=" + std::to_string(s.ports()) + ">";
      });

  m.def("preset", &preset_system, py::arg("name"));
  m.def("load_system", &load_system, py::arg("source"));
  m.def("first_order_bank", &first_order_bank, py::arg("m"), py::arg("a_min") = 0.1, py::arg("a_max") = 0.3);
  m.def(
      "freq_response", [](const StateSpace& s, double w) { return freq_response(s, w); }, py::arg("sys"),
      py::arg("omega"));
  m.def(
      "is_hurwitz", [](const StateSpace& s) { return is_hurwitz(s).stable; }, py::arg("sys"));

  m.def(
      "sample",
      [](const StateSpace& s, int points, double w_min, double w_max, int dirs, std::uint64_t seed) {
        SampleOptions o;
        o.grid = GridSpec::log(w_min, w_max, points);
        o.n_dirs = dirs;
        o.seed = seed;
        const SgCloud c = sg_system_sample(s, o);
        Eigen::VectorXcd z(static_cast<Eigen::Index>(c.size()));
        for (std::size_t i = 0; i < c.size(); ++i) z(static_cast<Eigen::Index>(i)) = c.points[i].z;
        return z;
      },
      py::arg("sys"), py::arg("points") = 400, py::arg("w_min") = 1e-3, py::arg("w_max") = 1e4,
      py::arg("dirs") = 64, py::arg("seed") = 1);

  m.def(
      "_certify_circle",
      [](const StateSpace& s, double c, double r, const std::string& backend) {
        return dumps(to_json(certify_circle(s, c, r, certify_options(backend))));
      },
      py::arg("sys"), py::arg("c"), py::arg("r"), py::arg("backend") = "");
  m.def(
      "_fit_circle", [](const StateSpace& s) { return dumps(to_json(fit_min_circle(s))); }, py::arg("sys"));
  m.def(
      "_certify_conic",
      [](const StateSpace& s, const std::vector<double>& t) {
        if (t.size() != 4) throw InvalidArgument("theta needs 4 entries (t11, t22, t13, t33)");
        return dumps(to_json(certify_conic(s, ConicTheta{t[0], t[1], t[2], t[3]})));
      },
      py::arg("sys"), py::arg("theta"));
  m.def(
      "_fit_conic", [](const StateSpace& s) { return dumps(to_json(fit_conic(s))); }, py::arg("sys"));
  m.def(
      "hard_margin",
      [](std::array<double, 2> d1, std::array<double, 2> d2) {
        return hard_margin(pi_interior(d1[0], d1[1]), pi_interior(d2[0], d2[1]));
      },
      py::arg("disk1"), py::arg("disk2"));
  m.def(
      "_stability",
      [](const StateSpace& s1, const StateSpace& s2, std::array<double, 2> d1, std::array<double, 2> d2,
         bool homotopy) {
        return dumps(to_json(
            certify_feedback(s1, s2, pi_interior(d1[0], d1[1]), pi_interior(d2[0], d2[1]), {}, homotopy)));
      },
      py::arg("sys1"), py::arg("sys2"), py::arg("disk1"), py::arg("disk2"), py::arg("homotopy") = false);
  m.def(
      "_oracle",
      [](const StateSpace& s, std::array<double, 2> d, std::size_t trials, std::uint64_t seed) {
        EquivalenceReport rep = equivalence_trial(s, pi_interior(d[0], d[1]), trials, seed);
        rep.log.clear();
        return dumps(to_json(rep));
      },
      py::arg("sys"), py::arg("disk"), py::arg("trials") = 500, py::arg("seed") = 1);
  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "sg");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
