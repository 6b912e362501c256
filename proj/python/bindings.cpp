#include <cctype>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qiopa/app/commands.hpp"
#include "qiopa/errors.hpp"
#include "qiopa/fock.hpp"
#include "qiopa/io.hpp"
#include "qiopa/neif.hpp"
#include "qiopa/opa.hpp"
#include "qiopa/temporal.hpp"
#include "qiopa/wigner.hpp"

namespace py = pybind11;
using namespace qiopa;

namespace {

Detector detector_from(const std::string& name) {
  std::string lower = name;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Detector d : kAllDetectors) {
    std::string ref = detector_name(d);
    ref[0] = 'd';
    if (lower == ref) return d;
  }
  throw py::value_error("unknown detector '" + name + "' (expected d1h, d1v, d2h or d2v)");
}

XorVeto veto_from(const std::string& name) {
  for (XorVeto v : {XorVeto::D1v, XorVeto::D1h, XorVeto::Both})
    if (name == to_string(v)) return v;
  throw py::value_error("unknown veto '" + name + "' (expected d1v, d1h or both)");
}

PhasePoint point_from(const std::array<cplx, 4>& c) { return PhasePoint::from_coords(c); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Four-mode Fock-space simulator of a two-photon-injected parametric amplifier";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<BasisError>(m, "BasisError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());

  py::class_<OpaParams>(m, "OpaParams")
      .def(py::init<>())
      .def(py::init([](double g, double psi, double eta, int cutoff) {
             OpaParams p{g, psi, eta, cutoff};
             p.validate();
             return p;
           }),
           py::arg("g") = 0.22, py::arg("psi") = 0.0, py::arg("eta") = 3.0, py::arg("cutoff") = 8)
      .def_readwrite("g", &OpaParams::g)
      .def_readwrite("psi", &OpaParams::psi)
      .def_readwrite("eta", &OpaParams::eta)
      .def_readwrite("cutoff", &OpaParams::cutoff)
      .def_property_readonly("C", &OpaParams::C)
      .def_property_readonly("S", &OpaParams::S)
      .def_property_readonly("Gamma", &OpaParams::Gamma)
      .def_property_readonly("g_prime", &OpaParams::g_prime);

  py::class_<NeifConfig>(m, "NeifConfig")
      .def(py::init([](double delta1, double delta2, double theta1, double theta2, double t) {
             NeifConfig c{delta1, delta2, theta1, theta2, t};
             c.validate();
             return c;
           }),
           py::arg("delta1") = 0.0, py::arg("delta2") = 0.0, py::arg("theta1") = kPi / 4,
           py::arg("theta2") = kPi / 4, py::arg("bs_transmittance") = 0.5)
      .def_readwrite("delta1", &NeifConfig::delta1)
      .def_readwrite("delta2", &NeifConfig::delta2)
      .def_readwrite("theta1", &NeifConfig::theta1)
      .def_readwrite("theta2", &NeifConfig::theta2)
      .def_readwrite("bs_transmittance", &NeifConfig::bs_transmittance);

  py::class_<TemporalParams>(m, "TemporalParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &TemporalParams::lambda)
      .def_readwrite("lambda_p", &TemporalParams::lambda_p)
      .def_readwrite("delta_lambda", &TemporalParams::delta_lambda)
      .def_readwrite("pump_coherence", &TemporalParams::pump_coherence)
      .def_readwrite("visibility", &TemporalParams::visibility)
      .def_readwrite("fringe_visibility", &TemporalParams::fringe_visibility)
      .def_readwrite("filter_constant", &TemporalParams::filter_constant)
      .def_property_readonly("coherence_time", &TemporalParams::coherence_time);

  py::class_<StateVector>(m, "StateVector")
      .def_property_readonly("cutoff", [](const StateVector& s) { return s.basis().cutoff(); })
      .def_property_readonly("amplitudes", [](const StateVector& s) { return Eigen::VectorXcd(s.amps()); })
      .def("amplitude", [](const StateVector& s, std::array<int, 4> n) { return s.amplitude(FockState{n}); })
      .def("occupancies",
           [](const StateVector& s) {
             std::vector<std::array<int, 4>> out;
             for (const auto& k : s.basis().states()) out.push_back(k.n);
             return out;
           })
      .def("norm", &StateVector::norm)
      .def("mean_total", &StateVector::mean_total)
      .def("to_json", [](const StateVector& s) { return state_to_json(s).dump(); })
      .def("__len__", &StateVector::size);

  m.def("vacuum", [](int cutoff) { return StateVector::vacuum(make_basis(cutoff)); }, py::arg("cutoff"));
  m.def("pair_state", [](double phi, int cutoff) { return pair_state(phi, make_basis(cutoff)); }, py::arg("phi"),
        py::arg("cutoff") = 8);
  m.def("state_from_json", [](const std::string& text, int cutoff) {
    return state_from_json(nlohmann::json::parse(text), cutoff);
  }, py::arg("text"), py::arg("cutoff") = -1);
  m.def("evolve", [](const StateVector& s, const OpaParams& p, double max_loss) { return evolve(s, p, max_loss); },
        py::arg("state"), py::arg("params"), py::arg("max_loss") = kDefaultMaxTruncationLoss,
        py::call_guard<py::gil_scoped_release>());
  m.def("fidelity", &fidelity);
  m.def("swap_parity", [](const StateVector& s, double tol) { return std::string(to_string(swap_parity(s, tol))); },
        py::arg("state"), py::arg("tol") = 1e-8);
  m.def("boundary_weight", &boundary_weight);
  m.def("cat_output_closed_form",
        [](double phi, const OpaParams& p) { return cat_output_closed_form(phi, p, make_basis(p.cutoff)).state; });
  m.def("squeezed_vacuum_closed_form",
        [](const OpaParams& p) { return squeezed_vacuum_closed_form(p, make_basis(p.cutoff)); });
  m.def("bogoliubov_check",
        [](const OpaParams& p, int margin) { return bogoliubov_check(p, make_basis(p.cutoff), margin); },
        py::arg("params"), py::arg("margin") = 2, py::call_guard<py::gil_scoped_release>());
  m.def("stimulated_pairs", &stimulated_pairs, py::arg("phi"), py::arg("params"));
  m.def("double_pair_ratio", &double_pair_ratio, py::arg("g_prime"), py::arg("cutoff") = 6);

  m.def("mode_unitary", &mode_unitary);
  m.def("transform_state", &transform_state, py::arg("state"), py::arg("config"), py::arg("out_cutoff") = -1,
        py::arg("max_loss") = 1e-4);
  m.def("double_coincidence",
        [](const StateVector& s, const NeifConfig& c, const std::string& a, const std::string& b) {
          return double_coincidence(s, c, {detector_from(a), detector_from(b)});
        });
  m.def("double_coincidence_distinguishable",
        [](const StateVector& s, const NeifConfig& c, const std::string& a, const std::string& b) {
          return double_coincidence_distinguishable(s, c, {detector_from(a), detector_from(b)});
        });
  m.def("complementary_coincidence", &complementary_coincidence);
  m.def("rate_closed_form",
        [](double phi, const NeifConfig& c, double S, bool corrected) {
          return rate_closed_form(phi, c, S, corrected ? RateForm::Corrected : RateForm::AsPrinted);
        },
        py::arg("phi"), py::arg("config"), py::arg("S"), py::arg("corrected") = false);
  m.def("noise_rate_closed_form", &noise_rate_closed_form);
  m.def("xor_suppressed_rate",
        [](const StateVector& s, const NeifConfig& c, const std::string& veto) {
          return xor_suppressed_rate(s, c, veto_from(veto));
        },
        py::arg("state"), py::arg("config"), py::arg("veto") = "d1v");

  m.def("wigner_closed_form",
        [](const std::array<cplx, 4>& pt, double g, double phi, bool corrected) {
          return wigner_closed_form(point_from(pt), g, phi, corrected ? DeltaForm::Corrected : DeltaForm::AsPrinted);
        },
        py::arg("point"), py::arg("g"), py::arg("phi"), py::arg("corrected") = false);
  m.def("wigner_squeezed_vacuum",
        [](const std::array<cplx, 4>& pt, double g) { return wigner_squeezed_vacuum(point_from(pt), g); });
  m.def("wigner_numeric",
        [](const StateVector& s, const std::array<cplx, 4>& pt) {
          return kNumericToClosedForm * wigner_numeric(s, point_from(pt));
        },
        "Displaced-parity Wigner function in the closed-form normalization", py::arg("state"), py::arg("point"),
        py::call_guard<py::gil_scoped_release>());
  m.def("characteristic_fn",
        [](const StateVector& s, const OpaParams& p, const std::array<cplx, 4>& pt) {
          return characteristic_fn(s, p, point_from(pt));
        });

  m.def("coherence_time_from_filter", &coherence_time_from_filter);
  m.def("x_scan_envelope", &x_scan_envelope, py::arg("x"), py::arg("rate_at_zero"), py::arg("baseline"),
        py::arg("params"));
  m.def("z_fringe", &z_fringe, py::arg("z"), py::arg("params"));
  m.def("z_amplification", &z_amplification, py::arg("z"), py::arg("peak"), py::arg("floor"), py::arg("params"));

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "qiopa");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          return app::main_entry(static_cast<int>(argv.size()), argv.data());
        },
        "Runs the command-line front end in-process and returns its exit status.",
        py::call_guard<py::gil_scoped_release>());
}
