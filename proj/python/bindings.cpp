#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hdg/benchmarks.hpp"
#include "hdg/oracles.hpp"
#include "hdg/slice.hpp"

namespace py = pybind11;
using namespace hdg;

namespace {

py::dict row_dict(const ErrorRow& r) {
  py::dict d;
  d["n"] = r.n;
  d["e2"] = r.e2;
  d["seconds"] = r.seconds;
  d["trace_residual"] = r.diagnostics.trace_residual;
  d["error"] = r.error;
  return d;
}

py::array_t<double> grid(const SliceState& s, const std::vector<double>& v) {
  py::array_t<double> a({s.nz, s.nx});
  auto m = a.mutable_unchecked<2>();
  for (int j = 0; j < s.nz; ++j)
    for (int i = 0; i < s.nx; ++i) {
      const auto k = static_cast<std::size_t>(s.cell(i, j));
      m(j, i) = s.fluid[k] ? v[k] : std::nan("");
    }
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "HDG elliptic solver and nonhydrostatic slice model";

  py::register_exception<OracleError>(m, "OracleError", PyExc_ValueError);
  py::register_exception<SliceError>(m, "SliceError", PyExc_RuntimeError);

  py::enum_<BesselKind>(m, "BesselKind").value("First", BesselKind::First).value("Second", BesselKind::Second);
  m.def("bessel", &bessel, py::arg("kind"), py::arg("order"), py::arg("x"));
  m.def("bessel_derivative", &bessel_derivative, py::arg("kind"), py::arg("order"), py::arg("x"));

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("L", &ChannelParams::L)
      .def_readwrite("L1", &ChannelParams::L1)
      .def_readwrite("H_L", &ChannelParams::H_L)
      .def_readwrite("sigma", &ChannelParams::sigma)
      .def_readwrite("A", &ChannelParams::A)
      .def_readwrite("g", &ChannelParams::g);
  py::class_<SectorParams>(m, "SectorParams").def(py::init<>());
  py::class_<ChannelSolution>(m, "ChannelSolution")
      .def(py::init<const ChannelParams&>())
      .def("__call__", &ChannelSolution::operator())
      .def("derivative", &ChannelSolution::derivative);

  m.def("channel_error", [](int n, int degree, const ChannelParams& p) { return row_dict(run_channel_case(p, n, degree)); },
        py::arg("n"), py::arg("degree") = 2, py::arg("params") = ChannelParams{});
  m.def("sector_error", [](int n, int degree) { return row_dict(run_sector_case(SectorParams{}, n, n, degree)); },
        py::arg("n"), py::arg("degree") = 4);
  m.def("manufactured_error", [](int n, int degree) { return row_dict(run_manufactured_case(n, degree)); },
        py::arg("n"), py::arg("degree") = 2);

  m.def(
      "standing_wave",
      [](double dt, double t_end, int nx, int nz, int degree) {
        auto c = ScenarioConfig::standing_wave();
        c.dt = dt;
        c.t_end = t_end;
        c.nx = nx;
        c.nz = nz;
        c.degree = degree;
        c.snapshot_times = {t_end};
        SliceModel model(c);
        const auto r = model.run();
        const auto& s = r.snapshots.back().state;
        const auto e = standing_wave_cut_error(s, c, -1.0);
        py::dict d;
        d["t"] = s.t;
        d["q"] = grid(s, s.q);
        d["eta"] = s.eta;
        d["relative_rms"] = e.relative_rms;
        d["worst_divergence_ratio"] = r.worst_divergence_ratio;
        return d;
      },
      py::arg("dt") = 0.1, py::arg("t_end") = 10.0, py::arg("nx") = 40, py::arg("nz") = 40, py::arg("degree") = 2);
}
