#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roughns/analysis.hpp"
#include "roughns/drivers.hpp"
#include "roughns/errors.hpp"
#include "roughns/experiments.hpp"
#include "roughns/galerkin.hpp"
#include "roughns/roughpath.hpp"
#include "roughns/rng.hpp"
#include "roughns/sewing.hpp"
#include "roughns/spectral.hpp"

namespace py = pybind11;
using namespace roughns;

namespace {

GridPath make_path(const std::vector<double>& times, const Eigen::MatrixXd& values) {
  GridPath path;
  path.times = times;
  path.values = values;
  path.validate();
  return path;
}

SpectralField field_from_modes(int d, const std::vector<std::tuple<std::vector<int>, std::string,
                                                                   int, double>>& modes) {
  SpectralField f(d);
  for (const auto& [n, parity, comp, value] : modes) {
    Wavevector w{0, 0, 0};
    for (std::size_t i = 0; i < n.size() && i < 3; ++i) w[i] = n[i];
    f.add(w, parity == "sin" ? Parity::Sin : Parity::Cos, comp, value);
  }
  return f;
}

SigmaFamily constant_sigma(int d, const std::vector<std::vector<double>>& vectors) {
  SigmaFamily sigma;
  sigma.d = d;
  for (const auto& row : vectors) {
    Coefficient v{0, 0, 0};
    for (std::size_t c = 0; c < row.size() && c < 3; ++c) v[c] = row[c];
    sigma.channels.push_back(SigmaChannel::constant_vector(d, v));
  }
  return sigma;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "spectral Galerkin toolkit for transport rough drivers";

  py::register_exception<Error>(m, "RoughnsError");

  py::class_<GridPath>(m, "GridPath")
      .def(py::init(&make_path), py::arg("times"), py::arg("values"))
      .def_readonly("times", &GridPath::times)
      .def_readonly("values", &GridPath::values)
      .def("at", &GridPath::at)
      .def("to_csv", [](const GridPath& p) { return path_to_csv(p); });

  py::class_<RoughLift>(m, "RoughLift")
      .def("Z", &RoughLift::Z)
      .def("ZZ", &RoughLift::ZZ)
      .def("perturb_zz", &RoughLift::perturb_zz)
      .def("omega", &RoughLift::omega)
      .def_property_readonly("size", &RoughLift::size)
      .def("chen_defect", [](const RoughLift& lift) { return chen_defect(lift); })
      .def("to_csv", [](const RoughLift& lift) { return lift_to_csv(lift); });

  m.def("dyadic_times", &dyadic_times, py::arg("T"), py::arg("depth"));

  m.def(
      "sample_gaussian_driver",
      [](const std::string& kind, double hurst, const std::vector<double>& times, int channels,
         std::uint64_t seed) {
        return sample_gaussian_driver(kind == "fbm" ? DriverKind::Fbm : DriverKind::Brownian,
                                      hurst, times, channels, seed);
      },
      py::arg("kind"), py::arg("hurst"), py::arg("times"), py::arg("channels"), py::arg("seed"));

  m.def("lift_piecewise_linear", &lift_piecewise_linear, py::arg("path"), py::arg("p") = 2.5);

  m.def(
      "mollify_driver",
      [](const GridPath& path, double delta, double p) {
        MollifiedDriver moll = mollify_driver(path, delta, p);
        return py::make_tuple(moll.nodes, moll.fine, moll.control_ratio);
      },
      py::arg("path"), py::arg("delta"), py::arg("p") = 2.5);

  m.def(
      "p_variation",
      [](const std::vector<double>& times, const Eigen::MatrixXd& values, double p) {
        const GridPath path = make_path(times, values);
        return p_variation(
            [&path](std::size_t i, std::size_t j) {
              return (path.values.row(j) - path.values.row(i)).norm();
            },
            path.size(), p);
      },
      py::arg("times"), py::arg("values"), py::arg("p"));

  m.def(
      "sewing_integrate",
      [](const std::function<double(double, double)>& germ, double zeta,
         const std::function<double(double, double)>& omega, const std::vector<double>& times,
         int out_stride) {
        Germ g = [&](std::size_t i, std::size_t j) {
          Eigen::VectorXd v(1);
          v(0) = germ(times[i], times[j]);
          return v;
        };
        ControlFn w = [&](std::size_t i, std::size_t j) { return omega(times[i], times[j]); };
        SewingResult res = sewing_integrate(g, 1, zeta, w, times, out_stride);
        return py::make_tuple(res.times, Eigen::VectorXd(res.path.col(0)), res.worst_residual,
                              res.observed_constant);
      },
      py::arg("germ"), py::arg("zeta"), py::arg("omega"), py::arg("times"),
      py::arg("out_stride") = 1);

  py::class_<SpectralField>(m, "SpectralField")
      .def(py::init(&field_from_modes), py::arg("d"), py::arg("modes"))
      .def("coefficient",
           [](const SpectralField& f, const std::vector<int>& n, const std::string& parity,
              int comp) {
             Wavevector w{0, 0, 0};
             for (std::size_t i = 0; i < n.size() && i < 3; ++i) w[i] = n[i];
             return f.coefficient(w, parity == "sin" ? Parity::Sin : Parity::Cos, comp);
           })
      .def("evaluate", &SpectralField::evaluate)
      .def("divergence_defect", &SpectralField::divergence_defect)
      .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
      .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
      .def("__rmul__", [](const SpectralField& f, double s) { return s * f; })
      .def("to_csv", [](const SpectralField& f) { return field_to_csv(f); });

  m.def("taylor_green", &taylor_green);
  m.def("sobolev_norm", &sobolev_norm, py::arg("field"), py::arg("alpha"));
  m.def("leray_project", [](const SpectralField& f) {
    LeraySplit split = leray_project(f);
    return py::make_tuple(split.P, split.Q);
  });
  m.def("smoothing_apply", &smoothing_apply, py::arg("field"), py::arg("eta"));
  m.def("trilinear_b", &trilinear_b);
  m.def("nonlinear_term", [](const SpectralField& u) {
    NonlinearSplit split = nonlinear_term(u);
    return py::make_tuple(split.BP, split.BQ);
  });
  m.def(
      "advect_constant",
      [](const std::vector<double>& sigma, const SpectralField& f) {
        Coefficient v{0, 0, 0};
        for (std::size_t c = 0; c < sigma.size() && c < 3; ++c) v[c] = sigma[c];
        return advect(SigmaChannel::constant_vector(f.dimension(), v), f);
      },
      py::arg("sigma"), py::arg("field"));

  py::class_<ModeBasis>(m, "ModeBasis")
      .def_property_readonly("size", &ModeBasis::size)
      .def("eigenvalues", &ModeBasis::eigenvalues)
      .def("field", &ModeBasis::field)
      .def("project", &ModeBasis::project)
      .def("manifest_csv", &ModeBasis::manifest_csv);

  m.def("build_divfree_basis", &build_divfree_basis, py::arg("cutoff"), py::arg("d") = 2);
  m.def("build_gradient_basis", &build_gradient_basis, py::arg("cutoff"), py::arg("d") = 2);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states)
      .def_readonly("energy", &Trajectory::energy)
      .def_readonly("dissipation", &Trajectory::dissipation)
      .def("to_csv", &Trajectory::to_csv);

  m.def(
      "simulate",
      [](int cutoff, double nu, const GridPath& driver,
         const std::vector<std::vector<double>>& sigma_vectors, const SpectralField& u0,
         int substeps) {
        const ModeBasis basis = build_divfree_basis(cutoff, 2);
        const SigmaFamily sigma = constant_sigma(2, sigma_vectors);
        const GalerkinTensors tensors = assemble_tensors(basis, sigma, nu);
        return run(u0, driver, tensors, basis, substeps);
      },
      py::arg("cutoff"), py::arg("nu"), py::arg("driver"), py::arg("sigma"), py::arg("u0"),
      py::arg("substeps") = 8);

  m.def("energy_defect", [](const Trajectory& traj) {
    const EnergyDefect d = energy_defect(traj);
    return py::make_tuple(d.max_defect, d.argmax_time);
  });

  m.def(
      "shifted_taylor_green",
      [](const std::vector<std::vector<double>>& sigma_vectors, const GridPath& z, double nu,
         double t) { return exact_oracle_shifted_tg(constant_sigma(2, sigma_vectors), z, nu, t); },
      py::arg("sigma"), py::arg("z"), py::arg("nu"), py::arg("t"));
}
