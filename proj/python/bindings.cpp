#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "semrad/analysis.hpp"
#include "semrad/error.hpp"
#include "semrad/hydro.hpp"

namespace py = pybind11;
using namespace semrad;

namespace {

Discretization make_discretization(const Mesh& mesh, int order, std::optional<double> radius,
                                   int cubature) {
  if (radius && mesh.count_faces(BoundaryTag::Body) > 0) {
    const ReferenceElement ref = build_reference_element(order, cubature);
    return discretize(curve_body_elements(mesh, ref, BodyCurve::circle(Vec2(0, 0), *radius)),
                      order, cubature);
  }
  return discretize(mesh, order, cubature);
}

}  // namespace

PYBIND11_MODULE(_semrad, m) {
  m.doc() = "Spectral element solver for the pseudo-impulsive radiation problem";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.attr("GRAVITY") = kGravity;
  m.attr("WATER_DENSITY") = kWaterDensity;

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("n_elements", &Mesh::n_elements)
      .def_property_readonly("vertices",
                             [](const Mesh& me) {
                               Eigen::MatrixX2d v(me.vertices.size(), 2);
                               for (std::size_t i = 0; i < me.vertices.size(); ++i)
                                 v.row(i) = me.vertices[i].transpose();
                               return v;
                             })
      .def_property_readonly("triangles",
                             [](const Mesh& me) {
                               Eigen::MatrixX3i t(me.triangles.size(), 3);
                               for (std::size_t i = 0; i < me.triangles.size(); ++i)
                                 t.row(i) << me.triangles[i][0], me.triangles[i][1], me.triangles[i][2];
                               return t;
                             })
      .def_readonly("depth", &Mesh::depth)
      .def_readonly("length", &Mesh::length)
      .def("count_faces",
           [](const Mesh& me, const std::string& tag) {
             static const std::map<std::string, BoundaryTag> tags = {
                 {"free_surface", BoundaryTag::FreeSurface}, {"bed", BoundaryTag::Bed},
                 {"far_field", BoundaryTag::FarField},       {"body", BoundaryTag::Body},
                 {"symmetry", BoundaryTag::Symmetry}};
             const auto it = tags.find(tag);
             if (it == tags.end()) throw ParameterError("unknown boundary tag " + tag);
             return me.count_faces(it->second);
           })
      .def("max_edge_length", [](const Mesh& me) { return max_edge_length(me); });

  m.def(
      "cylinder_mesh",
      [](double R, double h, double L, int beta, double grading, bool symmetric_fs,
         double max_spacing) {
        return generate_cylinder_domain({R, h, L, beta, grading, symmetric_fs, max_spacing});
      },
      py::arg("R"), py::arg("h"), py::arg("L"), py::arg("beta") = 5, py::arg("grading") = 1.15,
      py::arg("symmetric_fs") = true, py::arg("max_spacing") = 0.8);
  m.def(
      "box_mesh",
      [](double a, double d, double h, double L, int n_bottom, int n_side, double grading,
         bool symmetric_fs, double max_spacing) {
        return generate_box_domain({a, d, h, L, n_bottom, n_side, grading, symmetric_fs, max_spacing});
      },
      py::arg("a"), py::arg("d"), py::arg("h"), py::arg("L"), py::arg("n_bottom") = 6,
      py::arg("n_side") = 12, py::arg("grading") = 1.1, py::arg("symmetric_fs") = true,
      py::arg("max_spacing") = 0.0);
  m.def(
      "basin_mesh",
      [](double L, double h, int nx, int nz, bool symmetric_fs) {
        return generate_basin({L, h, nx, nz, symmetric_fs});
      },
      py::arg("L"), py::arg("h"), py::arg("nx") = 10, py::arg("nz") = 2,
      py::arg("symmetric_fs") = true);
  m.def(
      "uniform_cylinder_mesh",
      [](double R, double h, double L, double spacing, int elements) {
        return generate_uniform_cylinder_domain({R, h, L, spacing, elements});
      },
      py::arg("R") = 1.0, py::arg("h") = 2.0, py::arg("L") = 4.0, py::arg("spacing") = 0.5,
      py::arg("elements") = 0);
  m.def("mirror_mesh", &mirror_mesh);
  m.def("import_mesh", &import_mesh, py::arg("path"));
  m.def("export_mesh", &export_mesh, py::arg("mesh"), py::arg("path"));

  py::class_<Discretization>(m, "Discretization")
      .def_property_readonly("n_dof", [](const Discretization& d) { return d.dofs.n_dof; })
      .def_property_readonly("order", [](const Discretization& d) { return d.ref.order; })
      .def_property_readonly("mesh", [](const Discretization& d) { return d.mesh; })
      .def_property_readonly("surface_x",
                             [](const Discretization& d) {
                               VectorXd x(d.dofs.fs_trace.size());
                               for (std::size_t i = 0; i < d.dofs.fs_trace.size(); ++i)
                                 x(i) = d.dofs.x(d.dofs.fs_trace[i]);
                               return x;
                             })
      .def_property_readonly("surface_spacing", [](const Discretization& d) {
        const SurfaceSpacing s = surface_spacing(d.dofs);
        return std::make_pair(s.min, s.max);
      });
  m.def("discretize", &make_discretization, py::arg("mesh"), py::arg("order"),
        py::arg("curve_radius") = py::none(), py::arg("cubature") = 0,
        "Order-P discretization; with curve_radius the body elements follow a circle about the "
        "origin.");

  m.def(
      "manufactured_error",
      [](const Discretization& d, const std::string& name, double L, double h) {
        if (name == "linear") return manufactured_error(d, ManufacturedSolution::linear());
        if (name == "trigonometric")
          return manufactured_error(d, ManufacturedSolution::trigonometric(L, h));
        throw ParameterError("unknown manufactured solution " + name);
      },
      py::arg("discretization"), py::arg("solution") = "trigonometric", py::arg("L") = 4.0,
      py::arg("h") = 2.0);

  m.def(
      "stability_eigenvalues",
      [](const Discretization& d, bool element_local, int max_dimension) {
        RadiationOptions opt;
        if (element_local) opt.surface_derivative = SurfaceDerivative::ElementLocal;
        const StabilityReport r = stability_eigenvalues(d, opt, max_dimension);
        Eigen::VectorXcd e(r.eigenvalues.size());
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) e(i) = r.eigenvalues[i];
        return e;
      },
      py::arg("discretization"), py::arg("element_local") = false, py::arg("max_dimension") = 4000);
  m.def("standing_wave_frequencies", &standing_wave_frequencies, py::arg("L"), py::arg("h"),
        py::arg("count"), py::arg("g") = kGravity);

  py::class_<PseudoImpulse>(m, "PseudoImpulse")
      .def_readonly("mode", &PseudoImpulse::mode)
      .def_readonly("alpha", &PseudoImpulse::alpha)
      .def_readonly("s", &PseudoImpulse::s)
      .def_readonly("t0", &PseudoImpulse::t0)
      .def_readonly("f_r", &PseudoImpulse::f_r)
      .def_readonly("omega_r", &PseudoImpulse::omega_r)
      .def_readonly("k_r", &PseudoImpulse::k_r)
      .def_readonly("L_r", &PseudoImpulse::L_r)
      .def_readwrite("amplitude", &PseudoImpulse::amplitude)
      .def("displacement", &PseudoImpulse::displacement)
      .def("velocity", &PseudoImpulse::velocity)
      .def("acceleration", &PseudoImpulse::acceleration);
  m.def("design_pseudo_impulse", &design_pseudo_impulse, py::arg("dx_max"), py::arg("depth"),
        py::arg("mode") = 3, py::arg("alpha") = 3.0, py::arg("r") = 1e-4, py::arg("epsilon") = 1e-8,
        py::arg("g") = kGravity);
  m.def("pseudo_impulse_from_width", &pseudo_impulse_from_width, py::arg("s"), py::arg("depth"),
        py::arg("mode") = 3, py::arg("r") = 1e-4, py::arg("epsilon") = 1e-8, py::arg("g") = kGravity);
  m.def("with_peak_time", &with_peak_time, py::arg("impulse"), py::arg("t0"));

  m.def(
      "run_radiation",
      [](const Discretization& d, const PseudoImpulse& imp, double t_end,
         const std::vector<double>& monitors, bool sommerfeld, bool relaxation, double courant,
         double rho) {
        RadiationOptions opt;
        opt.mode = imp.mode;
        opt.sommerfeld = sommerfeld;
        opt.relaxation = relaxation;
        opt.courant = courant;
        RadiationRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_radiation(d, imp, opt, t_end, monitors);
        }
        py::dict out;
        out["t"] = rec.t;
        out["x"] = rec.x;
        out["xdot"] = rec.xdot;
        out["dt"] = rec.dt;
        out["eta"] = rec.monitor_eta;
        for (int j : {1, 3, 5})
          out[py::str("F" + std::to_string(j))] = body_force(rec, j, rho);
        return out;
      },
      py::arg("discretization"), py::arg("impulse"), py::arg("t_end") = 0.0,
      py::arg("monitors") = std::vector<double>{}, py::arg("sommerfeld") = true,
      py::arg("relaxation") = true, py::arg("courant") = 1.0, py::arg("rho") = kWaterDensity);

  m.def(
      "added_mass_damping",
      [](const VectorXd& force, const VectorXd& x, double dt, double cutoff, double pad) {
        const HydroCoefficients c = added_mass_damping(force, x, dt, cutoff, pad);
        py::dict out;
        out["omega"] = c.omega;
        out["a"] = c.a;
        out["b"] = c.b;
        out["padded_length"] = c.padded_length;
        return out;
      },
      py::arg("force"), py::arg("displacement"), py::arg("dt"), py::arg("cutoff"),
      py::arg("pad_factor") = 8.0);
  m.def("infinite_frequency_added_mass", &infinite_frequency_added_mass, py::arg("discretization"),
        py::arg("j") = 3, py::arg("k") = 3, py::arg("rho") = kWaterDensity);
}
