#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "doctest.h"
#include "semrad/assembly.hpp"
#include "semrad/error.hpp"
#include "semrad/linsolve.hpp"

using namespace semrad;

namespace {

Mesh unit_square() {
  Mesh m;
  m.vertices = {Vec2(0, -1), Vec2(1, -1), Vec2(1, 0), Vec2(0, 0)};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_faces = {{0, 0, BoundaryTag::Bed},
                      {0, 1, BoundaryTag::FarField},
                      {1, 1, BoundaryTag::FreeSurface},
                      {1, 2, BoundaryTag::Symmetry}};
  m.depth = 1;
  m.length = 1;
  return m;
}

Mesh pie_slice(double R) {
  Mesh m;
  m.vertices = {Vec2(R, 0), Vec2(0, R), Vec2(0, 0)};
  m.triangles = {{0, 1, 2}};
  m.boundary_faces = {{0, 0, BoundaryTag::Body},
                      {0, 1, BoundaryTag::Symmetry},
                      {0, 2, BoundaryTag::Symmetry}};
  return m;
}

double max_abs(const SparseMatrix& A) {
  double m = 0.0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// Solves the mixed problem with linear data: Dirichlet on the free surface,
// exact flux elsewhere.
VectorXd solve_linear_patch(const Discretization& d, double a, double b, double c) {
  DiscreteLaplacian sys = assemble_stiffness(d);
  const auto phi = [&](double x, double z) { return a * x + b * z + c; };
  VectorXd load = VectorXd::Zero(d.dofs.n_dof);
  for (BoundaryTag tag : {BoundaryTag::Bed, BoundaryTag::FarField, BoundaryTag::Body,
                          BoundaryTag::Symmetry})
    load += neumann_load(d, tag, [&](double, double, double nx, double nz) {
      return a * nx + b * nz;
    });
  const auto& fs = d.dofs.fs_trace;
  VectorXd g(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) g(k) = phi(d.dofs.x(fs[k]), d.dofs.z(fs[k]));
  impose_dirichlet(sys, fs, g);
  const Factorization f = factorize(sys.A);
  const VectorXd u = f.solve(sys.lifted_rhs(load, sys.dirichlet_values));
  VectorXd err(d.dofs.n_dof);
  for (int i = 0; i < d.dofs.n_dof; ++i) err(i) = u(i) - phi(d.dofs.x(i), d.dofs.z(i));
  return err;
}

}  // namespace

TEST_CASE("dof map numbering is continuous") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 4, 1.3, true, 0.0});
  for (int P : {1, 2, 5}) {
    const Discretization d = discretize(m, P);
    // Vertices + (P-1) per edge + interior nodes.
    std::set<std::pair<int, int>> edges;
    for (const auto& t : m.triangles)
      for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
    const int interior = (P - 1) * (P - 2) / 2;
    CHECK(d.dofs.n_dof == static_cast<int>(m.vertices.size()) +
                              (P - 1) * static_cast<int>(edges.size()) +
                              interior * m.n_elements());
    // Shared nodes have identical coordinates from every element.
    for (int e = 0; e < m.n_elements(); ++e)
      for (int i = 0; i < d.ref.n_nodes; ++i) {
        const int g = d.dofs.element_dofs(i, e);
        CHECK(std::abs(d.dofs.x(g) - d.geo.x(i, e)) < 1e-12);
        CHECK(std::abs(d.dofs.z(g) - d.geo.z(i, e)) < 1e-12);
      }
    for (std::size_t k = 1; k < d.dofs.fs_trace.size(); ++k)
      CHECK(d.dofs.x(d.dofs.fs_trace[k]) > d.dofs.x(d.dofs.fs_trace[k - 1]));
    for (int i : d.dofs.fs_trace) CHECK(std::abs(d.dofs.z(i)) < 1e-12);
  }
}

TEST_CASE("single element annihilates constants") {
  const Discretization d = discretize(pie_slice(1.0), 4);
  const MatrixXd Ae = element_stiffness(d, 0);
  CHECK((Ae * VectorXd::Ones(d.ref.n_nodes)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-element square at P = 1 gives the linear-element Laplacian") {
  const Discretization d = discretize(unit_square(), 1);
  const DiscreteLaplacian sys = assemble_stiffness(d);
  const MatrixXd A = MatrixXd(sys.A0);
  // Vertex dofs follow first appearance: 0,1,2,3 map to vertices 0,1,2,3.
  MatrixXd expect(4, 4);
  expect << 1, -0.5, 0, -0.5,
            -0.5, 1, -0.5, 0,
            0, -0.5, 1, -0.5,
            -0.5, 0, -0.5, 1;
  CHECK((A - expect).cwiseAbs().maxCoeff() < 1e-14);
  const VectorXd x = d.dofs.x;
  CHECK(x.dot(A * x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((A * VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("curved element: weak Laplacian of a harmonic function vanishes on interior tests") {
  const double R = 1.3;
  for (int P : {3, 6}) {
    const ReferenceElement ref = build_reference_element(P);
    const Mesh c = curve_body_elements(pie_slice(R), ref, BodyCurve::circle(Vec2(0, 0), R));
    const Discretization d = discretize(c, P);
    const DiscreteLaplacian sys = assemble_stiffness(d);
    std::set<int> boundary;
    for (const auto& [tag, v] : d.dofs.tag_dofs) boundary.insert(v.begin(), v.end());
    for (const VectorXd& phi : {VectorXd(d.dofs.x), VectorXd(d.dofs.z)}) {
      const VectorXd r = sys.A0 * phi;
      for (int i = 0; i < d.dofs.n_dof; ++i)
        if (!boundary.count(i)) CHECK(std::abs(r(i)) < 1e-10);
    }
  }
}

TEST_CASE("assembled operator is symmetric with the constant null space") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 5, 1.3, true, 0.0});
  const ReferenceElement ref = build_reference_element(4);
  const Mesh c = curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), 1.0));
  const Discretization d = discretize(c, 4);
  DiscreteLaplacian sys = assemble_stiffness(d);
  const SparseMatrix At = sys.A0.transpose();
  CHECK(max_abs(sys.A0 - At) < 1e-12 * max_abs(sys.A0));
  const VectorXd ones = VectorXd::Ones(d.dofs.n_dof);
  CHECK((sys.A0 * ones).cwiseAbs().maxCoeff() < 1e-10 * max_abs(sys.A0));

  // Positive semi-definite with a one-dimensional kernel (dense check on a small case).
  const Discretization small = discretize(generate_basin({2.0, 1.0, 2, 1, true}), 3);
  const MatrixXd A = MatrixXd(assemble_stiffness(small).A0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(A);
  CHECK(std::abs(eig.eigenvalues()(0)) < 1e-10);
  CHECK(eig.eigenvalues()(1) > 1e-6);

  VectorXd g(d.dofs.fs_trace.size());
  for (std::size_t k = 0; k < d.dofs.fs_trace.size(); ++k) g(k) = std::sin(d.dofs.x(d.dofs.fs_trace[k]));
  impose_dirichlet(sys, d.dofs.fs_trace, g);
  const SparseMatrix Bt = sys.A.transpose();
  CHECK(max_abs(sys.A - Bt) < 1e-12 * max_abs(sys.A));
}

TEST_CASE("patch test: linear fields are reproduced for every order") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 4, 1.3, true, 0.0});
  for (int P = 1; P <= 6; ++P) {
    CAPTURE(P);
    const Discretization affine = discretize(m, P);
    CHECK(solve_linear_patch(affine, 0.7, -1.3, 0.4).cwiseAbs().maxCoeff() < 1e-10);
    const Mesh c = curve_body_elements(m, affine.ref, BodyCurve::circle(Vec2(0, 0), 1.0));
    const Discretization curved = discretize(c, P);
    CHECK(solve_linear_patch(curved, -0.2, 0.9, 1.1).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("super-collocation has exhausted aliasing") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 5, 1.3, true, 0.0});
  for (int P : {2, 4, 6}) {
    CAPTURE(P);
    const ReferenceElement ref = build_reference_element(P);
    const Mesh c = curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), 1.0));
    const SparseMatrix A1 = assemble_stiffness(discretize(c, P)).A0;
    const SparseMatrix A2 = assemble_stiffness(discretize(c, P, 8 * P + 16)).A0;
    CHECK(max_abs(A1 - A2) < 1e-10 * max_abs(A1));
  }
}

TEST_CASE("load vectors") {
  const Discretization d = discretize(unit_square(), 3);
  const VectorXd zero = assemble_volume_source(d, [](double, double) { return 0.0; });
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
  const VectorXd one = assemble_volume_source(d, [](double, double) { return 1.0; });
  CHECK(one.sum() == doctest::Approx(1.0).epsilon(1e-13));

  VectorXd b = VectorXd::Zero(d.dofs.n_dof);
  std::vector<VectorXd> q(1, VectorXd::Zero(4));
  CHECK(assemble_neumann_flux(b, d, BoundaryTag::Bed, q) == 1);
  CHECK(b.cwiseAbs().maxCoeff() == 0.0);
  q[0] = VectorXd::Ones(4);
  assemble_neumann_flux(b, d, BoundaryTag::Bed, q);
  CHECK(b.sum() == doctest::Approx(1.0));
  CHECK(assemble_neumann_flux(b, d, BoundaryTag::Body, {}) == 0);

  const SparseMatrix F = boundary_mass(d, BoundaryTag::FarField);
  CHECK((F * VectorXd::Ones(d.dofs.n_dof)).sum() == doctest::Approx(1.0));
}

TEST_CASE("Dirichlet imposition") {
  DiscreteLaplacian sys;
  sys.A0.resize(2, 2);
  sys.A0.insert(0, 0) = 2;
  sys.A0.insert(0, 1) = -1;
  sys.A0.insert(1, 0) = -1;
  sys.A0.insert(1, 1) = 2;
  sys.A = sys.A0;
  sys.b = VectorXd::Zero(2);
  sys.is_dirichlet.assign(2, 0);
  impose_dirichlet(sys, {0}, VectorXd::Constant(1, 1.0));
  const VectorXd x = factorize(sys.A).solve(sys.rhs());
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(0.5));
  // New values, same node set.
  impose_dirichlet(sys, {0}, VectorXd::Constant(1, 4.0));
  CHECK(factorize(sys.A).solve(sys.rhs())(1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(impose_dirichlet(sys, {1, 1}, Eigen::Vector2d(1.0, 2.0)), ParameterError);

  const Discretization d = discretize(generate_basin({3.0, 1.0, 3, 2, true}), 3);
  DiscreteLaplacian all = assemble_stiffness(d);
  std::vector<int> every(d.dofs.n_dof);
  std::iota(every.begin(), every.end(), 0);
  impose_dirichlet(all, every, VectorXd::Zero(d.dofs.n_dof));
  CHECK(factorize(all.A).solve(all.rhs()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace and point derivative operators") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 4, 1.3, true, 0.0});
  const ReferenceElement ref = build_reference_element(4);
  const Mesh c = curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), 1.0));
  const Discretization d = discretize(c, 4);
  VectorXd phi(d.dofs.n_dof);
  for (int i = 0; i < d.dofs.n_dof; ++i) {
    const double x = d.dofs.x(i), z = d.dofs.z(i);
    phi(i) = x * x * z - 0.5 * z * z + 3 * x;
  }
  const SparseMatrix Gz = trace_derivative_operator(d, d.dofs.fs_trace, BoundaryTag::FreeSurface, 1);
  const VectorXd w = Gz * phi;
  for (std::size_t k = 0; k < d.dofs.fs_trace.size(); ++k) {
    const double x = d.dofs.x(d.dofs.fs_trace[k]);
    CHECK(w(k) == doctest::Approx(x * x).epsilon(1e-10).scale(1.0));
  }
  std::vector<Vec2> pts = {Vec2(5.5, -0.3), Vec2(2.0, -2.7)};
  const SparseMatrix Gx = point_derivative_operator(d, pts, 0);
  const VectorXd u = Gx * phi;
  for (std::size_t k = 0; k < pts.size(); ++k)
    CHECK(u(k) == doctest::Approx(2 * pts[k].x() * pts[k].y() + 3).epsilon(1e-10));
  // Inside a curved element only the coordinate functions are exact.
  const VectorXd lin = 3.0 * d.dofs.x - 2.0 * d.dofs.z;
  const std::vector<Vec2> near = {Vec2(0.9, -0.5), Vec2(0.3, -1.02)};
  CHECK((point_derivative_operator(d, near, 0) * lin - Eigen::Vector2d(3, 3)).norm() < 1e-10);
  CHECK((point_derivative_operator(d, near, 1) * lin - Eigen::Vector2d(-2, -2)).norm() < 1e-10);
  CHECK_THROWS_AS(point_derivative_operator(d, {Vec2(0.1, -0.1)}, 0), GeometryError);
}

TEST_CASE("body flux of the vertical normal sums to the projected width") {
  const Mesh m = generate_cylinder_domain({1.0, 3.0, 6.0, 5, 1.3, true, 0.0});
  for (int P : {3, 6}) {
    const ReferenceElement ref = build_reference_element(P);
    const Discretization d =
        discretize(curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), 1.0)), P);
    const VectorXd b =
        neumann_load(d, BoundaryTag::Body, [](double, double, double, double nz) { return nz; });
    // Outward from the fluid, the body normal points into the cylinder.
    CHECK(std::abs(std::abs(b.sum()) - 1.0) < 1e-8);
  }
}
