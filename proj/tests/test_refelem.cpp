#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semrad/error.hpp"
#include "semrad/refelem.hpp"

using namespace semrad;

namespace {

double power_integral(int n) { return n % 2 ? 0.0 : 2.0 / (n + 1); }

// Exact integral of r^a s^b over the reference triangle (integrate r from -1 to -s first).
double monomial_integral(int a, int b) {
  const double sign = (a + 1) % 2 ? -1.0 : 1.0;
  return sign / (a + 1) * (power_integral(a + b + 1) - power_integral(b));
}

VectorXd pow_nodes(const VectorXd& v, int k) { return v.array().pow(k).matrix(); }

}  // namespace

TEST_CASE("orthonormal Jacobi polynomials") {
  CHECK(jacobi_poly(0, 0, 0, 0.3) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(jacobi_poly(1, 0, 0, 1.0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  const auto g = jacobi_gauss(12, 0, 0);
  for (int m = 0; m <= 8; ++m)
    for (int n = 0; n <= 8; ++n) {
      double s = 0.0;
      for (int q = 0; q < g.points.size(); ++q)
        s += g.weights(q) * jacobi_poly(m, 0, 0, g.points(q)) * jacobi_poly(n, 0, 0, g.points(q));
      CHECK(std::abs(s - (m == n ? 1.0 : 0.0)) < 1e-12);
    }
  CHECK_THROWS_AS(jacobi_poly(-1, 0, 0, 0.0), ParameterError);
  CHECK_THROWS_AS(jacobi_poly(2, -1.0, 0, 0.0), ParameterError);
}

TEST_CASE("gradient of orthonormal Jacobi matches finite differences") {
  const double x = 0.37, d = 1e-6;
  for (int n = 0; n <= 6; ++n) {
    const double fd = (jacobi_poly(n, 1, 2, x + d) - jacobi_poly(n, 1, 2, x - d)) / (2 * d);
    CHECK(jacobi_poly_grad(n, 1, 2, x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("Gauss-Lobatto points are symmetric and include the ends") {
  for (int p = 1; p <= 10; ++p) {
    const VectorXd x = gauss_lobatto_points(p);
    REQUIRE(x.size() == p + 1);
    CHECK(x(0) == -1.0);
    CHECK(x(p) == 1.0);
    for (int i = 0; i <= p; ++i) CHECK(std::abs(x(i) + x(p - i)) < 1e-14);
  }
}

TEST_CASE("simplex basis") {
  CHECK(simplex_basis(0, 0, -0.2, -0.5) == doctest::Approx(1.0 / std::sqrt(2.0)));
  const auto g00 = simplex_basis_grad(0, 0, 0.1, -0.4);
  CHECK(g00[0] == 0.0);
  CHECK(g00[1] == 0.0);
  // The collapsed singularity at the top vertex must give finite values.
  CHECK(std::isfinite(simplex_basis(2, 1, -1.0, 1.0)));
  const auto gt = simplex_basis_grad(2, 1, -1.0, 1.0);
  CHECK(std::isfinite(gt[0]));
  CHECK(std::isfinite(gt[1]));

  const Cubature c = simplex_cubature(14);
  const int P = 6;
  std::vector<std::pair<int, int>> modes;
  for (int i = 0; i <= P; ++i)
    for (int j = 0; i + j <= P; ++j) modes.emplace_back(i, j);
  double worst = 0.0;
  for (auto [i, j] : modes)
    for (auto [k, l] : modes) {
      double s = 0.0;
      for (int q = 0; q < c.size(); ++q)
        s += c.w(q) * simplex_basis(i, j, c.r(q), c.s(q)) * simplex_basis(k, l, c.r(q), c.s(q));
      worst = std::max(worst, std::abs(s - ((i == k && j == l) ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("basis gradients match finite differences") {
  const double r = -0.3, s = 0.1, d = 1e-6;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j) {
      const auto g = simplex_basis_grad(i, j, r, s);
      const double fr = (simplex_basis(i, j, r + d, s) - simplex_basis(i, j, r - d, s)) / (2 * d);
      const double fs = (simplex_basis(i, j, r, s + d) - simplex_basis(i, j, r, s - d)) / (2 * d);
      CHECK(g[0] == doctest::Approx(fr).epsilon(1e-6));
      CHECK(g[1] == doctest::Approx(fs).epsilon(1e-6));
    }
}

TEST_CASE("nodal set") {
  const auto n1 = nodal_set(1);
  REQUIRE(n1.rows() == 3);
  CHECK(n1(0, 0) == doctest::Approx(-1));
  CHECK(n1(0, 1) == doctest::Approx(-1));
  CHECK(n1(1, 0) == doctest::Approx(1));
  CHECK(n1(1, 1) == doctest::Approx(-1));
  CHECK(n1(2, 0) == doctest::Approx(-1));
  CHECK(n1(2, 1) == doctest::Approx(1));
  CHECK(nodal_set(3).rows() == 10);
  for (int p = 1; p <= 12; ++p) {
    const auto n = nodal_set(p);
    CHECK(n.rows() == (p + 1) * (p + 2) / 2);
    for (int i = 0; i < n.rows(); ++i) {
      CHECK(n(i, 0) >= -1.0 - 1e-13);
      CHECK(n(i, 1) >= -1.0 - 1e-13);
      CHECK(n(i, 0) + n(i, 1) <= 1e-13);
    }
  }
  // P = 2 edge nodes are the midpoints.
  const ReferenceElement ref = build_reference_element(2);
  for (int e = 0; e < 3; ++e) {
    const int mid = ref.face_nodes[e][1];
    const int a = ref.vertex_nodes[e], b = ref.vertex_nodes[(e + 1) % 3];
    CHECK(ref.r(mid) == doctest::Approx(0.5 * (ref.r(a) + ref.r(b))));
    CHECK(ref.s(mid) == doctest::Approx(0.5 * (ref.s(a) + ref.s(b))));
  }
}

TEST_CASE("linear mass matrix") {
  const ReferenceElement ref = build_reference_element(1);
  Eigen::Matrix3d expect;
  expect << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  expect /= 6.0;
  CHECK((ref.M - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reference element invariants for every order") {
  for (int P = 1; P <= 12; ++P) {
    CAPTURE(P);
    const ReferenceElement ref = build_reference_element(P);
    const int n = ref.n_nodes;
    CHECK(n == (P + 1) * (P + 2) / 2);
    CHECK((ref.V * ref.invV - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ref.M - ref.M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(ref.M);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK((ref.Dr * VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((ref.Ds * VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((ref.Dr * ref.r - VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((ref.Ds * ref.s - VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(ref.cubature.strength >= 2 * P + 2);
    for (int e = 0; e < 3; ++e) CHECK(ref.face_nodes[e].size() == static_cast<size_t>(P + 1));
  }
}

TEST_CASE("differentiation is exact on monomials up to the order") {
  for (int P : {2, 4, 6, 8}) {
    const ReferenceElement ref = build_reference_element(P);
    for (int a = 0; a <= P; ++a)
      for (int b = 0; a + b <= P; ++b) {
        const VectorXd f = pow_nodes(ref.r, a).cwiseProduct(pow_nodes(ref.s, b));
        VectorXd dfr = VectorXd::Zero(ref.n_nodes), dfs = VectorXd::Zero(ref.n_nodes);
        if (a > 0) dfr = a * pow_nodes(ref.r, a - 1).cwiseProduct(pow_nodes(ref.s, b));
        if (b > 0) dfs = b * pow_nodes(ref.r, a).cwiseProduct(pow_nodes(ref.s, b - 1));
        CHECK((ref.Dr * f - dfr).cwiseAbs().maxCoeff() < 1e-11);
        CHECK((ref.Ds * f - dfs).cwiseAbs().maxCoeff() < 1e-11);
      }
  }
  const ReferenceElement ref4 = build_reference_element(4);
  const VectorXd r2 = ref4.r.cwiseProduct(ref4.r);
  CHECK((ref4.Dr * r2 - 2.0 * ref4.r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cubature integrates monomials up to its strength") {
  for (int strength : {2, 5, 8, 14, 26}) {
    const Cubature c = simplex_cubature(strength);
    for (int a = 0; a <= strength; ++a)
      for (int b = 0; a + b <= strength; ++b) {
        double s = 0.0;
        for (int q = 0; q < c.size(); ++q) s += c.w(q) * std::pow(c.r(q), a) * std::pow(c.s(q), b);
        CHECK(s == doctest::Approx(monomial_integral(a, b)).epsilon(1e-11).scale(1.0));
      }
  }
}

TEST_CASE("mass matrix equals cubature of interpolant products") {
  const int P = 5;
  const ReferenceElement ref = build_reference_element(P);
  const VectorXd f = pow_nodes(ref.r, 3).cwiseProduct(ref.s) + ref.s.cwiseProduct(ref.s);
  const VectorXd g = pow_nodes(ref.s, 4) - 2.0 * ref.r;
  const double lhs = f.dot(ref.M * g);
  const VectorXd fc = ref.cub_interp * f, gc = ref.cub_interp * g;
  const double rhs = (ref.cubature.w.array() * fc.array() * gc.array()).sum();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("interpolation reproduces order-P polynomials") {
  const ReferenceElement ref = build_reference_element(4);
  const VectorXd f = pow_nodes(ref.r, 2).cwiseProduct(pow_nodes(ref.s, 2)) + ref.r;
  VectorXd rq(3), sq(3);
  rq << -0.2, 0.1, -0.9;
  sq << -0.3, -0.95, 0.5;
  const VectorXd fq = ref.interpolation_matrix(rq, sq) * f;
  for (int i = 0; i < 3; ++i)
    CHECK(fq(i) == doctest::Approx(rq(i) * rq(i) * sq(i) * sq(i) + rq(i)).epsilon(1e-12));
}

TEST_CASE("face operators") {
  const ReferenceElement ref = build_reference_element(3);
  // 1D mass integrates products of cubics on [-1,1].
  const VectorXd t = ref.face_points;
  const VectorXd one = VectorXd::Ones(t.size());
  CHECK(one.dot(ref.face_mass_1d * one) == doctest::Approx(2.0));
  CHECK(t.dot(ref.face_mass_1d * t) == doctest::Approx(2.0 / 3.0));
  CHECK((ref.face_diff_1d * t - one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ref.face_quad.weights.sum() == doctest::Approx(2.0));
  // Face nodes run from vertex e to vertex e+1.
  for (int e = 0; e < 3; ++e) {
    CHECK(ref.face_nodes[e].front() == ref.vertex_nodes[e]);
    CHECK(ref.face_nodes[e].back() == ref.vertex_nodes[(e + 1) % 3]);
  }
  CHECK_THROWS_AS(build_reference_element(0), ParameterError);
  CHECK_THROWS_AS(build_reference_element(13), ParameterError);
}
