#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semrad/error.hpp"
#include "semrad/hydro.hpp"

using namespace semrad;

namespace {

constexpr double kPi = std::numbers::pi;

Discretization half_cylinder(double R, double h, double L, int beta, double hmax, int P) {
  const Mesh m = generate_cylinder_domain({R, h, L, beta, 1.15, true, hmax});
  const ReferenceElement ref = build_reference_element(P);
  return discretize(curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), R)), P);
}

RadiationRecord synthetic_record(const Discretization& d, int steps, double dt) {
  RadiationRecord rec;
  rec.impulse.mode = 3;
  rec.dt = dt;
  rec.half_domain = d.mesh.count_faces(BoundaryTag::Symmetry) > 0;
  rec.body_dofs = d.dofs.body_trace;
  const Eigen::Index nb = static_cast<Eigen::Index>(rec.body_dofs.size());
  rec.body_weights.resize(nb, 3);
  const int modes[3] = {1, 3, 5};
  for (int j = 0; j < 3; ++j) {
    const int mode = modes[j];
    const VectorXd w = neumann_load(d, BoundaryTag::Body, [mode](double x, double z, double nx,
                                                                 double nz) {
      return generalized_normal(mode, x, z, nx, nz);
    });
    for (Eigen::Index i = 0; i < nb; ++i) rec.body_weights(i, j) = w(rec.body_dofs[i]);
  }
  rec.t = VectorXd::LinSpaced(steps, 0.0, (steps - 1) * dt);
  rec.body_phi = MatrixXd::Zero(steps, nb);
  return rec;
}

}  // namespace

TEST_CASE("fourth-order time derivative") {
  const double dt = 0.1;
  const int n = 11;
  VectorXd delta = VectorXd::Zero(n);
  delta(5) = 1.0;
  const VectorXd d = fd_time_derivative(delta, dt);
  // Centered weights (1/12, -2/3, 0, 2/3, -1/12) / dt read off a unit impulse.
  CHECK(d(7) * dt == doctest::Approx(1.0 / 12));
  CHECK(d(6) * dt == doctest::Approx(-2.0 / 3));
  CHECK(d(5) == 0.0);
  CHECK(d(4) * dt == doctest::Approx(2.0 / 3));
  CHECK(d(3) * dt == doctest::Approx(-1.0 / 12));

  VectorXd t4(n), exact(n);
  for (int i = 0; i < n; ++i) {
    const double t = 1.0 + i * dt;
    t4(i) = t * t * t * t;
    exact(i) = 4 * t * t * t;
  }
  const VectorXd dt4 = fd_time_derivative(t4, dt);
  CHECK((dt4 - exact).cwiseAbs().maxCoeff() < 1e-10 * exact.cwiseAbs().maxCoeff());

  // Degree five is no longer exact: fourth order.
  VectorXd t5(n);
  for (int i = 0; i < n; ++i) t5(i) = std::pow(1.0 + i * dt, 5);
  CHECK(std::abs(fd_time_derivative(t5, dt)(5) - 5 * std::pow(1.5, 4)) > 1e-8);

  CHECK(fd_time_derivative(VectorXd::Constant(8, 3.0), dt).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(fd_time_derivative(VectorXd::Ones(4), dt), ParameterError);
  CHECK_THROWS_AS(fd_time_derivative(VectorXd::Ones(8), 0.0), ParameterError);

  // Convergence order on a smooth signal.
  const auto err = [](double h) {
    const int m = static_cast<int>(std::round(2.0 / h)) + 1;
    VectorXd s(m);
    for (int i = 0; i < m; ++i) s(i) = std::sin(3.0 * i * h);
    const VectorXd ds = fd_time_derivative(s, h);
    double e = 0.0;
    for (int i = 0; i < m; ++i) e = std::max(e, std::abs(ds(i) - 3.0 * std::cos(3.0 * i * h)));
    return e;
  };
  CHECK(std::log2(err(0.02) / err(0.01)) > 3.8);
}

TEST_CASE("body force from recorded potentials") {
  const double R = 0.5, rho = 1000.0, c = 2.5, dt = 0.01;
  const Discretization d = half_cylinder(R, 3.0, 6.0, 5, 0.8, 4);
  RadiationRecord rec = synthetic_record(d, 20, dt);
  CHECK(body_force(rec, 3).cwiseAbs().maxCoeff() == 0.0);

  // int n_z over the quarter arc is R.
  CHECK(rec.body_weights.col(1).sum() == doctest::Approx(R).epsilon(1e-8));
  // int n_x over the quarter arc is R (normals point into the body).
  CHECK(rec.body_weights.col(0).sum() == doctest::Approx(-R).epsilon(1e-8));

  for (Eigen::Index i = 0; i < rec.t.size(); ++i) rec.body_phi.row(i).setConstant(c * rec.t(i));
  const VectorXd F = body_force(rec, 3, rho);
  // Half body: -rho c R; the symmetric image doubles it.
  for (Eigen::Index i = 0; i < F.size(); ++i) CHECK(F(i) == doctest::Approx(-2 * rho * c * R).epsilon(1e-8));
  // Surge force from a heave record vanishes on the half domain.
  CHECK(body_force(rec, 1).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(body_force(rec, 2), ParameterError);
}

TEST_CASE("added mass and damping from synthetic forces") {
  const PseudoImpulse p = design_pseudo_impulse(0.2, 3.0, 3, 3.0);
  const double dt = 0.005, A = 420.0, B = 135.0;
  const int n = static_cast<int>(std::ceil(3 * p.t0 / dt)) + 1;
  VectorXd x(n), F(n);
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    x(i) = p.displacement(t);
    F(i) = -(A * p.acceleration(t) + B * p.velocity(t));
  }
  const HydroCoefficients c = added_mass_damping(F, x, dt, p.omega_r);
  REQUIRE(c.omega.size() > 50);
  CHECK(c.omega.maxCoeff() <= p.omega_r * (1 + 1e-12));
  CHECK(c.omega.minCoeff() > 0.0);
  CHECK(c.padded_length >= 8 * n);
  CHECK((c.padded_length & (c.padded_length - 1)) == 0);
  CHECK(c.omega(1) - c.omega(0) == doctest::Approx(2 * kPi / (c.padded_length * dt)));
  CHECK((c.a.array() / A - 1).abs().maxCoeff() < 5e-3);
  CHECK((c.b.array() / B - 1).abs().maxCoeff() < 5e-3);
  for (Eigen::Index k = 0; k < c.omega.size(); ++k) {
    const double w = c.omega(k);
    CHECK(std::abs(w * w * c.a(k) - c.ratio_re(k)) <= 1e-10 * std::abs(c.ratio_re(k)));
    CHECK(std::abs(-w * c.b(k) - c.ratio_im(k)) <= 1e-10 * std::abs(c.ratio_im(k)));
  }

  // Padding only interpolates the spectrum.
  const HydroCoefficients c16 = added_mass_damping(F, x, dt, p.omega_r, 16.0);
  for (Eigen::Index k = 0; k < c.omega.size(); ++k) {
    const Eigen::Index j = 2 * k + 1;
    REQUIRE(j < c16.omega.size());
    CHECK(c16.omega(j) == doctest::Approx(c.omega(k)).epsilon(1e-14));
    CHECK(std::abs(c16.a(j) - c.a(k)) < 1e-6 * std::abs(c.a(k)));
    CHECK(std::abs(c16.b(j) - c.b(k)) < 1e-6 * std::abs(c.b(k)));
  }

  const HydroCoefficients z = added_mass_damping(VectorXd::Zero(n), x, dt, p.omega_r);
  CHECK(z.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.b.cwiseAbs().maxCoeff() == 0.0);

  // Bins where the displacement spectrum vanishes are dropped: (1, 1) has a
  // zero at the Nyquist frequency.
  const HydroCoefficients guarded =
      added_mass_damping(VectorXd::Ones(2), VectorXd::Ones(2), 1.0, 10.0, 1.0);
  CHECK(guarded.padded_length == 2);
  CHECK(guarded.omega.size() == 0);

  CHECK_THROWS_AS(added_mass_damping(F.head(10), x, dt, 1.0), ParameterError);
  CHECK_THROWS_AS(added_mass_damping(F, x, dt, 1.0, 0.5), ParameterError);
  CHECK_THROWS_AS(added_mass_damping(F, x, -dt, 1.0), ParameterError);
}

TEST_CASE("normalization") {
  HydroCoefficients c;
  c.omega = VectorXd::LinSpaced(3, 1.0, 3.0);
  const double R = 0.5, rho = 1000.0;
  const double ref = 0.5 * kPi * rho * R * R;
  c.a = VectorXd::Constant(3, ref);
  c.b = ref * c.omega;
  const NormalizedCoefficients n = normalize_cylinder(c, R, rho);
  CHECK((n.mu.array() - 1).abs().maxCoeff() < 1e-14);
  CHECK((n.nu.array() - 1).abs().maxCoeff() < 1e-14);

  c.a = VectorXd::Constant(3, 2 * rho);
  c.b = 2 * rho * c.omega;
  const NormalizedCoefficients nb = normalize_box(c, 1.0, 1.0, rho);
  CHECK((nb.mu.array() - 1).abs().maxCoeff() < 1e-14);
  CHECK((nb.nu.array() - 1).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(normalize_cylinder(c, 0.0), ParameterError);
  CHECK_THROWS_AS(normalize_box(c, 1.0, -1.0), ParameterError);
}

TEST_CASE("rigid-lid added mass") {
  const double R = 0.5, rho = 1000.0;
  const double ref = 0.5 * kPi * rho * R * R;
  const Discretization coarse = half_cylinder(R, 3.0, 6.0, 5, 0.8, 4);
  const Discretization fine = half_cylinder(R, 3.0, 6.0, 10, 0.4, 4);
  const double a = infinite_frequency_added_mass(coarse, 3, 3, rho);
  const double af = infinite_frequency_added_mass(fine, 3, 3, rho);
  CHECK(a > 0.0);
  CHECK(std::abs(af - a) / af < 5e-3);
  CHECK(infinite_frequency_added_mass(coarse, 1, 1, rho) > 0.0);
  CHECK(infinite_frequency_added_mass(coarse, 1, 3, rho) == 0.0);

  // With phi = 0 on z = 0 the odd extension is a full circle translating
  // vertically, whose added mass is rho pi R^2: mu -> 1 in deep water.
  const double mu_shallow = af / ref;
  const double mu_deep =
      infinite_frequency_added_mass(half_cylinder(R, 12.0, 12.0, 10, 0.8, 4), 3, 3, rho) / ref;
  CHECK(mu_shallow > mu_deep);
  CHECK(mu_deep > 1.0);
  CHECK(mu_deep - 1.0 < 5e-3);
}
