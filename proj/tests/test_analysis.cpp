#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semrad/analysis.hpp"
#include "semrad/error.hpp"

using namespace semrad;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<MeshCase> uniform_family(const std::vector<double>& spacings) {
  std::vector<MeshCase> out;
  for (double h : spacings)
    out.push_back({"h" + std::to_string(h), generate_uniform_cylinder_domain({1.0, 2.0, 4.0, h, 0})});
  return out;
}

}  // namespace

TEST_CASE("linear manufactured solution is exact at every order") {
  const Mesh m = generate_uniform_cylinder_domain({1.0, 2.0, 4.0, 0.6, 0});
  const ManufacturedSolution u = ManufacturedSolution::linear();
  for (int P = 1; P <= 6; ++P) {
    CAPTURE(P);
    CHECK(manufactured_error(discretize(m, P), u) < 1e-11);
  }
}

TEST_CASE("trigonometric manufactured solution derivatives") {
  const ManufacturedSolution u = ManufacturedSolution::trigonometric(4.0, 2.0);
  const double x = 0.7, z = -0.4, e = 1e-5;
  CHECK(u.dx(x, z) == doctest::Approx((u.value(x + e, z) - u.value(x - e, z)) / (2 * e)).epsilon(1e-8));
  CHECK(u.dz(x, z) == doctest::Approx((u.value(x, z + e) - u.value(x, z - e)) / (2 * e)).epsilon(1e-8));
  const double e2 = 1e-3;
  const double lap = (u.value(x + e2, z) + u.value(x - e2, z) + u.value(x, z + e2) +
                      u.value(x, z - e2) - 4 * u.value(x, z)) /
                     (e2 * e2);
  CHECK(u.laplacian(x, z) == doctest::Approx(lap).epsilon(1e-5));
  // The cosh part is harmonic; only sin(2x)cos(3z) contributes.
  CHECK(u.laplacian(x, z) == doctest::Approx(-13 * std::sin(2 * x) * std::cos(3 * z)));
  CHECK_THROWS_AS(ManufacturedSolution::trigonometric(0.0, 1.0), ParameterError);
}

TEST_CASE("manufactured convergence: spectral in P, algebraic in h") {
  const ManufacturedSolution u = ManufacturedSolution::trigonometric(4.0, 2.0);
  const BodyCurve circle = BodyCurve::circle(Vec2(0, 0), 1.0);

  const ConvergenceReport p = mms_convergence(uniform_family({0.5}), {2, 3, 4, 5, 6, 7, 8}, u, &circle);
  REQUIRE(p.entries.size() == 7);
  CHECK(p.curved);
  for (std::size_t i = 1; i < p.entries.size(); ++i) CHECK(p.entries[i].error < p.entries[i - 1].error);
  REQUIRE(p.p_decay.size() == 1);
  CHECK(p.p_decay.begin()->second < 0.25);
  CHECK(p.flags.empty());

  const ConvergenceReport h = mms_convergence(uniform_family({0.4, 0.2, 0.1}), {1, 2}, u);
  CHECK(h.h_rate.at(1) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(h.h_rate.at(2) == doctest::Approx(3.0).epsilon(0.1));

  CHECK_THROWS_AS(mms_convergence({}, {1}, u), ParameterError);
}

TEST_CASE("fitted slope") {
  CHECK(fitted_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(fitted_slope({1, 2, 3}, {5, 5, 5}) == doctest::Approx(0.0));
  CHECK(fitted_slope({0, 1, 2}, {0, 1.1, 1.9}) == doctest::Approx(0.95));
  CHECK_THROWS_AS(fitted_slope({1}, {1}), ParameterError);
  CHECK_THROWS_AS(fitted_slope({1, 1}, {1, 2}), ParameterError);
  CHECK_THROWS_AS(fitted_slope({1, 2}, {1}), ParameterError);
}

TEST_CASE("closed basin: semi-discrete spectrum is the sloshing spectrum") {
  const double L = 10.0, h = 2.0;
  const Discretization d = discretize(generate_basin({L, h, 10, 2, true}), 4);
  const StabilityReport r = stability_eigenvalues(d);
  CHECK(r.block_structure);
  CHECK(r.stable);
  CHECK(r.max_real <= 1e-8 * r.max_abs);
  CHECK(static_cast<int>(r.eigenvalues.size()) == 2 * r.surface_size);

  std::vector<double> freq;
  for (const auto& l : r.eigenvalues)
    if (l.imag() > 1e-6) freq.push_back(l.imag());
  std::sort(freq.begin(), freq.end());
  const std::vector<double> exact = standing_wave_frequencies(L, h, 5);
  REQUIRE(freq.size() >= 5);
  for (int n = 0; n < 5; ++n) {
    CAPTURE(n);
    CHECK(std::abs(freq[n] / exact[n] - 1) < 1e-4);
  }

  // Eigenvalues scale with sqrt(g).
  RadiationOptions opt;
  opt.g = 4 * kGravity;
  const StabilityReport r4 = stability_eigenvalues(d, opt);
  CHECK(r4.max_abs == doctest::Approx(2 * r.max_abs).epsilon(1e-8));

  CHECK_THROWS_AS(stability_eigenvalues(d, {}, 10), ParameterError);
}

TEST_CASE("semi-discrete operator is linear in the state") {
  const Discretization d = discretize(generate_basin({6.0, 2.0, 6, 2, true}), 3);
  const MatrixXd J = semi_discrete_operator(d);
  const int m = static_cast<int>(d.dofs.fs_trace.size());
  REQUIRE(J.rows() == 2 * m);
  // d eta/dt depends on phi only, d phi/dt = -g eta.
  CHECK(J.topLeftCorner(m, m).cwiseAbs().maxCoeff() < 1e-10 * J.cwiseAbs().maxCoeff());
  CHECK((J.bottomLeftCorner(m, m) + kGravity * MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(J.bottomRightCorner(m, m).cwiseAbs().maxCoeff() == 0.0);
  // A constant potential is a null mode of the surface velocity.
  CHECK((J.topRightCorner(m, m) * VectorXd::Ones(m)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("element-local recovery on an asymmetric surface mesh is unstable") {
  const Mesh m = generate_cylinder_domain({0.5, 3.0, 8.0, 5, 1.15, false, 0.8});
  const ReferenceElement ref = build_reference_element(3);
  const Discretization d =
      discretize(curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), 0.5)), 3);
  RadiationOptions local;
  local.surface_derivative = SurfaceDerivative::ElementLocal;
  CHECK_FALSE(stability_eigenvalues(d, local).stable);
  CHECK(stability_eigenvalues(d).stable);
}

TEST_CASE("standing-wave frequencies") {
  const std::vector<double> w = standing_wave_frequencies(10.0, 2.0, 3);
  REQUIRE(w.size() == 3);
  const double k = kPi / 10.0;
  CHECK(w[0] == doctest::Approx(std::sqrt(kGravity * k * std::tanh(2 * k))));
  CHECK(w[0] < w[1]);
  CHECK(w[1] < w[2]);
}

TEST_CASE("geometric spacings") {
  const std::vector<double> s = geometric_spacings(1.2, 8.0, 4);
  REQUIRE(s.size() == 4);
  CHECK(s.front() == doctest::Approx(1.2));
  CHECK(s.back() == doctest::Approx(0.15));
  CHECK(s[1] / s[0] == doctest::Approx(s[2] / s[1]));
  CHECK_THROWS_AS(geometric_spacings(1.0, 0.5, 3), ParameterError);
  CHECK_THROWS_AS(geometric_spacings(1.0, 2.0, 1), ParameterError);
}

TEST_CASE("scaling benchmark bookkeeping") {
  ScalingOptions opt;
  opt.repeats = 3;
  opt.min_sample_seconds = 1e-4;
  opt.max_dof = 3000;
  const ScalingReport r = scaling_benchmark(uniform_family({0.6, 0.3}), {1, 2, 3}, opt);
  REQUIRE(r.entries.size() >= 2);
  for (const auto& e : r.entries) {
    CHECK(e.n_dof >= opt.min_dof);
    CHECK(e.n_dof <= opt.max_dof);
    CHECK(e.fill >= e.n_dof);
    CHECK(e.solve_seconds > 0.0);
    CHECK(e.batch >= 1);
  }
  CHECK(std::isfinite(r.exponent));
  CHECK(r.exponent > 0.0);
}

TEST_CASE("amplitude spectrum of a Gaussian") {
  const double dt = 0.01, sigma = 0.2, t0 = 2.0;
  const int n = 401;
  VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = std::exp(-0.5 * std::pow((i * dt - t0) / sigma, 2));
  VectorXd w, mag;
  amplitude_spectrum(g, dt, 4.0, w, mag);
  CHECK(w.size() == 1024 + 1);
  CHECK(w(1) == doctest::Approx(2 * kPi / (2048 * dt)));
  // |G(omega)| = sigma sqrt(2 pi) exp(-sigma^2 omega^2 / 2)
  for (Eigen::Index k = 0; k < w.size(); k += 37)
    CHECK(mag(k) == doctest::Approx(sigma * std::sqrt(2 * kPi) *
                                    std::exp(-0.5 * sigma * sigma * w(k) * w(k)))
                        .epsilon(1e-6)
                        .scale(1e-3));
  CHECK_THROWS_AS(amplitude_spectrum(g, 0.0, 4.0, w, mag), ParameterError);
  CHECK_THROWS_AS(amplitude_spectrum(g, dt, 0.5, w, mag), ParameterError);
}

TEST_CASE("spectral peak location") {
  const VectorXd w = VectorXd::LinSpaced(201, 0.0, 20.0);
  VectorXd mag(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k)
    mag(k) = std::exp(-w(k)) + 0.05 * std::exp(-std::pow(w(k) - 12.34, 2));
  double pw = 0.0, rel = 0.0;
  CHECK(locate_spectral_peak(w, mag, 5.0, 1e-3, pw, rel));
  CHECK(pw == doctest::Approx(12.34).epsilon(1e-3));
  CHECK(rel == doctest::Approx(0.05).epsilon(1e-2));
  // Above the threshold only.
  CHECK_FALSE(locate_spectral_peak(w, mag, 5.0, 0.1, pw, rel));
  // A maximum on the lower edge of the search band is not a peak.
  CHECK_FALSE(locate_spectral_peak(w, mag, 13.0, 1e-6, pw, rel));
  CHECK_FALSE(locate_spectral_peak(w, mag, 25.0, 1e-6, pw, rel));
}

TEST_CASE("relative RMS difference") {
  const VectorXd wa = VectorXd::LinSpaced(11, 0.0, 10.0);
  const VectorXd wb = VectorXd::LinSpaced(21, 0.0, 10.0);
  const VectorXd a = 2.0 * wa.array() + 1.0;
  const VectorXd b = 2.0 * wb.array() + 1.0;
  CHECK(relative_rms_difference(wa, a, wb, b, 1.0, 9.0) < 1e-14);
  const VectorXd b2 = 1.01 * b;
  CHECK(relative_rms_difference(wa, a, wb, b2, 0.0, 10.0) == doctest::Approx(0.01 / 1.01));
  CHECK_THROWS_AS(relative_rms_difference(wa, a, wb, b, 20.0, 30.0), ParameterError);
}
