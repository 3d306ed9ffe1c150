#include "semrad/hydro.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "semrad/error.hpp"

namespace semrad {

namespace {

int mode_column(int j) {
  switch (j) {
    case 1: return 0;
    case 3: return 1;
    case 5: return 2;
    default: throw ParameterError("force direction must be 1, 3 or 5");
  }
}

double symmetry_factor(bool half, int j, int k) {
  if (!half) return 1.0;
  return 1.0 + mode_parity(j) * mode_parity(k);
}

}  // namespace

VectorXd fd_time_derivative(const VectorXd& f, double dt) {
  const Eigen::Index n = f.size();
  if (n < 5) throw ParameterError("finite-difference derivative needs at least 5 samples");
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  VectorXd d(n);
  const double c = 1.0 / (12.0 * dt);
  d(0) = c * (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4));
  d(1) = c * (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4));
  for (Eigen::Index i = 2; i < n - 2; ++i)
    d(i) = c * (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2));
  d(n - 2) = -c * (-3 * f(n - 1) - 10 * f(n - 2) + 18 * f(n - 3) - 6 * f(n - 4) + f(n - 5));
  d(n - 1) = -c * (-25 * f(n - 1) + 48 * f(n - 2) - 36 * f(n - 3) + 16 * f(n - 4) - 3 * f(n - 5));
  return d;
}

VectorXd body_force(const RadiationRecord& rec, int j, double rho) {
  const int col = mode_column(j);
  const double factor = symmetry_factor(rec.half_domain, j, rec.impulse.mode);
  const Eigen::Index n = rec.t.size();
  if (factor == 0.0 || rec.body_dofs.empty()) return VectorXd::Zero(n);
  const VectorXd projection = rec.body_phi * rec.body_weights.col(col);
  return -rho * factor * fd_time_derivative(projection, rec.dt);
}

HydroCoefficients added_mass_damping(const VectorXd& force, const VectorXd& displacement,
                                     double dt, double cutoff, double pad_factor) {
  if (force.size() != displacement.size())
    throw ParameterError("force and displacement series differ in length");
  if (force.size() < 2) throw ParameterError("series too short for a transform");
  if (!(dt > 0.0) || !(cutoff > 0.0)) throw ParameterError("dt and cutoff must be positive");
  if (!(pad_factor >= 1.0)) throw ParameterError("pad factor must be at least 1");
  const double target = pad_factor * static_cast<double>(force.size());
  long n = 1;
  while (static_cast<double>(n) < target) n *= 2;

  std::vector<double> f(n, 0.0), x(n, 0.0);
  for (Eigen::Index i = 0; i < force.size(); ++i) {
    f[i] = force(i);
    x[i] = displacement(i);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> F, X;
  fft.fwd(F, f);
  fft.fwd(X, x);

  double xmax = 0.0;
  for (long k = 0; k <= n / 2; ++k) xmax = std::max(xmax, std::abs(X[k]));
  const double guard = 1e3 * std::numeric_limits<double>::epsilon() * xmax;

  HydroCoefficients c;
  c.cutoff = cutoff;
  c.dt = dt;
  c.padded_length = n;
  std::vector<double> om, a, b, re, im;
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  for (long k = 1; k <= n / 2; ++k) {
    const double w = dw * static_cast<double>(k);
    if (w > cutoff * (1.0 + 1e-12)) break;
    if (std::abs(X[k]) < guard) continue;
    const std::complex<double> ratio = F[k] / X[k];
    om.push_back(w);
    a.push_back(ratio.real() / (w * w));
    b.push_back(-ratio.imag() / w);
    re.push_back(ratio.real());
    im.push_back(ratio.imag());
  }
  const auto to_vec = [](const std::vector<double>& v) {
    return VectorXd(Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  c.omega = to_vec(om);
  c.a = to_vec(a);
  c.b = to_vec(b);
  c.ratio_re = to_vec(re);
  c.ratio_im = to_vec(im);
  return c;
}

NormalizedCoefficients normalize_cylinder(const HydroCoefficients& c, double radius, double rho) {
  if (!(radius > 0.0)) throw ParameterError("radius must be positive");
  const double ref = 0.5 * std::numbers::pi * rho * radius * radius;
  return {c.omega, c.a / ref, (c.b.array() / (ref * c.omega.array())).matrix()};
}

NormalizedCoefficients normalize_box(const HydroCoefficients& c, double half_length, double draft,
                                     double rho) {
  if (!(half_length > 0.0) || !(draft > 0.0)) throw ParameterError("box dimensions must be positive");
  const double ref = 2.0 * rho * half_length * draft;
  return {c.omega, c.a / ref, (c.b.array() / (ref * c.omega.array())).matrix()};
}

double infinite_frequency_added_mass(const Discretization& d, int j, int k, double rho) {
  mode_column(j);
  mode_column(k);
  const bool half = d.mesh.count_faces(BoundaryTag::Symmetry) > 0;
  const double factor = symmetry_factor(half, j, k);
  if (factor == 0.0) return 0.0;
  DiscreteLaplacian sys = assemble_stiffness(d);
  std::vector<int> fixed = d.dofs.fs_trace;
  if (mode_parity(k) < 0)
    for (int i : d.dofs.dofs(BoundaryTag::Symmetry)) fixed.push_back(i);
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
  impose_dirichlet(sys, fixed, VectorXd::Zero(static_cast<Eigen::Index>(fixed.size())));
  const auto normal = [](int mode) {
    return [mode](double x, double z, double nx, double nz) {
      return generalized_normal(mode, x, z, nx, nz);
    };
  };
  const VectorXd load = neumann_load(d, BoundaryTag::Body, normal(k));
  const VectorXd psi = factorize(sys.A).solve(sys.lifted_rhs(load, sys.dirichlet_values));
  const VectorXd wj = neumann_load(d, BoundaryTag::Body, normal(j));
  return rho * factor * wj.dot(psi);
}

}  // namespace semrad
