#include "semrad/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "semrad/error.hpp"
#include "semrad/linsolve.hpp"

namespace semrad {

namespace {

constexpr double kPi = std::numbers::pi;

// Runs job(i) for i < n on up to `threads` workers; the first exception wins.
template <class Job>
void parallel_for(int n, int threads, Job job) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          job(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------
// MMS
// ---------------------------------------------------------------------------

ManufacturedSolution ManufacturedSolution::trigonometric(double length, double depth) {
  if (!(length > 0.0) || !(depth > 0.0))
    throw ParameterError("manufactured solution needs positive length and depth");
  const double k = kPi / length, h = depth;
  ManufacturedSolution u;
  u.name = "cos(pi x/L) cosh(pi (z+h)/L) + sin(2x) cos(3z)";
  u.value = [=](double x, double z) {
    return std::cos(k * x) * std::cosh(k * (z + h)) + std::sin(2 * x) * std::cos(3 * z);
  };
  u.dx = [=](double x, double z) {
    return -k * std::sin(k * x) * std::cosh(k * (z + h)) + 2 * std::cos(2 * x) * std::cos(3 * z);
  };
  u.dz = [=](double x, double z) {
    return k * std::cos(k * x) * std::sinh(k * (z + h)) - 3 * std::sin(2 * x) * std::sin(3 * z);
  };
  u.laplacian = [](double x, double z) { return -13.0 * std::sin(2 * x) * std::cos(3 * z); };
  return u;
}

ManufacturedSolution ManufacturedSolution::linear() {
  ManufacturedSolution u;
  u.name = "x";
  u.value = [](double x, double) { return x; };
  u.dx = [](double, double) { return 1.0; };
  u.dz = [](double, double) { return 0.0; };
  u.laplacian = [](double, double) { return 0.0; };
  return u;
}

VectorXd solve_manufactured(const Discretization& d, const ManufacturedSolution& u) {
  const auto& fs = d.dofs.fs_trace;
  if (fs.empty()) throw GeometryError("manufactured solve needs a free surface");
  DiscreteLaplacian sys = assemble_stiffness(d);
  VectorXd load = -assemble_volume_source(d, u.laplacian);
  for (BoundaryTag tag : {BoundaryTag::Bed, BoundaryTag::FarField, BoundaryTag::Body,
                          BoundaryTag::Symmetry})
    load += neumann_load(d, tag, [&u](double x, double z, double nx, double nz) {
      return u.dx(x, z) * nx + u.dz(x, z) * nz;
    });
  VectorXd g(static_cast<Eigen::Index>(fs.size()));
  for (std::size_t k = 0; k < fs.size(); ++k) g(k) = u.value(d.dofs.x(fs[k]), d.dofs.z(fs[k]));
  impose_dirichlet(sys, fs, g);
  return factorize(sys.A).solve(sys.lifted_rhs(load, sys.dirichlet_values));
}

double manufactured_error(const Discretization& d, const ManufacturedSolution& u) {
  const VectorXd phi = solve_manufactured(d, u);
  double e = 0.0;
  for (int i = 0; i < d.dofs.n_dof; ++i)
    e = std::max(e, std::abs(phi(i) - u.value(d.dofs.x(i), d.dofs.z(i))));
  return e;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope fit needs two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ParameterError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

ConvergenceReport mms_convergence(const std::vector<MeshCase>& meshes,
                                  const std::vector<int>& orders, const ManufacturedSolution& u,
                                  const BodyCurve* curve, const ConvergenceOptions& options) {
  if (meshes.empty() || orders.empty()) throw ParameterError("empty convergence study");
  ConvergenceReport rep;
  rep.solution = u.name;
  rep.curved = curve != nullptr;
  const int no = static_cast<int>(orders.size());
  rep.entries.resize(meshes.size() * orders.size());
  parallel_for(static_cast<int>(rep.entries.size()), options.threads, [&](int i) {
    const MeshCase& mc = meshes[i / no];
    const int P = orders[i % no];
    Mesh m = mc.mesh;
    if (curve) m = curve_body_elements(m, build_reference_element(P), *curve);
    const Discretization d = discretize(m, P);
    ConvergenceEntry& e = rep.entries[i];
    e.mesh_id = mc.id;
    e.elements = mc.mesh.n_elements();
    e.h_max = max_edge_length(mc.mesh);
    e.order = P;
    e.n_dof = d.dofs.n_dof;
    e.error = manufactured_error(d, u);
  });

  for (std::size_t m = 0; m < meshes.size(); ++m) {
    std::vector<double> p, le;
    double lowest = INFINITY, previous = INFINITY;
    for (int k = 0; k < no; ++k) {
      const ConvergenceEntry& e = rep.entries[m * no + k];
      lowest = std::min(lowest, e.error);
      if (e.error < options.floor) continue;
      if (e.error > previous)
        rep.flags.push_back(meshes[m].id + ": error grows from P = " + std::to_string(e.order - 1) +
                            " to P = " + std::to_string(e.order) + " above the round-off floor");
      previous = e.error;
      if (e.order >= options.min_fit_order && e.order <= options.max_fit_order) {
        p.push_back(e.order);
        le.push_back(std::log(e.error));
      }
    }
    rep.min_error[meshes[m].id] = lowest;
    if (p.size() >= 2) rep.p_decay[meshes[m].id] = std::exp(fitted_slope(p, le));
  }
  if (meshes.size() >= 2)
    for (int k = 0; k < no; ++k) {
      std::vector<double> lh, le;
      for (std::size_t m = 0; m < meshes.size(); ++m) {
        const ConvergenceEntry& e = rep.entries[m * no + k];
        if (e.error < options.floor) continue;
        lh.push_back(std::log(e.h_max));
        le.push_back(std::log(e.error));
      }
      if (lh.size() >= 2) rep.h_rate[orders[k]] = fitted_slope(lh, le);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

MatrixXd semi_discrete_operator(const Discretization& d, const RadiationOptions& options) {
  RadiationOptions opt = options;
  opt.forcing = false;
  opt.sommerfeld = false;
  opt.relaxation = false;
  const PseudoImpulse imp =
      design_pseudo_impulse(surface_spacing(d.dofs).max, d.mesh.depth, opt.mode, 3.0);
  const RadiationSolver solver(d, imp, opt, 1.0);
  const int m = solver.surface_size();
  MatrixXd J(2 * m, 2 * m);
  VectorXd eta = VectorXd::Zero(m), phi = VectorXd::Zero(m), ed, pd;
  for (int i = 0; i < 2 * m; ++i) {
    if (i < m)
      eta(i) = 1.0;
    else
      phi(i - m) = 1.0;
    solver.rates(0.0, eta, phi, ed, pd);
    J.col(i) << ed, pd;
    eta.setZero();
    phi.setZero();
  }
  return J;
}

StabilityReport stability_eigenvalues(const Discretization& d, const RadiationOptions& options,
                                      int max_dimension, double tolerance) {
  const int m = static_cast<int>(d.dofs.fs_trace.size());
  if (2 * m > max_dimension)
    throw ParameterError("semi-discrete operator of dimension " + std::to_string(2 * m) +
                         " exceeds the dense eigenvalue budget " + std::to_string(max_dimension) +
                         "; use a coarser mesh or lower order");
  const MatrixXd J = semi_discrete_operator(d, options);
  StabilityReport rep;
  rep.surface_size = m;
  rep.tolerance = tolerance;

  // With (eta, phi)' = (W phi, -g eta) the spectrum is +-sqrt(-g mu), mu in
  // spec(W); this avoids the defective pair at the constant-potential mode.
  const double scale = J.cwiseAbs().maxCoeff();
  const auto near = [&](const MatrixXd& X, const MatrixXd& Y) {
    return (X - Y).cwiseAbs().maxCoeff() <= 1e-13 * scale;
  };
  const MatrixXd Z = MatrixXd::Zero(m, m);
  rep.block_structure =
      near(J.topLeftCorner(m, m), Z) && near(J.bottomRightCorner(m, m), Z) &&
      near(J.bottomLeftCorner(m, m), -options.g * MatrixXd::Identity(m, m));
  if (rep.block_structure) {
    const MatrixXd W = J.topRightCorner(m, m);
    // The square root would lift round-off in a null eigenvalue of W to
    // sqrt(eps) in lambda.
    const double zero = 1e3 * std::numeric_limits<double>::epsilon() *
                        W.cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::EigenSolver<MatrixXd> es(W, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      std::complex<double> mu = es.eigenvalues()(i);
      if (std::abs(mu) <= zero) mu = 0.0;
      const std::complex<double> lam = std::sqrt(-options.g * mu);
      rep.eigenvalues.push_back(lam);
      rep.eigenvalues.push_back(-lam);
    }
  } else {
    Eigen::EigenSolver<MatrixXd> es(J, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      rep.eigenvalues.push_back(es.eigenvalues()(i));
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              const double ia = std::abs(a.imag()), ib = std::abs(b.imag());
              if (ia != ib) return ia < ib;
              if (a.imag() != b.imag()) return a.imag() < b.imag();
              return a.real() < b.real();
            });
  for (const auto& lam : rep.eigenvalues) {
    rep.max_real = std::max(rep.max_real, lam.real());
    rep.max_abs = std::max(rep.max_abs, std::abs(lam));
  }
  rep.stable = rep.max_real <= tolerance * rep.max_abs;
  return rep;
}

std::vector<double> standing_wave_frequencies(double length, double depth, int count, double g) {
  std::vector<double> w;
  for (int n = 1; n <= count; ++n) {
    const double k = n * kPi / length;
    w.push_back(std::sqrt(g * k * std::tanh(k * depth)));
  }
  return w;
}

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

std::vector<double> geometric_spacings(double coarse, double ratio, int count) {
  if (count < 2 || !(ratio > 1.0) || !(coarse > 0.0))
    throw ParameterError("spacing family needs count >= 2, ratio > 1 and coarse > 0");
  std::vector<double> h(count);
  for (int i = 0; i < count; ++i) h[i] = coarse * std::pow(ratio, -static_cast<double>(i) / (count - 1));
  return h;
}

ScalingReport scaling_benchmark(const std::vector<MeshCase>& meshes, const std::vector<int>& orders,
                                const ScalingOptions& options) {
  if (options.repeats < 1) throw ParameterError("repeats must be positive");
  ScalingReport rep;
  rep.ordering = options.ordering;
  using clock = std::chrono::steady_clock;
  for (const MeshCase& mc : meshes)
    for (int P : orders) {
      const Discretization d = discretize(mc.mesh, P);
      if (d.dofs.n_dof < options.min_dof || d.dofs.n_dof > options.max_dof) continue;
      DiscreteLaplacian sys = assemble_stiffness(d);
      impose_dirichlet(sys, d.dofs.fs_trace,
                       VectorXd::Zero(static_cast<Eigen::Index>(d.dofs.fs_trace.size())));
      const Factorization f = factorize(sys.A, options.ordering);
      const VectorXd b = VectorXd::Ones(d.dofs.n_dof);

      // Batch solves until one sample exceeds the timer resolution target.
      int batch = 1;
      VectorXd x;
      for (;;) {
        const auto t0 = clock::now();
        for (int k = 0; k < batch; ++k) x = f.solve(b);
        if (std::chrono::duration<double>(clock::now() - t0).count() >= options.min_sample_seconds)
          break;
        batch *= 2;
      }
      std::vector<double> samples;
      for (int r = 0; r < options.repeats; ++r) {
        const auto t0 = clock::now();
        for (int k = 0; k < batch; ++k) x = f.solve(b);
        samples.push_back(std::chrono::duration<double>(clock::now() - t0).count() / batch);
      }
      ScalingEntry e;
      e.mesh_id = mc.id;
      e.elements = mc.mesh.n_elements();
      e.order = P;
      e.n_dof = d.dofs.n_dof;
      e.fill = f.fill();
      e.bandwidth = f.bandwidth();
      e.factor_seconds = f.factor_seconds();
      e.solve_seconds = median(samples);
      e.batch = batch;
      rep.entries.push_back(e);
    }
  if (rep.entries.size() < 2) throw ParameterError("scaling study needs at least two systems");
  std::vector<double> ln, lt;
  for (const auto& e : rep.entries) {
    ln.push_back(std::log(e.n_dof));
    lt.push_back(std::log(e.solve_seconds));
  }
  rep.exponent = fitted_slope(ln, lt);
  return rep;
}

// ---------------------------------------------------------------------------
// Spurious oscillations
// ---------------------------------------------------------------------------

void amplitude_spectrum(const VectorXd& series, double dt, double pad_factor, VectorXd& omega,
                        VectorXd& magnitude) {
  if (series.size() < 2 || !(dt > 0.0) || !(pad_factor >= 1.0))
    throw ParameterError("spectrum needs two samples, dt > 0 and pad factor >= 1");
  long n = 1;
  while (static_cast<double>(n) < pad_factor * static_cast<double>(series.size())) n *= 2;
  std::vector<double> f(n, 0.0);
  for (Eigen::Index i = 0; i < series.size(); ++i) f[i] = series(i);
  std::vector<std::complex<double>> F;
  Eigen::FFT<double> fft;
  fft.fwd(F, f);
  const long half = n / 2;
  omega.resize(half + 1);
  magnitude.resize(half + 1);
  for (long k = 0; k <= half; ++k) {
    omega(k) = 2.0 * kPi * static_cast<double>(k) / (static_cast<double>(n) * dt);
    magnitude(k) = std::abs(F[k]) * dt;
  }
}

bool locate_spectral_peak(const VectorXd& omega, const VectorXd& magnitude, double from,
                          double threshold, double& peak_omega, double& peak_relative) {
  peak_omega = 0.0;
  peak_relative = 0.0;
  const double top = magnitude.maxCoeff();
  Eigen::Index first = 0;
  while (first < omega.size() && omega(first) < from) ++first;
  if (first >= omega.size() || top <= 0.0) return false;
  Eigen::Index k = first;
  for (Eigen::Index i = first; i < omega.size(); ++i)
    if (magnitude(i) > magnitude(k)) k = i;
  peak_omega = omega(k);
  peak_relative = magnitude(k) / top;
  if (k == first || k + 1 >= omega.size()) return false;
  const double ym = magnitude(k - 1), y0 = magnitude(k), yp = magnitude(k + 1);
  const double den = ym - 2 * y0 + yp;
  if (den < 0.0) {
    const double shift = 0.5 * (ym - yp) / den;
    peak_omega = omega(k) + shift * (omega(k + 1) - omega(k));
    peak_relative = (y0 - 0.25 * (ym - yp) * shift) / top;
  }
  return peak_relative >= threshold;
}

double relative_rms_difference(const VectorXd& omega_a, const VectorXd& a, const VectorXd& omega_b,
                               const VectorXd& b, double lower, double upper) {
  double num = 0.0, den = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < omega_b.size(); ++i) {
    const double w = omega_b(i);
    if (w < lower || w > upper || w < omega_a(0) || w > omega_a(omega_a.size() - 1)) continue;
    const auto it = std::lower_bound(omega_a.data(), omega_a.data() + omega_a.size(), w);
    Eigen::Index j = it - omega_a.data();
    double ai = a(j);
    if (omega_a(j) != w) {
      const double th = (w - omega_a(j - 1)) / (omega_a(j) - omega_a(j - 1));
      ai = (1 - th) * a(j - 1) + th * a(j);
    }
    num += (ai - b(i)) * (ai - b(i));
    den += b(i) * b(i);
    ++count;
  }
  if (count == 0 || den == 0.0) throw ParameterError("no common frequencies to compare");
  return std::sqrt(num / den);
}

namespace {

Discretization cylinder_discretization(const SpuriousConfig& c, int beta) {
  const Mesh m = generate_cylinder_domain(
      {c.radius, c.depth, c.length, beta, c.grading, true, c.max_spacing});
  const ReferenceElement ref = build_reference_element(c.order);
  return discretize(curve_body_elements(m, ref, BodyCurve::circle(Vec2(0, 0), c.radius)),
                    c.order);
}

void run_case(const SpuriousConfig& c, const Discretization& d, SpuriousCase& sc) {
  sc.n_dof = d.dofs.n_dof;
  const SurfaceSpacing sp = surface_spacing(d.dofs);
  sc.search_from = c.search_factor *
                   design_pseudo_impulse(sp.max, c.depth, 3, c.baseline_alpha).omega_r;
  RadiationOptions opt;
  opt.mode = 3;
  opt.courant = c.courant;
  opt.surface_derivative = c.surface_derivative;
  try {
    const RadiationRecord rec = run_radiation(d, sc.impulse, opt, 0.0, {c.radius});
    sc.dt = rec.dt;
    sc.t = rec.t;
    sc.x = rec.x;
    sc.eta = rec.monitor_eta.col(0);
    sc.force = body_force(rec, 3);
    sc.coefficients = added_mass_damping(sc.force, sc.x, rec.dt, sc.impulse.omega_r, c.pad_factor);
  } catch (const DivergenceError& e) {
    sc.stable = false;
    sc.failure = e.what();
    return;
  }
  amplitude_spectrum(sc.eta, sc.dt, c.pad_factor, sc.omega, sc.eta_spectrum);
  sc.peak = locate_spectral_peak(sc.omega, sc.eta_spectrum, sc.search_from, c.peak_threshold,
                                 sc.peak_omega, sc.peak_amplitude);
  sc.peak_nondimensional = sc.peak_omega * std::sqrt(c.radius / kGravity);
  const double dw = sc.omega(1) - sc.omega(0);
  for (Eigen::Index k = 0; k < sc.omega.size(); ++k)
    if (sc.omega(k) >= sc.search_from) sc.band_energy += sc.eta_spectrum(k) * sc.eta_spectrum(k) * dw;
}

}  // namespace

std::vector<SpuriousCase> spurious_alpha_study(const SpuriousConfig& config,
                                               const std::vector<double>& alphas) {
  if (alphas.empty()) throw ParameterError("empty alpha list");
  const Discretization d = cylinder_discretization(config, config.beta);
  const double dx = surface_spacing(d.dofs).max;
  std::vector<SpuriousCase> cases(alphas.size());
  double t0 = config.t0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw ParameterError("alpha must be positive");
    cases[i].alpha = alphas[i];
    cases[i].beta = config.beta;
    cases[i].impulse = design_pseudo_impulse(dx, config.depth, 3, alphas[i]);
    cases[i].s = cases[i].impulse.s;
    if (config.t0 <= 0.0) t0 = std::max(t0, cases[i].impulse.t0);
  }
  for (auto& c : cases) c.impulse = with_peak_time(c.impulse, t0);
  parallel_for(static_cast<int>(cases.size()), config.threads,
               [&](int i) { run_case(config, d, cases[i]); });
  return cases;
}

std::vector<SpuriousCase> spurious_beta_study(const SpuriousConfig& config,
                                              const std::vector<int>& betas, double s) {
  if (betas.empty()) throw ParameterError("empty beta list");
  std::vector<Discretization> meshes;
  // A narrow impulse peaks early; the record keeps the length of the baseline
  // alpha run so that late ringing is captured.
  PseudoImpulse imp = pseudo_impulse_from_width(s, config.depth, 3);
  double t0 = std::max(config.t0, imp.t0);
  for (int beta : betas) {
    meshes.push_back(cylinder_discretization(config, beta));
    if (config.t0 <= 0.0)
      t0 = std::max(t0, design_pseudo_impulse(surface_spacing(meshes.back().dofs).max,
                                              config.depth, 3, config.baseline_alpha)
                            .t0);
  }
  imp = with_peak_time(imp, t0);
  std::vector<SpuriousCase> cases(betas.size());
  parallel_for(static_cast<int>(cases.size()), config.threads, [&](int i) {
    cases[i].beta = betas[i];
    cases[i].s = s;
    cases[i].impulse = imp;
    cases[i].alpha = imp.L_r / surface_spacing(meshes[i].dofs).max;
    run_case(config, meshes[i], cases[i]);
  });
  return cases;
}

}  // namespace semrad
