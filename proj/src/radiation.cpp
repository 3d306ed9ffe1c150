#include "semrad/radiation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "semrad/error.hpp"

namespace semrad {

namespace {

constexpr double kPi = std::numbers::pi;

void check_mode(int mode) {
  if (mode != 1 && mode != 3 && mode != 5)
    throw ParameterError("mode must be 1 (surge), 3 (heave) or 5 (pitch), got " +
                         std::to_string(mode));
}

void check_design(double r, double epsilon, double depth) {
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("spectral ratio r must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(depth > 0.0)) throw ParameterError("depth must be positive");
}

double peak_time(double s, double epsilon) {
  return std::sqrt(std::log(epsilon) / (-2.0 * kPi * kPi * s * s));
}

}  // namespace

double PseudoImpulse::displacement(double t) const {
  const double a = 2.0 * kPi * kPi * s * s;
  return amplitude * std::exp(-a * (t - t0) * (t - t0));
}

double PseudoImpulse::velocity(double t) const {
  return -4.0 * kPi * kPi * s * s * (t - t0) * displacement(t);
}

double PseudoImpulse::acceleration(double t) const {
  const double c = 4.0 * kPi * kPi * s * s;
  return (c * c * (t - t0) * (t - t0) - c) * displacement(t);
}

double PseudoImpulse::spectrum(double f) const {
  return amplitude / (s * std::sqrt(2.0 * kPi)) * std::exp(-f * f / (2.0 * s * s));
}

double dispersion_wavenumber(double omega, double depth, double g) {
  if (omega <= 0.0) return 0.0;
  const double w2 = omega * omega;
  double k = w2 / g / std::sqrt(std::tanh(w2 * depth / g));
  for (int it = 0; it < 100; ++it) {
    const double th = std::tanh(k * depth);
    const double f = g * k * th - w2;
    const double df = g * th + g * k * depth * (1.0 - th * th);
    const double dk = f / df;
    k -= dk;
    if (std::abs(dk) < 1e-15 * k) break;
  }
  return k;
}

PseudoImpulse design_pseudo_impulse(double dx_max, double depth, int mode, double alpha,
                                    double r, double epsilon, double g) {
  check_mode(mode);
  check_design(r, epsilon, depth);
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(dx_max > 0.0)) throw ParameterError("free-surface spacing must be positive");
  PseudoImpulse p;
  p.mode = mode;
  p.alpha = alpha;
  p.r = r;
  p.epsilon = epsilon;
  p.L_r = alpha * dx_max;
  p.k_r = 2.0 * kPi / p.L_r;
  p.omega_r = std::sqrt(g * p.k_r * std::tanh(p.k_r * depth));
  p.f_r = p.omega_r / (2.0 * kPi);
  p.s = std::sqrt(-p.f_r * p.f_r / (2.0 * std::log(r)));
  p.t0 = peak_time(p.s, epsilon);
  return p;
}

PseudoImpulse pseudo_impulse_from_width(double s, double depth, int mode, double r,
                                        double epsilon, double g) {
  check_mode(mode);
  check_design(r, epsilon, depth);
  if (!(s > 0.0)) throw ParameterError("impulse width s must be positive");
  PseudoImpulse p;
  p.mode = mode;
  p.alpha = 0.0;
  p.r = r;
  p.epsilon = epsilon;
  p.s = s;
  p.f_r = s * std::sqrt(-2.0 * std::log(r));
  p.omega_r = 2.0 * kPi * p.f_r;
  p.k_r = dispersion_wavenumber(p.omega_r, depth, g);
  p.L_r = 2.0 * kPi / p.k_r;
  p.t0 = peak_time(s, epsilon);
  return p;
}

PseudoImpulse with_peak_time(PseudoImpulse p, double t0) {
  if (t0 < p.t0 * (1.0 - 1e-12))
    throw ParameterError("peak time " + std::to_string(t0) + " s is earlier than " +
                         std::to_string(p.t0) + " s required for x(0) <= epsilon");
  p.t0 = t0;
  return p;
}

std::pair<double, double> impulse_signals(const PseudoImpulse& p, double t) {
  return {p.displacement(t), p.velocity(t)};
}

double impulse_spectrum(const PseudoImpulse& p, double f) { return p.spectrum(f); }

SurfaceSpacing surface_spacing(const DofMap& dofs) {
  const auto& fs = dofs.fs_trace;
  if (fs.size() < 2) throw GeometryError("free surface has fewer than two nodes");
  SurfaceSpacing sp{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 1; k < fs.size(); ++k) {
    const double dx = dofs.x(fs[k]) - dofs.x(fs[k - 1]);
    sp.min = std::min(sp.min, dx);
    sp.max = std::max(sp.max, dx);
  }
  return sp;
}

double cfl_timestep(double dx_min, double courant, double depth, double g) {
  if (!(courant > 0.0 && courant <= 1.0)) throw ParameterError("Courant number must lie in (0, 1]");
  if (!(dx_min > 0.0) || !(depth > 0.0)) throw ParameterError("spacing and depth must be positive");
  return courant * dx_min / std::sqrt(g * depth);
}

VectorXd relaxation_ramp(const VectorXd& x, double start, double end) {
  if (!(end > start)) throw ParameterError("relaxation zone must have positive length");
  VectorXd c(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = std::clamp((x(i) - start) / (end - start), 0.0, 1.0);
    c(i) = xi * xi * xi;
  }
  return c;
}

VectorXd relaxation_step_factor(const VectorXd& ramp, double rate, double dt) {
  if (!(rate > 0.0) || !(dt > 0.0)) throw ParameterError("relaxation rate and step must be positive");
  return (1.0 - (-rate * dt * ramp.array()).exp()).matrix();
}

void apply_relaxation_zone(VectorXd& eta, VectorXd& phi, const VectorXd& ramp) {
  const auto keep = (1.0 - ramp.array());
  eta.array() *= keep;
  phi.array() *= keep;
}

VectorXd erk4_step(const std::function<VectorXd(double, const VectorXd&)>& f, double t,
                   const VectorXd& y, double dt, const VectorXd* k1) {
  const VectorXd a = k1 ? *k1 : f(t, y);
  const VectorXd b = f(t + 0.5 * dt, y + 0.5 * dt * a);
  const VectorXd c = f(t + 0.5 * dt, y + 0.5 * dt * b);
  const VectorXd d = f(t + dt, y + dt * c);
  return y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d);
}

int mode_parity(int mode) {
  check_mode(mode);
  return mode == 3 ? 1 : -1;
}

RadiationSolver::RadiationSolver(const Discretization& d, const PseudoImpulse& impulse,
                                 const RadiationOptions& options, double dt)
    : d_(d), impulse_(impulse), opt_(options), dt_(dt) {
  check_mode(opt_.mode);
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const double depth = d_.mesh.depth;
  const auto& fs = d_.dofs.fs_trace;
  const int N = d_.dofs.n_dof;
  if (fs.empty()) throw GeometryError("mesh has no free-surface faces");

  sys_ = assemble_stiffness(d_);
  std::vector<int> fixed = fs;
  if (mode_parity(opt_.mode) < 0)
    for (int i : d_.dofs.dofs(BoundaryTag::Symmetry)) fixed.push_back(i);
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
  impose_dirichlet(sys_, fixed, VectorXd::Zero(static_cast<Eigen::Index>(fixed.size())));
  std::vector<int> trace_index(N, -1);
  for (std::size_t k = 0; k < fs.size(); ++k) trace_index[fs[k]] = static_cast<int>(k);
  dirichlet_from_fs_.clear();
  for (int i : sys_.dirichlet) dirichlet_from_fs_.push_back(trace_index[i]);
  fact_ = factorize(sys_.A, opt_.ordering);

  const int mode = opt_.mode;
  body_load_ = neumann_load(d_, BoundaryTag::Body, [mode](double x, double z, double nx, double nz) {
    return generalized_normal(mode, x, z, nx, nz);
  });
  if (opt_.surface_derivative == SurfaceDerivative::ElementLocal) {
    dz_ = trace_derivative_operator(d_, fs, BoundaryTag::FreeSurface, 1);
  } else {
    Triplets sel;
    for (std::size_t k = 0; k < fs.size(); ++k) sel.emplace_back(fs[k], static_cast<int>(k), 1.0);
    fs_select_.resize(N, static_cast<Eigen::Index>(fs.size()));
    fs_select_.setFromTriplets(sel.begin(), sel.end());
    const SparseMatrix St = fs_select_.transpose();
    fs_rows_ = St * sys_.A0;
    const SparseMatrix M = St * boundary_mass(d_, BoundaryTag::FreeSurface) * fs_select_;
    fs_mass_ = factorize(M, opt_.ordering);
  }

  if (opt_.sommerfeld) {
    const auto& ff = d_.dofs.dofs(BoundaryTag::FarField);
    if (ff.empty()) throw ConfigError("the Sommerfeld condition needs far-field faces");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i : ff) {
      lo = std::min(lo, d_.dofs.x(i));
      hi = std::max(hi, d_.dofs.x(i));
    }
    const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (!(depth > 0.0)) throw GeometryError("mesh depth must be positive");
    dx_sample_ = dt_ * std::sqrt(opt_.g * depth);
    std::vector<Vec2> pts;
    ff_side_.clear();
    for (int i : ff) {
      const double x = d_.dofs.x(i);
      const double side = std::abs(x - hi) <= tol ? 1.0 : (std::abs(x - lo) <= tol ? -1.0 : 0.0);
      if (side == 0.0)
        throw ConfigError("the Sommerfeld condition needs vertical far-field boundaries");
      ff_side_.push_back(side);
      pts.emplace_back(x - side * dx_sample_, d_.dofs.z(i));
    }
    const Eigen::Map<const VectorXd> side(ff_side_.data(), static_cast<Eigen::Index>(ff_side_.size()));
    ff_sampler_ = side.asDiagonal() * point_derivative_operator(d_, pts, 0);
    Triplets sel;
    for (std::size_t j = 0; j < ff.size(); ++j) sel.emplace_back(ff[j], static_cast<int>(j), 1.0);
    SparseMatrix S(N, static_cast<Eigen::Index>(ff.size()));
    S.setFromTriplets(sel.begin(), sel.end());
    ff_mass_ = boundary_mass(d_, BoundaryTag::FarField) * S;
    vs_ = VectorXd::Zero(static_cast<Eigen::Index>(ff.size()));
    vs_prev_ = vs_;
  }

  VectorXd xs(static_cast<Eigen::Index>(fs.size()));
  for (std::size_t k = 0; k < fs.size(); ++k) xs(k) = d_.dofs.x(fs[k]);
  ramp_ = VectorXd::Zero(xs.size());
  if (opt_.relaxation) {
    const double length = opt_.relaxation_length > 0.0
                              ? opt_.relaxation_length
                              : std::max(2.0 * impulse_.L_r, 2.0 * depth);
    std::vector<bool> on_ff(N, false);
    for (int i : d_.dofs.dofs(BoundaryTag::FarField)) on_ff[i] = true;
    double body_lo = std::numeric_limits<double>::infinity();
    double body_hi = -body_lo;
    for (int i : d_.dofs.body_trace) {
      body_lo = std::min(body_lo, d_.dofs.x(i));
      body_hi = std::max(body_hi, d_.dofs.x(i));
    }
    const double lo = xs.minCoeff();
    const double hi = xs.maxCoeff();
    const auto reaches = [&](double a, double b) {
      return (a <= body_hi && b >= body_lo) || b - a >= hi - lo;
    };
    const std::string advice = " m reaches the body; lengthen the domain or set "
                               "absorption.relaxation_length";
    VectorXd c = VectorXd::Zero(xs.size());
    bool any = false;
    if (on_ff[fs.back()]) {
      if (reaches(hi - length, hi))
        throw ConfigError("relaxation zone of length " + std::to_string(length) + advice);
      c = c.cwiseMax(relaxation_ramp(xs, hi - length, hi));
      any = true;
    }
    if (on_ff[fs.front()]) {
      if (reaches(lo, lo + length))
        throw ConfigError("relaxation zone of length " + std::to_string(length) + advice);
      c = c.cwiseMax(relaxation_ramp(-xs, -(lo + length), -lo));
      any = true;
    }
    if (!any) throw ConfigError("the relaxation zone needs a far-field end of the free surface");
    const double rate = opt_.relaxation_rate > 0.0 ? opt_.relaxation_rate : impulse_.omega_r;
    ramp_ = relaxation_step_factor(c, rate, dt_);
  }
}

VectorXd RadiationSolver::sommerfeld_flux_at(double t) const {
  const double theta = std::clamp((t - t_step_) / dt_, 0.0, 1.0);
  return (1.0 - theta) * vs_prev_ + theta * vs_;
}

VectorXd RadiationSolver::neumann_rhs(double t) const {
  VectorXd load = VectorXd::Zero(d_.dofs.n_dof);
  if (opt_.forcing) load += impulse_.velocity(t) * body_load_;
  if (opt_.sommerfeld) load += ff_mass_ * sommerfeld_flux_at(t);
  return load;
}

VectorXd RadiationSolver::solve_potential(double t, const VectorXd& phi) const {
  VectorXd values(static_cast<Eigen::Index>(dirichlet_from_fs_.size()));
  for (std::size_t k = 0; k < dirichlet_from_fs_.size(); ++k)
    values(k) = dirichlet_from_fs_[k] >= 0 ? phi(dirichlet_from_fs_[k]) : 0.0;
  return fact_.solve(sys_.lifted_rhs(neumann_rhs(t), values));
}

VectorXd RadiationSolver::surface_velocity(double t, const VectorXd& u) const {
  if (opt_.surface_derivative == SurfaceDerivative::ElementLocal) return dz_ * u;
  const VectorXd residual = fs_rows_ * u - fs_select_.transpose() * neumann_rhs(t);
  return fs_mass_.solve(residual);
}

VectorXd RadiationSolver::rates_from_potential(double t, const VectorXd& u,
                                               const VectorXd& eta) const {
  const Eigen::Index m = eta.size();
  VectorXd r(2 * m);
  r.head(m) = surface_velocity(t, u);
  r.tail(m) = -opt_.g * eta;
  return r;
}

void RadiationSolver::rates(double t, const VectorXd& eta, const VectorXd& phi, VectorXd& eta_dot,
                            VectorXd& phi_dot) const {
  const VectorXd r = rates_from_potential(t, solve_potential(t, phi), eta);
  eta_dot = r.head(eta.size());
  phi_dot = r.tail(eta.size());
}

VectorXd RadiationSolver::sample_velocity(const VectorXd& potential) const {
  if (!opt_.sommerfeld) return VectorXd();
  return ff_sampler_ * potential;
}

void RadiationSolver::step(SurfaceState& state, const VectorXd* potential) {
  const Eigen::Index m = surface_size();
  if (state.eta.size() != m || state.phi.size() != m)
    throw ParameterError("surface state does not match the free-surface trace");
  t_step_ = state.t;
  VectorXd u0 = potential ? *potential : solve_potential(state.t, state.phi);
  if (opt_.sommerfeld) {
    vs_prev_ = vs_;
    vs_ = sample_velocity(u0);
  }
  const VectorXd k1 = rates_from_potential(state.t, u0, state.eta);
  VectorXd y(2 * m);
  y << state.eta, state.phi;
  const auto f = [&](double t, const VectorXd& v) {
    return rates_from_potential(t, solve_potential(t, v.tail(m)), v.head(m));
  };
  const VectorXd next = erk4_step(f, state.t, y, dt_, &k1);
  state.eta = next.head(m);
  state.phi = next.tail(m);
  if (opt_.relaxation) apply_relaxation_zone(state.eta, state.phi, ramp_);
  state.t += dt_;
  t_step_ = state.t;
  vs_prev_ = vs_;
}

SparseMatrix surface_interpolator(const Discretization& d, const std::vector<double>& xq) {
  const auto& fs = d.dofs.fs_trace;
  std::vector<int> trace_index(d.dofs.n_dof, -1);
  for (std::size_t k = 0; k < fs.size(); ++k) trace_index[fs[k]] = static_cast<int>(k);
  Triplets trip;
  for (std::size_t q = 0; q < xq.size(); ++q) {
    bool found = false;
    for (const auto& face : d.geo.faces) {
      if (face.tag != BoundaryTag::FreeSurface) continue;
      const auto& fn = d.ref.face_nodes[face.local_edge];
      std::vector<int> dofs;
      std::vector<double> xs;
      for (int i : fn) {
        dofs.push_back(d.dofs.element_dofs(i, face.element));
        xs.push_back(d.dofs.x(dofs.back()));
      }
      const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
      const double tol = 1e-12 * std::max(1.0, std::abs(*hi));
      if (xq[q] < *lo - tol || xq[q] > *hi + tol) continue;
      for (std::size_t a = 0; a < xs.size(); ++a) {
        double w = 1.0;
        for (std::size_t b = 0; b < xs.size(); ++b)
          if (b != a) w *= (xq[q] - xs[b]) / (xs[a] - xs[b]);
        if (w != 0.0) trip.emplace_back(static_cast<int>(q), trace_index[dofs[a]], w);
      }
      found = true;
      break;
    }
    if (!found)
      throw GeometryError("monitor abscissa " + std::to_string(xq[q]) +
                          " is not on the free surface");
  }
  SparseMatrix I(static_cast<Eigen::Index>(xq.size()), static_cast<Eigen::Index>(fs.size()));
  I.setFromTriplets(trip.begin(), trip.end());
  return I;
}

RadiationRecord run_radiation(const Discretization& d, const PseudoImpulse& impulse,
                              const RadiationOptions& options, double t_end,
                              const std::vector<double>& monitor_x) {
  const auto clock0 = std::chrono::steady_clock::now();
  RadiationRecord rec;
  rec.impulse = impulse;
  rec.options = options;
  rec.depth = d.mesh.depth;
  rec.n_dof = d.dofs.n_dof;
  rec.order = d.ref.order;
  rec.spacing = surface_spacing(d.dofs);
  rec.dt = options.dt > 0.0 ? options.dt
                            : cfl_timestep(rec.spacing.min, options.courant, rec.depth, options.g);
  const double horizon = std::max(t_end, 3.0 * impulse.t0);
  const long steps = static_cast<long>(std::ceil(horizon / rec.dt - 1e-9));
  rec.t_end = static_cast<double>(steps) * rec.dt;
  rec.half_domain = d.mesh.count_faces(BoundaryTag::Symmetry) > 0;

  RadiationSolver solver(d, impulse, options, rec.dt);

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
  rec.monitor_x = monitor_x;
  const SparseMatrix interp = surface_interpolator(d, monitor_x);

  const Eigen::Index rows = steps + 1;
  rec.t.resize(rows);
  rec.x.resize(rows);
  rec.xdot.resize(rows);
  rec.body_phi.resize(rows, nb);
  rec.monitor_eta.resize(rows, static_cast<Eigen::Index>(monitor_x.size()));

  SurfaceState state;
  state.eta = VectorXd::Zero(solver.surface_size());
  state.phi = VectorXd::Zero(solver.surface_size());
  const double limit = options.divergence_factor * std::abs(impulse.amplitude);
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * rec.dt;
    state.t = t;
    const VectorXd u = solver.solve_potential(t, state.phi);
    rec.t(i) = t;
    rec.x(i) = impulse.displacement(t);
    rec.xdot(i) = impulse.velocity(t);
    for (Eigen::Index k = 0; k < nb; ++k) rec.body_phi(i, k) = u(rec.body_dofs[k]);
    if (monitor_x.size()) rec.monitor_eta.row(i) = (interp * state.eta).transpose();
    if (i == steps) break;
    solver.step(state, &u);
    const double peak = state.eta.cwiseAbs().maxCoeff();
    if (!state.eta.allFinite() || !state.phi.allFinite() || (limit > 0.0 && peak > limit))
      throw DivergenceError("radiation run diverged at step " + std::to_string(i + 1) +
                                " (t = " + std::to_string(state.t) +
                                " s); check the discretization with the stability analysis",
                            i + 1);
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
  return rec;
}

}  // namespace semrad
