#pragma once

#include <functional>
#include <vector>

#include "semrad/assembly.hpp"
#include "semrad/linsolve.hpp"

namespace semrad {

inline constexpr double kGravity = 9.81;

/// Gaussian displacement x(t) = A exp(-2 pi^2 s^2 (t - t0)^2) and its design
/// parameters.
struct PseudoImpulse {
  int mode = 3;
  double alpha = 3.0;
  double r = 1e-4;
  double epsilon = 1e-8;
  double s = 0.0;        ///< 1/s
  double t0 = 0.0;       ///< s
  double f_r = 0.0;      ///< Hz
  double omega_r = 0.0;  ///< rad/s
  double k_r = 0.0;      ///< rad/m
  double L_r = 0.0;      ///< m
  double amplitude = 1.0;

  double displacement(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  /// Fourier transform of the displacement at cyclic frequency f.
  double spectrum(double f) const;
};

/// Designs the impulse from the largest free-surface node spacing:
/// L_r = alpha dx_max, k_r = 2 pi / L_r, omega_r from linear dispersion.
PseudoImpulse design_pseudo_impulse(double dx_max, double depth, int mode, double alpha,
                                    double r = 1e-4, double epsilon = 1e-8,
                                    double g = kGravity);

/// Impulse with a prescribed width s; f_r = s sqrt(-2 ln r) and the design
/// wave follows from inverting the dispersion relation.
PseudoImpulse pseudo_impulse_from_width(double s, double depth, int mode, double r = 1e-4,
                                        double epsilon = 1e-8, double g = kGravity);

/// Moves the peak to t0, which may not be earlier than the epsilon-based value.
PseudoImpulse with_peak_time(PseudoImpulse p, double t0);

std::pair<double, double> impulse_signals(const PseudoImpulse& p, double t);
double impulse_spectrum(const PseudoImpulse& p, double f);

/// Wavenumber of linear waves with angular frequency omega on depth h.
double dispersion_wavenumber(double omega, double depth, double g = kGravity);

struct SurfaceSpacing {
  double min = 0.0;
  double max = 0.0;
};

/// Smallest and largest spacing between neighbouring free-surface nodes.
SurfaceSpacing surface_spacing(const DofMap& dofs);

/// dt = Cr dx_min / sqrt(g h).
double cfl_timestep(double dx_min, double courant, double depth, double g = kGravity);

/// Cubic relaxation ramp c(x) over [start, end]: 0 before the zone, 1 at the end.
VectorXd relaxation_ramp(const VectorXd& x, double start, double end);

/// Per-step blending weight 1 - exp(-rate c dt) for a ramp c in [0, 1].
VectorXd relaxation_step_factor(const VectorXd& ramp, double rate, double dt);

/// v <- (1 - c) v for both free-surface fields.
void apply_relaxation_zone(VectorXd& eta, VectorXd& phi, const VectorXd& ramp);

/// One classical four-stage Runge-Kutta step of y' = f(t, y). A precomputed
/// first stage may be supplied.
VectorXd erk4_step(const std::function<VectorXd(double, const VectorXd&)>& f, double t,
                   const VectorXd& y, double dt, const VectorXd* k1 = nullptr);

/// Recovery of the vertical velocity on the free surface: from the Galerkin
/// residual of the Dirichlet rows (consistent) or by element-local
/// differentiation averaged over the elements sharing a node.
enum class SurfaceDerivative { Consistent, ElementLocal };

struct RadiationOptions {
  int mode = 3;
  SurfaceDerivative surface_derivative = SurfaceDerivative::Consistent;
  double g = kGravity;
  double courant = 1.0;
  double dt = 0.0;                ///< overrides the CFL step when > 0
  bool forcing = true;            ///< body flux from the impulse velocity
  bool sommerfeld = true;
  bool relaxation = true;
  double relaxation_length = 0.0;  ///< 0 selects max(2 L_r, 2 h)
  double relaxation_rate = 0.0;    ///< 1/s at the end of the zone; 0 selects omega_r
  Ordering ordering = Ordering::AMD;
  double divergence_factor = 1e3;
};

/// Free-surface state on the trace nodes (ordered by x).
struct SurfaceState {
  double t = 0.0;
  VectorXd eta;
  VectorXd phi;
};

/// Semi-discrete free-surface problem: each rate evaluation solves the Laplace
/// problem with the free-surface potential as Dirichlet data.
class RadiationSolver {
public:
  RadiationSolver(const Discretization& d, const PseudoImpulse& impulse,
                  const RadiationOptions& options, double dt);

  int surface_size() const { return static_cast<int>(d_.dofs.fs_trace.size()); }
  double dt() const { return dt_; }
  double sampling_offset() const { return dx_sample_; }
  /// Blending weights applied after each step.
  const VectorXd& ramp() const { return ramp_; }
  const Factorization& factorization() const { return fact_; }
  const Discretization& discretization() const { return d_; }

  /// Volume potential at time t for the given surface potential.
  VectorXd solve_potential(double t, const VectorXd& phi) const;

  /// (eta', phi') at time t.
  void rates(double t, const VectorXd& eta, const VectorXd& phi, VectorXd& eta_dot,
             VectorXd& phi_dot) const;

  /// Advances the state by one step (four solves), updates the Sommerfeld
  /// history and applies the relaxation zone. `potential` may carry the
  /// volume solution at the current state.
  void step(SurfaceState& state, const VectorXd* potential = nullptr);

  /// Far-field flux V_s(t) = u(L - dx, t - dt) on the far-field nodes, linear
  /// in time between the last two sampling-line evaluations. Zero from rest.
  VectorXd sommerfeld_flux_at(double t) const;
  /// Outward horizontal velocity on the sampling lines for a volume solution.
  VectorXd sample_velocity(const VectorXd& potential) const;

  /// Vertical velocity at the free-surface nodes for a volume solution at t.
  VectorXd surface_velocity(double t, const VectorXd& potential) const;

private:
  VectorXd neumann_rhs(double t) const;
  VectorXd rates_from_potential(double t, const VectorXd& u, const VectorXd& eta) const;

  Discretization d_;
  PseudoImpulse impulse_;
  RadiationOptions opt_;
  double dt_ = 0.0;
  DiscreteLaplacian sys_;
  Factorization fact_;
  std::vector<int> dirichlet_from_fs_;  ///< per Dirichlet slot: trace index or -1
  VectorXd body_load_;
  SparseMatrix dz_;          ///< element-local recovery
  SparseMatrix fs_rows_;     ///< A0 restricted to free-surface rows
  SparseMatrix fs_select_;   ///< N x m
  Factorization fs_mass_;
  SparseMatrix ff_mass_;     ///< N x n_ff
  SparseMatrix ff_sampler_;  ///< n_ff x N, outward normal velocity
  std::vector<double> ff_side_;
  VectorXd vs_prev_, vs_;  ///< sampling-line velocity at t_step - dt and t_step
  double t_step_ = 0.0;
  VectorXd ramp_;
  double dx_sample_ = 0.0;
};

/// Time histories of one radiation run on a uniform grid t_i = i dt.
struct RadiationRecord {
  PseudoImpulse impulse;
  RadiationOptions options;
  double dt = 0.0;
  double t_end = 0.0;
  double depth = 0.0;
  int n_dof = 0;
  int order = 0;
  SurfaceSpacing spacing;
  bool half_domain = false;
  VectorXd t, x, xdot;
  std::vector<int> body_dofs;
  MatrixXd body_phi;      ///< steps x n_body
  MatrixXd body_weights;  ///< n_body x 3: int l_i n_j dGamma for j = 1, 3, 5
  std::vector<double> monitor_x;
  MatrixXd monitor_eta;   ///< steps x n_monitor
  double seconds = 0.0;
};

/// Runs to max(t_end, 3 t0) (t_end = 0 selects 3 t0), recording body
/// potentials and the elevation at free-surface monitor abscissae.
RadiationRecord run_radiation(const Discretization& d, const PseudoImpulse& impulse,
                              const RadiationOptions& options, double t_end = 0.0,
                              const std::vector<double>& monitor_x = {});

/// Interpolation weights (rows: points, cols: trace index) of the free-surface
/// trace at abscissae x.
SparseMatrix surface_interpolator(const Discretization& d, const std::vector<double>& x);

/// +1 for heave, -1 for surge and pitch (parity about the symmetry plane).
int mode_parity(int mode);

}  // namespace semrad
