#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "semrad/hydro.hpp"
#include "semrad/radiation.hpp"

namespace semrad {

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

struct ManufacturedSolution {
  std::string name;
  std::function<double(double, double)> value, dx, dz, laplacian;

  /// cos(pi x / L) cosh(pi (z + h) / L) + sin(2x) cos(3z)
  static ManufacturedSolution trigonometric(double length, double depth);
  /// phi = x, harmonic and reproduced exactly at every order.
  static ManufacturedSolution linear();
};

/// Solves lap phi = f with phi on the free surface and d phi/dn elsewhere from
/// the manufactured solution; returns the nodal solution.
VectorXd solve_manufactured(const Discretization& d, const ManufacturedSolution& u);

/// max over all nodes of |phi - phi_h|.
double manufactured_error(const Discretization& d, const ManufacturedSolution& u);

struct MeshCase {
  std::string id;
  Mesh mesh;
};

struct ConvergenceEntry {
  std::string mesh_id;
  int elements = 0;
  double h_max = 0.0;
  int order = 0;
  int n_dof = 0;
  double error = 0.0;
};

struct ConvergenceReport {
  std::string solution;
  bool curved = false;
  std::vector<ConvergenceEntry> entries;  ///< mesh-major, increasing order
  std::map<int, double> h_rate;           ///< least-squares slope of log e vs log h_max
  std::map<std::string, double> p_decay;  ///< geometric error factor per unit P
  std::map<std::string, double> min_error;
  std::vector<std::string> flags;
};

struct ConvergenceOptions {
  double floor = 1e-11;  ///< errors below this count as round-off plateau
  int min_fit_order = 2;
  int max_fit_order = 8;
  int threads = 0;  ///< 0 selects the hardware concurrency
};

/// Runs every (mesh, order) case. With `curve` the body elements are curved
/// to it at each order.
ConvergenceReport mms_convergence(const std::vector<MeshCase>& meshes,
                                  const std::vector<int>& orders, const ManufacturedSolution& u,
                                  const BodyCurve* curve = nullptr,
                                  const ConvergenceOptions& options = {});

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Semi-discrete stability
// ---------------------------------------------------------------------------

struct StabilityReport {
  int surface_size = 0;
  std::vector<std::complex<double>> eigenvalues;  ///< sorted by |Im|, then Re
  double max_real = 0.0;
  double max_abs = 0.0;
  bool block_structure = false;  ///< reduced through the (eta, phi) block form
  bool stable = true;            ///< max_real <= tolerance * max_abs
  double tolerance = 1e-8;
};

/// Jacobian of the free-surface rates with respect to (eta, phi), built one
/// unit state at a time. Body forcing, the Sommerfeld flux and relaxation are
/// switched off.
MatrixXd semi_discrete_operator(const Discretization& d, const RadiationOptions& options = {});

/// Eigenvalues of the semi-discrete operator. Throws ParameterError when the
/// operator dimension exceeds `max_dimension`.
StabilityReport stability_eigenvalues(const Discretization& d, const RadiationOptions& options = {},
                                      int max_dimension = 4000, double tolerance = 1e-8);

/// Standing-wave frequencies sqrt(g k tanh kh), k = n pi / L, n = 1..count.
std::vector<double> standing_wave_frequencies(double length, double depth, int count,
                                              double g = kGravity);

// ---------------------------------------------------------------------------
// Scaling of the direct solve
// ---------------------------------------------------------------------------

struct ScalingEntry {
  std::string mesh_id;
  int elements = 0;
  int order = 0;
  int n_dof = 0;
  long fill = 0;
  int bandwidth = 0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;  ///< median per solve
  int batch = 1;               ///< solves per timed sample
};

struct ScalingReport {
  std::vector<ScalingEntry> entries;
  double exponent = 0.0;
  Ordering ordering = Ordering::AMD;
};

struct ScalingOptions {
  int min_dof = 100;
  int max_dof = 12000;
  int repeats = 10;
  double min_sample_seconds = 2e-3;
  Ordering ordering = Ordering::AMD;
};

/// Per-solve time of the free-surface Dirichlet problem for every (mesh, P)
/// whose size lies in [min_dof, max_dof]; fits time ~ N^p.
ScalingReport scaling_benchmark(const std::vector<MeshCase>& meshes, const std::vector<int>& orders,
                                const ScalingOptions& options = {});

/// Spacings h_coarse q^{-i}, i < count, with q chosen so that the family spans
/// `ratio`.
std::vector<double> geometric_spacings(double coarse, double ratio, int count);

// ---------------------------------------------------------------------------
// Spurious-oscillation studies
// ---------------------------------------------------------------------------

struct SpuriousConfig {
  double radius = 0.5;
  double depth = 3.0;
  double length = 40.0;
  int beta = 5;
  double grading = 1.15;
  double max_spacing = 0.8;
  int order = 4;
  double courant = 1.0;
  SurfaceDerivative surface_derivative = SurfaceDerivative::Consistent;
  double pad_factor = 8.0;
  double t0 = 0.0;           ///< common peak time; 0 selects the latest design value
  double baseline_alpha = 5.0;
  double search_factor = 1.2;
  double peak_threshold = 1e-3;  ///< relative to the spectrum maximum
  int threads = 0;
};

struct SpuriousCase {
  double alpha = 0.0;
  int beta = 0;
  double s = 0.0;
  PseudoImpulse impulse;
  int n_dof = 0;
  double dt = 0.0;
  bool stable = true;
  std::string failure;
  VectorXd t, x, eta, force;  ///< eta at the waterline, heave force
  VectorXd omega, eta_spectrum;  ///< |eta^(omega)|, 0 <= omega <= Nyquist
  HydroCoefficients coefficients;
  double search_from = 0.0;  ///< rad/s
  bool peak = false;
  double peak_omega = 0.0;
  double peak_nondimensional = 0.0;  ///< omega sqrt(R/g)
  double peak_amplitude = 0.0;       ///< relative to the spectrum maximum
  double band_energy = 0.0;          ///< int |eta^|^2 d omega above search_from
};

/// Same mesh, one run per alpha, all with a common peak time.
std::vector<SpuriousCase> spurious_alpha_study(const SpuriousConfig& config,
                                               const std::vector<double>& alphas);

/// Same impulse width s, one mesh per beta.
std::vector<SpuriousCase> spurious_beta_study(const SpuriousConfig& config,
                                              const std::vector<int>& betas, double s = 1.0);

/// Single-sided amplitude spectrum |sum f e^{-i omega t} dt| on the padded
/// grid, bins 0..n/2.
void amplitude_spectrum(const VectorXd& series, double dt, double pad_factor, VectorXd& omega,
                        VectorXd& magnitude);

/// Largest spectral magnitude at omega >= from, refined by a parabola through
/// the peak bin and its neighbours. Returns false when the maximum sits on the
/// band edge or below `threshold` times the global maximum.
bool locate_spectral_peak(const VectorXd& omega, const VectorXd& magnitude, double from,
                          double threshold, double& peak_omega, double& peak_relative);

/// RMS of a - b over RMS of b on the frequencies of omega_b inside
/// [lower, upper]; a is interpolated linearly from its own grid.
double relative_rms_difference(const VectorXd& omega_a, const VectorXd& a, const VectorXd& omega_b,
                               const VectorXd& b, double lower, double upper);

}  // namespace semrad
