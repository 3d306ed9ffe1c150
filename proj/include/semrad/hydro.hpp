#pragma once

#include "semrad/assembly.hpp"
#include "semrad/radiation.hpp"

namespace semrad {

inline constexpr double kWaterDensity = 1000.0;

/// Fourth-order finite-difference time derivative: centered in the interior,
/// one-sided five-point stencils at both ends. Needs at least 5 samples.
VectorXd fd_time_derivative(const VectorXd& series, double dt);

/// Radiation force F_jk(t) = int -rho dphi/dt n_j dGamma on the full body.
/// Half-domain records are completed by symmetry: a factor 2 when j and k
/// have equal parity, zero otherwise.
VectorXd body_force(const RadiationRecord& rec, int j, double rho = kWaterDensity);

struct HydroCoefficients {
  VectorXd omega;  ///< rad/s, 0 < omega <= cutoff
  VectorXd a;      ///< added mass
  VectorXd b;      ///< damping
  VectorXd ratio_re, ratio_im;  ///< F^/x^
  double cutoff = 0.0;
  double dt = 0.0;
  long padded_length = 0;
};

/// omega^2 a - i omega b = F^(omega) / x^(omega) with F^ = sum F(t) e^{-i omega t} dt.
/// Both series are zero padded to the next power of two of pad_factor times
/// their length. Frequencies where |x^| falls below 1e3 machine epsilon of its
/// maximum are dropped.
HydroCoefficients added_mass_damping(const VectorXd& force, const VectorXd& displacement,
                                     double dt, double cutoff, double pad_factor = 8.0);

struct NormalizedCoefficients {
  VectorXd omega, mu, nu;
};

/// mu = a / (pi rho R^2 / 2), nu = b / (pi rho omega R^2 / 2).
NormalizedCoefficients normalize_cylinder(const HydroCoefficients& c, double radius,
                                          double rho = kWaterDensity);
/// mu = a / (2 rho a d), nu = b / (2 rho omega a d).
NormalizedCoefficients normalize_box(const HydroCoefficients& c, double half_length, double draft,
                                     double rho = kWaterDensity);

/// Rigid-lid limit: psi = 0 on the free surface, d psi/dn = n_k on the body,
/// a_jk = rho int psi n_j dGamma on the full body.
double infinite_frequency_added_mass(const Discretization& d, int j, int k,
                                     double rho = kWaterDensity);

}  // namespace semrad
