#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace semrad {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// 1D orthogonal polynomials and Gauss rules
// ---------------------------------------------------------------------------

/// L2-orthonormal Jacobi polynomial P_n^{(a,b)}(x) on [-1,1].
double jacobi_poly(int n, double a, double b, double x);

/// Derivative of the orthonormal Jacobi polynomial.
double jacobi_poly_grad(int n, double a, double b, double x);

struct QuadratureRule1D {
  VectorXd points;
  VectorXd weights;
};

/// Gauss-Jacobi rule with n points (exact to degree 2n-1 for weight (1-x)^a (1+x)^b).
QuadratureRule1D jacobi_gauss(int n, double a, double b);

/// Gauss-Lobatto points of order P (P+1 points including the end points).
VectorXd gauss_lobatto_points(int order);

/// Vandermonde matrix of orthonormal Legendre polynomials, V(i,j) = P_j(x_i).
MatrixXd vandermonde_1d(int order, const VectorXd& x);
MatrixXd vandermonde_1d_grad(int order, const VectorXd& x);

// ---------------------------------------------------------------------------
// Simplex basis
// ---------------------------------------------------------------------------

/// Orthonormal Dubiner basis function psi_ij(r,s) on the reference triangle
/// (r,s) >= -1, r+s <= 0. Orthonormal with respect to the area-2 simplex.
double simplex_basis(int i, int j, double r, double s);

/// Gradient (d/dr, d/ds) of simplex_basis.
std::array<double, 2> simplex_basis_grad(int i, int j, double r, double s);

/// Interpolation nodes of order P: vertices, Gauss-Lobatto edge nodes and
/// warp-and-blend interior nodes. Returned as an n_ep x 2 matrix of (r,s).
Eigen::MatrixX2d nodal_set(int order);

/// Generalized Vandermonde V(i,m) = psi_m(r_i, s_i) for the order-P basis.
MatrixXd simplex_vandermonde(int order, const VectorXd& r, const VectorXd& s);
void simplex_vandermonde_grad(int order, const VectorXd& r, const VectorXd& s, MatrixXd& Vr,
                              MatrixXd& Vs);

struct Cubature {
  VectorXd r, s, w;
  int strength = 0;
  int size() const { return static_cast<int>(w.size()); }
};

/// Collapsed-coordinate Gauss rule on the reference triangle, exact for
/// polynomials of total degree <= strength.
Cubature simplex_cubature(int strength);

// ---------------------------------------------------------------------------
// Reference element
// ---------------------------------------------------------------------------

/// Order-P nodal triangle with all discrete operators used by the assembly.
///
/// Edge e runs counter-clockwise from vertex e to vertex (e+1)%3 with the
/// vertices (-1,-1), (1,-1), (-1,1). face_nodes[e] lists the P+1 nodes of
/// that edge in the same direction.
struct ReferenceElement {
  int order = 0;
  int n_nodes = 0;
  VectorXd r, s;
  MatrixXd V, invV, Vr, Vs;
  MatrixXd Dr, Ds;
  MatrixXd M;  ///< reference mass matrix (V V^T)^{-1}

  std::array<int, 3> vertex_nodes{};
  std::array<std::vector<int>, 3> face_nodes;
  VectorXd face_points;   ///< Gauss-Lobatto positions of the edge nodes in [-1,1]
  MatrixXd face_mass_1d;  ///< (P+1)x(P+1) mass on [-1,1]
  MatrixXd face_diff_1d;  ///< d/dt on the edge nodes

  /// Super-collocation cubature and nodal-to-cubature operators.
  Cubature cubature;
  MatrixXd cub_interp, cub_dr, cub_ds;

  /// Gauss rule on edges with interpolation/derivative from the edge nodes.
  QuadratureRule1D face_quad;
  MatrixXd face_quad_interp, face_quad_diff;

  /// Local node positions of each node in the affine map:
  /// barycentric-like weights for vertices, used to build physical coords.
  Eigen::Matrix<double, Eigen::Dynamic, 3> vertex_weights;

  /// Interpolation matrix from nodal values to arbitrary (r,s).
  MatrixXd interpolation_matrix(const VectorXd& r, const VectorXd& s) const;
};

/// Builds the order-P reference element. cubature_strength <= 0 selects the
/// default super-collocation strength 6P+4.
ReferenceElement build_reference_element(int order, int cubature_strength = 0);

}  // namespace semrad
