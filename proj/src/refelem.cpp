#include "semrad/refelem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "semrad/error.hpp"

namespace semrad {

namespace {

void check_jacobi_args(int n, double a, double b) {
  if (n < 0) throw ParameterError("jacobi_poly: negative degree " + std::to_string(n));
  if (!(a > -1.0) || !(b > -1.0))
    throw ParameterError("jacobi_poly: weights must satisfy a, b > -1");
}

}  // namespace

double jacobi_poly(int n, double a, double b, double x) {
  check_jacobi_args(n, a, b);
  const double gamma0 = std::pow(2.0, a + b + 1.0) / (a + b + 1.0) * std::tgamma(a + 1.0) *
                        std::tgamma(b + 1.0) / std::tgamma(a + b + 1.0);
  double p_prev = 1.0 / std::sqrt(gamma0);
  if (n == 0) return p_prev;
  const double gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
  double p = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / std::sqrt(gamma1);
  if (n == 1) return p;

  double a_old = 2.0 / (2.0 + a + b) * std::sqrt((a + 1.0) * (b + 1.0) / (a + b + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + a + b;
    const double a_new = 2.0 / (h1 + 2.0) *
                         std::sqrt((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) * (i + 1.0 + b) /
                                   (h1 + 1.0) / (h1 + 3.0));
    const double b_new = -(a * a - b * b) / h1 / (h1 + 2.0);
    const double p_next = (-a_old * p_prev + (x - b_new) * p) / a_new;
    p_prev = p;
    p = p_next;
    a_old = a_new;
  }
  return p;
}

double jacobi_poly_grad(int n, double a, double b, double x) {
  check_jacobi_args(n, a, b);
  if (n == 0) return 0.0;
  return std::sqrt(n * (n + a + b + 1.0)) * jacobi_poly(n - 1, a + 1.0, b + 1.0, x);
}

QuadratureRule1D jacobi_gauss(int n, double a, double b) {
  check_jacobi_args(n, a, b);
  if (n < 1) throw ParameterError("jacobi_gauss: need at least one point");
  QuadratureRule1D rule;
  const double mass = std::pow(2.0, a + b + 1.0) / (a + b + 1.0) * std::tgamma(a + 1.0) *
                      std::tgamma(b + 1.0) / std::tgamma(a + b + 1.0);
  if (n == 1) {
    rule.points = VectorXd::Constant(1, (b - a) / (a + b + 2.0));
    rule.weights = VectorXd::Constant(1, mass);
    return rule;
  }
  // Golub-Welsch on the symmetric Jacobi matrix.
  MatrixXd J = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double h1 = 2.0 * i + a + b;
    J(i, i) = (std::abs(h1) < 1e-14) ? 0.0 : -(a * a - b * b) / ((h1 + 2.0) * h1);
  }
  for (int k = 1; k < n; ++k) {
    const double h1 = 2.0 * (k - 1) + a + b;
    const double off = 2.0 / (h1 + 2.0) *
                       std::sqrt(k * (k + a + b) * (k + a) * (k + b) / ((h1 + 1.0) * (h1 + 3.0)));
    J(k - 1, k) = off;
    J(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(J);
  rule.points = eig.eigenvalues();
  rule.weights = eig.eigenvectors().row(0).transpose().array().square() * mass;
  return rule;
}

VectorXd gauss_lobatto_points(int order) {
  if (order < 1) throw ParameterError("gauss_lobatto_points: order must be >= 1");
  VectorXd x(order + 1);
  x(0) = -1.0;
  x(order) = 1.0;
  if (order > 1) {
    const auto inner = jacobi_gauss(order - 1, 1.0, 1.0);
    x.segment(1, order - 1) = inner.points;
  }
  // Symmetrize against eigen-solver round-off.
  for (int i = 0; i <= order / 2; ++i) {
    const double v = 0.5 * (x(order - i) - x(i));
    x(i) = -v;
    x(order - i) = v;
  }
  if (order % 2 == 0) x(order / 2) = 0.0;
  return x;
}

MatrixXd vandermonde_1d(int order, const VectorXd& x) {
  MatrixXd V(x.size(), order + 1);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (int j = 0; j <= order; ++j) V(i, j) = jacobi_poly(j, 0.0, 0.0, x(i));
  return V;
}

MatrixXd vandermonde_1d_grad(int order, const VectorXd& x) {
  MatrixXd V(x.size(), order + 1);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (int j = 0; j <= order; ++j) V(i, j) = jacobi_poly_grad(j, 0.0, 0.0, x(i));
  return V;
}

// ---------------------------------------------------------------------------

namespace {

// Collapsed coordinates; the top vertex s = 1 maps to a = -1 (analytic limit).
std::pair<double, double> collapse(double r, double s) {
  const double a = (std::abs(1.0 - s) > 1e-14) ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
  return {a, s};
}

}  // namespace

double simplex_basis(int i, int j, double r, double s) {
  if (i < 0 || j < 0) throw ParameterError("simplex_basis: negative index");
  const auto [a, b] = collapse(r, s);
  const double h1 = jacobi_poly(i, 0.0, 0.0, a);
  const double h2 = jacobi_poly(j, 2.0 * i + 1.0, 0.0, b);
  return std::sqrt(2.0) * h1 * h2 * std::pow(1.0 - b, i);
}

std::array<double, 2> simplex_basis_grad(int i, int j, double r, double s) {
  if (i < 0 || j < 0) throw ParameterError("simplex_basis_grad: negative index");
  const auto [a, b] = collapse(r, s);
  const double fa = jacobi_poly(i, 0.0, 0.0, a);
  const double dfa = jacobi_poly_grad(i, 0.0, 0.0, a);
  const double gb = jacobi_poly(j, 2.0 * i + 1.0, 0.0, b);
  const double dgb = jacobi_poly_grad(j, 2.0 * i + 1.0, 0.0, b);

  const double half_1mb = 0.5 * (1.0 - b);
  const double pow_im1 = (i > 0) ? std::pow(half_1mb, i - 1) : 1.0;

  double dr = dfa * gb * ((i > 0) ? pow_im1 : 1.0);
  double ds = dfa * (gb * (0.5 * (1.0 + a))) * ((i > 0) ? pow_im1 : 1.0);
  double tmp = dgb * std::pow(half_1mb, i);
  if (i > 0) tmp -= 0.5 * i * gb * pow_im1;
  ds += fa * tmp;

  const double scale = std::pow(2.0, i + 0.5);
  return {dr * scale, ds * scale};
}

namespace {

// Warp function for the edge distribution of warp-and-blend nodes.
VectorXd warp_factor(int order, const VectorXd& rout) {
  const VectorXd lgl = gauss_lobatto_points(order);
  const VectorXd req = VectorXd::LinSpaced(order + 1, -1.0, 1.0);
  const MatrixXd Veq = vandermonde_1d(order, req);
  MatrixXd Pmat(order + 1, rout.size());
  for (int i = 0; i <= order; ++i)
    for (Eigen::Index k = 0; k < rout.size(); ++k) Pmat(i, k) = jacobi_poly(i, 0.0, 0.0, rout(k));
  const MatrixXd Lmat = Veq.transpose().fullPivLu().solve(Pmat);
  VectorXd warp = Lmat.transpose() * (lgl - req);
  for (Eigen::Index k = 0; k < rout.size(); ++k) {
    const bool inside = std::abs(rout(k)) < 1.0 - 1e-10;
    if (inside) {
      warp(k) /= 1.0 - rout(k) * rout(k);
    } else {
      warp(k) = 0.0;
    }
  }
  return warp;
}

constexpr std::array<double, 15> kAlphaOpt = {0.0000, 0.0000, 1.4152, 0.1001, 0.2751,
                                              0.9800, 1.0999, 1.2832, 1.3648, 1.4773,
                                              1.4959, 1.5743, 1.5770, 1.6223, 1.6258};

}  // namespace

Eigen::MatrixX2d nodal_set(int order) {
  if (order < 1) throw ParameterError("nodal_set: order must be >= 1");
  const double alpha = order <= 15 ? kAlphaOpt[order - 1] : 5.0 / 3.0;
  const int np = (order + 1) * (order + 2) / 2;

  VectorXd L1(np), L2(np), L3(np), x(np), y(np);
  int sk = 0;
  for (int n = 1; n <= order + 1; ++n) {
    for (int m = 1; m <= order + 2 - n; ++m) {
      L1(sk) = (n - 1.0) / order;
      L3(sk) = (m - 1.0) / order;
      L2(sk) = 1.0 - L1(sk) - L3(sk);
      x(sk) = -L2(sk) + L3(sk);
      y(sk) = (-L2(sk) - L3(sk) + 2.0 * L1(sk)) / std::sqrt(3.0);
      ++sk;
    }
  }

  const VectorXd w1 = warp_factor(order, L3 - L2);
  const VectorXd w2 = warp_factor(order, L1 - L3);
  const VectorXd w3 = warp_factor(order, L2 - L1);
  const double c2 = std::cos(2.0 * std::numbers::pi / 3.0), s2 = std::sin(2.0 * std::numbers::pi / 3.0);
  const double c4 = std::cos(4.0 * std::numbers::pi / 3.0), s4 = std::sin(4.0 * std::numbers::pi / 3.0);
  for (int k = 0; k < np; ++k) {
    const double warp1 = 4.0 * L2(k) * L3(k) * w1(k) * (1.0 + std::pow(alpha * L1(k), 2));
    const double warp2 = 4.0 * L1(k) * L3(k) * w2(k) * (1.0 + std::pow(alpha * L2(k), 2));
    const double warp3 = 4.0 * L1(k) * L2(k) * w3(k) * (1.0 + std::pow(alpha * L3(k), 2));
    x(k) += warp1 + c2 * warp2 + c4 * warp3;
    y(k) += s2 * warp2 + s4 * warp3;
  }

  // Equilateral triangle -> reference (r,s).
  Eigen::MatrixX2d rs(np, 2);
  for (int k = 0; k < np; ++k) {
    const double l1 = (std::sqrt(3.0) * y(k) + 1.0) / 3.0;
    const double l2 = (-3.0 * x(k) - std::sqrt(3.0) * y(k) + 2.0) / 6.0;
    const double l3 = (3.0 * x(k) - std::sqrt(3.0) * y(k) + 2.0) / 6.0;
    rs(k, 0) = -l2 + l3 - l1;
    rs(k, 1) = -l2 - l3 + l1;
  }
  return rs;
}

MatrixXd simplex_vandermonde(int order, const VectorXd& r, const VectorXd& s) {
  const int np = (order + 1) * (order + 2) / 2;
  MatrixXd V(r.size(), np);
  int m = 0;
  for (int i = 0; i <= order; ++i)
    for (int j = 0; j <= order - i; ++j, ++m)
      for (Eigen::Index k = 0; k < r.size(); ++k) V(k, m) = simplex_basis(i, j, r(k), s(k));
  return V;
}

void simplex_vandermonde_grad(int order, const VectorXd& r, const VectorXd& s, MatrixXd& Vr,
                              MatrixXd& Vs) {
  const int np = (order + 1) * (order + 2) / 2;
  Vr.resize(r.size(), np);
  Vs.resize(r.size(), np);
  int m = 0;
  for (int i = 0; i <= order; ++i)
    for (int j = 0; j <= order - i; ++j, ++m)
      for (Eigen::Index k = 0; k < r.size(); ++k) {
        const auto g = simplex_basis_grad(i, j, r(k), s(k));
        Vr(k, m) = g[0];
        Vs(k, m) = g[1];
      }
}

Cubature simplex_cubature(int strength) {
  if (strength < 0) throw ParameterError("simplex_cubature: negative strength");
  const int n = std::max(1, (strength + 3) / 2);  // ceil((strength+2)/2)
  const auto g = jacobi_gauss(n, 0.0, 0.0);
  Cubature c;
  c.strength = strength;
  c.r.resize(n * n);
  c.s.resize(n * n);
  c.w.resize(n * n);
  int k = 0;
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib, ++k) {
      const double a = g.points(ia), b = g.points(ib);
      c.r(k) = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
      c.s(k) = b;
      c.w(k) = g.weights(ia) * g.weights(ib) * 0.5 * (1.0 - b);
    }
  return c;
}

MatrixXd ReferenceElement::interpolation_matrix(const VectorXd& rq, const VectorXd& sq) const {
  return simplex_vandermonde(order, rq, sq) * invV;
}

ReferenceElement build_reference_element(int order, int cubature_strength) {
  if (order < 1 || order > 12)
    throw ParameterError("build_reference_element: order must lie in [1, 12], got " +
                         std::to_string(order));
  ReferenceElement ref;
  ref.order = order;
  ref.n_nodes = (order + 1) * (order + 2) / 2;

  const Eigen::MatrixX2d rs = nodal_set(order);
  ref.r = rs.col(0);
  ref.s = rs.col(1);

  ref.V = simplex_vandermonde(order, ref.r, ref.s);
  Eigen::JacobiSVD<MatrixXd> svd(ref.V);
  const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  if (!std::isfinite(cond) || cond > 1e12)
    throw GeometryError("build_reference_element: ill-conditioned Vandermonde (cond=" +
                        std::to_string(cond) + ")");
  ref.invV = ref.V.inverse();
  simplex_vandermonde_grad(order, ref.r, ref.s, ref.Vr, ref.Vs);
  ref.Dr = ref.Vr * ref.invV;
  ref.Ds = ref.Vs * ref.invV;
  ref.M = ref.invV.transpose() * ref.invV;

  // Vertices and edges.
  const std::array<std::array<double, 2>, 3> verts = {{{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}}};
  constexpr double tol = 1e-10;
  for (int v = 0; v < 3; ++v) {
    ref.vertex_nodes[v] = -1;
    for (int k = 0; k < ref.n_nodes; ++k)
      if (std::abs(ref.r(k) - verts[v][0]) < tol && std::abs(ref.s(k) - verts[v][1]) < tol)
        ref.vertex_nodes[v] = k;
  }
  for (int e = 0; e < 3; ++e) {
    std::vector<std::pair<double, int>> on_edge;
    for (int k = 0; k < ref.n_nodes; ++k) {
      const double r = ref.r(k), s = ref.s(k);
      if (e == 0 && std::abs(s + 1.0) < tol) on_edge.emplace_back(r, k);
      if (e == 1 && std::abs(r + s) < tol) on_edge.emplace_back(s, k);
      if (e == 2 && std::abs(r + 1.0) < tol) on_edge.emplace_back(-s, k);
    }
    std::sort(on_edge.begin(), on_edge.end());
    for (const auto& [t, k] : on_edge) ref.face_nodes[e].push_back(k);
  }
  ref.face_points = gauss_lobatto_points(order);
  const MatrixXd V1 = vandermonde_1d(order, ref.face_points);
  const MatrixXd invV1 = V1.inverse();
  ref.face_mass_1d = invV1.transpose() * invV1;
  ref.face_diff_1d = vandermonde_1d_grad(order, ref.face_points) * invV1;

  ref.vertex_weights.resize(ref.n_nodes, 3);
  for (int k = 0; k < ref.n_nodes; ++k) {
    ref.vertex_weights(k, 0) = -0.5 * (ref.r(k) + ref.s(k));
    ref.vertex_weights(k, 1) = 0.5 * (1.0 + ref.r(k));
    ref.vertex_weights(k, 2) = 0.5 * (1.0 + ref.s(k));
  }

  const int strength = cubature_strength > 0 ? cubature_strength : 6 * order + 4;
  ref.cubature = simplex_cubature(strength);
  ref.cub_interp = ref.interpolation_matrix(ref.cubature.r, ref.cubature.s);
  MatrixXd Vcr, Vcs;
  simplex_vandermonde_grad(order, ref.cubature.r, ref.cubature.s, Vcr, Vcs);
  ref.cub_dr = Vcr * ref.invV;
  ref.cub_ds = Vcs * ref.invV;

  ref.face_quad = jacobi_gauss((strength + 2) / 2, 0.0, 0.0);
  ref.face_quad_interp = vandermonde_1d(order, ref.face_quad.points) * invV1;
  ref.face_quad_diff = vandermonde_1d_grad(order, ref.face_quad.points) * invV1;
  return ref;
}

}  // namespace semrad
