#include <cmath>
#include <numbers>

#include "semrad/error.hpp"
#include "semrad/mesh.hpp"

namespace semrad {

BodyCurve BodyCurve::circle(const Vec2& center, double radius) {
  BodyCurve c;
  c.edge_point = [center, radius](const Vec2& a, const Vec2& b, double t) {
    const double ta = std::atan2(a.y() - center.y(), a.x() - center.x());
    double dt = std::atan2(b.y() - center.y(), b.x() - center.x()) - ta;
    if (dt > std::numbers::pi) dt -= 2.0 * std::numbers::pi;
    if (dt <= -std::numbers::pi) dt += 2.0 * std::numbers::pi;
    const double th = ta + 0.5 * (t + 1.0) * dt;
    return Vec2(center.x() + radius * std::cos(th), center.y() + radius * std::sin(th));
  };
  c.distance = [center, radius](const Vec2& p) { return std::abs((p - center).norm() - radius); };
  return c;
}

BodyCurve BodyCurve::straight() {
  BodyCurve c;
  c.edge_point = [](const Vec2& a, const Vec2& b, double t) {
    return Vec2(0.5 * (1.0 - t) * a + 0.5 * (1.0 + t) * b);
  };
  c.distance = [](const Vec2&) { return 0.0; };
  return c;
}

Vec2 blended_map(const std::array<Vec2, 3>& verts, int curved_edge, const BodyCurve& curve,
                 double r, double s) {
  const std::array<double, 3> lam = {-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0};
  Vec2 x = lam[0] * verts[0] + lam[1] * verts[1] + lam[2] * verts[2];
  const int a = curved_edge, b = (curved_edge + 1) % 3;
  // The edge deviation divided by (1 - xi^2) is smooth, so is the blend.
  const double xi = lam[b] - lam[a];
  const double bubble = 1.0 - xi * xi;
  if (bubble < 1e-13) return x;
  const Vec2 gamma = curve.edge_point(verts[a], verts[b], xi);
  const Vec2 chord = 0.5 * (1.0 - xi) * verts[a] + 0.5 * (1.0 + xi) * verts[b];
  return x + (4.0 * lam[a] * lam[b] / bubble) * (gamma - chord);
}

namespace {

void element_coordinates(const Mesh& mesh, const ReferenceElement& ref, int e, VectorXd& x,
                         VectorXd& z) {
  if (mesh.is_curved(e)) {
    if (mesh.curved_order != ref.order)
      throw GeometryError("curved node data has order " + std::to_string(mesh.curved_order) +
                          " but the reference element has order " + std::to_string(ref.order));
    x = mesh.curved[e].col(0);
    z = mesh.curved[e].col(1);
    return;
  }
  const auto& t = mesh.triangles[e];
  Eigen::Vector3d vx(mesh.vertices[t[0]].x(), mesh.vertices[t[1]].x(), mesh.vertices[t[2]].x());
  Eigen::Vector3d vz(mesh.vertices[t[0]].y(), mesh.vertices[t[1]].y(), mesh.vertices[t[2]].y());
  x = ref.vertex_weights * vx;
  z = ref.vertex_weights * vz;
}

}  // namespace

Mesh curve_body_elements(const Mesh& mesh, const ReferenceElement& ref, const BodyCurve& curve,
                         double tolerance) {
  Mesh out = mesh;
  out.curved.assign(mesh.n_elements(), Eigen::MatrixX2d());
  out.curved_order = ref.order;
  std::vector<int> edge_of(mesh.n_elements(), -1);
  double scale = 1.0;
  for (const auto& v : mesh.vertices) scale = std::max(scale, v.norm());
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag != BoundaryTag::Body) continue;
    if (edge_of[f.element] >= 0)
      throw GeometryError("element " + std::to_string(f.element) +
                          " has more than one body face and cannot be blended");
    const auto [a, b] = mesh.edge_vertices(f.element, f.local_edge);
    for (int v : {a, b})
      if (curve.distance(mesh.vertices[v]) > tolerance * scale)
        throw GeometryError("body vertex " + std::to_string(v) + " is off the body curve");
    edge_of[f.element] = f.local_edge;
  }
  for (int e = 0; e < mesh.n_elements(); ++e) {
    if (edge_of[e] < 0) continue;
    const auto& t = mesh.triangles[e];
    const std::array<Vec2, 3> verts = {mesh.vertices[t[0]], mesh.vertices[t[1]],
                                       mesh.vertices[t[2]]};
    Eigen::MatrixX2d nodes(ref.n_nodes, 2);
    for (int i = 0; i < ref.n_nodes; ++i)
      nodes.row(i) = blended_map(verts, edge_of[e], curve, ref.r(i), ref.s(i)).transpose();
    out.curved[e] = nodes;

    const VectorXd xr = ref.Dr * nodes.col(0), xs = ref.Ds * nodes.col(0);
    const VectorXd zr = ref.Dr * nodes.col(1), zs = ref.Ds * nodes.col(1);
    const VectorXd J = xr.cwiseProduct(zs) - xs.cwiseProduct(zr);
    const VectorXd cxr = ref.cub_dr * nodes.col(0), cxs = ref.cub_ds * nodes.col(0);
    const VectorXd czr = ref.cub_dr * nodes.col(1), czs = ref.cub_ds * nodes.col(1);
    const VectorXd cJ = cxr.cwiseProduct(czs) - cxs.cwiseProduct(czr);
    if (J.minCoeff() <= 0.0 || cJ.minCoeff() <= 0.0)
      throw GeometryError("curving element " + std::to_string(e) +
                          " produces a non-positive Jacobian");
  }
  return out;
}

double generalized_normal(int mode, double x, double z, double nx, double nz) {
  switch (mode) {
    case 1: return nx;
    case 3: return nz;
    case 5: return z * nx - x * nz;
    default: throw ParameterError("generalized normal mode must be 1, 3 or 5");
  }
}

VectorXd FaceFactors::generalized_normal(int mode, bool at_quadrature) const {
  const VectorXd& px = at_quadrature ? qx : x;
  const VectorXd& pz = at_quadrature ? qz : z;
  const VectorXd& pnx = at_quadrature ? qnx : nx;
  const VectorXd& pnz = at_quadrature ? qnz : nz;
  VectorXd out(px.size());
  for (Eigen::Index i = 0; i < px.size(); ++i)
    out(i) = semrad::generalized_normal(mode, px(i), pz(i), pnx(i), pnz(i));
  return out;
}

GeometricFactors geometric_factors(const Mesh& mesh, const ReferenceElement& ref) {
  const int K = mesh.n_elements();
  const int np = ref.n_nodes;
  const int nc = ref.cubature.size();
  GeometricFactors g;
  g.order = ref.order;
  for (MatrixXd* m : {&g.x, &g.z, &g.rx, &g.sx, &g.rz, &g.sz, &g.J}) m->resize(np, K);
  for (MatrixXd* m : {&g.cx, &g.cz, &g.crx, &g.csx, &g.crz, &g.csz, &g.cJ}) m->resize(nc, K);
  g.affine.assign(K, 1);

  VectorXd x, z;
  for (int e = 0; e < K; ++e) {
    element_coordinates(mesh, ref, e, x, z);
    g.affine[e] = mesh.is_curved(e) ? 0 : 1;
    const VectorXd xr = ref.Dr * x, xs = ref.Ds * x, zr = ref.Dr * z, zs = ref.Ds * z;
    const VectorXd J = xr.cwiseProduct(zs) - xs.cwiseProduct(zr);
    if (!(J.minCoeff() > 0.0))
      throw GeometryError("element " + std::to_string(e) + " has a non-positive Jacobian");
    g.x.col(e) = x;
    g.z.col(e) = z;
    g.J.col(e) = J;
    g.rx.col(e) = zs.cwiseQuotient(J);
    g.sx.col(e) = -zr.cwiseQuotient(J);
    g.rz.col(e) = -xs.cwiseQuotient(J);
    g.sz.col(e) = xr.cwiseQuotient(J);

    const VectorXd cxr = ref.cub_dr * x, cxs = ref.cub_ds * x;
    const VectorXd czr = ref.cub_dr * z, czs = ref.cub_ds * z;
    const VectorXd cJ = cxr.cwiseProduct(czs) - cxs.cwiseProduct(czr);
    if (!(cJ.minCoeff() > 0.0))
      throw GeometryError("element " + std::to_string(e) +
                          " has a non-positive Jacobian at a cubature point");
    g.cx.col(e) = ref.cub_interp * x;
    g.cz.col(e) = ref.cub_interp * z;
    g.cJ.col(e) = cJ;
    g.crx.col(e) = czs.cwiseQuotient(cJ);
    g.csx.col(e) = -czr.cwiseQuotient(cJ);
    g.crz.col(e) = -cxs.cwiseQuotient(cJ);
    g.csz.col(e) = cxr.cwiseQuotient(cJ);
  }

  g.faces.reserve(mesh.boundary_faces.size());
  for (const auto& f : mesh.boundary_faces) {
    FaceFactors ff;
    ff.element = f.element;
    ff.local_edge = f.local_edge;
    ff.tag = f.tag;
    const auto& idx = ref.face_nodes[f.local_edge];
    const int nf = static_cast<int>(idx.size());
    VectorXd fx(nf), fz(nf);
    for (int i = 0; i < nf; ++i) {
      fx(i) = g.x(idx[i], f.element);
      fz(i) = g.z(idx[i], f.element);
    }
    auto normals = [](const VectorXd& tx, const VectorXd& tz, VectorXd& nx, VectorXd& nz,
                      VectorXd& sJ) {
      sJ = (tx.array().square() + tz.array().square()).sqrt().matrix();
      nx = tz.cwiseQuotient(sJ);
      nz = -tx.cwiseQuotient(sJ);
    };
    ff.x = fx;
    ff.z = fz;
    normals(ref.face_diff_1d * fx, ref.face_diff_1d * fz, ff.nx, ff.nz, ff.sJ);
    ff.qx = ref.face_quad_interp * fx;
    ff.qz = ref.face_quad_interp * fz;
    normals(ref.face_quad_diff * fx, ref.face_quad_diff * fz, ff.qnx, ff.qnz, ff.qsJ);
    g.faces.push_back(std::move(ff));
  }
  return g;
}

}  // namespace semrad
