#include "semrad/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semrad/error.hpp"

namespace semrad {

const std::vector<int>& DofMap::dofs(BoundaryTag tag) const {
  static const std::vector<int> empty;
  const auto it = tag_dofs.find(tag);
  return it == tag_dofs.end() ? empty : it->second;
}

DofMap build_dof_map(const Mesh& mesh, const ReferenceElement& ref, const GeometricFactors& geo) {
  const int K = mesh.n_elements();
  const int P = ref.order;
  const int np = ref.n_nodes;
  DofMap map;
  map.element_dofs = Eigen::MatrixXi::Constant(np, K, -1);

  int next = 0;
  std::vector<int> vertex_dof(mesh.vertices.size(), -1);
  for (const auto& t : mesh.triangles)
    for (int v : t)
      if (vertex_dof[v] < 0) vertex_dof[v] = next++;

  std::map<std::pair<int, int>, int> edge_base;
  if (P > 1)
    for (const auto& t : mesh.triangles)
      for (int k = 0; k < 3; ++k) {
        const auto key = std::minmax(t[k], t[(k + 1) % 3]);
        if (edge_base.emplace(key, next).second) next += P - 1;
      }

  std::vector<char> on_boundary(np, 0);
  for (int k = 0; k < 3; ++k)
    for (int i : ref.face_nodes[k]) on_boundary[i] = 1;

  for (int e = 0; e < K; ++e) {
    const auto& t = mesh.triangles[e];
    for (int k = 0; k < 3; ++k) map.element_dofs(ref.vertex_nodes[k], e) = vertex_dof[t[k]];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (P == 1) break;
      const int base = edge_base.at(std::minmax(a, b));
      const auto& fn = ref.face_nodes[k];
      for (int j = 1; j < P; ++j)
        map.element_dofs(fn[j], e) = a < b ? base + (j - 1) : base + (P - 1 - j);
    }
    for (int i = 0; i < np; ++i)
      if (!on_boundary[i]) map.element_dofs(i, e) = next++;
  }
  map.n_dof = next;

  map.x = VectorXd::Zero(next);
  map.z = VectorXd::Zero(next);
  for (int e = 0; e < K; ++e)
    for (int i = 0; i < np; ++i) {
      map.x(map.element_dofs(i, e)) = geo.x(i, e);
      map.z(map.element_dofs(i, e)) = geo.z(i, e);
    }

  std::map<BoundaryTag, std::set<int>> sets;
  for (const auto& f : mesh.boundary_faces)
    for (int i : ref.face_nodes[f.local_edge])
      sets[f.tag].insert(map.element_dofs(i, f.element));
  for (auto& [tag, s] : sets) map.tag_dofs[tag] = std::vector<int>(s.begin(), s.end());

  map.fs_trace = map.dofs(BoundaryTag::FreeSurface);
  std::stable_sort(map.fs_trace.begin(), map.fs_trace.end(),
                   [&](int a, int b) { return map.x(a) < map.x(b); });
  map.body_trace = map.dofs(BoundaryTag::Body);
  return map;
}

Discretization discretize(const Mesh& mesh, int order, int cubature_strength) {
  Discretization d;
  d.mesh = mesh;
  d.ref = build_reference_element(order, cubature_strength);
  bool curved = false;
  for (int e = 0; e < mesh.n_elements(); ++e) curved = curved || mesh.is_curved(e);
  if (curved && mesh.curved_order != order)
    throw GeometryError("mesh is curved at order " + std::to_string(mesh.curved_order) +
                        " but order " + std::to_string(order) + " was requested");
  d.geo = geometric_factors(mesh, d.ref);
  d.dofs = build_dof_map(mesh, d.ref, d.geo);
  return d;
}

MatrixXd element_stiffness(const Discretization& d, int e) {
  const ReferenceElement& ref = d.ref;
  const GeometricFactors& g = d.geo;
  if (g.affine[e]) {
    const MatrixXd Dx = g.rx(0, e) * ref.Dr + g.sx(0, e) * ref.Ds;
    const MatrixXd Dz = g.rz(0, e) * ref.Dr + g.sz(0, e) * ref.Ds;
    return g.J(0, e) * (Dx.transpose() * ref.M * Dx + Dz.transpose() * ref.M * Dz);
  }
  const MatrixXd Cx = g.crx.col(e).asDiagonal() * ref.cub_dr + g.csx.col(e).asDiagonal() * ref.cub_ds;
  const MatrixXd Cz = g.crz.col(e).asDiagonal() * ref.cub_dr + g.csz.col(e).asDiagonal() * ref.cub_ds;
  const VectorXd w = ref.cubature.w.cwiseProduct(g.cJ.col(e));
  return Cx.transpose() * w.asDiagonal() * Cx + Cz.transpose() * w.asDiagonal() * Cz;
}

DiscreteLaplacian assemble_stiffness(const Discretization& d) {
  const int N = d.dofs.n_dof;
  const int np = d.ref.n_nodes;
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(d.mesh.n_elements()) * np * np);
  for (int e = 0; e < d.mesh.n_elements(); ++e) {
    const MatrixXd Ae = element_stiffness(d, e);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        trip.emplace_back(d.dofs.element_dofs(i, e), d.dofs.element_dofs(j, e), Ae(i, j));
  }
  DiscreteLaplacian sys;
  sys.A0.resize(N, N);
  sys.A0.setFromTriplets(trip.begin(), trip.end());
  sys.A0.makeCompressed();
  sys.A = sys.A0;
  sys.b = VectorXd::Zero(N);
  sys.is_dirichlet.assign(N, 0);
  sys.coupling.resize(N, 0);
  return sys;
}

VectorXd neumann_load(const Discretization& d, BoundaryTag tag, const BoundaryFunction& g) {
  VectorXd b = VectorXd::Zero(d.dofs.n_dof);
  const auto& quad = d.ref.face_quad;
  for (const auto& f : d.geo.faces) {
    if (f.tag != tag) continue;
    const auto& fn = d.ref.face_nodes[f.local_edge];
    VectorXd gq(quad.points.size());
    for (Eigen::Index q = 0; q < gq.size(); ++q)
      gq(q) = quad.weights(q) * f.qsJ(q) * g(f.qx(q), f.qz(q), f.qnx(q), f.qnz(q));
    const VectorXd contrib = d.ref.face_quad_interp.transpose() * gq;
    for (std::size_t i = 0; i < fn.size(); ++i)
      b(d.dofs.element_dofs(fn[i], f.element)) += contrib(i);
  }
  return b;
}

int assemble_neumann_flux(VectorXd& b, const Discretization& d, BoundaryTag tag,
                          const std::vector<VectorXd>& face_values) {
  if (b.size() != d.dofs.n_dof) throw ParameterError("load vector has the wrong size");
  const auto& quad = d.ref.face_quad;
  std::size_t used = 0;
  for (const auto& f : d.geo.faces) {
    if (f.tag != tag) continue;
    if (used >= face_values.size())
      throw ParameterError("fewer flux arrays than faces with the requested tag");
    const VectorXd& q = face_values[used++];
    if (q.size() != d.ref.order + 1) throw ParameterError("flux array must hold P+1 values");
    const VectorXd qq = (d.ref.face_quad_interp * q).cwiseProduct(quad.weights).cwiseProduct(f.qsJ);
    const VectorXd contrib = d.ref.face_quad_interp.transpose() * qq;
    const auto& fn = d.ref.face_nodes[f.local_edge];
    for (std::size_t i = 0; i < fn.size(); ++i)
      b(d.dofs.element_dofs(fn[i], f.element)) += contrib(i);
  }
  if (used != face_values.size())
    throw ParameterError("more flux arrays than faces with the requested tag");
  return static_cast<int>(used);
}

SparseMatrix boundary_mass(const Discretization& d, BoundaryTag tag) {
  const int N = d.dofs.n_dof;
  const auto& quad = d.ref.face_quad;
  const MatrixXd& I = d.ref.face_quad_interp;
  Triplets trip;
  for (const auto& f : d.geo.faces) {
    if (f.tag != tag) continue;
    const VectorXd w = quad.weights.cwiseProduct(f.qsJ);
    const MatrixXd Mf = I.transpose() * w.asDiagonal() * I;
    const auto& fn = d.ref.face_nodes[f.local_edge];
    for (std::size_t i = 0; i < fn.size(); ++i)
      for (std::size_t j = 0; j < fn.size(); ++j)
        trip.emplace_back(d.dofs.element_dofs(fn[i], f.element),
                          d.dofs.element_dofs(fn[j], f.element), Mf(i, j));
  }
  SparseMatrix M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

VectorXd assemble_volume_source(const Discretization& d,
                                const std::function<double(double, double)>& f) {
  VectorXd b = VectorXd::Zero(d.dofs.n_dof);
  const int nc = d.ref.cubature.size();
  VectorXd fq(nc);
  for (int e = 0; e < d.mesh.n_elements(); ++e) {
    for (int q = 0; q < nc; ++q)
      fq(q) = d.ref.cubature.w(q) * d.geo.cJ(q, e) * f(d.geo.cx(q, e), d.geo.cz(q, e));
    const VectorXd be = d.ref.cub_interp.transpose() * fq;
    for (int i = 0; i < d.ref.n_nodes; ++i) b(d.dofs.element_dofs(i, e)) += be(i);
  }
  return b;
}

void impose_dirichlet(DiscreteLaplacian& sys, const std::vector<int>& nodes,
                      const VectorXd& values) {
  const int N = sys.size();
  if (static_cast<Eigen::Index>(nodes.size()) != values.size())
    throw ParameterError("Dirichlet node and value counts differ");
  std::map<int, double> unique;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] < 0 || nodes[k] >= N) throw ParameterError("Dirichlet node out of range");
    const auto [it, fresh] = unique.emplace(nodes[k], values(k));
    if (!fresh && std::abs(it->second - values(k)) > 1e-14 * std::max(1.0, std::abs(values(k))))
      throw ParameterError("conflicting Dirichlet values at node " + std::to_string(nodes[k]));
  }
  std::vector<int> sorted;
  VectorXd vals(unique.size());
  for (const auto& [n, v] : unique) {
    vals(static_cast<Eigen::Index>(sorted.size())) = v;
    sorted.push_back(n);
  }
  if (sorted == sys.dirichlet) {
    sys.dirichlet_values = vals;
    return;
  }
  sys.dirichlet = sorted;
  sys.dirichlet_values = vals;
  sys.is_dirichlet.assign(N, 0);
  std::vector<int> column(N, -1);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    sys.is_dirichlet[sorted[k]] = 1;
    column[sorted[k]] = static_cast<int>(k);
  }
  Triplets a, c;
  a.reserve(sys.A0.nonZeros());
  for (int j = 0; j < sys.A0.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(sys.A0, j); it; ++it) {
      const int i = static_cast<int>(it.row());
      if (sys.is_dirichlet[i]) continue;
      if (sys.is_dirichlet[j])
        c.emplace_back(i, column[j], it.value());
      else
        a.emplace_back(i, j, it.value());
    }
  for (int n : sorted) a.emplace_back(n, n, 1.0);
  sys.A.resize(N, N);
  sys.A.setFromTriplets(a.begin(), a.end());
  sys.A.makeCompressed();
  sys.coupling.resize(N, static_cast<Eigen::Index>(sorted.size()));
  sys.coupling.setFromTriplets(c.begin(), c.end());
  sys.coupling.makeCompressed();
}

VectorXd DiscreteLaplacian::lifted_rhs(const VectorXd& load, const VectorXd& values) const {
  if (values.size() != static_cast<Eigen::Index>(dirichlet.size()))
    throw ParameterError("Dirichlet value count does not match the imposed node set");
  VectorXd r = load;
  if (!dirichlet.empty()) r.noalias() -= coupling * values;
  for (std::size_t k = 0; k < dirichlet.size(); ++k) r(dirichlet[k]) = values(k);
  return r;
}

SparseMatrix trace_derivative_operator(const Discretization& d, const std::vector<int>& targets,
                                       BoundaryTag tag, int direction) {
  const int N = d.dofs.n_dof;
  std::map<int, int> row_of;
  for (std::size_t k = 0; k < targets.size(); ++k) row_of[targets[k]] = static_cast<int>(k);
  std::vector<int> count(targets.size(), 0);
  std::set<std::pair<int, int>> done;
  struct Entry {
    int row, col;
    double v;
  };
  std::vector<Entry> entries;
  for (const auto& f : d.geo.faces) {
    if (f.tag != tag) continue;
    const int e = f.element;
    for (int i : d.ref.face_nodes[f.local_edge]) {
      const int dof = d.dofs.element_dofs(i, e);
      const auto it = row_of.find(dof);
      if (it == row_of.end() || !done.insert({dof, e}).second) continue;
      const double cr = direction == 0 ? d.geo.rx(i, e) : d.geo.rz(i, e);
      const double cs = direction == 0 ? d.geo.sx(i, e) : d.geo.sz(i, e);
      ++count[it->second];
      for (int j = 0; j < d.ref.n_nodes; ++j)
        entries.push_back({it->second, d.dofs.element_dofs(j, e),
                           cr * d.ref.Dr(i, j) + cs * d.ref.Ds(i, j)});
    }
  }
  for (std::size_t k = 0; k < targets.size(); ++k)
    if (count[k] == 0)
      throw ParameterError("trace target " + std::to_string(targets[k]) +
                           " is not on a face with the requested tag");
  Triplets trip;
  trip.reserve(entries.size());
  for (const auto& en : entries) trip.emplace_back(en.row, en.col, en.v / count[en.row]);
  SparseMatrix G(static_cast<Eigen::Index>(targets.size()), N);
  G.setFromTriplets(trip.begin(), trip.end());
  G.prune(0.0);
  return G;
}

namespace {

void map_at(const Discretization& d, int e, double r, double s, double& x, double& z, double& xr,
            double& xs, double& zr, double& zs, VectorXd& lr, VectorXd& ls, VectorXd& l) {
  VectorXd rr = VectorXd::Constant(1, r), ss = VectorXd::Constant(1, s);
  MatrixXd Vr, Vs;
  simplex_vandermonde_grad(d.ref.order, rr, ss, Vr, Vs);
  const MatrixXd V = simplex_vandermonde(d.ref.order, rr, ss);
  l = (V * d.ref.invV).row(0).transpose();
  lr = (Vr * d.ref.invV).row(0).transpose();
  ls = (Vs * d.ref.invV).row(0).transpose();
  const auto xe = d.geo.x.col(e), ze = d.geo.z.col(e);
  x = l.dot(xe);
  z = l.dot(ze);
  xr = lr.dot(xe);
  xs = ls.dot(xe);
  zr = lr.dot(ze);
  zs = ls.dot(ze);
}

}  // namespace

bool locate_in_element(const Discretization& d, int e, const Vec2& p, double& r, double& s) {
  const auto& t = d.mesh.triangles[e];
  const Vec2& a = d.mesh.vertices[t[0]];
  const Vec2& b = d.mesh.vertices[t[1]];
  const Vec2& c = d.mesh.vertices[t[2]];
  Eigen::Matrix2d T;
  T.col(0) = 0.5 * (b - a);
  T.col(1) = 0.5 * (c - a);
  const Eigen::Vector2d rs = T.inverse() * (p - a) - Eigen::Vector2d(1.0, 1.0);
  r = rs(0);
  s = rs(1);
  if (!d.geo.affine[e]) {
    VectorXd lr, ls, l;
    for (int it = 0; it < 30; ++it) {
      double x, z, xr, xs, zr, zs;
      map_at(d, e, r, s, x, z, xr, xs, zr, zs, lr, ls, l);
      Eigen::Matrix2d Jm;
      Jm << xr, xs, zr, zs;
      const Eigen::Vector2d delta = Jm.inverse() * Eigen::Vector2d(p.x() - x, p.y() - z);
      r += delta(0);
      s += delta(1);
      if (delta.norm() < 1e-14) break;
    }
  }
  constexpr double tol = 1e-10;
  return r >= -1.0 - tol && s >= -1.0 - tol && r + s <= tol;
}

SparseMatrix point_derivative_operator(const Discretization& d, const std::vector<Vec2>& points,
                                       int direction) {
  Triplets trip;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec2& p = points[k];
    bool found = false;
    for (int e = 0; e < d.mesh.n_elements() && !found; ++e) {
      const auto& t = d.mesh.triangles[e];
      Eigen::AlignedBox2d box;
      for (int v : t) box.extend(d.mesh.vertices[v]);
      if (!d.geo.affine[e]) {
        for (int i = 0; i < d.ref.n_nodes; ++i) box.extend(Vec2(d.geo.x(i, e), d.geo.z(i, e)));
      }
      const double pad = 1e-9 * (1.0 + box.sizes().norm());
      if ((p.array() < box.min().array() - pad).any() ||
          (p.array() > box.max().array() + pad).any())
        continue;
      double r, s;
      if (!locate_in_element(d, e, p, r, s)) continue;
      double x, z, xr, xs, zr, zs;
      VectorXd lr, ls, l;
      map_at(d, e, r, s, x, z, xr, xs, zr, zs, lr, ls, l);
      const double J = xr * zs - xs * zr;
      const VectorXd row = direction == 0 ? VectorXd((zs * lr - zr * ls) / J)
                                          : VectorXd((-xs * lr + xr * ls) / J);
      for (int i = 0; i < d.ref.n_nodes; ++i)
        if (row(i) != 0.0) trip.emplace_back(static_cast<int>(k), d.dofs.element_dofs(i, e), row(i));
      found = true;
    }
    if (!found)
      throw GeometryError("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                          ") lies outside the mesh");
  }
  SparseMatrix G(static_cast<Eigen::Index>(points.size()), d.dofs.n_dof);
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

}  // namespace semrad
