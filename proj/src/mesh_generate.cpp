#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "semrad/error.hpp"
#include "semrad/mesh.hpp"

namespace semrad {

namespace {

using Classifier = std::function<BoundaryTag(const Vec2&, const Vec2&)>;

struct Builder {
  Mesh mesh;

  int add(double x, double z) {
    mesh.vertices.emplace_back(x, z);
    return static_cast<int>(mesh.vertices.size()) - 1;
  }

  void tri(int a, int b, int c) {
    const Vec2& pa = mesh.vertices[a];
    const Vec2& pb = mesh.vertices[b];
    const Vec2& pc = mesh.vertices[c];
    const double cross = (pb - pa).x() * (pc - pa).y() - (pc - pa).x() * (pb - pa).y();
    if (cross > 0)
      mesh.triangles.push_back({a, b, c});
    else
      mesh.triangles.push_back({a, c, b});
  }

  // a, b, c, d in cyclic order.
  void quad(int a, int b, int c, int d, bool cross) {
    if (cross) {
      const Vec2 m = 0.25 * (mesh.vertices[a] + mesh.vertices[b] + mesh.vertices[c] +
                             mesh.vertices[d]);
      const int im = add(m.x(), m.y());
      tri(a, b, im);
      tri(b, c, im);
      tri(c, d, im);
      tri(d, a, im);
      return;
    }
    const double ac = (mesh.vertices[a] - mesh.vertices[c]).norm();
    const double bd = (mesh.vertices[b] - mesh.vertices[d]).norm();
    if (ac <= bd * (1.0 + 1e-12)) {
      tri(a, b, c);
      tri(a, c, d);
    } else {
      tri(a, b, d);
      tri(b, c, d);
    }
  }

  Mesh finish(const Classifier& classify, double depth, double length) {
    std::map<std::pair<int, int>, std::pair<int, int>> owner;
    std::map<std::pair<int, int>, int> count;
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int k = 0; k < 3; ++k) {
        int a = mesh.triangles[e][k], b = mesh.triangles[e][(k + 1) % 3];
        const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        owner[key] = {e, k};
        ++count[key];
      }
    for (const auto& [key, n] : count) {
      if (n != 1) continue;
      const auto [e, k] = owner[key];
      mesh.boundary_faces.push_back(
          {e, k, classify(mesh.vertices[key.first], mesh.vertices[key.second])});
    }
    std::sort(mesh.boundary_faces.begin(), mesh.boundary_faces.end(),
              [](const BoundaryFace& a, const BoundaryFace& b) {
                return std::tie(a.element, a.local_edge) < std::tie(b.element, b.local_edge);
              });
    mesh.depth = depth;
    mesh.length = length;
    validate(mesh);
    return std::move(mesh);
  }
};

// Coordinates from start to end with cell sizes growing geometrically from h0,
// capped at hmax, rescaled to land exactly on end. Excludes start.
std::vector<double> graded_coordinates(double start, double end, double h0, double grading,
                                       double hmax) {
  const double total = std::abs(end - start);
  const double dir = end > start ? 1.0 : -1.0;
  if (!(total > 0.0)) throw GeometryError("graded segment has zero length");
  std::vector<double> sizes;
  double sum = 0.0, h = h0;
  while (true) {
    const double cell = hmax > 0.0 ? std::min(h, hmax) : h;
    if (!sizes.empty() && std::abs(sum + cell - total) > std::abs(sum - total)) break;
    sizes.push_back(cell);
    sum += cell;
    h *= grading;
    if (sizes.size() > 100000) throw GeometryError("grading produces too many cells");
  }
  std::vector<double> out;
  double acc = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    acc += sizes[i] * total / sum;
    out.push_back(i + 1 == sizes.size() ? end : start + dir * acc);
  }
  return out;
}

constexpr double kTol = 1e-10;

bool near(double a, double b, double scale) { return std::abs(a - b) <= kTol * scale; }

}  // namespace

Mesh generate_cylinder_domain(const CylinderDomainSpec& spec) {
  const double R = spec.radius, h = spec.depth, L = spec.length;
  if (!(R > 0.0) || !(R < h) || !(R < L))
    throw GeometryError("cylinder domain requires 0 < R < h and R < L");
  if (spec.beta < 2) throw GeometryError("beta must be at least 2");
  if (spec.beta > 400) throw GeometryError("beta too large for the generator");
  if (!(spec.grading >= 1.0)) throw GeometryError("grading must be >= 1");
  const int beta = spec.beta;
  const double dtheta = std::numbers::pi / (2.0 * beta);
  const double rho = std::min(2.0 * R, R + 0.5 * (std::min(h, L) - R));
  const double q = 1.0 + dtheta;
  const int m = std::max(1, static_cast<int>(std::lround(std::log(1.15 * rho / R) / std::log(q))));
  const int k1 = (beta + 1) / 2, k2 = beta - k1;

  Builder b;
  // Log-polar patch between the arc and the square path z = -rho, x = rho.
  std::vector<std::vector<int>> patch(beta + 1, std::vector<int>(m + 1));
  for (int i = 0; i <= beta; ++i) {
    const double th = dtheta * i;
    const Vec2 A(R * std::sin(th), -R * std::cos(th));
    const Vec2 B = i <= k1 ? Vec2(rho * i / k1, -rho) : Vec2(rho, -rho + rho * (i - k1) / k2);
    for (int j = 0; j <= m; ++j) {
      const double f = (std::pow(q, j) - 1.0) / (std::pow(q, m) - 1.0);
      Vec2 p = A + f * (B - A);
      if (i == beta) p.y() = 0.0;
      if (i == 0) p.x() = 0.0;
      patch[i][j] = b.add(p.x(), p.y());
    }
  }
  for (int i = 0; i < beta; ++i)
    for (int j = 0; j < m; ++j)
      b.quad(patch[i][j], patch[i + 1][j], patch[i + 1][j + 1], patch[i][j + 1],
             spec.symmetric_fs && i == beta - 1);

  const double h0 = rho * dtheta;
  std::vector<double> xs, zs;
  for (int i = 0; i <= k1; ++i) xs.push_back(rho * i / k1);
  for (double v : graded_coordinates(rho, L, h0, spec.grading, spec.max_spacing)) xs.push_back(v);
  for (int i = 0; i <= k2; ++i) zs.push_back(-rho * i / k2);
  for (double v : graded_coordinates(-rho, -h, h0, spec.grading, spec.max_spacing))
    zs.push_back(v);
  const int nx = static_cast<int>(xs.size()), nz = static_cast<int>(zs.size());

  std::vector<std::vector<int>> grid(nx, std::vector<int>(nz, -1));
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) {
      if (ix < k1 && iz < k2) continue;
      if (iz == k2 && ix <= k1)
        grid[ix][iz] = patch[ix][m];
      else if (ix == k1 && iz < k2)
        grid[ix][iz] = patch[k1 + (k2 - iz)][m];
      else
        grid[ix][iz] = b.add(xs[ix], zs[iz]);
    }
  for (int ix = 0; ix + 1 < nx; ++ix)
    for (int iz = 0; iz + 1 < nz; ++iz) {
      if (ix < k1 && iz < k2) continue;
      b.quad(grid[ix][iz], grid[ix + 1][iz], grid[ix + 1][iz + 1], grid[ix][iz + 1],
             spec.symmetric_fs && iz == 0);
    }

  const double scale = std::max(h, L);
  return b.finish(
      [&](const Vec2& p, const Vec2& q2) {
        if (near(p.y(), 0.0, scale) && near(q2.y(), 0.0, scale)) return BoundaryTag::FreeSurface;
        if (near(p.x(), 0.0, scale) && near(q2.x(), 0.0, scale)) return BoundaryTag::Symmetry;
        if (near(p.x(), L, scale) && near(q2.x(), L, scale)) return BoundaryTag::FarField;
        if (near(p.y(), -h, scale) && near(q2.y(), -h, scale)) return BoundaryTag::Bed;
        return BoundaryTag::Body;
      },
      h, L);
}

Mesh generate_box_domain(const BoxDomainSpec& spec) {
  const double a = spec.half_length, d = spec.draft, h = spec.depth, L = spec.length;
  if (!(a > 0.0) || !(d > 0.0) || !(d < h) || !(a < L))
    throw GeometryError("box domain requires 0 < d < h and 0 < a < L");
  if (spec.n_bottom < 1 || spec.n_side < 1) throw GeometryError("box face counts must be >= 1");
  if (!(spec.grading >= 1.0)) throw GeometryError("grading must be >= 1");
  const int nb = spec.n_bottom, ns = spec.n_side;

  std::vector<double> xs, zs;
  for (int i = 0; i <= nb; ++i) xs.push_back(a * i / nb);
  for (double v : graded_coordinates(a, L, a / nb, spec.grading, spec.max_spacing))
    xs.push_back(v);
  for (int i = 0; i <= ns; ++i) zs.push_back(-d * i / ns);
  for (double v : graded_coordinates(-d, -h, d / ns, spec.grading, spec.max_spacing))
    zs.push_back(v);
  const int nx = static_cast<int>(xs.size()), nz = static_cast<int>(zs.size());

  Builder b;
  std::vector<std::vector<int>> grid(nx, std::vector<int>(nz, -1));
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz)
      if (!(ix < nb && iz < ns)) grid[ix][iz] = b.add(xs[ix], zs[iz]);
  for (int ix = 0; ix + 1 < nx; ++ix)
    for (int iz = 0; iz + 1 < nz; ++iz) {
      if (ix < nb && iz < ns) continue;
      b.quad(grid[ix][iz], grid[ix + 1][iz], grid[ix + 1][iz + 1], grid[ix][iz + 1],
             spec.symmetric_fs && iz == 0);
    }

  const double scale = std::max(h, L);
  return b.finish(
      [&](const Vec2& p, const Vec2& q) {
        if (near(p.y(), 0.0, scale) && near(q.y(), 0.0, scale)) return BoundaryTag::FreeSurface;
        if (near(p.x(), 0.0, scale) && near(q.x(), 0.0, scale)) return BoundaryTag::Symmetry;
        if (near(p.x(), L, scale) && near(q.x(), L, scale)) return BoundaryTag::FarField;
        if (near(p.y(), -h, scale) && near(q.y(), -h, scale)) return BoundaryTag::Bed;
        return BoundaryTag::Body;
      },
      h, L);
}

Mesh generate_basin(const BasinSpec& spec) {
  if (!(spec.length > 0.0) || !(spec.depth > 0.0) || spec.nx < 1 || spec.nz < 1)
    throw GeometryError("basin requires positive size and cell counts");
  const double L = spec.length, h = spec.depth;
  Builder b;
  std::vector<std::vector<int>> grid(spec.nx + 1, std::vector<int>(spec.nz + 1));
  for (int ix = 0; ix <= spec.nx; ++ix)
    for (int iz = 0; iz <= spec.nz; ++iz)
      grid[ix][iz] = b.add(L * ix / spec.nx, -h * iz / spec.nz);
  for (int ix = 0; ix < spec.nx; ++ix)
    for (int iz = 0; iz < spec.nz; ++iz) {
      const int p0 = grid[ix][iz], p1 = grid[ix + 1][iz], p2 = grid[ix + 1][iz + 1],
                p3 = grid[ix][iz + 1];
      if (spec.symmetric_fs) {
        b.quad(p0, p1, p2, p3, true);
      } else {
        b.tri(p0, p1, p2);
        b.tri(p0, p2, p3);
      }
    }
  const double scale = std::max(h, L);
  return b.finish(
      [&](const Vec2& p, const Vec2& q) {
        if (near(p.y(), 0.0, scale) && near(q.y(), 0.0, scale)) return BoundaryTag::FreeSurface;
        if (near(p.y(), -h, scale) && near(q.y(), -h, scale)) return BoundaryTag::Bed;
        return BoundaryTag::FarField;
      },
      h, L);
}

// ---------------------------------------------------------------------------
// Bowyer-Watson triangulation for the nearly uniform family.
// ---------------------------------------------------------------------------

namespace {

class Delaunay {
public:
  explicit Delaunay(const std::vector<Vec2>& pts) : p_(pts) {
    Eigen::AlignedBox2d box;
    for (const auto& v : pts) box.extend(v);
    const Vec2 c = box.center();
    const double s = 50.0 * std::max(box.sizes().maxCoeff(), 1.0);
    n_real_ = static_cast<int>(p_.size());
    p_.emplace_back(c.x() - 2 * s, c.y() - s);
    p_.emplace_back(c.x() + 2 * s, c.y() - s);
    p_.emplace_back(c.x(), c.y() + 2 * s);
    tris_.push_back({{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
  }

  void insert_all(const std::vector<int>& order) {
    for (int i : order) insert(i);
  }

  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_)
      if (t.alive && t.v[0] < n_real_ && t.v[1] < n_real_ && t.v[2] < n_real_)
        out.push_back(t.v);
    return out;
  }

private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // neighbour across edge (v[k], v[k+1])
    bool alive;
  };

  double orient(int a, int b, const Vec2& c) const {
    const Vec2& pa = p_[a];
    const Vec2& pb = p_[b];
    return (pb.x() - pa.x()) * (c.y() - pa.y()) - (c.x() - pa.x()) * (pb.y() - pa.y());
  }

  bool in_circle(const Tri& t, const Vec2& d) const {
    const Vec2 a = p_[t.v[0]] - d, b = p_[t.v[1]] - d, c = p_[t.v[2]] - d;
    const double det = (a.squaredNorm()) * (b.x() * c.y() - c.x() * b.y()) -
                       (b.squaredNorm()) * (a.x() * c.y() - c.x() * a.y()) +
                       (c.squaredNorm()) * (a.x() * b.y() - b.x() * a.y());
    return det > 0.0;
  }

  int locate(const Vec2& p) const {
    int t = last_;
    if (!tris_[t].alive) t = static_cast<int>(tris_.size()) - 1;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 10; ++steps) {
      const Tri& tr = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k)
        if (orient(tr.v[k], tr.v[(k + 1) % 3], p) < 0.0) {
          next = tr.n[k];
          break;
        }
      if (next < 0) return t;
      t = next;
    }
    throw GeometryError("point location failed during triangulation");
  }

  void insert(int ip) {
    const Vec2& p = p_[ip];
    const int t0 = locate(p);
    std::vector<int> cavity = {t0};
    std::set<int> in_cavity = {t0};
    for (std::size_t i = 0; i < cavity.size(); ++i)
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[cavity[i]].n[k];
        if (nb >= 0 && !in_cavity.count(nb) && in_circle(tris_[nb], p)) {
          in_cavity.insert(nb);
          cavity.push_back(nb);
        }
      }
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> rim;
    for (int c : cavity)
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[c].n[k];
        if (nb < 0 || !in_cavity.count(nb))
          rim.push_back({tris_[c].v[k], tris_[c].v[(k + 1) % 3], nb});
      }
    for (int c : cavity) tris_[c].alive = false;
    std::vector<int> created;
    for (const auto& e : rim) {
      if (orient(e.a, e.b, p) <= 0.0)
        throw GeometryError("degenerate cavity during triangulation");
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, ip}, {e.outer, -1, -1}, true});
      if (e.outer >= 0)
        for (int k = 0; k < 3; ++k) {
          const int o = tris_[e.outer].n[k];
          if (o >= 0 && in_cavity.count(o) && tris_[e.outer].v[k] == e.b &&
              tris_[e.outer].v[(k + 1) % 3] == e.a)
            tris_[e.outer].n[k] = id;
        }
      created.push_back(id);
    }
    std::map<int, int> by_first, by_second;
    for (int id : created) {
      by_first[tris_[id].v[0]] = id;
      by_second[tris_[id].v[1]] = id;
    }
    for (int id : created) {
      Tri& t = tris_[id];
      t.n[1] = by_first.at(t.v[1]);   // edge (b, p) meets triangle starting at b
      t.n[2] = by_second.at(t.v[0]);  // edge (p, a) meets triangle ending at a
    }
    last_ = created.front();
  }

  std::vector<Vec2> p_;
  int n_real_ = 0;
  std::vector<Tri> tris_;
  int last_ = 0;
};

struct Segment {
  Vec2 a, b;
  bool arc;
  int n;
  double length(double R) const { return arc ? R * std::numbers::pi / 2.0 : (b - a).norm(); }
};

}  // namespace

Mesh generate_uniform_cylinder_domain(const UniformCylinderSpec& spec) {
  const double R = spec.radius, h = spec.depth, L = spec.length;
  if (!(R > 0.0) || !(R < h) || !(R < L))
    throw GeometryError("cylinder domain requires 0 < R < h and R < L");
  if (!(spec.spacing > 0.0) && spec.target_elements <= 0)
    throw GeometryError("uniform mesh needs a positive spacing or element target");

  std::vector<Segment> segs = {{Vec2(0, -R), Vec2(R, 0), true, 0},
                               {Vec2(R, 0), Vec2(L, 0), false, 0},
                               {Vec2(L, 0), Vec2(L, -h), false, 0},
                               {Vec2(L, -h), Vec2(0, -h), false, 0},
                               {Vec2(0, -h), Vec2(0, -R), false, 0}};

  auto clearance = [&](const Vec2& p) {
    return std::min({p.x(), L - p.x(), -p.y(), p.y() + h, p.norm() - R});
  };
  auto lattice = [&](double hs) {
    std::vector<Vec2> pts;
    const double dz = hs * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double z = -dz / 2.0; z > -h; z -= dz, ++row)
      for (double x = (row % 2 ? hs / 2.0 : 0.0) + hs / 4.0; x < L; x += hs) {
        const Vec2 p(x, z);
        if (clearance(p) >= 0.55 * hs) pts.push_back(p);
      }
    return pts;
  };
  auto set_counts = [&](double hs) {
    int nb = 0;
    for (auto& s : segs) {
      s.n = std::max(s.arc ? 2 : 1, static_cast<int>(std::lround(s.length(R) / hs)));
      nb += s.n;
    }
    return nb;
  };

  double hs = spec.spacing;
  std::vector<Vec2> interior;
  if (spec.target_elements > 0) {
    const int T = spec.target_elements;
    const double area = L * h - std::numbers::pi * R * R / 4.0;
    hs = 1.5 * std::sqrt(area / (T * std::sqrt(3.0) / 4.0));
    for (int iter = 0;; ++iter) {
      if (iter > 2000) throw GeometryError("cannot reach the requested element count");
      int nb = set_counts(hs);
      if ((T - nb) % 2 != 0) {
        auto worst = std::max_element(segs.begin(), segs.end(), [&](const auto& a, const auto& b) {
          return a.length(R) / a.n < b.length(R) / b.n;
        });
        ++worst->n;
        ++nb;
      }
      const int need = (T - nb + 2) / 2;
      if (need < 0) throw GeometryError("element target too small for the boundary");
      interior = lattice(hs);
      if (static_cast<int>(interior.size()) >= need) {
        std::stable_sort(interior.begin(), interior.end(), [&](const Vec2& a, const Vec2& b) {
          return clearance(a) > clearance(b);
        });
        interior.resize(need);
        break;
      }
      hs *= 0.99;
    }
  } else {
    set_counts(hs);
    interior = lattice(hs);
  }

  std::vector<Vec2> pts;
  std::vector<std::pair<int, int>> boundary_edges;
  for (const auto& s : segs) {
    const int first = static_cast<int>(pts.size());
    for (int i = 0; i < s.n; ++i) {
      const double t = static_cast<double>(i) / s.n;
      if (s.arc) {
        const double th = t * std::numbers::pi / 2.0;
        pts.emplace_back(R * std::sin(th), -R * std::cos(th));
      } else {
        pts.push_back(s.a + t * (s.b - s.a));
      }
      boundary_edges.emplace_back(first + i, first + i + 1);
    }
  }
  boundary_edges.back().second = 0;
  for (const auto& p : interior) pts.push_back(p);

  std::vector<int> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::mt19937 rng(12345);
  std::shuffle(order.begin(), order.end(), rng);

  Delaunay dt(pts);
  dt.insert_all(order);

  Builder b;
  b.mesh.vertices = pts;
  for (const auto& t : dt.triangles()) {
    const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    bool all_arc = true;
    for (int v : t) all_arc = all_arc && v <= segs[0].n;
    if (c.norm() < R || all_arc) continue;
    b.mesh.triangles.push_back(t);
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& t : b.mesh.triangles)
    for (int k = 0; k < 3; ++k)
      edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  for (const auto& [p, q] : boundary_edges)
    if (!edges.count(std::minmax(p, q)))
      throw GeometryError("boundary edge lost in triangulation; adjust the spacing");
  if (spec.target_elements > 0 && b.mesh.n_elements() != spec.target_elements)
    throw GeometryError("triangulation produced " + std::to_string(b.mesh.n_elements()) +
                        " elements instead of " + std::to_string(spec.target_elements));

  const double scale = std::max(h, L);
  return b.finish(
      [&](const Vec2& p, const Vec2& q) {
        if (near(p.y(), 0.0, scale) && near(q.y(), 0.0, scale)) return BoundaryTag::FreeSurface;
        if (near(p.x(), 0.0, scale) && near(q.x(), 0.0, scale)) return BoundaryTag::Symmetry;
        if (near(p.x(), L, scale) && near(q.x(), L, scale)) return BoundaryTag::FarField;
        if (near(p.y(), -h, scale) && near(q.y(), -h, scale)) return BoundaryTag::Bed;
        return BoundaryTag::Body;
      },
      h, L);
}

}  // namespace semrad
