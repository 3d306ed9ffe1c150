#include "semrad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "semrad/error.hpp"
#include "semrad/numfmt.hpp"

namespace semrad {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::FreeSurface: return "FreeSurface";
    case BoundaryTag::Bed: return "Bed";
    case BoundaryTag::FarField: return "FarField";
    case BoundaryTag::Body: return "Body";
    case BoundaryTag::Symmetry: return "Symmetry";
  }
  return "Unknown";
}

int Mesh::count_faces(BoundaryTag tag) const {
  return static_cast<int>(std::count_if(boundary_faces.begin(), boundary_faces.end(),
                                        [tag](const BoundaryFace& f) { return f.tag == tag; }));
}

double signed_area(const Mesh& mesh, int element) {
  const auto& t = mesh.triangles[element];
  const Vec2& a = mesh.vertices[t[0]];
  const Vec2& b = mesh.vertices[t[1]];
  const Vec2& c = mesh.vertices[t[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

void validate(const Mesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::map<EdgeKey, int> edge_count;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.triangles[e];
    for (int v : t)
      if (v < 0 || v >= nv)
        throw ValidationError("element " + std::to_string(e) + " references missing vertex " +
                              std::to_string(v));
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw ValidationError("element " + std::to_string(e) + " has repeated vertices");
    if (!(signed_area(mesh, e) > 0.0))
      throw ValidationError("element " + std::to_string(e) + " has non-positive area");
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];
  }
  for (const auto& [key, n] : edge_count)
    if (n > 2)
      throw ValidationError("edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") shared by " + std::to_string(n) +
                            " elements");

  std::set<EdgeKey> tagged;
  for (std::size_t i = 0; i < mesh.boundary_faces.size(); ++i) {
    const auto& f = mesh.boundary_faces[i];
    if (f.element < 0 || f.element >= mesh.n_elements() || f.local_edge < 0 || f.local_edge > 2)
      throw ValidationError("boundary face " + std::to_string(i) + " is out of range");
    const auto [a, b] = mesh.edge_vertices(f.element, f.local_edge);
    const EdgeKey key = edge_key(a, b);
    if (!tagged.insert(key).second)
      throw ValidationError("boundary face " + std::to_string(i) + " (" + std::to_string(a) +
                            "," + std::to_string(b) + ") is repeated");
    if (edge_count[key] != 1)
      throw ValidationError("boundary face " + std::to_string(i) + " lies on an interior edge");
  }
  for (const auto& [key, n] : edge_count)
    if (n == 1 && !tagged.count(key))
      throw ValidationError("boundary edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") carries no tag");
  if (!mesh.curved.empty() && static_cast<int>(mesh.curved.size()) != mesh.n_elements())
    throw ValidationError("curved node table does not match the element count");
}

double max_edge_length(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      h = std::max(h, (mesh.vertices[t[k]] - mesh.vertices[t[(k + 1) % 3]]).norm());
  return h;
}

// ---------------------------------------------------------------------------
// Exchange format: $Nodes (index x z) and $Elements (gmsh v2 line layout).
// ---------------------------------------------------------------------------

namespace {

struct LineReader {
  std::istream& in;
  int line_no = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      line = line.substr(first);
      return true;
    }
    return false;
  }
};

template <class T>
T parse_number(const std::string& token, int line) {
  std::istringstream is(token);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw ParseError("invalid number '" + token + "'", line);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  LineReader reader{in};
  std::string line;
  std::map<long, int> node_index;
  Mesh mesh;
  struct TaggedLine {
    long a, b;
    int tag, line;
  };
  std::vector<TaggedLine> lines;
  std::vector<int> triangle_lines;
  bool have_nodes = false, have_elements = false;

  while (reader.next(line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      while (reader.next(line) && line.rfind("$EndMeshFormat", 0) != 0) {
      }
      continue;
    }
    if (line.rfind("$Nodes", 0) == 0) {
      if (!reader.next(line)) throw ParseError("unexpected end of file in $Nodes", reader.line_no);
      const long n = parse_number<long>(split(line).at(0), reader.line_no);
      if (n < 0) throw ParseError("negative node count", reader.line_no);
      for (long i = 0; i < n; ++i) {
        if (!reader.next(line)) throw ParseError("unexpected end of file in $Nodes", reader.line_no);
        const auto tok = split(line);
        if (tok.size() != 3 && tok.size() != 4)
          throw ParseError("node entry needs 'index x z' (or 'index x y z')", reader.line_no);
        const long id = parse_number<long>(tok[0], reader.line_no);
        const double x = parse_number<double>(tok[1], reader.line_no);
        const double z = parse_number<double>(tok[2], reader.line_no);
        if (!node_index.emplace(id, static_cast<int>(mesh.vertices.size())).second)
          throw ParseError("duplicate node index " + tok[0], reader.line_no);
        mesh.vertices.emplace_back(x, z);
      }
      if (!reader.next(line) || line.rfind("$EndNodes", 0) != 0)
        throw ParseError("expected $EndNodes", reader.line_no);
      have_nodes = true;
      continue;
    }
    if (line.rfind("$Elements", 0) == 0) {
      if (!have_nodes) throw ParseError("$Elements before $Nodes", reader.line_no);
      if (!reader.next(line))
        throw ParseError("unexpected end of file in $Elements", reader.line_no);
      const long n = parse_number<long>(split(line).at(0), reader.line_no);
      for (long i = 0; i < n; ++i) {
        if (!reader.next(line))
          throw ParseError("unexpected end of file in $Elements", reader.line_no);
        const auto tok = split(line);
        if (tok.size() < 3) throw ParseError("truncated element entry", reader.line_no);
        const int type = parse_number<int>(tok[1], reader.line_no);
        const int ntags = parse_number<int>(tok[2], reader.line_no);
        if (ntags < 0 || tok.size() < static_cast<std::size_t>(3 + ntags))
          throw ParseError("truncated element tags", reader.line_no);
        const std::size_t first_node = 3 + ntags;
        auto node_at = [&](std::size_t k) {
          const long id = parse_number<long>(tok.at(first_node + k), reader.line_no);
          const auto it = node_index.find(id);
          if (it == node_index.end())
            throw ParseError("unknown node index " + std::to_string(id), reader.line_no);
          return it->second;
        };
        if (type == 1) {
          if (tok.size() != first_node + 2) throw ParseError("line needs 2 nodes", reader.line_no);
          if (ntags < 1) throw ParseError("boundary line without a physical tag", reader.line_no);
          const int tag = parse_number<int>(tok[3], reader.line_no);
          if (tag < 1 || tag > 5)
            throw ParseError("unknown boundary tag " + std::to_string(tag), reader.line_no);
          lines.push_back({node_at(0), node_at(1), tag, reader.line_no});
        } else if (type == 2) {
          if (tok.size() != first_node + 3)
            throw ParseError("triangle needs 3 nodes", reader.line_no);
          std::array<int, 3> t = {node_at(0), node_at(1), node_at(2)};
          mesh.triangles.push_back(t);
          triangle_lines.push_back(reader.line_no);
        } else if (type == 15) {
          // point entities carry no mesh information
        } else {
          throw ParseError("unsupported element type " + std::to_string(type), reader.line_no);
        }
      }
      if (!reader.next(line) || line.rfind("$EndElements", 0) != 0)
        throw ParseError("expected $EndElements", reader.line_no);
      have_elements = true;
      continue;
    }
    if (line[0] == '$') {
      // Skip unknown sections entirely.
      const std::string end = "$End" + line.substr(1);
      while (reader.next(line) && line.rfind(end, 0) != 0) {
      }
      continue;
    }
    throw ParseError("unexpected content '" + line + "'", reader.line_no);
  }
  if (!have_nodes || !have_elements) throw ParseError("missing $Nodes or $Elements section", 0);

  // Orient triangles counter-clockwise.
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double a = signed_area(mesh, e);
    if (a == 0.0) throw ParseError("degenerate triangle", triangle_lines[e]);
    if (a < 0.0) std::swap(mesh.triangles[e][1], mesh.triangles[e][2]);
  }

  std::map<std::pair<int, int>, std::pair<int, int>> owner;
  std::map<std::pair<int, int>, int> multiplicity;
  for (int e = 0; e < mesh.n_elements(); ++e)
    for (int k = 0; k < 3; ++k) {
      const auto key = edge_key(mesh.triangles[e][k], mesh.triangles[e][(k + 1) % 3]);
      owner[key] = {e, k};
      ++multiplicity[key];
    }
  std::set<std::pair<int, int>> seen;
  for (const auto& l : lines) {
    const auto key = edge_key(static_cast<int>(l.a), static_cast<int>(l.b));
    if (!seen.insert(key).second)
      throw ValidationError("line " + std::to_string(l.line) + ": repeated boundary face");
    const auto it = owner.find(key);
    if (it == owner.end())
      throw ValidationError("line " + std::to_string(l.line) +
                            ": boundary line is not an element edge");
    if (multiplicity[key] != 1)
      throw ValidationError("line " + std::to_string(l.line) +
                            ": boundary line lies on an interior edge");
    mesh.boundary_faces.push_back({it->second.first, it->second.second,
                                   static_cast<BoundaryTag>(l.tag)});
  }

  double xmax = -1e300, zmin = 1e300;
  for (const auto& v : mesh.vertices) {
    xmax = std::max(xmax, v.x());
    zmin = std::min(zmin, v.y());
  }
  mesh.length = xmax;
  mesh.depth = -zmin;
  validate(mesh);
  return mesh;
}

Mesh import_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string(), 0);
  return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    out << i + 1 << ' ' << format_double(mesh.vertices[i].x()) << ' '
        << format_double(mesh.vertices[i].y()) << "\n";
  out << "$EndNodes\n";
  out << "$Elements\n" << mesh.boundary_faces.size() + mesh.triangles.size() << "\n";
  std::size_t id = 1;
  for (const auto& f : mesh.boundary_faces) {
    const auto [a, b] = mesh.edge_vertices(f.element, f.local_edge);
    const int tag = static_cast<int>(f.tag);
    out << id++ << " 1 2 " << tag << ' ' << tag << ' ' << a + 1 << ' ' << b + 1 << "\n";
  }
  for (const auto& t : mesh.triangles)
    out << id++ << " 2 2 0 0 " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << "\n";
  out << "$EndElements\n";
}

void export_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
}

Mesh mirror_mesh(const Mesh& mesh) {
  if (!mesh.curved.empty())
    throw GeometryError("mirror_mesh: mirror the affine mesh before curving");
  constexpr double tol = 1e-12;
  Mesh out;
  out.depth = mesh.depth;
  out.length = mesh.length;
  out.vertices = mesh.vertices;
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<int> image(nv);
  for (int v = 0; v < nv; ++v) {
    if (std::abs(mesh.vertices[v].x()) < tol) {
      image[v] = v;
    } else {
      image[v] = static_cast<int>(out.vertices.size());
      out.vertices.emplace_back(-mesh.vertices[v].x(), mesh.vertices[v].y());
    }
  }
  const int ne = mesh.n_elements();
  out.triangles = mesh.triangles;
  for (const auto& t : mesh.triangles)
    out.triangles.push_back({image[t[0]], image[t[2]], image[t[1]]});
  for (const auto& f : mesh.boundary_faces) {
    if (f.tag == BoundaryTag::Symmetry) continue;
    out.boundary_faces.push_back(f);
    const auto [a, b] = mesh.edge_vertices(f.element, f.local_edge);
    const auto& t = out.triangles[ne + f.element];
    for (int k = 0; k < 3; ++k) {
      const int p = t[k], q = t[(k + 1) % 3];
      if ((p == image[a] && q == image[b]) || (p == image[b] && q == image[a])) {
        out.boundary_faces.push_back({ne + f.element, k, f.tag});
        break;
      }
    }
  }
  validate(out);
  return out;
}

}  // namespace semrad
