#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "semrad/refelem.hpp"

namespace semrad {

using Vec2 = Eigen::Vector2d;

/// Physical boundary tags; the numeric values are the tags used in mesh files.
enum class BoundaryTag : int { FreeSurface = 1, Bed = 2, FarField = 3, Body = 4, Symmetry = 5 };

std::string_view to_string(BoundaryTag tag);

struct BoundaryFace {
  int element = -1;
  int local_edge = -1;  ///< edge e joins local vertices e and (e+1)%3
  BoundaryTag tag = BoundaryTag::FreeSurface;
};

/// Triangulation of the (x,z) fluid domain with tagged boundary faces.
///
/// Triangles are counter-clockwise. `curved[e]` is either empty (affine
/// element) or holds the n_ep physical node coordinates of an order
/// `curved_order` element.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryFace> boundary_faces;
  std::vector<Eigen::MatrixX2d> curved;
  int curved_order = 0;
  double depth = 0.0;
  double length = 0.0;

  int n_elements() const { return static_cast<int>(triangles.size()); }
  bool is_curved(int e) const {
    return e < static_cast<int>(curved.size()) && curved[e].rows() > 0;
  }
  std::array<int, 2> edge_vertices(int e, int local_edge) const {
    return {triangles[e][local_edge], triangles[e][(local_edge + 1) % 3]};
  }
  int count_faces(BoundaryTag tag) const;
};

double signed_area(const Mesh& mesh, int element);

/// Checks positive areas, conformity and complete single tagging of the
/// boundary. Throws ValidationError.
void validate(const Mesh& mesh);

/// Largest edge length over all elements.
double max_edge_length(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Quarter cylinder of radius R cut from the top-left corner of [0,L]x[-h,0].
/// Symmetry plane at x = 0, free surface at z = 0.
struct CylinderDomainSpec {
  double radius = 1.0;
  double depth = 6.283;
  double length = 10.0;
  int beta = 5;             ///< faces on the quarter arc
  double grading = 1.1;     ///< geometric edge growth toward the far field
  bool symmetric_fs = true;
  double max_spacing = 0.0; ///< cap for graded edge lengths; <= 0 means none
};
Mesh generate_cylinder_domain(const CylinderDomainSpec& spec);

/// Half box of half-length a and draft d, symmetry plane at x = 0.
struct BoxDomainSpec {
  double half_length = 0.5;
  double draft = 1.0;
  double depth = 3.0;
  double length = 10.0;
  int n_bottom = 6;
  int n_side = 12;
  double grading = 1.1;
  bool symmetric_fs = true;
  double max_spacing = 0.0;
};
Mesh generate_box_domain(const BoxDomainSpec& spec);

/// Closed rectangular basin [0,L]x[-h,0]: walls tagged FarField (used with
/// homogeneous Neumann data), free surface on top.
struct BasinSpec {
  double length = 10.0;
  double depth = 2.0;
  int nx = 10;
  int nz = 2;
  bool symmetric_fs = true;
};
Mesh generate_basin(const BasinSpec& spec);

/// Unstructured, nearly uniform Delaunay triangulation of the quarter-cylinder
/// domain with target edge length `spacing`. A positive `target_elements`
/// adjusts boundary/interior point counts to hit that element count exactly.
struct UniformCylinderSpec {
  double radius = 1.0;
  double depth = 2.0;
  double length = 4.0;
  double spacing = 0.5;
  int target_elements = 0;
};
Mesh generate_uniform_cylinder_domain(const UniformCylinderSpec& spec);

/// Reflects a half-domain mesh about x = 0, removing the symmetry boundary.
Mesh mirror_mesh(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Exchange format
// ---------------------------------------------------------------------------

Mesh read_mesh(std::istream& in);
Mesh import_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void export_mesh(const Mesh& mesh, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Curvilinear elements
// ---------------------------------------------------------------------------

/// Exact boundary curve used for Gordon-Hall blending. `edge_point(a, b, t)`
/// returns the curve point between vertices a (t = -1) and b (t = +1).
struct BodyCurve {
  std::function<Vec2(const Vec2&, const Vec2&, double)> edge_point;
  std::function<double(const Vec2&)> distance;

  static BodyCurve circle(const Vec2& center, double radius);
  static BodyCurve straight();
};

/// Transfinite (linear blending) map of a triangle whose edge `curved_edge`
/// follows `curve`; (r,s) in the reference element.
Vec2 blended_map(const std::array<Vec2, 3>& verts, int curved_edge, const BodyCurve& curve,
                 double r, double s);

/// Gives every element owning a Body face high-order node coordinates from
/// Gordon-Hall blending. Throws GeometryError if J <= 0 anywhere.
Mesh curve_body_elements(const Mesh& mesh, const ReferenceElement& ref, const BodyCurve& curve,
                         double tolerance = 1e-8);

// ---------------------------------------------------------------------------
// Geometric factors
// ---------------------------------------------------------------------------

/// Normals and surface Jacobians of one boundary face at its P+1 nodes and
/// at the Gauss points of the face rule. Normals point out of the fluid.
struct FaceFactors {
  int element = -1;
  int local_edge = -1;
  BoundaryTag tag = BoundaryTag::FreeSurface;
  VectorXd x, z, nx, nz, sJ;            ///< at face nodes
  VectorXd qx, qz, qnx, qnz, qsJ;       ///< at face quadrature points

  /// Generalized normal n_k (k = 1, 3, 5) at face nodes or quadrature points.
  VectorXd generalized_normal(int mode, bool at_quadrature) const;
};

/// Generalized normal for one point: k = 1 -> n_x, k = 3 -> n_z,
/// k = 5 -> (r x n)_y = z n_x - x n_z with r measured from the origin.
double generalized_normal(int mode, double x, double z, double nx, double nz);

struct GeometricFactors {
  int order = 0;
  /// n_ep x K matrices (one column per element) at the nodes.
  MatrixXd x, z, rx, sx, rz, sz, J;
  /// n_cub x K matrices at the cubature points.
  MatrixXd cx, cz, crx, csx, crz, csz, cJ;
  std::vector<char> affine;
  std::vector<FaceFactors> faces;  ///< aligned with Mesh::boundary_faces
};

GeometricFactors geometric_factors(const Mesh& mesh, const ReferenceElement& ref);

}  // namespace semrad
