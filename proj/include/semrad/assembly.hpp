#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Sparse>

#include "semrad/mesh.hpp"
#include "semrad/refelem.hpp"

namespace semrad {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Continuous Galerkin numbering of the order-P nodes.
struct DofMap {
  int n_dof = 0;
  Eigen::MatrixXi element_dofs;  ///< n_ep x K
  VectorXd x, z;                 ///< coordinates of every dof
  std::map<BoundaryTag, std::vector<int>> tag_dofs;  ///< sorted, unique
  std::vector<int> fs_trace;                         ///< free-surface dofs ordered by x
  std::vector<int> body_trace;                       ///< sorted

  const std::vector<int>& dofs(BoundaryTag tag) const;
};

DofMap build_dof_map(const Mesh& mesh, const ReferenceElement& ref, const GeometricFactors& geo);

/// Everything needed to assemble on one mesh at one order.
struct Discretization {
  Mesh mesh;
  ReferenceElement ref;
  GeometricFactors geo;
  DofMap dofs;
};

/// Builds reference element, geometric factors and dof map. A curved mesh
/// must carry nodes of the same order.
Discretization discretize(const Mesh& mesh, int order, int cubature_strength = 0);

/// Assembled weak Laplacian with symmetric Dirichlet bookkeeping.
struct DiscreteLaplacian {
  SparseMatrix A0;  ///< assembled operator, no boundary modification
  SparseMatrix A;   ///< operator after Dirichlet imposition
  VectorXd b;       ///< base load vector
  std::vector<int> dirichlet;   ///< sorted Dirichlet dofs
  VectorXd dirichlet_values;    ///< aligned with `dirichlet`
  std::vector<char> is_dirichlet;
  SparseMatrix coupling;        ///< A0(:, dirichlet) with Dirichlet rows zeroed

  int size() const { return static_cast<int>(A0.rows()); }

  /// Right-hand side for load `load` and Dirichlet data `values`
  /// (aligned with `dirichlet`): load - coupling*values, values in the
  /// Dirichlet rows.
  VectorXd lifted_rhs(const VectorXd& load, const VectorXd& values) const;
  VectorXd rhs() const { return lifted_rhs(b, dirichlet_values); }
};

/// Element stiffness matrix sum_n (Dx^T M Dx + Dz^T M Dz); curved elements use
/// the super-collocation cubature.
MatrixXd element_stiffness(const Discretization& d, int element);

DiscreteLaplacian assemble_stiffness(const Discretization& d);

/// Pointwise boundary data g(x, z, nx, nz).
using BoundaryFunction = std::function<double(double, double, double, double)>;

/// Load vector of int_Gamma g l_i dGamma over faces with `tag`, with g
/// evaluated at the face quadrature points.
VectorXd neumann_load(const Discretization& d, BoundaryTag tag, const BoundaryFunction& g);

/// b += M1D(sJ) q per face, with q given at the P+1 nodes of each face carrying
/// `tag` (in the order of Discretization::geo.faces). Returns the number of
/// faces used; zero faces is a silent no-op.
int assemble_neumann_flux(VectorXd& b, const Discretization& d, BoundaryTag tag,
                          const std::vector<VectorXd>& face_values);

/// Sparse operator F (N x N) with F*q = load of the nodal flux field q on faces
/// tagged `tag` (q read at the dofs of those faces).
SparseMatrix boundary_mass(const Discretization& d, BoundaryTag tag);

/// Load vector int_Omega f l_i dOmega by cubature.
VectorXd assemble_volume_source(const Discretization& d,
                                const std::function<double(double, double)>& f);

/// Imposes phi = values on `nodes`. Re-imposing on the same node set only
/// replaces the values. Conflicting duplicates throw ParameterError.
void impose_dirichlet(DiscreteLaplacian& sys, const std::vector<int>& nodes,
                      const VectorXd& values);

/// Operator G (rows: `targets`, cols: dofs) returning d phi/d dir (dir = 0: x,
/// 1: z) at the target dofs, element-local and averaged over the elements that
/// own the target through a face carrying `tag`.
SparseMatrix trace_derivative_operator(const Discretization& d, const std::vector<int>& targets,
                                       BoundaryTag tag, int direction);

/// Operator evaluating d phi/dx at arbitrary points (one row per point).
SparseMatrix point_derivative_operator(const Discretization& d, const std::vector<Vec2>& points,
                                       int direction);

/// Reference coordinates of a physical point inside element e (Newton for
/// curved elements). Returns false if the point lies outside.
bool locate_in_element(const Discretization& d, int e, const Vec2& p, double& r, double& s);

}  // namespace semrad
