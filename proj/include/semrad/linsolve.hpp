#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

namespace semrad {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Eigen::VectorXd;

/// Reverse Cuthill-McKee order of a structurally symmetric matrix: q[i] is
/// the original index placed at position i. Each connected component is
/// traversed from a pseudo-peripheral vertex.
std::vector<int> rcm_permutation(const SparseMatrix& A);

/// Half bandwidth max |i - j| over nonzeros of A(q,q) (identity if q is empty).
int bandwidth(const SparseMatrix& A, const std::vector<int>& q = {});

/// Symmetric permutation A(q,q).
SparseMatrix permute_symmetric(const SparseMatrix& A, const std::vector<int>& q);

enum class Ordering { RCM, AMD };

/// Sparse Cholesky factorization of A(q,q).
class Factorization {
public:
  Factorization();
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  int size() const { return n_; }
  const std::vector<int>& permutation() const { return q_; }
  long fill() const { return fill_; }  ///< nonzeros of the Cholesky factor
  int bandwidth() const { return bandwidth_; }
  double factor_seconds() const { return factor_seconds_; }
  Ordering ordering() const { return ordering_; }

  /// Solves A x = b; thread-safe for concurrent calls.
  VectorXd solve(const VectorXd& b) const;

private:
  friend Factorization factorize(const SparseMatrix&, Ordering);
  friend Factorization factorize(const SparseMatrix&, const std::vector<int>&);
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<int> q_;
  int n_ = 0;
  long fill_ = 0;
  int bandwidth_ = 0;
  double factor_seconds_ = 0.0;
  Ordering ordering_ = Ordering::RCM;
};

/// Factorizes A with an AMD (default) or RCM fill-reducing order.
/// Throws SolverError if A is not positive definite.
Factorization factorize(const SparseMatrix& A, Ordering ordering = Ordering::AMD);

/// Factorizes A(q,q) for a caller-supplied permutation.
Factorization factorize(const SparseMatrix& A, const std::vector<int>& q);

inline VectorXd solve(const Factorization& f, const VectorXd& b) { return f.solve(b); }

}  // namespace semrad
