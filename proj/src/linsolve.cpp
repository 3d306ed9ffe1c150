#include "semrad/linsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <numeric>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "semrad/error.hpp"

namespace semrad {

namespace {

std::vector<std::vector<int>> adjacency(const SparseMatrix& A) {
  if (A.rows() != A.cols()) throw ParameterError("matrix must be square");
  const int n = static_cast<int>(A.rows());
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
      const int i = static_cast<int>(it.row());
      if (i != j) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

// Breadth-first level structure from root restricted to unvisited vertices.
std::vector<std::vector<int>> levels_from(const std::vector<std::vector<int>>& adj, int root,
                                          const std::vector<char>& taken) {
  std::vector<std::vector<int>> levels{{root}};
  std::vector<char> seen(adj.size(), 0);
  seen[root] = 1;
  while (true) {
    std::vector<int> next;
    for (int v : levels.back())
      for (int w : adj[v])
        if (!seen[w] && !taken[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
    if (next.empty()) break;
    levels.push_back(std::move(next));
  }
  return levels;
}

int pseudo_peripheral(const std::vector<std::vector<int>>& adj, int start,
                      const std::vector<char>& taken) {
  int root = start;
  auto levels = levels_from(adj, root, taken);
  while (true) {
    const auto& last = levels.back();
    const int cand = *std::min_element(last.begin(), last.end(), [&](int a, int b) {
      return adj[a].size() < adj[b].size() || (adj[a].size() == adj[b].size() && a < b);
    });
    auto trial = levels_from(adj, cand, taken);
    if (trial.size() <= levels.size()) return root;
    root = cand;
    levels = std::move(trial);
  }
}

}  // namespace

std::vector<int> rcm_permutation(const SparseMatrix& A) {
  const auto adj = adjacency(A);
  const int n = static_cast<int>(adj.size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> taken(n, 0);
  std::vector<int> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](int a, int b) { return adj[a].size() < adj[b].size(); });
  for (int seed : by_degree) {
    if (taken[seed]) continue;
    const int root = pseudo_peripheral(adj, seed, taken);
    std::size_t head = order.size();
    order.push_back(root);
    taken[root] = 1;
    while (head < order.size()) {
      const int v = order[head++];
      std::vector<int> fresh;
      for (int w : adj[v])
        if (!taken[w]) {
          taken[w] = 1;
          fresh.push_back(w);
        }
      std::stable_sort(fresh.begin(), fresh.end(),
                       [&](int a, int b) { return adj[a].size() < adj[b].size(); });
      order.insert(order.end(), fresh.begin(), fresh.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

SparseMatrix permute_symmetric(const SparseMatrix& A, const std::vector<int>& q) {
  const int n = static_cast<int>(A.rows());
  if (static_cast<int>(q.size()) != n) throw ParameterError("permutation has the wrong length");
  std::vector<int> inv(n, -1);
  for (int i = 0; i < n; ++i) {
    if (q[i] < 0 || q[i] >= n || inv[q[i]] >= 0) throw ParameterError("invalid permutation");
    inv[q[i]] = i;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(A.nonZeros());
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      trip.emplace_back(inv[it.row()], inv[j], it.value());
  SparseMatrix B(n, n);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

int bandwidth(const SparseMatrix& A, const std::vector<int>& q) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> inv(n);
  if (q.empty())
    std::iota(inv.begin(), inv.end(), 0);
  else
    for (int i = 0; i < n; ++i) inv[q[i]] = i;
  int bw = 0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      bw = std::max(bw, std::abs(inv[it.row()] - inv[j]));
  return bw;
}

struct Factorization::Impl {
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt;
};

Factorization::Factorization() = default;
Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

VectorXd Factorization::solve(const VectorXd& b) const {
  if (!impl_) throw SolverError("solve called on an empty factorization");
  if (b.size() != n_) throw ParameterError("right-hand side has the wrong length");
  VectorXd bp(n_);
  for (int i = 0; i < n_; ++i) bp(i) = b(q_[i]);
  const VectorXd xp = impl_->llt.solve(bp);
  VectorXd x(n_);
  for (int i = 0; i < n_; ++i) x(q_[i]) = xp(i);
  return x;
}

Factorization factorize(const SparseMatrix& A, const std::vector<int>& q) {
  const auto t0 = std::chrono::steady_clock::now();
  Factorization f;
  f.n_ = static_cast<int>(A.rows());
  f.q_ = q;
  const SparseMatrix B = permute_symmetric(A, q);
  f.impl_ = std::make_unique<Factorization::Impl>();
  f.impl_->llt.compute(B);
  if (f.impl_->llt.info() != Eigen::Success)
    throw SolverError("Cholesky factorization failed: matrix is not positive definite");
  f.fill_ = static_cast<long>(f.impl_->llt.matrixL().nestedExpression().nonZeros());
  f.bandwidth_ = bandwidth(B);
  f.factor_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return f;
}

Factorization factorize(const SparseMatrix& A, Ordering ordering) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> q;
  if (ordering == Ordering::RCM) {
    q = rcm_permutation(A);
  } else {
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    const SparseMatrix pattern = A;
    amd(pattern, perm);
    q.assign(perm.indices().data(), perm.indices().data() + perm.size());
  }
  Factorization f = factorize(A, q);
  f.ordering_ = ordering;
  f.factor_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return f;
}

}  // namespace semrad
