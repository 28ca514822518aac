#pragma once

// Exterior powers of R^d in the basis e_I = e_{i1} ^ ... ^ e_{ik}, I ordered
// lexicographically.  The basis is orthonormal for the induced inner product,
// so singular values of the k-th power of g are k-fold products of those of g.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "anosov/linalg.hpp"

namespace anosov {

/// Lexicographically ordered k-subsets of {0, ..., n-1}.
class SubsetIndex {
 public:
  SubsetIndex(int n, int k) : n_(n), k_(k) {
    if (n < 0 || k < 0 || k > n) fail(ErrorKind::IndexOutOfRange, "invalid subset size");
    std::vector<int> current(static_cast<std::size_t>(k));
    enumerate(0, 0, current);
  }

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return subsets_.size(); }
  const std::vector<int>& operator[](std::size_t i) const { return subsets_[i]; }

  /// Position of a sorted subset.
  std::size_t index_of(const std::vector<int>& subset) const {
    // Combinatorial number system, lexicographic variant.
    std::size_t idx = 0;
    int prev = -1;
    for (int j = 0; j < k_; ++j) {
      for (int v = prev + 1; v < subset[static_cast<std::size_t>(j)]; ++v) idx += binomial(n_ - v - 1, k_ - j - 1);
      prev = subset[static_cast<std::size_t>(j)];
    }
    return idx;
  }

  static std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
  }

 private:
  void enumerate(int start, int depth, std::vector<int>& current) {
    if (depth == k_) {
      subsets_.push_back(current);
      return;
    }
    for (int v = start; v <= n_ - (k_ - depth); ++v) {
      current[static_cast<std::size_t>(depth)] = v;
      enumerate(v + 1, depth + 1, current);
    }
  }

  int n_;
  int k_;
  std::vector<std::vector<int>> subsets_;
};

/// Matrix of the k-th exterior power: entries are k x k minors.
template <typename Derived>
MatrixX<typename Derived::Scalar> exterior_power(const Eigen::MatrixBase<Derived>& g, int k) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(g);
  const int d = static_cast<int>(g.rows());
  const SubsetIndex subsets(d, k);
  const auto n = static_cast<Eigen::Index>(subsets.size());
  MatrixX<Scalar> out(n, n);
  if (k == 0) {
    out(0, 0) = Scalar(1);
    return out;
  }
  MatrixX<Scalar> minor(k, k);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& rows = subsets[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& cols = subsets[static_cast<std::size_t>(c)];
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) minor(i, j) = g(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
      out(r, c) = k == 1 ? minor(0, 0) : minor.partialPivLu().determinant();
    }
  }
  return out;
}

/// Plücker coordinates of the span of the frame columns (not normalized).
template <typename Scalar>
VectorX<Scalar> plucker(const BasicSubspace<Scalar>& P) {
  const int d = static_cast<int>(P.ambient_dim());
  const int k = static_cast<int>(P.rank());
  const SubsetIndex subsets(d, k);
  VectorX<Scalar> out(static_cast<Eigen::Index>(subsets.size()));
  if (k == 0) {
    out(0) = Scalar(1);
    return out;
  }
  MatrixX<Scalar> minor(k, k);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (int i = 0; i < k; ++i) minor.row(i) = P.frame().row(subsets[s][static_cast<std::size_t>(i)]);
    out(static_cast<Eigen::Index>(s)) = k == 1 ? minor(0, 0) : minor.partialPivLu().determinant();
  }
  return out;
}

/// Recovers the k-plane {v : v ^ omega = 0} from a (nearly) decomposable
/// k-vector.  The kernel is computed by SVD, which keeps the result accurate
/// even when omega comes out of a long, badly conditioned product.
template <typename Derived>
BasicSubspace<typename Derived::Scalar> subspace_from_multivector(const Eigen::MatrixBase<Derived>& omega, int d,
                                                                   int k) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(omega.size()) != SubsetIndex::binomial(d, k)) {
    fail(ErrorKind::DimensionMismatch, "multivector size does not match C(d, k)");
  }
  if (k == 0) return BasicSubspace<Scalar>::zero(d);
  if (k == d) return BasicSubspace<Scalar>::from_orthonormal(MatrixX<Scalar>::Identity(d, d));
  if (k == 1) return BasicSubspace<Scalar>::from_orthonormal(omega.normalized());
  const SubsetIndex lower(d, k);
  const SubsetIndex upper(d, k + 1);
  MatrixX<Scalar> wedge = MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(upper.size()), d);
  std::vector<int> merged(static_cast<std::size_t>(k + 1));
  for (std::size_t s = 0; s < lower.size(); ++s) {
    const auto& I = lower[s];
    for (int j = 0; j < d; ++j) {
      int below = 0;
      bool present = false;
      for (int v : I) {
        if (v == j) present = true;
        if (v < j) ++below;
      }
      if (present) continue;
      std::size_t m = 0;
      bool placed = false;
      for (int v : I) {
        if (!placed && j < v) {
          merged[m++] = j;
          placed = true;
        }
        merged[m++] = v;
      }
      if (!placed) merged[m++] = j;
      const Scalar sign = (below % 2 == 0) ? Scalar(1) : Scalar(-1);
      wedge(static_cast<Eigen::Index>(upper.index_of(merged)), j) += sign * omega(static_cast<Eigen::Index>(s));
    }
  }
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(wedge, Eigen::ComputeFullV);
  return BasicSubspace<Scalar>::from_orthonormal(svd.matrixV().rightCols(k));
}

}  // namespace anosov
