#pragma once

// Quantitative linear algebra on R^d: Cartan (singular value) decompositions,
// Cartan attractors, and the sine metric on Grassmannians.
//
// Everything here is a free function on Eigen expressions, templated on the
// scalar type.  The rest of the library instantiates it with double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "anosov/error.hpp"

namespace anosov {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Relative tolerance under which sigma_p and sigma_{p+1} are treated as equal.
inline constexpr double kGapTolerance = 1e-8;
/// Default threshold on the sine of principal angles for intersections.
inline constexpr double kIntersectionTolerance = 1e-6;
/// Smallest admissible sigma_d / sigma_1.
inline constexpr double kSingularFloor = 1e-300;
/// Singular values closer than this (relative) are a tie for frame ordering.
inline constexpr double kTieTolerance = 1e-13;

/// A linear subspace of R^d stored as an orthonormal frame (d x rank).
/// Rank 0 is allowed and represents the zero subspace.
template <typename Scalar>
class BasicSubspace {
 public:
  BasicSubspace() = default;

  /// Wraps a frame that is already orthonormal.  The caller guarantees it.
  static BasicSubspace from_orthonormal(MatrixX<Scalar> frame) {
    BasicSubspace s;
    s.frame_ = std::move(frame);
    return s;
  }

  /// Span of the columns of `vectors`; they must be linearly independent.
  template <typename Derived>
  static BasicSubspace span(const Eigen::MatrixBase<Derived>& vectors) {
    const Eigen::Index d = vectors.rows();
    const Eigen::Index k = vectors.cols();
    if (k == 0) return zero(d);
    if (k > d) fail(ErrorKind::RankOverflow, "more spanning vectors than the ambient dimension");
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(vectors.template cast<Scalar>(), Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (!(s(k - 1) > Scalar(1e-13) * s(0))) {
      fail(ErrorKind::InvalidArgument, "spanning vectors are linearly dependent");
    }
    return from_orthonormal(svd.matrixU().leftCols(k));
  }

  static BasicSubspace zero(Eigen::Index ambient) {
    return from_orthonormal(MatrixX<Scalar>(ambient, 0));
  }

  /// span{e_first, ..., e_{first+count-1}} (0-based).
  static BasicSubspace coordinate(Eigen::Index ambient, Eigen::Index first, Eigen::Index count) {
    MatrixX<Scalar> f = MatrixX<Scalar>::Zero(ambient, count);
    for (Eigen::Index i = 0; i < count; ++i) f(first + i, i) = Scalar(1);
    return from_orthonormal(std::move(f));
  }

  Eigen::Index ambient_dim() const { return frame_.rows(); }
  Eigen::Index rank() const { return frame_.cols(); }
  const MatrixX<Scalar>& frame() const { return frame_; }

  /// Orthogonal projector onto the subspace.
  MatrixX<Scalar> projector() const { return frame_ * frame_.transpose(); }

 private:
  MatrixX<Scalar> frame_;
};

using Subspace = BasicSubspace<double>;

/// g = exp(log_scale) * left_frame * diag(sigma) * right_frame^T.
template <typename Scalar>
struct BasicCartanDecomposition {
  VectorX<Scalar> sigma;
  MatrixX<Scalar> left_frame;
  MatrixX<Scalar> right_frame;
  Scalar log_scale = 0;

  Eigen::Index dim() const { return sigma.size(); }

  MatrixX<Scalar> reconstruct() const {
    return left_frame * sigma.asDiagonal() * right_frame.transpose();
  }

  /// log sigma_i including the carried scale (0-based i).
  Scalar log_sigma(Eigen::Index i) const { return std::log(sigma(i)) + log_scale; }
};

using CartanDecomposition = BasicCartanDecomposition<double>;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& g) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    fail(ErrorKind::DimensionMismatch, "expected a non-empty square matrix");
  }
  if (!g.allFinite()) fail(ErrorKind::InvalidArgument, "matrix has non-finite entries");
}

template <typename Scalar>
void require_same_ambient(const BasicSubspace<Scalar>& a, const BasicSubspace<Scalar>& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    fail(ErrorKind::DimensionMismatch, "subspaces live in different ambient spaces");
  }
}

// Lexicographic comparison of absolute values, largest first.
template <typename Scalar>
bool abs_lex_greater(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Scalar x = std::abs(a(i));
    const Scalar y = std::abs(b(i));
    if (x > y) return true;
    if (x < y) return false;
  }
  return false;
}

}  // namespace detail

/// Singular value decomposition with deterministic tie-breaking: inside a
/// cluster of equal singular values, left columns are ordered by
/// lexicographically largest absolute components, and every column pair is
/// signed so that the largest-magnitude entry of the left column is positive.
template <typename Derived>
BasicCartanDecomposition<typename Derived::Scalar> cartan(
    const Eigen::MatrixBase<Derived>& g, typename Derived::Scalar log_scale = 0) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(g);
  const Eigen::Index d = g.rows();
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(g.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);

  BasicCartanDecomposition<Scalar> out;
  out.sigma = svd.singularValues();
  out.left_frame = svd.matrixU();
  out.right_frame = svd.matrixV();
  out.log_scale = log_scale;

  if (!(out.sigma(0) > Scalar(0)) || !(out.sigma(d - 1) >= Scalar(kSingularFloor) * out.sigma(0))) {
    fail(ErrorKind::SingularInput, "matrix is numerically singular");
  }

  // Tie-breaking inside clusters of (relatively) equal singular values.
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index end = start + 1;
    while (end < d && out.sigma(end - 1) - out.sigma(end) <= Scalar(kTieTolerance) * out.sigma(start)) ++end;
    if (end - start > 1) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(end - start));
      std::iota(order.begin(), order.end(), start);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return detail::abs_lex_greater<Scalar>(out.left_frame.col(a), out.left_frame.col(b));
      });
      MatrixX<Scalar> u = out.left_frame;
      MatrixX<Scalar> v = out.right_frame;
      for (Eigen::Index i = 0; i < end - start; ++i) {
        out.left_frame.col(start + i) = u.col(order[static_cast<std::size_t>(i)]);
        out.right_frame.col(start + i) = v.col(order[static_cast<std::size_t>(i)]);
      }
    }
    start = end;
  }

  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index arg = 0;
    out.left_frame.col(i).cwiseAbs().maxCoeff(&arg);
    if (out.left_frame(arg, i) < Scalar(0)) {
      out.left_frame.col(i) *= Scalar(-1);
      out.right_frame.col(i) *= Scalar(-1);
    }
  }
  return out;
}

/// sigma_{p+1} / sigma_p for 1 <= p <= d-1.
template <typename Scalar>
Scalar gap_ratio(const BasicCartanDecomposition<Scalar>& c, Eigen::Index p) {
  if (p < 1 || p > c.dim() - 1) {
    fail(ErrorKind::IndexOutOfRange, "gap index " + std::to_string(p) + " outside [1, d-1]");
  }
  return std::min(Scalar(1), c.sigma(p) / c.sigma(p - 1));
}

template <typename Derived>
typename Derived::Scalar gap_ratio(const Eigen::MatrixBase<Derived>& g, Eigen::Index p) {
  detail::require_square(g);
  if (p < 1 || p > g.rows() - 1) {
    fail(ErrorKind::IndexOutOfRange, "gap index " + std::to_string(p) + " outside [1, d-1]");
  }
  return gap_ratio(cartan(g), p);
}

/// U_p(g): span of the first p left singular vectors.  Throws NoGap when
/// sigma_{p+1} / sigma_p >= 1 - kGapTolerance.
template <typename Scalar>
BasicSubspace<Scalar> cartan_attractor(const BasicCartanDecomposition<Scalar>& c, Eigen::Index p) {
  if (p < 1 || p > c.dim() - 1) {
    fail(ErrorKind::IndexOutOfRange, "attractor index " + std::to_string(p) + " outside [1, d-1]");
  }
  if (gap_ratio(c, p) >= Scalar(1) - Scalar(kGapTolerance)) {
    fail(ErrorKind::NoGap, "no gap of index " + std::to_string(p));
  }
  return BasicSubspace<Scalar>::from_orthonormal(c.left_frame.leftCols(p));
}

template <typename Derived>
BasicSubspace<typename Derived::Scalar> cartan_attractor(const Eigen::MatrixBase<Derived>& g, Eigen::Index p) {
  return cartan_attractor(cartan(g), p);
}

/// Operator norm times the norm of the inverse.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& g) {
  const auto c = cartan(g);
  return c.sigma(0) / c.sigma(c.dim() - 1);
}

/// d(P, Q) = max over unit v in P of min over w in Q of sin angle(v, w).
/// When ranks differ the smaller subspace plays the role of P, so the value
/// vanishes exactly when the smaller one is contained in the larger one.
template <typename Scalar>
Scalar sin_distance(const BasicSubspace<Scalar>& P, const BasicSubspace<Scalar>& Q) {
  detail::require_same_ambient(P, Q);
  // Equal ranks: fix the evaluation order so the result is exactly symmetric.
  const bool p_first = P.rank() < Q.rank() ||
                       (P.rank() == Q.rank() &&
                        std::lexicographical_compare(P.frame().data(), P.frame().data() + P.frame().size(),
                                                     Q.frame().data(), Q.frame().data() + Q.frame().size()));
  const BasicSubspace<Scalar>& small = p_first ? P : Q;
  const BasicSubspace<Scalar>& large = p_first ? Q : P;
  if (small.rank() == 0) return Scalar(0);
  const MatrixX<Scalar> residual =
      small.frame() - large.frame() * (large.frame().transpose() * small.frame());
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(residual);
  return std::clamp(svd.singularValues()(0), Scalar(0), Scalar(1));
}

/// Smallest principal angle, in [0, pi/2].  Zero subspaces give pi/2.
template <typename Scalar>
Scalar min_angle(const BasicSubspace<Scalar>& P, const BasicSubspace<Scalar>& Q) {
  detail::require_same_ambient(P, Q);
  const BasicSubspace<Scalar>& small = P.rank() <= Q.rank() ? P : Q;
  const BasicSubspace<Scalar>& large = P.rank() <= Q.rank() ? Q : P;
  if (small.rank() == 0 || large.rank() == 0) return Scalar(M_PI / 2);
  if (small.rank() + large.rank() > small.ambient_dim()) return Scalar(0);
  const MatrixX<Scalar> inner = large.frame().transpose() * small.frame();
  const MatrixX<Scalar> residual = small.frame() - large.frame() * inner;
  Eigen::JacobiSVD<MatrixX<Scalar>> sres(residual);
  Eigen::JacobiSVD<MatrixX<Scalar>> scos(inner);
  const Scalar s = sres.singularValues()(sres.singularValues().size() - 1);
  const Scalar c = scos.singularValues()(0);
  return std::atan2(std::max(s, Scalar(0)), std::max(c, Scalar(0)));
}

/// Smallest singular value of the concatenated frames: 0 when the sum is not
/// direct, 1 when the parts are pairwise orthogonal.
template <typename Scalar>
Scalar direct_sum_margin(std::span<const BasicSubspace<Scalar>> parts) {
  if (parts.empty()) return Scalar(1);
  const Eigen::Index d = parts.front().ambient_dim();
  Eigen::Index total = 0;
  for (const auto& part : parts) {
    if (part.ambient_dim() != d) fail(ErrorKind::DimensionMismatch, "parts live in different ambient spaces");
    total += part.rank();
  }
  if (total > d) fail(ErrorKind::RankOverflow, "total rank exceeds the ambient dimension");
  if (total == 0) return Scalar(1);
  MatrixX<Scalar> stacked(d, total);
  Eigen::Index col = 0;
  for (const auto& part : parts) {
    stacked.middleCols(col, part.rank()) = part.frame();
    col += part.rank();
  }
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(stacked);
  return std::clamp(svd.singularValues()(total - 1), Scalar(0), Scalar(1));
}

template <typename Scalar>
Scalar direct_sum_margin(std::initializer_list<BasicSubspace<Scalar>> parts) {
  return direct_sum_margin(std::span<const BasicSubspace<Scalar>>(parts.begin(), parts.size()));
}

/// Directions of A whose principal angle to B has sine at most `tol`.
template <typename Scalar>
BasicSubspace<Scalar> subspace_intersection(const BasicSubspace<Scalar>& A, const BasicSubspace<Scalar>& B,
                                            Scalar tol = Scalar(kIntersectionTolerance)) {
  detail::require_same_ambient(A, B);
  const BasicSubspace<Scalar>& small = A.rank() <= B.rank() ? A : B;
  const BasicSubspace<Scalar>& large = A.rank() <= B.rank() ? B : A;
  if (small.rank() == 0 || large.rank() == 0) return BasicSubspace<Scalar>::zero(A.ambient_dim());
  const MatrixX<Scalar> residual =
      small.frame() - large.frame() * (large.frame().transpose() * small.frame());
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(residual, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index k = small.rank();
  // Singular values beyond the returned vector (k > d rows never happens here)
  // are zero; JacobiSVD returns min(d, k) = k values.
  Eigen::Index keep = 0;
  for (Eigen::Index i = k - 1; i >= 0 && s(i) <= tol; --i) ++keep;
  if (keep == 0) return BasicSubspace<Scalar>::zero(A.ambient_dim());
  MatrixX<Scalar> frame = small.frame() * svd.matrixV().rightCols(keep);
  // Re-orthonormalize to wash out rounding.
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(frame);
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(frame.rows(), keep);
  return BasicSubspace<Scalar>::from_orthonormal(std::move(q));
}

/// Orthonormal basis of the orthogonal complement (deterministic).
template <typename Scalar>
BasicSubspace<Scalar> orthogonal_complement(const BasicSubspace<Scalar>& P) {
  const Eigen::Index d = P.ambient_dim();
  const Eigen::Index k = P.rank();
  if (k == 0) return BasicSubspace<Scalar>::from_orthonormal(MatrixX<Scalar>::Identity(d, d));
  if (k == d) return BasicSubspace<Scalar>::zero(d);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(P.frame().transpose(), Eigen::ComputeFullV);
  return BasicSubspace<Scalar>::from_orthonormal(svd.matrixV().rightCols(d - k));
}

/// g(P) as a subspace; fine for moderately conditioned g.  Long products
/// should go through exterior powers instead (see exterior.hpp).
template <typename Derived, typename Scalar>
BasicSubspace<Scalar> image(const Eigen::MatrixBase<Derived>& g, const BasicSubspace<Scalar>& P) {
  if (P.rank() == 0) return P;
  return BasicSubspace<Scalar>::span(g.template cast<Scalar>() * P.frame());
}

}  // namespace anosov
