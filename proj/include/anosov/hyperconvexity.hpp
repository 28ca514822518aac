#pragma once

// (p, q, r)-hyperconvexity: transversality of x^p + y^q with z^{d-r} over
// sampled boundary triples, the convergence profile of x^p_i + y^q_i towards
// the osculating space, and the direct-sum check of Property (H) type.

#include <cstdint>
#include <vector>

#include "anosov/representation.hpp"

namespace anosov {

/// Default minimum pairwise sin-distance of xi^1 images in sampled triples.
inline constexpr double kSeparationFloor = 0.05;
/// Certified error target for boundary points in margin computations; margins
/// below it are numerically zero.
inline constexpr double kMarginResolution = 1e-7;

struct TripleIndices {
  int p = 1;
  int q = 1;
  int r = 2;
};

/// direct_sum_margin(xi^p(x), xi^q(y), xi^{d-r}(z)).  DegenerateTriple if two
/// rays have identical prefixes.
double triple_margin(const Representation& rep, const TripleIndices& idx, const BoundaryRay& x, const BoundaryRay& y,
                     const BoundaryRay& z, const CertificateBank& bank, double tol = kMarginResolution);

struct ScanSettings {
  double separation_floor = kSeparationFloor;
  double tol = kMarginResolution;
  int threads = 1;
  /// Give up generating separated triples after this many rejections per triple.
  std::size_t max_rejections = 1000;
};

struct TripleMarginReport {
  TripleIndices indices;
  std::size_t triples_tested = 0;
  double worst_margin = 1;
  std::size_t worst_index = 0;
  std::vector<BoundaryRay> witness;  ///< x, y, z of the worst triple (empty when no triples)
  std::vector<double> margins;       ///< one per triple, in generation order
  std::vector<std::vector<BoundaryRay>> triples;
  double separation_floor = kSeparationFloor;
  std::size_t depth = 0;

  bool numerically_zero() const { return worst_margin < kMarginResolution; }
};

/// Seeded triples with pairwise xi^1 separation at least the floor, generated
/// sequentially, evaluated in parallel, reduced by an ordered minimum.
TripleMarginReport hyperconvexity_scan(const Representation& rep, const TripleIndices& idx, std::size_t n_triples,
                                       std::size_t depth, std::uint64_t seed, const CertificateBank& bank,
                                       const ScanSettings& settings = {});

/// All (p, q, r) with p + q <= r <= d - 1.
std::vector<TripleIndices> hyperconvexity_indices(int d);

struct ProfileStep {
  int step = 0;
  double residual = 0;
};

struct ConvergenceProfile {
  TripleIndices indices;
  BoundaryRay ray;
  std::vector<ProfileStep> steps;
  double fitted_rate = 0;   ///< -slope of log residual against step on the last half
  double fitted_const = 0;  ///< exp(intercept)
  std::size_t fitted_points = 0;
};

/// Residuals below this are treated as rounding noise and left out of the fit.
inline constexpr double kResidualFloor = 1e-12;

/// For each step i, w_i and y_i start with alpha_i (the length-i prefix of the
/// ray) and then leave through two different letters; the residual is
/// d(xi^p(w_i) + xi^q(y_i), xi^r(x)).  By equivariance xi(alpha_i w') is
/// rho(alpha_i) xi(w'), which is how the pair is evaluated.
ConvergenceProfile convergence_profile(const Representation& rep, const TripleIndices& idx, const BoundaryRay& x_ray,
                                       const std::vector<int>& steps, std::uint64_t seed, const CertificateBank& bank);

/// direct_sum_margin(x^p, z^p ∩ y^{q_dim}, y^{d-s}).  EmptyIntersection when
/// the middle term does not have rank p + q_dim - d.
double property_h_margin(const Representation& rep, const BoundaryRay& x, const BoundaryRay& y, const BoundaryRay& z,
                         int p, int q_dim, int s, const CertificateBank& bank, double tol = kMarginResolution,
                         double intersection_tol = kIntersectionTolerance);

}  // namespace anosov
