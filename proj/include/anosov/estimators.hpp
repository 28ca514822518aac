#pragma once

// Critical exponents from orbit counting and Poincare sums, box dimension of
// limit-set samples, Patterson-Sullivan style measures on a ball, shadow
// ratios and the least angle.
//
// Box (net) dimension stands in for Hausdorff dimension throughout.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "anosov/representation.hpp"

namespace anosov {

/// Sum over ball(R) of gap_ratio(rho(gamma), 1)^s, accumulated in log space.
double poincare_partial(const Representation& rep, double s, int radius, const ScanOptions& options = {});

/// -log gap_ratio(rho(gamma), 1) for every gamma in ball(R) minus the
/// identity, grouped by word length (entry k - 1 holds the sphere of radius k).
std::vector<std::vector<double>> log_gap_spectrum(const Representation& rep, int radius,
                                                  const ScanOptions& options = {});

enum class ExponentMethod { CountingRegression, SeriesTransition };

std::string to_string(ExponentMethod m);

struct ExponentEstimate {
  double h = 0;
  ExponentMethod method = ExponentMethod::CountingRegression;
  double window_lo = 0;  ///< t range for counting, s bracket for the series
  double window_hi = 0;
  double confidence = 0;  ///< half-width of the 95% regression interval, or of the final bisection bracket
};

struct CountBin {
  double t = 0;
  std::uint64_t count = 0;
};

struct CriticalExponent {
  ExponentEstimate counting;  ///< the reported h
  ExponentEstimate series;
  std::vector<CountBin> bins;  ///< cumulative counts N(t) on [0, t_max]
  int radius = 0;

  double h() const { return counting.h; }
};

/// The t-grid splits [0, t_max] into kCountBins steps (kCountBins + 1 points);
/// the fit uses the points in [t_max / 2, t_max].
inline constexpr int kCountBins = 32;

/// Counting regression of log #{gamma in ball(R) : -log gap <= t} against t
/// over [t_max / 2, t_max], where t_max is the smallest -log gap on sphere(R)
/// (below it the count is complete).  The series estimate bisects for the s
/// at which the per-radius sums on [R/2, R] stop growing.
CriticalExponent critical_exponent(const Representation& rep, int radius, const ScanOptions& options = {});

// ---------------------------------------------------------------------------

struct DimensionEstimate {
  std::vector<double> scales;  ///< decreasing
  std::vector<std::size_t> counts;
  double slope = 0;
  double stderr_ = 0;
  std::size_t fit_first = 0;  ///< scales[fit_first .. fit_last] enter the fit
  std::size_t fit_last = 0;
  double max_error = 0;
};

/// Fraction of the sample a net may reach before its scale counts as
/// saturated and is left out of the fit.
inline constexpr double kNetSaturation = 0.2;

/// Greedy nets of unit vectors (projective points, sin-distance) at scales
/// diam * 2^-j down to 4 * max_error, at most scale_count of them.  The slope
/// of log N(eps) against log(1/eps) is fitted from eps <= diam / 4 to the last
/// scale whose net holds under kNetSaturation of the points.
DimensionEstimate box_dimension(const std::vector<Eigen::VectorXd>& points, double max_error, int scale_count = 40);
DimensionEstimate box_dimension(const std::vector<BoundaryPoint>& points, int scale_count = 40);

/// Size of the greedy eps-net in input order.
std::size_t net_count(const std::vector<Eigen::VectorXd>& points, double eps);

// ---------------------------------------------------------------------------

struct PSAtom {
  GroupWord word;
  Eigen::VectorXd point;  ///< U_1(rho(word))
  double weight = 0;
};

struct PSMeasure {
  double s = 0;
  int radius = 0;
  std::vector<PSAtom> atoms;
  std::size_t skipped_no_gap = 0;
};

/// Atoms at U_1(rho(gamma)) for gamma in ball(R) minus the identity, weights
/// proportional to gap^s and normalized to total mass 1.
PSMeasure ps_measure(const Representation& rep, double s, int radius, const ScanOptions& options = {});

struct ShadowCheck {
  GroupWord eta;
  double ratio = 0;
  double lower = 0;
  double upper = 0;
  double numerator = 0;    ///< mass of rho(eta) X(eta)
  double denominator = 0;  ///< mass of X(eta)

  bool holds() const { return lower <= ratio && ratio <= upper; }
};

/// mu(rho(eta) X(eta)) / mu(X(eta)), with X(eta) the atoms within delta/2 of
/// the sampled xi^1 of the cone type at infinity of eta.  The bracket uses
/// h = measure.s.
ShadowCheck shadow_ratio(const Representation& rep, const GroupWord& eta, const PSMeasure& measure,
                         const std::vector<BoundaryPoint>& limit_sample, double delta_hat);

struct LeastAngle {
  double delta = 0;
  bool no_gap = false;
};

/// Minimum over sampled geodesics through the identity of
/// sin angle(U_1(rho(alpha_k)), U_{d-1}(rho(alpha_{-m}))), k, m in [L, 2L].
LeastAngle least_angle_estimate(const Representation& rep, int L, std::size_t n_geodesics, std::uint64_t seed);

}  // namespace anosov
