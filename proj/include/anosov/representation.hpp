#pragma once

// Representations of groups given by a geodesic automaton: evaluation on
// words, exhaustive gap certification over balls, boundary maps as limits of
// Cartan attractors, and stereographic projections.
//
// Long products are never formed as plain matrices.  Every scan carries the
// running products of the exterior powers it needs, each normalized to
// max-abs 1 with an additive log scale.  log sigma_1 of the k-th power equals
// sigma_1 + ... + sigma_k in log scale, so gap ratios and attractors stay
// accurate long after sigma_d / sigma_1 underflows.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "anosov/group.hpp"
#include "anosov/linalg.hpp"

namespace anosov {

class Representation {
 public:
  /// One matrix per free generator; inverse letters get exact inverses.  The
  /// automaton defaults to the free group on generators.size() letters.
  explicit Representation(std::vector<Eigen::MatrixXd> generators, std::string label = {},
                          std::shared_ptr<const GeodesicAutomaton> automaton = nullptr);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(generators_.size()); }
  const std::string& label() const { return label_; }
  const GeodesicAutomaton& automaton() const { return *automaton_; }
  std::shared_ptr<const GeodesicAutomaton> automaton_ptr() const { return automaton_; }

  const std::vector<Eigen::MatrixXd>& generators() const { return generators_; }
  /// Image of a letter (0-based; odd letters are inverses).
  const Eigen::MatrixXd& image(Letter l) const { return images_[static_cast<std::size_t>(l)]; }

  /// max over letters of ||rho(l)|| ||rho(l)^-1||.
  double letter_condition() const { return letter_condition_; }

  Representation relabeled(std::string label) const;

 private:
  int dim_ = 0;
  std::vector<Eigen::MatrixXd> generators_;
  std::vector<Eigen::MatrixXd> images_;
  std::string label_;
  std::shared_ptr<const GeodesicAutomaton> automaton_;
  double letter_condition_ = 1;
};

/// matrix * exp(log_scale).
struct ScaledMatrix {
  Eigen::MatrixXd matrix;
  double log_scale = 0;
};

/// rho(w) normalized so that sigma_1 = 1, plus the log of the removed scale.
ScaledMatrix evaluate(const Representation& rep, const GroupWord& w);
ScaledMatrix product(const ScaledMatrix& a, const ScaledMatrix& b);

/// log sigma_1 of a matrix, from the top eigenvalue of its Gram matrix.
double log_top_singular_value(const Eigen::MatrixXd& m);

// ---------------------------------------------------------------------------
// Running exterior-power products.

/// Exterior powers of the letter images for a fixed set of degrees in [1, d-1].
class WedgeImages {
 public:
  WedgeImages(const Representation& rep, std::vector<int> degrees);

  const Representation& rep() const { return *rep_; }
  const std::vector<int>& degrees() const { return degrees_; }
  /// Position of degree k in degrees(), or -1.
  int slot(int k) const;
  const Eigen::MatrixXd& image(std::size_t slot, Letter l) const { return images_[slot][static_cast<std::size_t>(l)]; }
  double log_abs_det(Letter l) const { return log_abs_det_[static_cast<std::size_t>(l)]; }

 private:
  const Representation* rep_;
  std::vector<int> degrees_;
  std::vector<std::vector<Eigen::MatrixXd>> images_;
  std::vector<double> log_abs_det_;
};

/// Normalized exterior-power products of rho(w) for the degrees of a WedgeImages.
class WedgeProduct {
 public:
  explicit WedgeProduct(const WedgeImages& images);

  /// this := this * rho(l).
  void push_back(Letter l);
  /// out := this * rho(l), reusing out's storage.
  void extend_into(Letter l, WedgeProduct& out) const;
  /// this := rho(l) * this.
  void push_front(Letter l);

  const WedgeImages& images() const { return *images_; }
  /// log sigma_1 of the k-th exterior power, k in [0, d]; k must be 0, d or
  /// one of the tracked degrees.
  double log_sigma1(int k) const;
  /// log of sigma_{p+1} / sigma_p, from the tracked degrees p-1, p, p+1.
  double log_gap(int p) const;
  /// Normalized k-th exterior power of the product.
  const Eigen::MatrixXd& matrix(int k) const;
  /// U_k of the product; throws NoGap when sigma_{k+1} / sigma_k is within
  /// kGapTolerance of 1 (requires degrees k-1, k, k+1 where applicable).
  Subspace attractor(int k) const;

 private:
  void refresh(std::size_t slot);

  const WedgeImages* images_;
  std::vector<Eigen::MatrixXd> products_;
  std::vector<double> log_scales_;
  std::vector<double> log_sigma1_;
  double log_det_ = 0;
};

/// Degrees {p-1, p, p+1} intersected with [1, d-1], merged into `degrees`.
std::vector<int> gap_degrees(int d, std::initializer_list<int> ps);

// ---------------------------------------------------------------------------
// Ball scans.

struct ScanOptions {
  int threads = 1;
  std::uint64_t max_ball = 2'000'000;
};

struct BallNode {
  std::span<const Letter> word;
  const WedgeProduct* product;

  int length() const { return static_cast<int>(word.size()); }
  GroupWord group_word() const { return GroupWord{{word.begin(), word.end()}}; }
};

/// |ball(R)|; throws BallTooLarge above the budget.
std::uint64_t checked_ball_size(const GeodesicAutomaton& automaton, int radius, std::uint64_t budget);

/// The ball is split into a fixed list of tasks independent of the thread
/// count (words shorter than two letters, then one task per two-letter
/// prefix).  Each task visits its words in lexicographic order on one thread.
std::size_t ball_task_count(const GeodesicAutomaton& automaton, int radius);
void for_each_in_ball(const Representation& rep, int radius, const std::vector<int>& degrees,
                      const ScanOptions& options,
                      const std::function<void(std::size_t task, const BallNode&)>& visit);

/// Deterministic fold over the ball: one accumulator per task, merged in task
/// order, so the result does not depend on the thread count.
template <typename Acc, typename Visit, typename Merge>
Acc fold_ball(const Representation& rep, int radius, const std::vector<int>& degrees, const ScanOptions& options,
              const Acc& init, Visit visit, Merge merge) {
  std::vector<Acc> partial(ball_task_count(rep.automaton(), radius), init);
  for_each_in_ball(rep, radius, degrees, options,
                   [&](std::size_t task, const BallNode& node) { visit(partial[task], node); });
  Acc out = init;
  for (auto& acc : partial) merge(out, acc);
  return out;
}

/// Runs body(i) for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Anosov certificates.

inline constexpr double kDefaultMuMin = 0.01;

struct RadiusGap {
  int radius = 0;
  double log_worst_gap = 0;  ///< max over sphere(radius) of log(sigma_{p+1} / sigma_p)
  GroupWord witness;

  double worst_gap() const;
};

struct AnosovCertificate {
  int p = 1;
  int radius = 0;
  std::vector<RadiusGap> per_radius;  ///< radii 1..R
  double fitted_mu = 0;               ///< slope of -log worst gap against radius on [R/2, R]
  double fitted_c = 0;                ///< exp(-intercept)
  double r_squared = 0;
  /// Smallest c' with -log worst gap(k) >= mu k - c' for every k in 1..R.
  double intercept_slack = 0;
  double mu_min = kDefaultMuMin;
  bool verdict = false;

  /// exp(intercept_slack): gap(gamma) <= envelope_c * exp(-mu |gamma|) on the ball.
  double envelope_c() const;
};

AnosovCertificate certify_anosov(const Representation& rep, int p, int radius, const ScanOptions& options = {},
                                 double mu_min = kDefaultMuMin);

/// Certificates for several indices of one representation, computed on demand.
class CertificateBank {
 public:
  CertificateBank(const Representation& rep, int radius, ScanOptions options = {}, double mu_min = kDefaultMuMin);

  const AnosovCertificate& get(int p) const;
  const Representation& rep() const { return *rep_; }
  int radius() const { return radius_; }

 private:
  const Representation* rep_;
  int radius_;
  ScanOptions options_;
  double mu_min_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::unique_ptr<AnosovCertificate>> cache_;
};

// ---------------------------------------------------------------------------
// Boundary maps.

/// Explicit (c, mu) for the uniform gap bound gap <= c exp(-mu n).
struct GapConstants {
  double c = 1;
  double mu = 0;
};

/// (envelope_c, fitted_mu) of a passing certificate; NotCertified otherwise.
GapConstants gap_constants(const AnosovCertificate& cert);

/// kappa * c * exp(-mu n) / (1 - exp(-mu)): bound on the distance between
/// U_p of the length-n prefix and the limit.
double tail_bound(const GapConstants& gc, double kappa, std::size_t n);
/// Smallest prefix length whose tail bound is below tol.
std::size_t depth_for_tolerance(const GapConstants& gc, double kappa, double tol);

struct BoundaryPoint {
  BoundaryRay ray;
  int p = 1;
  Subspace subspace;
  double error_bound = 0;
};

/// xi^p of the ray's endpoint from its full prefix.  Throws NoGapAlongRay if
/// a prefix has no gap of index p and InsufficientDepth if the certified tail
/// bound at the prefix depth exceeds tol.
BoundaryPoint boundary_point(const Representation& rep, const BoundaryRay& ray, int p, double tol,
                             const GapConstants& constants);
BoundaryPoint boundary_point(const Representation& rep, const BoundaryRay& ray, int p, double tol,
                             const CertificateBank& bank);

/// Several levels of the same ray in one pass (shares the running products).
std::vector<BoundaryPoint> boundary_flag(const Representation& rep, const BoundaryRay& ray, const std::vector<int>& ps,
                                         double tol, const CertificateBank& bank);

/// Prefix depth at which every requested level meets tol.
std::size_t required_depth(const Representation& rep, const std::vector<int>& ps, double tol,
                           const CertificateBank& bank);

/// Boundary points of seeded random rays; the depth is raised as needed for tol.
std::vector<BoundaryPoint> limit_set_sample(const Representation& rep, int p, std::size_t count, std::size_t depth,
                                            std::uint64_t seed, double tol, const CertificateBank& bank,
                                            int threads = 1);

/// The line x^1 + z^{d-r} in R^d / z^{d-r}, as a unit vector in a fixed
/// orthonormal basis of the orthogonal complement of z.  NotTransverse when
/// the direct sum margin is at most tol.
Eigen::VectorXd stereographic_projection(const BoundaryPoint& z, const BoundaryPoint& x, double tol = 1e-8);

}  // namespace anosov
