#include "anosov/hyperconvexity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "anosov/error.hpp"
#include "anosov/exterior.hpp"

namespace anosov {

namespace {

void require_indices(int d, const TripleIndices& idx) {
  if (idx.p < 1 || idx.q < 1 || idx.p + idx.q > idx.r || idx.r > d - 1) {
    fail(ErrorKind::IndexOutOfRange, "need 1 <= p, q and p + q <= r <= d - 1");
  }
}

void require_distinct(const BoundaryRay& x, const BoundaryRay& y, const BoundaryRay& z) {
  if (x.prefix == y.prefix || y.prefix == z.prefix || x.prefix == z.prefix) {
    fail(ErrorKind::DegenerateTriple, "two rays of the triple share their whole prefix");
  }
}

std::vector<int> unique_levels(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const Subspace& level(const std::vector<BoundaryPoint>& flag, int p) {
  for (const auto& bp : flag)
    if (bp.p == p) return bp.subspace;
  fail(ErrorKind::IndexOutOfRange, "level not computed");
}

}  // namespace

double triple_margin(const Representation& rep, const TripleIndices& idx, const BoundaryRay& x, const BoundaryRay& y,
                     const BoundaryRay& z, const CertificateBank& bank, double tol) {
  require_indices(rep.dim(), idx);
  require_distinct(x, y, z);
  const auto xp = boundary_point(rep, x, idx.p, tol, bank);
  const auto yq = boundary_point(rep, y, idx.q, tol, bank);
  const auto zr = boundary_point(rep, z, rep.dim() - idx.r, tol, bank);
  return direct_sum_margin({xp.subspace, yq.subspace, zr.subspace});
}

std::vector<TripleIndices> hyperconvexity_indices(int d) {
  std::vector<TripleIndices> out;
  for (int r = 2; r <= d - 1; ++r)
    for (int p = 1; p < r; ++p)
      for (int q = 1; p + q <= r; ++q) out.push_back({p, q, r});
  return out;
}

TripleMarginReport hyperconvexity_scan(const Representation& rep, const TripleIndices& idx, std::size_t n_triples,
                                       std::size_t depth, std::uint64_t seed, const CertificateBank& bank,
                                       const ScanSettings& settings) {
  const int d = rep.dim();
  require_indices(d, idx);
  TripleMarginReport report;
  report.indices = idx;
  report.separation_floor = settings.separation_floor;
  if (n_triples == 0) return report;

  const std::vector<int> levels = unique_levels({1, idx.p, idx.q, d - idx.r});
  const std::size_t n = std::max(depth, required_depth(rep, levels, settings.tol, bank));
  report.depth = n;

  // Candidate rays come from one seeded stream; flags are computed in
  // parallel batches and accepted strictly in stream order.
  std::mt19937_64 master(seed);
  std::vector<std::array<std::vector<BoundaryPoint>, 3>> accepted;
  std::size_t rejections = 0;
  while (accepted.size() < n_triples) {
    const std::size_t want = n_triples - accepted.size();
    const std::size_t batch = want + want / 4 + 8;
    std::vector<BoundaryRay> rays;
    for (std::size_t i = 0; i < 3 * batch; ++i) rays.push_back(random_ray(rep.automaton(), n, master()));
    std::vector<std::vector<BoundaryPoint>> flags(rays.size());
    parallel_for(rays.size(), settings.threads,
                 [&](std::size_t i) { flags[i] = boundary_flag(rep, rays[i], levels, settings.tol, bank); });
    for (std::size_t t = 0; t < batch && accepted.size() < n_triples; ++t) {
      auto& fx = flags[3 * t];
      auto& fy = flags[3 * t + 1];
      auto& fz = flags[3 * t + 2];
      const bool distinct = rays[3 * t].prefix != rays[3 * t + 1].prefix &&
                            rays[3 * t + 1].prefix != rays[3 * t + 2].prefix &&
                            rays[3 * t].prefix != rays[3 * t + 2].prefix;
      const double sep = std::min({sin_distance(level(fx, 1), level(fy, 1)), sin_distance(level(fy, 1), level(fz, 1)),
                                   sin_distance(level(fx, 1), level(fz, 1))});
      if (!distinct || sep < settings.separation_floor) {
        if (++rejections > settings.max_rejections * n_triples) {
          fail(ErrorKind::InvalidArgument, "could not sample triples above the separation floor");
        }
        continue;
      }
      accepted.push_back({std::move(fx), std::move(fy), std::move(fz)});
    }
  }

  report.triples_tested = accepted.size();
  report.margins.resize(accepted.size());
  for (std::size_t t = 0; t < accepted.size(); ++t) {
    const auto& [fx, fy, fz] = accepted[t];
    report.margins[t] = direct_sum_margin({level(fx, idx.p), level(fy, idx.q), level(fz, d - idx.r)});
    report.triples.push_back({fx.front().ray, fy.front().ray, fz.front().ray});
    if (t == 0 || report.margins[t] < report.worst_margin) {
      report.worst_margin = report.margins[t];
      report.worst_index = t;
    }
  }
  report.witness = report.triples[report.worst_index];
  return report;
}

ConvergenceProfile convergence_profile(const Representation& rep, const TripleIndices& idx, const BoundaryRay& x_ray,
                                       const std::vector<int>& steps, std::uint64_t seed, const CertificateBank& bank) {
  const int d = rep.dim();
  require_indices(d, idx);
  if (steps.empty()) fail(ErrorKind::InvalidArgument, "no profile steps");
  const auto& automaton = rep.automaton();
  const int max_step = *std::max_element(steps.begin(), steps.end());
  if (*std::min_element(steps.begin(), steps.end()) < 0) fail(ErrorKind::InvalidArgument, "negative profile step");

  // The target xi^r(x) is computed far beyond the probed prefixes.
  constexpr double target_tol = 1e-12;
  constexpr double pair_tol = 1e-10;
  const std::size_t x_depth = std::max({x_ray.depth(), static_cast<std::size_t>(max_step) + 1,
                                        required_depth(rep, {idx.r}, target_tol, bank)});
  const BoundaryRay x = x_ray.depth() >= x_depth ? x_ray : random_ray(automaton, x_depth, x_ray.seed ^ seed, x_ray.prefix);
  if (x.depth() < static_cast<std::size_t>(max_step)) fail(ErrorKind::InvalidArgument, "ray shorter than the profile");
  const Subspace target = boundary_point(rep, x, idx.r, target_tol, bank).subspace;
  const std::size_t pair_depth = required_depth(rep, {idx.p, idx.q}, pair_tol, bank);
  const auto live = automaton.live_states();
  const WedgeImages wedge(rep, {idx.p + idx.q});

  ConvergenceProfile profile;
  profile.indices = idx;
  profile.ray = x;
  std::mt19937_64 rng(seed);
  std::vector<int> sorted = steps;
  std::sort(sorted.begin(), sorted.end());
  for (int i : sorted) {
    GroupWord alpha{{x.prefix.letters.begin(), x.prefix.letters.begin() + i}};
    const StateId s = automaton.run(automaton.initial(), alpha);
    std::vector<Letter> exits;
    for (Letter l = 0; l < automaton.alphabet().size(); ++l) {
      const StateId t = automaton.next(s, l);
      if (t != kNoState && live[static_cast<std::size_t>(t)]) exits.push_back(l);
    }
    if (exits.size() < 2) fail(ErrorKind::InvalidArgument, "cone has fewer than two exits at this step");
    std::shuffle(exits.begin(), exits.end(), rng);
    const auto w_ray = random_ray(automaton, pair_depth, rng(), GroupWord{{exits[0]}});
    const auto y_ray = random_ray(automaton, pair_depth, rng(), GroupWord{{exits[1]}});
    const auto wp = boundary_point(rep, w_ray, idx.p, pair_tol, bank).subspace;
    const auto yq = boundary_point(rep, y_ray, idx.q, pair_tol, bank).subspace;
    Eigen::MatrixXd frames(d, idx.p + idx.q);
    frames << wp.frame(), yq.frame();
    const Subspace pair = Subspace::span(frames);

    WedgeProduct prod(wedge);
    for (Letter l : alpha.letters) prod.push_back(l);
    const Eigen::VectorXd omega = prod.matrix(idx.p + idx.q) * plucker(pair);
    const Subspace moved = subspace_from_multivector(omega, d, idx.p + idx.q);
    profile.steps.push_back({i, sin_distance(moved, target)});
  }

  // Fit log residual against step over the last half, above the floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t k = profile.steps.size() / 2; k < profile.steps.size(); ++k) {
    const auto& st = profile.steps[k];
    if (st.residual <= kResidualFloor) continue;
    const double y = std::log(st.residual);
    sx += st.step;
    sy += y;
    sxx += double(st.step) * st.step;
    sxy += st.step * y;
    n += 1;
  }
  profile.fitted_points = static_cast<std::size_t>(n);
  if (n >= 2 && n * sxx - sx * sx > 0) {
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    profile.fitted_rate = -slope;
    profile.fitted_const = std::exp((sy - slope * sx) / n);
  }
  return profile;
}

double property_h_margin(const Representation& rep, const BoundaryRay& x, const BoundaryRay& y, const BoundaryRay& z,
                         int p, int q_dim, int s, const CertificateBank& bank, double tol, double intersection_tol) {
  const int d = rep.dim();
  require_distinct(x, y, z);
  if (p < 1 || q_dim < 1 || q_dim > d - 1 || s < 1 || s > d - 1) {
    fail(ErrorKind::IndexOutOfRange, "property (H) indices out of range");
  }
  const auto xp = boundary_point(rep, x, p, tol, bank).subspace;
  const auto zp = boundary_point(rep, z, p, tol, bank).subspace;
  const auto yflag = boundary_flag(rep, y, unique_levels({q_dim, d - s}), tol, bank);
  const Subspace middle = subspace_intersection(zp, level(yflag, q_dim), intersection_tol);
  const int expected = std::max(0, p + q_dim - d);
  if (middle.rank() != expected) {
    fail(ErrorKind::EmptyIntersection, "intersection has rank " + std::to_string(middle.rank()) + ", expected " +
                                           std::to_string(expected));
  }
  return direct_sum_margin({xp, middle, level(yflag, d - s)});
}

}  // namespace anosov
