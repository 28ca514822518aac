#include "anosov/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "anosov/error.hpp"

namespace anosov {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running log-sum-exp.
struct LogSum {
  double max = kNegInf;
  double sum = 0;

  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max) {
      sum = sum * std::exp(max - log_term) + 1;
      max = log_term;
    } else {
      sum += std::exp(log_term - max);
    }
  }
  void merge(const LogSum& o) {
    if (o.max == kNegInf) return;
    if (o.max > max) {
      sum = sum * std::exp(max - o.max) + o.sum;
      max = o.max;
    } else {
      sum += o.sum * std::exp(o.max - max);
    }
  }
  double value() const { return max == kNegInf ? kNegInf : max + std::log(sum); }
};

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double stderr_ = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2 && sxx > 0) {
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
    f.stderr_ = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

// Squared sine of the angle between two unit vectors.
double sin2(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double c = u.dot(v);
  return std::max(0.0, 1 - c * c);
}

// Spatial hash of unit vectors for "is some stored line within sin-distance r"
// queries.  sin angle <= r implies min(|u - v|, |u + v|) <= sqrt(2) r, so with
// cells of that size a hit lies in a neighbouring cell of v or -v.  Only the
// first few coordinates are hashed to keep the neighbourhood small.
class LineGrid {
 public:
  static constexpr int kHashed = 4;
  using Key = std::array<std::int64_t, kHashed>;

  LineGrid(int dim, double radius) : dim_(dim), hashed_(std::min(dim, kHashed)), r2_(radius * radius) {
    cell_ = std::max(std::sqrt(2.0) * radius, 1e-300);
  }

  void insert(const Eigen::VectorXd& v) {
    points_.push_back(v);
    cells_[key(v)].push_back(points_.size() - 1);
  }

  bool near(const Eigen::VectorXd& v) const {
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd w = sign * v;
      Key base = key(w);
      Key probe = base;
      if (scan(w, base, probe, 0)) return true;
    }
    return false;
  }

  std::size_t size() const { return points_.size(); }

 private:
  Key key(const Eigen::VectorXd& v) const {
    Key k{};
    for (int i = 0; i < hashed_; ++i) k[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(v(i) / cell_));
    return k;
  }

  bool scan(const Eigen::VectorXd& v, const Key& base, Key& probe, int axis) const {
    if (axis == hashed_) {
      auto it = cells_.find(probe);
      if (it == cells_.end()) return false;
      for (std::size_t idx : it->second)
        if (sin2(points_[idx], v) <= r2_) return true;
      return false;
    }
    const auto a = static_cast<std::size_t>(axis);
    for (std::int64_t off = -1; off <= 1; ++off) {
      probe[a] = base[a] + off;
      if (scan(v, base, probe, axis + 1)) return true;
    }
    probe[a] = base[a];
    return false;
  }

  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 1469598103934665603ull;
      for (auto c : k) h = (h ^ static_cast<std::size_t>(c)) * 1099511628211ull;
      return h;
    }
  };

  int dim_;
  int hashed_;
  double r2_;
  double cell_;
  std::vector<Eigen::VectorXd> points_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

}  // namespace

// ---------------------------------------------------------------------------

double poincare_partial(const Representation& rep, double s, int radius, const ScanOptions& options) {
  if (!(s >= 0)) fail(ErrorKind::InvalidArgument, "exponent must be non-negative");
  const LogSum total = fold_ball(
      rep, radius, gap_degrees(rep.dim(), {1}), options, LogSum{},
      [s](LogSum& acc, const BallNode& node) {
        acc.add(node.length() == 0 || s == 0 ? 0.0 : s * node.product->log_gap(1));
      },
      [](LogSum& out, const LogSum& part) { out.merge(part); });
  return std::exp(total.value());
}

std::vector<std::vector<double>> log_gap_spectrum(const Representation& rep, int radius, const ScanOptions& options) {
  using Acc = std::vector<std::vector<double>>;
  return fold_ball(
      rep, radius, gap_degrees(rep.dim(), {1}), options, Acc(static_cast<std::size_t>(std::max(radius, 0))),
      [](Acc& acc, const BallNode& node) {
        if (node.length() == 0) return;
        acc[static_cast<std::size_t>(node.length() - 1)].push_back(-node.product->log_gap(1));
      },
      [](Acc& out, const Acc& part) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k].insert(out[k].end(), part[k].begin(), part[k].end());
      });
}

std::string to_string(ExponentMethod m) {
  return m == ExponentMethod::CountingRegression ? "counting-regression" : "series-transition";
}

namespace {

// Slope in k of log sum_{|gamma| = k} gap^s over k in [R/2, R].
double sphere_growth(const std::vector<std::vector<double>>& spectrum, double s) {
  const int radius = static_cast<int>(spectrum.size());
  std::vector<double> ks, ys;
  for (int k = std::max(1, radius / 2); k <= radius; ++k) {
    LogSum acc;
    for (double x : spectrum[static_cast<std::size_t>(k - 1)]) acc.add(-s * x);
    if (acc.max == kNegInf) continue;
    ks.push_back(k);
    ys.push_back(acc.value());
  }
  if (ks.size() < 2) return 0;
  return fit_line(ks, ys).slope;
}

}  // namespace

CriticalExponent critical_exponent(const Representation& rep, int radius, const ScanOptions& options) {
  if (radius < 2) fail(ErrorKind::InvalidArgument, "exponent radius must be at least 2");
  const auto spectrum = log_gap_spectrum(rep, radius, options);

  CriticalExponent out;
  out.radius = radius;
  std::vector<double> all;
  for (const auto& sph : spectrum) all.insert(all.end(), sph.begin(), sph.end());
  std::sort(all.begin(), all.end());
  const auto& outer = spectrum.back();
  const double t_max = outer.empty() ? 0.0 : *std::min_element(outer.begin(), outer.end());

  std::vector<double> ts, ys;
  for (int i = 0; i <= kCountBins; ++i) {
    const double t = t_max * i / kCountBins;
    const auto n = static_cast<std::uint64_t>(std::upper_bound(all.begin(), all.end(), t) - all.begin());
    out.bins.push_back({t, n});
    if (2 * i >= kCountBins && n > 0 && t > 0) {
      ts.push_back(t);
      ys.push_back(std::log(static_cast<double>(n)));
    }
  }
  if (ts.size() < 4) {
    fail(ErrorKind::WindowTooShort, "only " + std::to_string(ts.size()) + " usable t-bins (t_max = " +
                                        std::to_string(t_max) + ")");
  }
  const LineFit fit = fit_line(ts, ys);
  out.counting.method = ExponentMethod::CountingRegression;
  out.counting.h = std::max(0.0, fit.slope);
  out.counting.window_lo = t_max / 2;
  out.counting.window_hi = t_max;
  out.counting.confidence = 1.96 * fit.stderr_;

  out.series.method = ExponentMethod::SeriesTransition;
  double lo = 0, hi = 1;
  if (sphere_growth(spectrum, 0) <= 0) {
    hi = 0;
  } else {
    while (sphere_growth(spectrum, hi) > 0 && hi < 1024) {
      lo = hi;
      hi *= 2;
    }
    if (sphere_growth(spectrum, hi) > 0) {
      lo = hi;
      hi = std::numeric_limits<double>::infinity();
    } else {
      for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sphere_growth(spectrum, mid) > 0 ? lo : hi) = mid;
      }
    }
  }
  out.series.h = 0.5 * (lo + hi);
  out.series.window_lo = lo;
  out.series.window_hi = hi;
  out.series.confidence = 0.5 * (hi - lo);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t net_count(const std::vector<Eigen::VectorXd>& points, double eps) {
  if (points.empty()) return 0;
  LineGrid grid(static_cast<int>(points.front().size()), eps);
  for (const auto& p : points) {
    const Eigen::VectorXd u = p.normalized();
    if (!grid.near(u)) grid.insert(u);
  }
  return grid.size();
}

DimensionEstimate box_dimension(const std::vector<Eigen::VectorXd>& points, double max_error, int scale_count) {
  if (points.size() < 100) fail(ErrorKind::InvalidArgument, "box dimension needs at least 100 points");
  DimensionEstimate est;
  est.max_error = max_error;

  std::vector<Eigen::VectorXd> unit;
  unit.reserve(points.size());
  for (const auto& p : points) unit.push_back(p.normalized());
  double diam2 = 0;
  for (std::size_t i = 0; i < unit.size(); ++i)
    for (std::size_t j = i + 1; j < unit.size(); ++j) diam2 = std::max(diam2, sin2(unit[i], unit[j]));
  const double diam = std::sqrt(diam2);
  if (diam == 0) return est;

  for (int j = 0; j < scale_count; ++j) {
    const double eps = diam * std::ldexp(1.0, -j);
    if (eps < 4 * max_error) break;
    est.scales.push_back(eps);
    est.counts.push_back(net_count(unit, eps));
  }

  const double full = kNetSaturation * static_cast<double>(unit.size());
  std::vector<double> xs, ys;
  bool first = true;
  for (std::size_t j = 0; j < est.scales.size(); ++j) {
    if (est.scales[j] > diam / 4) continue;
    if (static_cast<double>(est.counts[j]) >= full) break;
    if (first) est.fit_first = j;
    first = false;
    est.fit_last = j;
    xs.push_back(-std::log(est.scales[j]));
    ys.push_back(std::log(static_cast<double>(est.counts[j])));
  }
  if (xs.size() < 2) {
    fail(ErrorKind::ScaleRangeEmpty, "no usable scales between diameter " + std::to_string(diam) +
                                         " and 4 x max error " + std::to_string(max_error));
  }
  const LineFit fit = fit_line(xs, ys);
  est.slope = std::max(0.0, fit.slope);
  est.stderr_ = fit.stderr_;
  return est;
}

DimensionEstimate box_dimension(const std::vector<BoundaryPoint>& points, int scale_count) {
  std::vector<Eigen::VectorXd> vs;
  double err = 0;
  for (const auto& bp : points) {
    if (bp.subspace.rank() != 1) fail(ErrorKind::InvalidArgument, "box dimension needs projective points");
    vs.push_back(bp.subspace.frame().col(0));
    err = std::max(err, bp.error_bound);
  }
  return box_dimension(vs, err, scale_count);
}

// ---------------------------------------------------------------------------

PSMeasure ps_measure(const Representation& rep, double s, int radius, const ScanOptions& options) {
  if (!(s >= 0)) fail(ErrorKind::InvalidArgument, "exponent must be non-negative");
  struct Acc {
    std::vector<PSAtom> atoms;  // weight holds the log weight until normalization
    std::size_t skipped = 0;
  };
  const double no_gap = std::log1p(-kGapTolerance);
  Acc all = fold_ball(
      rep, radius, gap_degrees(rep.dim(), {1}), options, Acc{},
      [&](Acc& acc, const BallNode& node) {
        if (node.length() == 0) return;
        const double lg = node.product->log_gap(1);
        if (lg >= no_gap) {
          ++acc.skipped;
          return;
        }
        acc.atoms.push_back({node.group_word(), node.product->attractor(1).frame().col(0), s * lg});
      },
      [](Acc& out, Acc& part) {
        out.atoms.insert(out.atoms.end(), std::make_move_iterator(part.atoms.begin()),
                         std::make_move_iterator(part.atoms.end()));
        out.skipped += part.skipped;
      });

  PSMeasure m;
  m.s = s;
  m.radius = radius;
  m.skipped_no_gap = all.skipped;
  LogSum total;
  for (const auto& a : all.atoms) total.add(a.weight);
  const double log_total = total.value();
  for (auto& a : all.atoms) a.weight = std::exp(a.weight - log_total);
  m.atoms = std::move(all.atoms);
  return m;
}

ShadowCheck shadow_ratio(const Representation& rep, const GroupWord& eta, const PSMeasure& measure,
                         const std::vector<BoundaryPoint>& limit_sample, double delta_hat) {
  if (eta.empty()) fail(ErrorKind::InvalidArgument, "eta must be a non-trivial element");
  if (!(delta_hat > 0)) fail(ErrorKind::InvalidArgument, "least angle must be positive");
  const auto& automaton = rep.automaton();
  const StateId state = cone_type(automaton, eta);
  if (state == kNoState) fail(ErrorKind::InvalidArgument, "eta is not accepted by the automaton");

  LineGrid cone(rep.dim(), delta_hat / 2);
  for (const auto& bp : limit_sample)
    if (in_cone(automaton, state, bp.ray.prefix)) cone.insert(bp.subspace.frame().col(0));
  if (cone.size() == 0) fail(ErrorKind::EmptyShadow, "no sampled limit point in the cone of " + format_word(eta));

  const Eigen::MatrixXd pull = evaluate(rep, inverse(eta)).matrix;
  ShadowCheck out;
  out.eta = eta;
  for (const auto& a : measure.atoms) {
    if (cone.near(a.point)) out.denominator += a.weight;
    if (cone.near((pull * a.point).normalized())) out.numerator += a.weight;
  }
  if (out.numerator == 0 || out.denominator == 0) {
    fail(ErrorKind::EmptyShadow, "no atoms in the shadow of " + format_word(eta) + " at radius " +
                                     std::to_string(measure.radius));
  }
  out.ratio = out.numerator / out.denominator;

  const auto c = cartan(evaluate(rep, eta).matrix);
  const Eigen::Index d = c.sigma.size();
  const double h = measure.s;
  out.lower = std::pow(c.sigma(d - 1) / c.sigma(0), h);
  out.upper = 4 / (delta_hat * delta_hat) * std::pow(c.sigma(1) / c.sigma(0), h);
  return out;
}

LeastAngle least_angle_estimate(const Representation& rep, int L, std::size_t n_geodesics, std::uint64_t seed) {
  if (L < 1) fail(ErrorKind::InvalidArgument, "L must be positive");
  const auto& automaton = rep.automaton();
  const int d = rep.dim();
  const auto len = static_cast<std::size_t>(2 * L);
  const double no_gap = std::log1p(-kGapTolerance);
  const WedgeImages fwd_images(rep, gap_degrees(d, {1}));
  const WedgeImages bwd_images(rep, gap_degrees(d, {d - 1}));

  std::mt19937_64 master(seed);
  LeastAngle out;
  out.delta = 1;
  for (std::size_t g = 0; g < n_geodesics; ++g) {
    const BoundaryRay a = random_ray(automaton, len, master());
    // The backward half must make inverse(b) a geodesic continuation into a.
    std::optional<BoundaryRay> b;
    for (int attempt = 0; attempt < 64 && !b; ++attempt) {
      BoundaryRay cand = random_ray(automaton, len, master());
      GroupWord through = inverse(cand.prefix);
      through.letters.insert(through.letters.end(), a.prefix.letters.begin(), a.prefix.letters.end());
      if (automaton.accepts(through)) b = std::move(cand);
    }
    if (!b) continue;

    std::vector<Subspace> attractors, repellers;
    WedgeProduct fwd(fwd_images), bwd(bwd_images);
    for (std::size_t i = 0; i < len; ++i) {
      fwd.push_back(a.prefix.letters[i]);
      bwd.push_back(b->prefix.letters[i]);
      if (static_cast<int>(i + 1) < L) continue;
      if (fwd.log_gap(1) >= no_gap || bwd.log_gap(d - 1) >= no_gap) return {0, true};
      attractors.push_back(fwd.attractor(1));
      repellers.push_back(bwd.attractor(d - 1));
    }
    for (const auto& u : attractors)
      for (const auto& v : repellers) out.delta = std::min(out.delta, std::sin(min_angle(u, v)));
  }
  return out;
}

}  // namespace anosov
