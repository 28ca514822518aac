#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "anosov/error.hpp"
#include "anosov/estimators.hpp"
#include "anosov/sl2.hpp"

using namespace anosov;

namespace {

const Representation& schottky() {
  static const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  return rho;
}

const Representation& iota3() {
  static const Representation rep = irreducible(3, schottky());
  return rep;
}

bool throws_kind(ErrorKind kind, const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

Eigen::MatrixXd direct_product(const Representation& rep, const GroupWord& w) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim(), rep.dim());
  for (Letter l : w.letters) m = m * rep.image(l);
  return m;
}

double sin_dist(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double c = u.normalized().dot(v.normalized());
  return std::sqrt(std::max(0.0, 1 - c * c));
}

// Quadratic greedy net, the reference for the grid-accelerated one.
std::size_t brute_net(const std::vector<Eigen::VectorXd>& points, double eps) {
  std::vector<Eigen::VectorXd> centers;
  for (const auto& p : points) {
    bool covered = false;
    for (const auto& c : centers)
      if (sin_dist(p, c) < eps) {
        covered = true;
        break;
      }
    if (!covered) centers.push_back(p);
  }
  return centers.size();
}

std::vector<Eigen::VectorXd> circle(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, std::numbers::pi);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = angle(rng);
    out.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
  }
  return out;
}

}  // namespace

TEST_CASE("partial poincare sums") {
  const auto& rep = iota3();
  CHECK(poincare_partial(rep, 0, 3) == doctest::Approx(53).epsilon(1e-12));
  double prev = poincare_partial(rep, 0, 6);
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    const double cur = poincare_partial(rep, s, 6);
    CHECK(cur < prev);
    prev = cur;
  }
  // Plain summation in a different order.
  const auto words = ball(rep.automaton(), 8);
  double oracle = 0;
  for (auto it = words.rbegin(); it != words.rend(); ++it) oracle += gap_ratio(direct_product(rep, *it), 1);
  CHECK(poincare_partial(rep, 1, 8) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { poincare_partial(rep, -1, 3); }));
}

TEST_CASE("gap spectrum") {
  const auto spec = log_gap_spectrum(iota3(), 4);
  REQUIRE(spec.size() == 4);
  for (std::size_t k = 0; k < spec.size(); ++k) CHECK(spec[k].size() == 4 * static_cast<std::size_t>(std::pow(3, k)));
  const auto sph = sphere(iota3().automaton(), 2);
  CHECK(spec[1][0] == doctest::Approx(-std::log(gap_ratio(direct_product(iota3(), sph[0]), 1))).epsilon(1e-10));
}

TEST_CASE("critical exponent of the schottky group lies in the growth bracket") {
  // sigma_1 grows at most like 3^|g| (the letters have norm 3), so
  // -log gap <= 2 |g| log 3 and h >= 1/2.  The least growth rate m of -log gap
  // over a sphere gives h <= log 3 / m.
  double m = 1e300;
  for (const auto& w : sphere(schottky().automaton(), 10))
    m = std::min(m, -std::log(gap_ratio(direct_product(schottky(), w), 1)) / 10);
  const CriticalExponent e = critical_exponent(schottky(), 10);
  CHECK(e.h() >= 0.5);
  CHECK(e.h() <= std::log(3.0) / m);
  CHECK(e.counting.method == ExponentMethod::CountingRegression);
  CHECK(e.series.method == ExponentMethod::SeriesTransition);
  CHECK(e.bins.size() == static_cast<std::size_t>(kCountBins) + 1);
  for (std::size_t i = 1; i < e.bins.size(); ++i) CHECK(e.bins[i].count >= e.bins[i - 1].count);
  CHECK(std::abs(e.series.h - e.h()) < 0.2);
}

TEST_CASE("exponent is invariant under irreducible representations") {
  // The top two weights of iota_d differ by 2, so sigma_2 / sigma_1 is the
  // same function of the group element for every d.
  const double h2 = critical_exponent(schottky(), 9).h();
  for (int d = 3; d <= 5; ++d) CHECK(std::abs(critical_exponent(irreducible(d, schottky()), 9).h() - h2) <= 0.05);
}

TEST_CASE("cyclic subgroup has a vanishing exponent") {
  const Representation cyclic = restrict_generators(schottky(), 1);
  const double h10 = critical_exponent(cyclic, 10).h();
  const double h40 = critical_exponent(cyclic, 40).h();
  CHECK(h10 < 0.1);
  CHECK(h40 < h10);
  CHECK(throws_kind(ErrorKind::WindowTooShort, [] { critical_exponent(trivial_representation(2, 3), 6); }));
}

TEST_CASE("greedy net counts") {
  const auto pts = circle(2000, 3);
  for (double eps : {0.3, 0.1, 0.03, 0.01}) CHECK(net_count(pts, eps) == brute_net(pts, eps));
  std::vector<Eigen::VectorXd> in3;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 1500; ++i) in3.push_back(Eigen::Vector3d(n01(rng), n01(rng), n01(rng)));
  for (double eps : {0.5, 0.2, 0.05}) CHECK(net_count(in3, eps) == brute_net(in3, eps));
}

TEST_CASE("box dimension of reference sets") {
  const auto line = circle(10000, 5);
  const auto est = box_dimension(line, 1e-12);
  CHECK(est.slope == doctest::Approx(1.0).epsilon(0.05));
  for (std::size_t i = 1; i < est.counts.size(); ++i) CHECK(est.counts[i] >= est.counts[i - 1]);

  std::vector<Eigen::VectorXd> curve;
  for (const auto& p : line) {
    Eigen::MatrixXd g(2, 2);
    g << p(0), -p(1), p(1), p(0);
    curve.push_back(irreducible_image(g, 3).col(0));
  }
  CHECK(box_dimension(curve, 1e-12).slope == doctest::Approx(1.0).epsilon(0.05));

  // Middle-thirds Cantor set on a short arc: log 2 / log 3.
  std::vector<Eigen::VectorXd> cantor;
  for (int code = 0; code < (1 << 13); ++code) {
    double x = 0, w = 1;
    for (int bit = 12; bit >= 0; --bit) {
      w /= 3;
      if (code & (1 << bit)) x += 2 * w;
    }
    cantor.push_back(Eigen::Vector2d(std::cos(0.5 * x), std::sin(0.5 * x)));
  }
  CHECK(std::abs(box_dimension(cantor, 1e-12).slope - std::log(2.0) / std::log(3.0)) < 0.05);

  const std::vector<Eigen::VectorXd> same(200, Eigen::Vector3d(1, 2, 3));
  CHECK(box_dimension(same, 1e-12).slope == 0.0);
  CHECK(throws_kind(ErrorKind::ScaleRangeEmpty, [&] { box_dimension(line, 0.1); }));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { box_dimension(circle(50, 1), 1e-12); }));
}

TEST_CASE("patterson sullivan atoms") {
  const auto& rep = iota3();
  const CriticalExponent e = critical_exponent(rep, 8);
  const PSMeasure mu = ps_measure(rep, e.h(), 8);
  double total = 0;
  for (const auto& a : mu.atoms) {
    CHECK(a.weight > 0);
    total += a.weight;
  }
  CHECK(std::abs(total - 1) < 1e-12);
  CHECK(mu.atoms.size() + mu.skipped_no_gap == ball(rep.automaton(), 8).size() - 1);

  ScanOptions three;
  three.threads = 3;
  const PSMeasure again = ps_measure(rep, e.h(), 8, three);
  REQUIRE(again.atoms.size() == mu.atoms.size());
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) CHECK(again.atoms[i].weight == mu.atoms[i].weight);

  // Atoms lie within the certified distance of the limit point of any ray
  // through them.
  const CertificateBank bank(rep, 8);
  const GapConstants gc = gap_constants(bank.get(1));
  for (std::size_t i = 0; i < mu.atoms.size(); i += 97) {
    const auto& a = mu.atoms[i];
    const BoundaryRay ray = random_ray(rep.automaton(), 60, i, a.word);
    const BoundaryPoint x = boundary_point(rep, ray, 1, 1e-6, gc);
    const double bound = tail_bound(gc, rep.letter_condition(), a.word.size());
    CHECK(sin_dist(a.point, x.subspace.frame().col(0)) <= bound + 1e-6);
  }

  // Large s concentrates the mass on the shortest words.
  PSMeasure heavy = ps_measure(rep, e.h() + 2, 8);
  std::sort(heavy.atoms.begin(), heavy.atoms.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
  double top4 = 0;
  for (int i = 0; i < 4; ++i) top4 += heavy.atoms[static_cast<std::size_t>(i)].weight;
  CHECK(top4 > 0.5);
}

TEST_CASE("shadow ratios") {
  const auto& rep = iota3();
  const CertificateBank bank(rep, 10);
  const double h = critical_exponent(rep, 10).h();
  const PSMeasure mu = ps_measure(rep, h, 10);
  const LeastAngle delta = least_angle_estimate(rep, 6, 200, 3);
  REQUIRE_FALSE(delta.no_gap);
  const auto sample = limit_set_sample(rep, 1, 2000, 30, 4, 1e-8, bank);
  const GeneratorAlphabet& f2 = rep.automaton().alphabet();

  const ShadowCheck a = shadow_ratio(rep, parse_word(f2, "a"), mu, sample, delta.delta);
  CHECK(a.holds());
  const ShadowCheck aaa = shadow_ratio(rep, parse_word(f2, "aaa"), mu, sample, delta.delta);
  CHECK(aaa.holds());
  CHECK(aaa.ratio < a.ratio);
  // The bracket from the singular values of rho(eta).
  const auto c = cartan(direct_product(rep, parse_word(f2, "a")));
  CHECK(a.lower == doctest::Approx(std::pow(c.sigma(2) / c.sigma(0), h)));
  CHECK(a.upper == doctest::Approx(4 / (delta.delta * delta.delta) * std::pow(c.sigma(1) / c.sigma(0), h)));

  const PSMeasure tiny = ps_measure(rep, h, 1);
  CHECK(throws_kind(ErrorKind::EmptyShadow,
                    [&] { shadow_ratio(rep, parse_word(f2, "abab"), tiny, sample, delta.delta); }));
  CHECK(throws_kind(ErrorKind::InvalidArgument, [&] { shadow_ratio(rep, GroupWord{}, mu, sample, delta.delta); }));
}

TEST_CASE("least angle") {
  const LeastAngle a = least_angle_estimate(iota3(), 6, 100, 21);
  const LeastAngle b = least_angle_estimate(iota3(), 6, 100, 21);
  CHECK_FALSE(a.no_gap);
  CHECK(a.delta > 0);
  CHECK(a.delta <= 1);
  CHECK(a.delta == b.delta);
  const LeastAngle t = least_angle_estimate(trivial_representation(2, 3), 6, 10, 21);
  CHECK(t.no_gap);
  CHECK(t.delta == 0);
}
