#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "anosov/error.hpp"
#include "anosov/exterior.hpp"
#include "anosov/hyperconvexity.hpp"
#include "anosov/sl2.hpp"
#include "support.hpp"

using namespace anosov;
using testing_support::diag;
using testing_support::rotation;

namespace {

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

bool throws_kind(ErrorKind kind, const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

// Sorted non-increasing log singular values divided by log t.
std::vector<double> weight_profile(const Eigen::MatrixXd& m, double t) {
  const auto c = cartan(m);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < c.dim(); ++i) out.push_back(c.log_sigma(i) / std::log(t));
  return out;
}

// Sums over k-subsets (distinct = true) or k-multisets of the weights.
void combine(const WeightList& base, int k, bool distinct, std::size_t start, int acc, WeightList& out) {
  if (k == 0) {
    out.push_back(acc);
    return;
  }
  for (std::size_t i = start; i < base.size(); ++i) combine(base, k - 1, distinct, distinct ? i + 1 : i, acc + base[i], out);
}

WeightList sorted_desc(WeightList w) {
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

Eigen::MatrixXd random_sl2(std::mt19937_64& rng) {
  const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  std::uniform_int_distribution<int> letter(0, 3), len(1, 5);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  for (int i = len(rng); i > 0; --i) g = g * rho.image(letter(rng));
  return g;
}

}  // namespace

TEST_CASE("schottky generators") {
  const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  CHECK(rho.dim() == 2);
  CHECK(rho.rank() == 2);
  CHECK(relative_error(rho.image(0), diag({3, 1.0 / 3})) < 1e-15);
  const Eigen::MatrixXd b = rotation(std::numbers::pi / 4) * diag({3, 1.0 / 3}) * rotation(-std::numbers::pi / 4);
  CHECK(relative_error(rho.image(2), b) < 1e-14);
  CHECK(relative_error(rho.image(1) * rho.image(0), Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
  // Attracting lines e1 and (1, 1) / sqrt 2.
  const Subspace ua = cartan_attractor(rho.image(0), 1);
  const Subspace ub = cartan_attractor(rho.image(2), 1);
  CHECK(sin_distance(ua, ub) == doctest::Approx(std::sqrt(0.5)));
  CHECK(throws_kind(ErrorKind::DegenerateAxes, [] { schottky_fuchsian(3, std::numbers::pi); }));
  CHECK(throws_kind(ErrorKind::DegenerateAxes, [] { schottky_fuchsian(3, 0); }));
}

TEST_CASE("irreducible images") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd g = random_sl2(rng);
  CHECK(relative_error(irreducible_image(g, 2), g) < 1e-15);
  CHECK(relative_error(irreducible_image(diag({2, 0.5}), 3), diag({4, 1, 0.25})) < 1e-15);
  const Eigen::MatrixXd r = irreducible_image(rotation(0.37), 5);
  CHECK((r.transpose() * r - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("functoriality on seeded pairs") {
  // A degree-k construction has entries of size |g|^k, and so does the
  // rounding in its entries; errors are measured on that scale.
  const auto err = [](const Eigen::MatrixXd& whole, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                      double scale) { return (whole - a * b).norm() / scale; };
  std::mt19937_64 rng(17);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd g = random_sl2(rng);
    const Eigen::MatrixXd h = random_sl2(rng);
    for (int d = 2; d <= 6; ++d) {
      const Eigen::MatrixXd ig = irreducible_image(g, d), ih = irreducible_image(h, d);
      const double ng = ig.norm(), nh = ih.norm();
      worst = std::max(worst, err(irreducible_image(g * h, d), ig, ih, ng * nh));
      const Eigen::MatrixXd igh = ig * ih;
      for (int p = 1; p <= d; ++p)
        worst = std::max(worst, err(exterior_power(igh, p), exterior_power(ig, p), exterior_power(ih, p),
                                    std::pow(ng * nh, p)));
      for (int k = 1; k <= 3; ++k)
        worst = std::max(worst, err(symmetric_power_matrix(igh, k), symmetric_power_matrix(ig, k),
                                    symmetric_power_matrix(ih, k), std::pow(ng * nh, k)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("constructions on representations") {
  const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  const Representation i4 = irreducible(4, rho);
  CHECK(i4.dim() == 4);
  for (Letter l = 0; l < 4; ++l) CHECK(relative_error(i4.image(l), irreducible_image(rho.image(l), 4)) < 1e-12);

  const Representation w1 = exterior_power(i4, 1);
  const Representation w2 = exterior_power(i4, 2);
  const Representation w4 = exterior_power(i4, 4);
  CHECK(w2.dim() == 6);
  CHECK(w4.dim() == 1);
  for (Letter l = 0; l < 4; ++l) {
    CHECK(relative_error(w1.image(l), i4.image(l)) < 1e-15);
    CHECK(w4.image(l)(0, 0) == doctest::Approx(i4.image(l).determinant()));
    const auto c = cartan(i4.image(l));
    CHECK(cartan(w2.image(l)).sigma(0) == doctest::Approx(c.sigma(0) * c.sigma(1)).epsilon(1e-12));
  }

  const Representation s1 = symmetric_power(i4, 1);
  for (Letter l = 0; l < 4; ++l) CHECK(relative_error(s1.image(l), i4.image(l)) < 1e-15);
  CHECK(symmetric_power(i4, 2).dim() == 10);

  const Representation sum = direct_sum(irreducible(3, rho), trivial_representation(2, 1));
  CHECK(sum.dim() == 4);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_ray(rho.automaton(), 6, rng()).prefix;
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4), g3 = Eigen::MatrixXd::Identity(3, 3);
    for (Letter l : w.letters) {
      g = g * sum.image(l);
      g3 = g3 * irreducible(3, rho).image(l);
    }
    std::vector<double> expect{1.0};
    const auto c3 = cartan(g3);
    for (int i = 0; i < 3; ++i) expect.push_back(c3.sigma(i));
    std::sort(expect.begin(), expect.end(), std::greater<>());
    const auto c = cartan(g);
    for (int i = 0; i < 4; ++i) CHECK(c.sigma(i) == doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-9));
  }

  const Representation restricted = restrict_generators(i4, 1);
  CHECK(restricted.rank() == 1);
  CHECK(relative_error(restricted.image(0), i4.image(0)) < 1e-15);
}

TEST_CASE("symmetric power of a diagonal matrix") {
  const Eigen::MatrixXd s = symmetric_power_matrix(diag({2, 3, 5}), 2);
  std::vector<double> got;
  for (Eigen::Index i = 0; i < s.rows(); ++i) got.push_back(s(i, i));
  std::sort(got.begin(), got.end());
  const std::vector<double> expect{4, 6, 9, 10, 15, 25};
  CHECK(got == expect);
  CHECK((s - Eigen::MatrixXd(s.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("weights") {
  CHECK(sl2_weights({4}) == WeightList{3, 1, -1, -3});
  CHECK(sl2_weights({5, 1}) == WeightList{4, 2, 0, 0, -2, -4});
  // Union and sort by hand.
  CHECK(sl2_weights({5, 2}) == sorted_desc({4, 2, 0, -2, -4, 1, -1}));
  CHECK(decompose_weights({4, 2, 0, 0, -2, -4}) == Partition{5, 1});
  CHECK(decompose_weights({0}) == Partition{1});
  CHECK(decompose_weights({1, 0, -1}) == Partition{2, 1});
  CHECK(throws_kind(ErrorKind::NotAnSl2Module, [] { decompose_weights({2, 0}); }));
  // The top three weights of the second exterior power of iota_4.
  const WeightList w = sl2_weights({5, 1});
  const int chi = 2 * (4 - 2);
  CHECK(w[0] == chi);
  CHECK(w[1] == chi - 2);
  CHECK(w[2] == chi - 4);
}

TEST_CASE("weight consistency of the constructions") {
  for (double t : {2.0, 3.0, 5.0}) {
    const Eigen::MatrixXd a = diag({t, 1 / t});
    for (int d = 2; d <= 6; ++d) {
      const WeightList base = sl2_weights({d});
      const auto check = [&](const Eigen::MatrixXd& m, const WeightList& expected) {
        const auto got = weight_profile(m, t);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));
      };
      const Eigen::MatrixXd id = irreducible_image(a, d);
      check(id, base);
      for (int p = 1; p < d; ++p) {
        WeightList w;
        combine(base, p, true, 0, 0, w);
        const WeightList expected = sorted_desc(w);
        check(exterior_power(id, p), expected);
        // The partition recovered from the weights sums to the dimension.
        const Partition part = decompose_weights(expected);
        int total = 0;
        for (int x : part) total += x;
        CHECK(total == static_cast<int>(expected.size()));
        CHECK(sl2_weights(part) == expected);
      }
      for (int k = 1; k <= 3; ++k) {
        WeightList w;
        combine(base, k, false, 0, 0, w);
        check(symmetric_power_matrix(id, k), sorted_desc(w));
      }
    }
  }
  CHECK(decompose_weights(sorted_desc([] {
          WeightList w;
          combine(sl2_weights({4}), 2, true, 0, 0, w);
          return w;
        }())) == Partition{5, 1});
}

TEST_CASE("decompose inverts sl2_weights on partitions up to 12") {
  std::size_t count = 0;
  std::function<void(int, int, Partition&)> walk = [&](int remaining, int max_part, Partition& part) {
    if (!part.empty()) {
      CHECK(decompose_weights(sl2_weights(part)) == part);
      ++count;
    }
    for (int x = std::min(remaining, max_part); x >= 1; --x) {
      part.push_back(x);
      walk(remaining - x, x, part);
      part.pop_back();
    }
  };
  Partition p;
  walk(12, 12, p);
  // Partitions of 1..12: 1 + 2 + 3 + 5 + 7 + 11 + 15 + 22 + 30 + 42 + 56 + 77.
  CHECK(count == 271);
}

TEST_CASE("coherence") {
  CHECK(coherence_check({5, 2}, 2));
  CHECK_FALSE(coherence_check({3, 1}, 2));
  CHECK(coherence_check({5, 1}, 2));
  for (int d = 2; d <= 8; ++d) {
    for (int k = 2; k < d; ++k) CHECK(coherence_check({d}, k));
    for (int k = d; k <= d + 2; ++k) CHECK_FALSE(coherence_check({d}, k));
  }
  for (int d1 = 1; d1 <= 9; ++d1)
    for (int d2 = 1; d2 <= d1; ++d2)
      for (int k = 2; k <= 4; ++k) CHECK(coherence_check({d1, d2}, k) == (d1 > d2 + 2 * (k - 1)));
}

TEST_CASE("gap growth hypothesis for symmetric powers") {
  // In dimension 3, sigma_1 sigma_2 / sigma_2^2 = sigma_1 / sigma_2, which is
  // sigma_1(rho(gamma))^2 for the irreducible image.
  const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  const Representation i3 = irreducible(3, rho);
  std::vector<double> worst(9, 1e300);
  double mismatch = 0;
  for_each_in_ball(i3, 8, gap_degrees(3, {1}), {}, [&](std::size_t, const BallNode& node) {
    if (node.length() == 0) return;
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
    for (Letter l : node.word) g = g * rho.image(l);
    const double oracle = 2 * std::log(cartan(g).sigma(0));
    const double got = -node.product->log_gap(1);
    mismatch = std::max(mismatch, std::abs(got - oracle));
    auto& slot = worst[static_cast<std::size_t>(node.length())];
    slot = std::min(slot, got);
  });
  CHECK(mismatch < 1e-9);
  // The worst ratio grows linearly in the word length.
  for (int k = 2; k <= 8; ++k) CHECK(worst[static_cast<std::size_t>(k)] > worst[static_cast<std::size_t>(k - 1)]);
  CHECK((worst[8] - worst[4]) / 4 > 0.5);
}

TEST_CASE("perturbations") {
  const Representation i3 = irreducible(3, schottky_fuchsian(3, std::numbers::pi / 4));
  const Representation same = perturb(i3, 0, 11);
  for (Letter l = 0; l < 4; ++l) CHECK(relative_error(same.image(l), i3.image(l)) < 1e-15);
  const Representation p1 = perturb(i3, 0.01, 11);
  const Representation p2 = perturb(i3, 0.01, 11);
  const Representation p3 = perturb(i3, 0.01, 12);
  for (Letter l = 0; l < 4; ++l) {
    CHECK(p1.image(l) == p2.image(l));
    CHECK(relative_error(p1.image(l) * p1.image(l ^ 1), Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
  }
  CHECK(p1.image(0) != p3.image(0));
  const double drift = relative_error(p1.image(0), i3.image(0));
  CHECK(drift > 0);
  CHECK(drift < 0.05);

  // Openness: the perturbed representation is still certified and (1,1,2)-hyperconvex.
  const CertificateBank bank(p1, 8);
  CHECK(bank.get(1).verdict);
  CHECK(bank.get(2).verdict);
  const auto report = hyperconvexity_scan(p1, {1, 1, 2}, 200, 30, 5, bank);
  CHECK(report.triples_tested == 200);
  CHECK_FALSE(report.numerically_zero());
}
