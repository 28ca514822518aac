// Acceptance suite: one PASS / FAIL line per criterion.  Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "anosov/config.hpp"
#include "anosov/error.hpp"
#include "anosov/estimators.hpp"
#include "anosov/hyperconvexity.hpp"
#include "anosov/pipeline.hpp"
#include "anosov/reports.hpp"
#include "anosov/sl2.hpp"

using namespace anosov;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Representation& schottky() {
  static const Representation rho = schottky_fuchsian(3, std::numbers::pi / 4);
  return rho;
}

// The direct sum named by the criteria: iota_2 Schottky(4) + iota_2 Schottky(2).
Representation block_counterexample() {
  return direct_sum(schottky_fuchsian(4, std::numbers::pi / 4), schottky_fuchsian(2, std::numbers::pi / 4));
}

Verdict combinatorics() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto aut = free_group_automaton(2);
  std::set<StateId> types;
  for (const auto& w : ball(aut, 6)) types.insert(cone_type(aut, w));
  bool ok = aut.state_count() == 5 && types.size() == 5 && aut.out_degree(aut.initial()) == 4;
  for (StateId s = 0; s < aut.state_count(); ++s)
    if (s != aut.initial()) ok = ok && aut.out_degree(s) == 3;
  std::uint64_t expected = 4;
  for (int k = 1; k <= 12; ++k) {
    ok = ok && sphere(aut, k).size() == expected;
    expected *= 3;
  }
  const double t = seconds_since(t0);
  return {ok && t < 1, fmt("%zu cone types, spheres 1..12 enumerated, %.2f s", types.size(), t)};
}

Verdict quantitative_lemmas() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  const auto gaussian = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = n01(rng);
    return m;
  };
  const auto le = [](double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)); };
  std::size_t checked = 0, violated = 0;
  for (int d = 2; d <= 6; ++d) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::MatrixXd g = gaussian(d, d), h = gaussian(d, d);
      const auto cg = cartan(g), ch = cartan(h), cgh = cartan(Eigen::MatrixXd(g * h)),
                 cginv = cartan(Eigen::MatrixXd(g.inverse()));
      const double kg = cg.sigma(0) / cg.sigma(d - 1), kh = ch.sigma(0) / ch.sigma(d - 1);
      for (int p = 1; p < d; ++p) {
        // Product bound.
        const Subspace ugh = cartan_attractor(cgh, p);
        violated += !le(sin_distance(ugh, cartan_attractor(cg, p)), kh * gap_ratio(cg, p));
        violated += !le(sin_distance(ugh, image(g, cartan_attractor(ch, p))), kg * gap_ratio(ch, p));
        // Contraction bound on a random p-plane.
        const Subspace P = Subspace::span(gaussian(d, p));
        const Subspace repel = cartan_attractor(cginv, d - p);
        violated += !le(sin_distance(image(g, P), cartan_attractor(cg, p)),
                        gap_ratio(cg, p) / std::sin(min_angle(P, repel)));
        // Growth bound.
        const double sin_alpha = std::sin(min_angle(cartan_attractor(ch, p), repel));
        violated += !le(sin_alpha * cg.sigma(p - 1) * ch.sigma(p - 1), cgh.sigma(p - 1));
        violated += !le(cgh.sigma(p), cg.sigma(p) * ch.sigma(p) / sin_alpha);
        checked += 5;
      }
    }
  }
  const double t = seconds_since(t0);
  return {violated == 0 && t < 30,
          fmt("%zu inequalities on 1000 samples per d in 2..6, %zu violated, %.1f s", checked, violated, t)};
}

Verdict certification() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cert = certify_anosov(irreducible(3, schottky()), 1, 10);
  const auto trivial = certify_anosov(trivial_representation(2, 2), 1, 10);
  const auto doubled = certify_anosov(direct_sum(schottky(), schottky()), 1, 10);
  const double t = seconds_since(t0);
  return {cert.verdict && cert.fitted_mu > 0.5 && !trivial.verdict && !doubled.verdict && t < 120,
          fmt("iota3 mu=%.4f verdict=%s; trivial verdict=%s; rho+rho verdict=%s; %.1f s", cert.fitted_mu,
              cert.verdict ? "pass" : "fail", trivial.verdict ? "pass" : "fail", doubled.verdict ? "pass" : "fail", t)};
}

Verdict exponent_invariance(double& h3) {
  const auto t0 = std::chrono::steady_clock::now();
  const double h = critical_exponent(schottky(), 10).h();
  double worst = 0;
  std::string values = fmt("h(rho)=%.4f", h);
  for (int d = 3; d <= 5; ++d) {
    const double hd = critical_exponent(irreducible(d, schottky()), 10).h();
    if (d == 3) h3 = hd;
    worst = std::max(worst, std::abs(hd - h));
    values += fmt(" h(iota%d)=%.4f", d, hd);
  }
  const double t = seconds_since(t0);
  return {worst <= 0.05 && t < 300, values + fmt("; max diff %.2g, %.1f s", worst, t)};
}

double sample_dimension(const Representation& rep, std::size_t points, int radius = 10) {
  const CertificateBank bank(rep, radius);
  const auto sample = limit_set_sample(rep, 1, points, 30, 17, 1e-8, bank);
  return box_dimension(sample).slope;
}

Verdict dimension_matches_exponent(double h3, double& box3) {
  const auto t0 = std::chrono::steady_clock::now();
  box3 = sample_dimension(irreducible(3, schottky()), 10000);
  const double t = seconds_since(t0);
  const double gap = std::abs(box3 - h3);
  return {gap <= 0.1 && t < 600, fmt("box=%.4f h=%.4f |diff|=%.4f, %.1f s", box3, h3, gap, t)};
}

Verdict upper_bounds(double h3, double box3) {
  struct Example {
    std::string name;
    Representation rep;
  };
  std::vector<Example> examples{{"rho", schottky()},
                                {"iota4", irreducible(4, schottky())},
                                {"iota5", irreducible(5, schottky())},
                                {"perturbed iota3", perturb(irreducible(3, schottky()), 0.01, 3)},
                                {"schottky(4)", schottky_fuchsian(4, std::numbers::pi / 4)}};
  bool ok = box3 <= h3 + 0.1 && box3 <= 1.1;
  std::string detail = fmt("iota3 box=%.3f h=%.3f", box3, h3);
  for (const auto& ex : examples) {
    const CertificateBank bank(ex.rep, 10);
    if (!bank.get(1).verdict) {
      detail += "; " + ex.name + " not certified";
      continue;
    }
    const double h = critical_exponent(ex.rep, 10).h();
    const double box = sample_dimension(ex.rep, 4000);
    ok = ok && box <= h + 0.1;
    bool hyperconvex = false;
    if (ex.rep.dim() >= 3 && bank.get(2).verdict)
      hyperconvex = !hyperconvexity_scan(ex.rep, {1, 1, 2}, 200, 30, 9, bank).numerically_zero();
    if (hyperconvex) ok = ok && box <= 1.1;
    detail += fmt("; %s box=%.3f h=%.3f%s", ex.name.c_str(), box, h, hyperconvex ? " (1,1,2)" : "");
  }
  return {ok, detail};
}

Verdict hyperconvexity_scans() {
  const auto t0 = std::chrono::steady_clock::now();
  const Representation rep = irreducible(5, schottky());
  const CertificateBank bank(rep, 10);
  double worst = 1;
  std::string detail = "iota5:";
  for (const auto& idx : hyperconvexity_indices(5)) {
    const auto report = hyperconvexity_scan(rep, idx, 10000, 40, 31, bank);
    worst = std::min(worst, report.worst_margin);
    detail += fmt(" (%d,%d,%d)=%.2g", idx.p, idx.q, idx.r, report.worst_margin);
  }
  const bool veronese_ok = worst > 1e-3;
  bool block_ok = false;
  try {
    const Representation block = block_counterexample();
    const CertificateBank block_bank(block, 10);
    const auto report = hyperconvexity_scan(block, {1, 1, 2}, 10000, 40, 31, block_bank);
    block_ok = report.worst_margin < 1e-6;
    detail += fmt("; block worst=%.2g", report.worst_margin);
  } catch (const Error& e) {
    detail += std::string("; block: ") + e.what();
  }
  const double t = seconds_since(t0);
  return {veronese_ok && block_ok && t < 600, detail + fmt("; %.1f s", t)};
}

Verdict profiles_converge() {
  std::vector<int> steps;
  for (int i = 1; i <= 20; ++i) steps.push_back(i);
  bool ok = true;
  std::string detail;
  for (int d : {4, 5}) {
    const Representation rep = irreducible(d, schottky());
    const CertificateBank bank(rep, 10);
    const auto profile = convergence_profile(rep, {1, 1, 2}, random_ray(rep.automaton(), 21, 5), steps, 5, bank);
    const double last = profile.steps.back().residual;
    ok = ok && profile.fitted_rate > 0 && last < 1e-4;
    detail += fmt("iota%d rate=%.3f residual(20)=%.2g; ", d, profile.fitted_rate, last);
  }
  try {
    const Representation block = block_counterexample();
    const CertificateBank bank(block, 10);
    const auto profile = convergence_profile(block, {1, 1, 2}, random_ray(block.automaton(), 21, 5), steps, 5, bank);
    double floor = 1;
    for (std::size_t i = profile.steps.size() / 2; i < profile.steps.size(); ++i)
      floor = std::min(floor, profile.steps[i].residual);
    ok = ok && floor > 0.1;
    detail += fmt("block residual floor=%.3g", floor);
  } catch (const Error& e) {
    ok = false;
    detail += std::string("block: ") + e.what();
  }
  return {ok, detail};
}

Verdict shadow_bracket(double h3) {
  const Representation rep = irreducible(3, schottky());
  const CertificateBank bank(rep, 10);
  const PSMeasure mu = ps_measure(rep, h3, 10);
  const LeastAngle delta = least_angle_estimate(rep, 6, 200, 13);
  if (delta.no_gap) return {false, "least angle undefined"};
  const auto sample = limit_set_sample(rep, 1, 2000, 30, 19, 1e-8, bank);
  std::size_t tested = 0, held = 0;
  double worst_lo = 1e300, worst_hi = 1e300;
  for (int len = 1; len <= 3; ++len) {
    for (const auto& eta : sphere(rep.automaton(), len)) {
      const ShadowCheck c = shadow_ratio(rep, eta, mu, sample, delta.delta);
      ++tested;
      held += c.holds() ? 1 : 0;
      worst_lo = std::min(worst_lo, c.ratio / c.lower);
      worst_hi = std::min(worst_hi, c.upper / c.ratio);
    }
  }
  return {held == tested, fmt("%zu/%zu eta hold at s=%.4f, delta=%.4f; min ratio/lower=%.3g, min upper/ratio=%.3g",
                              held, tested, h3, delta.delta, worst_lo, worst_hi)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const RunConfig cfg = load_config((fs::path(ANOSOV_SOURCE_DIR) / "tests" / "configs" / "schottky_iota3.cfg").string());
  const fs::path a = fs::temp_directory_path() / "anosov_acceptance_a";
  const fs::path b = fs::temp_directory_path() / "anosov_acceptance_b";
  fs::remove_all(a);
  fs::remove_all(b);
  RunOptions two;
  two.threads = 2;
  const auto ma = emit_reports(run(cfg), a.string());
  const auto mb = emit_reports(run(cfg, two), b.string());
  std::size_t csv = 0, differ = 0;
  for (const auto& rel : ma) {
    if (fs::path(rel).extension() != ".csv") continue;
    ++csv;
    differ += read_file(a / rel) != read_file(b / rel);
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return {ma == mb && csv > 0 && differ == 0, fmt("%zu CSV files compared, %zu differ", csv, differ)};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int n, const std::function<Verdict()>& f) {
    Verdict v;
    try {
      v = f();
    } catch (const Error& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("criterion %2d: %s  %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  };
  double h3 = 0, box3 = 0;
  report(1, combinatorics);
  report(2, quantitative_lemmas);
  report(3, certification);
  report(4, [&] { return exponent_invariance(h3); });
  report(5, [&] { return dimension_matches_exponent(h3, box3); });
  report(6, [&] { return upper_bounds(h3, box3); });
  report(7, hyperconvexity_scans);
  report(8, profiles_converge);
  report(9, [&] { return shadow_bracket(h3); });
  report(10, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
