#include "anosov/sl2.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "anosov/error.hpp"
#include "anosov/exterior.hpp"

namespace anosov {

namespace {

using Exponent = std::vector<int>;

// Exponent vectors of degree k in m variables, decreasing lexicographically.
void exponents(int m, int k, std::size_t var, Exponent& cur, std::vector<Exponent>& out) {
  if (var + 1 == static_cast<std::size_t>(m)) {
    cur[var] = k;
    out.push_back(cur);
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur[var] = e;
    exponents(m, k - e, var + 1, cur, out);
  }
}

double log_factorial_sum(const Exponent& a) {
  double s = 0;
  for (int e : a) s += std::lgamma(e + 1.0);
  return s;
}

std::string number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string wrap(const std::string& label) { return label.empty() ? "rho" : label; }

}  // namespace

Eigen::MatrixXd symmetric_power_matrix(const Eigen::MatrixXd& g, int k) {
  if (g.rows() != g.cols()) fail(ErrorKind::DimensionMismatch, "expected a square matrix");
  if (k < 0) fail(ErrorKind::InvalidArgument, "negative symmetric power");
  const int m = static_cast<int>(g.rows());
  std::vector<Exponent> basis;
  Exponent cur(static_cast<std::size_t>(m));
  exponents(m, k, 0, cur, basis);
  std::map<Exponent, Eigen::Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = static_cast<Eigen::Index>(i);

  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const Exponent& beta = basis[static_cast<std::size_t>(col)];
    // Expand prod_j (sum_i g_ij x_i)^beta_j.
    std::map<Exponent, double> poly{{Exponent(static_cast<std::size_t>(m), 0), 1.0}};
    for (int j = 0; j < m; ++j) {
      for (int rep = 0; rep < beta[static_cast<std::size_t>(j)]; ++rep) {
        std::map<Exponent, double> next;
        for (const auto& [mono, coef] : poly) {
          for (int i = 0; i < m; ++i) {
            if (g(i, j) == 0) continue;
            Exponent e = mono;
            ++e[static_cast<std::size_t>(i)];
            next[e] += coef * g(i, j);
          }
        }
        poly = std::move(next);
      }
    }
    const double lb = log_factorial_sum(beta);
    for (const auto& [alpha, coef] : poly) {
      out(index.at(alpha), col) = coef * std::exp(0.5 * (log_factorial_sum(alpha) - lb));
    }
  }
  return out;
}

Eigen::MatrixXd irreducible_image(const Eigen::MatrixXd& g, int d) {
  if (g.rows() != 2 || g.cols() != 2) fail(ErrorKind::DimensionMismatch, "irreducible images need a 2x2 matrix");
  if (d < 1) fail(ErrorKind::InvalidArgument, "irreducible dimension must be positive");
  return symmetric_power_matrix(g, d - 1);
}

Representation schottky_fuchsian(double t, double theta) {
  if (!(t > 1) || !std::isfinite(t)) fail(ErrorKind::InvalidArgument, "schottky parameter t must exceed 1");
  if (!std::isfinite(theta)) fail(ErrorKind::InvalidArgument, "non-finite angle");
  Eigen::Matrix2d a;
  a << t, 0, 0, 1 / t;
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const Eigen::Matrix2d b = r * a * r.transpose();
  // Eigenlines of a are e1, e2; those of b are r e1, r e2.  The axes coincide
  // when the two pairs agree as sets.
  const auto e1 = Subspace::coordinate(2, 0, 1);
  const auto e2 = Subspace::coordinate(2, 1, 1);
  const auto f1 = Subspace::from_orthonormal(Eigen::MatrixXd(r.col(0)));
  const auto f2 = Subspace::from_orthonormal(Eigen::MatrixXd(r.col(1)));
  const double tol = 1e-12;
  if ((sin_distance(e1, f1) < tol && sin_distance(e2, f2) < tol) ||
      (sin_distance(e1, f2) < tol && sin_distance(e2, f1) < tol)) {
    fail(ErrorKind::DegenerateAxes, "the axes of a and b coincide");
  }
  return Representation({Eigen::MatrixXd(a), Eigen::MatrixXd(b)}, "schottky(" + number(t) + ", " + number(theta) + ")");
}

Representation trivial_representation(int rank, int dim) {
  if (rank < 1 || dim < 1) fail(ErrorKind::InvalidArgument, "rank and dimension must be positive");
  return Representation(std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(rank), Eigen::MatrixXd::Identity(dim, dim)),
                        "trivial(" + std::to_string(dim) + ")");
}

namespace {

template <typename F>
Representation map_generators(const Representation& rep, F f, std::string label) {
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : rep.generators()) gens.push_back(f(g));
  return Representation(std::move(gens), std::move(label), rep.automaton_ptr());
}

}  // namespace

Representation irreducible(int d, const Representation& rep) {
  if (rep.dim() != 2) fail(ErrorKind::DimensionMismatch, "irr(d) applies to two-dimensional representations");
  return map_generators(rep, [d](const Eigen::MatrixXd& g) { return irreducible_image(g, d); },
                        "irr(" + std::to_string(d) + ") ∘ " + wrap(rep.label()));
}

Representation exterior_power(const Representation& rep, int p) {
  if (p < 1 || p > rep.dim()) fail(ErrorKind::IndexOutOfRange, "exterior power outside [1, d]");
  return map_generators(rep, [p](const Eigen::MatrixXd& g) { return exterior_power(g, p); },
                        "wedge(" + std::to_string(p) + ", " + wrap(rep.label()) + ")");
}

Representation symmetric_power(const Representation& rep, int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "symmetric power must be at least 1");
  return map_generators(rep, [k](const Eigen::MatrixXd& g) { return symmetric_power_matrix(g, k); },
                        "sym(" + std::to_string(k) + ", " + wrap(rep.label()) + ")");
}

Representation direct_sum(const Representation& a, const Representation& b) {
  if (a.rank() != b.rank()) fail(ErrorKind::DimensionMismatch, "direct sum of representations of different groups");
  if (a.automaton_ptr() != b.automaton_ptr() && !a.automaton().isomorphic(b.automaton())) {
    fail(ErrorKind::DimensionMismatch, "direct sum of representations of different groups");
  }
  std::vector<Eigen::MatrixXd> gens;
  for (int i = 0; i < a.rank(); ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dim() + b.dim(), a.dim() + b.dim());
    m.topLeftCorner(a.dim(), a.dim()) = a.generators()[static_cast<std::size_t>(i)];
    m.bottomRightCorner(b.dim(), b.dim()) = b.generators()[static_cast<std::size_t>(i)];
    gens.push_back(std::move(m));
  }
  return Representation(std::move(gens), "sum(" + wrap(a.label()) + ", " + wrap(b.label()) + ")", a.automaton_ptr());
}

Representation restrict_generators(const Representation& rep, int n) {
  if (n < 1 || n > rep.rank()) fail(ErrorKind::InvalidArgument, "restriction rank outside [1, rank]");
  std::vector<Eigen::MatrixXd> gens(rep.generators().begin(), rep.generators().begin() + n);
  return Representation(std::move(gens), "restrict(" + std::to_string(n) + ", " + wrap(rep.label()) + ")");
}

Representation perturb(const Representation& rep, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0)) fail(ErrorKind::InvalidArgument, "perturbation size must be non-negative");
  const std::string label = "perturb(" + number(epsilon) + ", " + std::to_string(seed) + ", " + wrap(rep.label()) + ")";
  if (epsilon == 0) return rep.relabeled(label);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-epsilon, epsilon);
  std::vector<Eigen::MatrixXd> gens;
  for (const auto& g : rep.generators()) {
    Eigen::MatrixXd e(g.rows(), g.cols());
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      for (Eigen::Index i = 0; i < e.rows(); ++i) e(i, j) = u(rng);
    gens.push_back(g * Eigen::MatrixXd(e.exp()));
  }
  return Representation(std::move(gens), label, rep.automaton_ptr());
}

// ---------------------------------------------------------------------------

namespace {

void require_partition(const Partition& partition) {
  if (partition.empty()) fail(ErrorKind::InvalidArgument, "empty partition");
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (partition[i] < 1) fail(ErrorKind::InvalidArgument, "partition parts must be positive");
    if (i > 0 && partition[i] > partition[i - 1]) fail(ErrorKind::InvalidArgument, "partition must be non-increasing");
  }
}

}  // namespace

WeightList sl2_weights(const Partition& partition) {
  require_partition(partition);
  WeightList out;
  for (int d : partition)
    for (int w = d - 1; w >= 1 - d; w -= 2) out.push_back(w);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Partition decompose_weights(const WeightList& weights) {
  std::multiset<int> rest(weights.begin(), weights.end());
  Partition out;
  while (!rest.empty()) {
    const int m = *rest.rbegin();
    if (m < 0) fail(ErrorKind::NotAnSl2Module, "weights are not symmetric under negation");
    for (int w = m; w >= -m; w -= 2) {
      const auto it = rest.find(w);
      if (it == rest.end()) fail(ErrorKind::NotAnSl2Module, "weight string from " + std::to_string(m) + " is broken");
      rest.erase(it);
    }
    out.push_back(m + 1);
  }
  return out;
}

bool coherence_check(const Partition& partition, int k) {
  require_partition(partition);
  if (k < 2) fail(ErrorKind::InvalidArgument, "coherence index must be at least 2");
  if (partition.size() == 1) return k <= partition.front() - 1;
  return partition[0] > partition[1] + 2 * (k - 1);
}

}  // namespace anosov
