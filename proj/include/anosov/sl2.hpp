#pragma once

// Example representations: ping-pong Schottky subgroups of SL(2, R),
// irreducible SL(2) representations on homogeneous polynomials, exterior and
// symmetric powers, direct sums, perturbations, and SL(2) weight arithmetic.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "anosov/representation.hpp"

namespace anosov {

/// Matrix of g acting on degree-k homogeneous polynomials in m = g.rows()
/// variables (x_j -> sum_i g_ij x_i), in the monomial basis scaled by
/// sqrt(k! / alpha!).  That basis is orthonormal for the Bombieri inner
/// product, so orthogonal g go to orthogonal matrices.  Monomials are ordered
/// by decreasing exponent vectors: x^k, x^{k-1} y, ... for m = 2.
Eigen::MatrixXd symmetric_power_matrix(const Eigen::MatrixXd& g, int k);

/// iota_d(g) for g in GL(2): the action on S^{d-1}(R^2).
Eigen::MatrixXd irreducible_image(const Eigen::MatrixXd& g, int d);

/// a = diag(t, 1/t), b = R_theta a R_theta^-1 on F_2.  DegenerateAxes when the
/// eigenlines of a and b coincide.
Representation schottky_fuchsian(double t, double theta);

/// Every generator maps to the identity of R^dim.
Representation trivial_representation(int rank, int dim);

/// iota_d composed with a two-dimensional representation.
Representation irreducible(int d, const Representation& rep);
Representation exterior_power(const Representation& rep, int p);
Representation symmetric_power(const Representation& rep, int k);
Representation direct_sum(const Representation& a, const Representation& b);
/// The restriction to the subgroup generated by the first n generators.
Representation restrict_generators(const Representation& rep, int n);
/// Each generator image times exp(E), E with seeded entries uniform in [-eps, eps].
Representation perturb(const Representation& rep, double epsilon, std::uint64_t seed);

using WeightList = std::vector<int>;
using Partition = std::vector<int>;

/// Union of {d_i - 1, d_i - 3, ..., 1 - d_i}, sorted non-increasing.
WeightList sl2_weights(const Partition& partition);
/// Peels maximal strings {m, m - 2, ..., -m}; NotAnSl2Module on failure.
Partition decompose_weights(const WeightList& weights);
/// d_1 > d_2 + 2(k - 1) for reducible modules; for a single part d, true iff
/// 2 <= k <= d - 1.
bool coherence_check(const Partition& partition, int k);

}  // namespace anosov
