#pragma once

// Seeded generators shared by the unit tests.

#include <Eigen/Dense>

#include <random>

#include "anosov/linalg.hpp"

namespace testing_support {

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

inline anosov::Subspace random_subspace(std::mt19937_64& rng, Eigen::Index d, Eigen::Index k) {
  return anosov::Subspace::span(gaussian_matrix(rng, d, k));
}

inline Eigen::MatrixXd rotation(double theta) {
  Eigen::MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline Eigen::MatrixXd diag(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v.asDiagonal();
}

inline bool le_rel(double lhs, double rhs, double slack = 1e-9) {
  return lhs <= rhs + slack * std::max(1.0, std::abs(rhs));
}

}  // namespace testing_support
