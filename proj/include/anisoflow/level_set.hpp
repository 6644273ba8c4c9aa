#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "anisoflow/integrand.hpp"

namespace anisoflow {

// Euclidean-orthonormal basis (columns) of the tangent space
// {v : DF|_nu(v) = 0} of the level set through nu; size() x dim().
Eigen::MatrixXd tangent_basis(const Integrand& f, const Covector& nu);

// G_nu = F D^2F|_nu expressed in the columns of `basis`.
Eigen::MatrixXd metric_in_basis(const Integrand& f, const Covector& nu, const Eigen::MatrixXd& basis);

// Dense F D^2F|_nu as a size() x size() matrix.
Eigen::MatrixXd metric_matrix(const Integrand& f, const Covector& nu);

// Embeds a spatial vector (components 1..n) as a covector with zero phi^0 part.
Covector spatial(const Eigen::VectorXd& p);

// Deterministic direction generator on the unit sphere of R^k. Consecutive
// calls produce a fixed sequence for a given (k, seed), so the first N
// directions of a larger request equal a smaller request of N.
//  k = 1: alternates +1, -1.
//  k = 2: golden-angle sequence with a seed-dependent phase.
//  k >= 3: normalised Gaussian samples from a seeded mt19937_64.
class DirectionSequence {
 public:
  DirectionSequence(std::size_t k, std::uint64_t seed);
  Eigen::VectorXd next();

 private:
  std::size_t k_;
  std::uint64_t count_ = 0;
  double phase_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace anisoflow
