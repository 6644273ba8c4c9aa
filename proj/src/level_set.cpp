#include "anisoflow/level_set.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>

namespace anisoflow {

Eigen::MatrixXd tangent_basis(const Integrand& f, const Covector& nu) {
  const auto m = static_cast<Eigen::Index>(f.size());
  Eigen::VectorXd g(m);
  f.gradient(nu.coords(), std::span<double>(g.data(), f.size()));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  return q.rightCols(m - 1);
}

Eigen::MatrixXd metric_matrix(const Integrand& f, const Covector& nu) {
  const auto m = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd h(m, m);
  // row-major vs column-major is immaterial for a symmetric matrix
  f.hessian(nu.coords(), std::span<double>(h.data(), f.size() * f.size()));
  return f.value(nu.coords()) * h;
}

Eigen::MatrixXd metric_in_basis(const Integrand& f, const Covector& nu, const Eigen::MatrixXd& basis) {
  return basis.transpose() * metric_matrix(f, nu) * basis;
}

Covector spatial(const Eigen::VectorXd& p) {
  Covector c(static_cast<std::size_t>(p.size()) + 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) c[static_cast<std::size_t>(i) + 1] = p[i];
  return c;
}

DirectionSequence::DirectionSequence(std::size_t k, std::uint64_t seed) : k_(k), rng_(seed) {
  // phase in [0, 2 pi) derived from the seed through the generator itself
  std::mt19937_64 phase_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  phase_ = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(phase_rng);
}

Eigen::VectorXd DirectionSequence::next() {
  Eigen::VectorXd d(static_cast<Eigen::Index>(k_));
  const std::uint64_t i = count_++;
  if (k_ == 1) {
    d[0] = (i % 2 == 0) ? 1.0 : -1.0;
  } else if (k_ == 2) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double a = phase_ + golden * static_cast<double>(i);
    d[0] = std::cos(a);
    d[1] = std::sin(a);
  } else {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = normal_(rng_);
      norm = d.norm();
    } while (norm < 1e-12);
    d /= norm;
  }
  return d;
}

}  // namespace anisoflow
