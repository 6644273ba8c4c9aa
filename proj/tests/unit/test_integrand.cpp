#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anisoflow/errors.hpp"
#include "anisoflow/integrand.hpp"
#include "anisoflow/level_set.hpp"
#include "anisoflow/structure.hpp"

using namespace anisoflow;

namespace {

Integrand ellipsoid_141() { return Integrand::ellipsoid(2, {1, 0, 0, 0, 4, 0, 0, 0, 1}); }

Covector random_covector(std::mt19937_64& rng, std::size_t size) {
  std::normal_distribution<double> nd;
  Covector v(size);
  for (std::size_t i = 0; i < size; ++i) v[i] = nd(rng);
  return v;
}

double max_abs_diff(const SymTensor2& a, const SymTensor2& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double max_abs(const SymTensor3& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a(i, j, k)));
  return m;
}

}  // namespace

TEST(Integrand, EuclideanValue) {
  const auto f = Integrand::euclidean(2);
  EXPECT_NEAR(eval(f, {-1, 3, 4}), std::sqrt(26.0), 1e-15);
  const Covector v{0.3, -1.2, 2.5};
  EXPECT_NEAR(eval(f, 2.0 * v), 2.0 * eval(f, v), 1e-14);
}

TEST(Integrand, EllipsoidValue) { EXPECT_NEAR(eval(ellipsoid_141(), {-1, 1, 0}), std::sqrt(5.0), 1e-15); }

TEST(Integrand, ZeroCovectorIsOutsideTheDomain) {
  const auto f = Integrand::euclidean(1);
  EXPECT_THROW(eval(f, {0, 0}), DomainError);
  EXPECT_THROW(second_derivative(f, {1e-14, 0}), DomainError);
}

TEST(Integrand, RejectsBadParameters) {
  EXPECT_THROW(Integrand::perturbed(2, 0.2), PreconditionError);
  EXPECT_NO_THROW(Integrand::perturbed(2, 0.2, DeltaRange::extended));
  EXPECT_THROW(Integrand::ellipsoid(1, {1, 2, 2, 1}), PreconditionError);
}

TEST(Integrand, EuclideanGradientIsUnitVector) {
  const auto f = Integrand::euclidean(2);
  const Covector v{-1, 3, 4};
  const auto g = first_derivative(f, v);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], v[i] / std::sqrt(26.0), 1e-15);
}

TEST(Integrand, EuclideanHessianClosedForm) {
  const auto f = Integrand::euclidean(1);
  const auto h = second_derivative(f, {-1, 0});
  EXPECT_NEAR(h(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(h(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(h(1, 1), 1.0, 1e-15);
  const auto fd = std::get<SymTensor2>(fd_oracle(f, {-1, 0}, 2));
  EXPECT_LT(max_abs_diff(h, fd), 1e-6);
}

TEST(Integrand, FdOracleEuclideanGradientOnAxis) {
  const auto g = std::get<Covector>(fd_oracle(Integrand::euclidean(1), {0, 1}, 1));
  EXPECT_NEAR(g[0], 0.0, 1e-8);
  EXPECT_NEAR(g[1], 1.0, 1e-8);
}

TEST(Integrand, FdOracleThirdIsSymmetric) {
  const auto t = std::get<SymTensor3>(fd_oracle(ellipsoid_141(), {-1, 1, 0}, 3));
  // packed storage would hide asymmetry, so compare against the analytic tensor
  const auto a = third_derivative(ellipsoid_141(), {-1, 1, 0});
  double err = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) err = std::max(err, std::abs(t(i, j, k) - a(i, j, k)));
  EXPECT_LT(err, 1e-3 * max_abs(a));
}

TEST(Integrand, AnalyticMatchesFdOracleOnEveryFamily) {
  const std::vector<Integrand> fs{Integrand::euclidean(2), ellipsoid_141(), Integrand::perturbed(2, 0.05),
                                  Integrand::odd_perturbed(2, 0.05), Integrand::perturbed(1, 0.1)};
  std::mt19937_64 rng(7);
  for (const auto& f : fs) {
    for (int s = 0; s < 40; ++s) {
      const Covector v = random_covector(rng, f.size());
      const auto g = first_derivative(f, v);
      const auto gf = std::get<Covector>(fd_oracle(f, v, 1));
      for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g[i], gf[i], 1e-5) << f.name();
      const auto h = second_derivative(f, v);
      EXPECT_LT(max_abs_diff(h, std::get<SymTensor2>(fd_oracle(f, v, 2))), 1e-5 / v.norm()) << f.name();
      const auto t = third_derivative(f, v);
      const auto tf = std::get<SymTensor3>(fd_oracle(f, v, 3));
      double err = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j)
          for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(t(i, j, k) - tf(i, j, k)));
      EXPECT_LT(err, 1e-3 * std::max(max_abs(t), 1.0 / (v.norm() * v.norm()))) << f.name();
    }
  }
}

TEST(Integrand, EulerIdentities) {
  std::mt19937_64 rng(11);
  for (const auto& f : {Integrand::euclidean(2), ellipsoid_141(), Integrand::perturbed(2, 0.05)}) {
    for (int s = 0; s < 200; ++s) {
      const Covector v = random_covector(rng, f.size());
      const auto g = first_derivative(f, v);
      EXPECT_NEAR(g.dot(v), eval(f, v), 1e-10);
      const auto h = second_derivative(f, v);
      for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(h.apply(v, Covector::basis(f.dim(), i)), 0.0, 1e-10);
    }
  }
}

TEST(Integrand, HomogeneityOfDerivatives) {
  const auto f = Integrand::perturbed(2, 0.05);
  const Covector v{0.4, -0.7, 1.3};
  for (double lambda : {0.5, 2.0, 10.0}) {
    EXPECT_NEAR(eval(f, lambda * v), lambda * eval(f, v), 1e-12 * lambda);
    const auto h1 = second_derivative(f, v);
    const auto h2 = second_derivative(f, lambda * v);
    const auto t1 = third_derivative(f, v);
    const auto t2 = third_derivative(f, lambda * v);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(h2(i, j), h1(i, j) / lambda, 1e-12);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(t2(i, j, k), t1(i, j, k) / (lambda * lambda), 1e-11);
      }
  }
}

TEST(Integrand, HatProjectsOntoTangentSpace) {
  const auto e = Integrand::euclidean(1);
  const auto p = hat(e, {-1, 0}, {0, 1});
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0, 1e-15);
  const auto z = hat(e, {-1, 2}, {-1, 2});
  EXPECT_NEAR(z.norm(), 0.0, 1e-15);

  std::mt19937_64 rng(3);
  const auto f = Integrand::perturbed(2, 0.05);
  for (int s = 0; s < 100; ++s) {
    const Covector nu = random_covector(rng, 3);
    const Covector v = random_covector(rng, 3);
    EXPECT_NEAR(first_derivative(f, nu).dot(hat(f, nu, v)), 0.0, 1e-10);
  }
}

TEST(Integrand, EuclideanGraphMetricIsMeanCurvature) {
  const auto f = Integrand::euclidean(2);
  const double ux = 0.7, uy = -1.9;
  const Covector nu{-1, ux, uy};
  const double d = 1 + ux * ux + uy * uy;
  const auto b = [](std::size_t i) { return Covector::basis(2, i); };
  EXPECT_NEAR(metric_g(f, nu, b(1), b(1)), 1 - ux * ux / d, 1e-14);
  EXPECT_NEAR(metric_g(f, nu, b(1), b(2)), -ux * uy / d, 1e-14);
  EXPECT_NEAR(metric_g(f, nu, b(2), b(2)), 1 - uy * uy / d, 1e-14);
  EXPECT_NEAR(metric_g(f, nu, nu, b(2)), 0.0, 1e-14);
}

TEST(Integrand, GraphMetricMatchesGenericMetric) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (const auto& f : {Integrand::euclidean(2), ellipsoid_141(), Integrand::perturbed(2, 0.07),
                        Integrand::odd_perturbed(2, 0.04), Integrand::perturbed(1, 0.05)}) {
    for (int s = 0; s < 50; ++s) {
      std::vector<double> grad(f.dim());
      Covector nu(f.size());
      nu[0] = -1.0;
      for (std::size_t i = 0; i < f.dim(); ++i) nu[i + 1] = grad[i] = nd(rng);
      std::vector<double> out(f.dim() * f.dim());
      f.graph_metric(grad, out);
      for (std::size_t i = 0; i < f.dim(); ++i)
        for (std::size_t j = 0; j < f.dim(); ++j) {
          const double g = metric_g(f, nu, Covector::basis(f.dim(), i + 1), Covector::basis(f.dim(), j + 1));
          EXPECT_NEAR(out[i * f.dim() + j], g, 1e-12 * (1 + std::abs(g))) << f.name();
        }
    }
  }
}

TEST(Integrand, EllipsoidMetricAgainstOracle) {
  const auto f = ellipsoid_141();
  const Covector nu{-1, 1, 0};
  const Covector p{0, 0, 1};
  const auto h = std::get<SymTensor2>(fd_oracle(f, nu, 2));
  EXPECT_NEAR(metric_g(f, nu, p, p), eval(f, nu) * h.apply(p, p), 1e-6);
}

TEST(Integrand, CartanVanishesForEuclidean) {
  const auto f = Integrand::euclidean(2);
  const Covector nu{-1, 0.5, 0.25};
  const auto p = hat(f, nu, {0, 1, 0});
  const auto q = hat(f, nu, {0, 0, 1});
  EXPECT_NEAR(cartan_q(f, nu, p, q, q), 0.0, 1e-14);
  EXPECT_NEAR(cartan_q(f, nu, p, p, p), 0.0, 1e-14);
}

TEST(Integrand, CartanRadialRelation) {
  // differentiating D^2F|_{lambda v} = D^2F|_v / lambda gives D^3F(v, q, r) = -D^2F(q, r)
  std::mt19937_64 rng(9);
  for (const auto& f : {ellipsoid_141(), Integrand::perturbed(2, 0.05)}) {
    for (int s = 0; s < 50; ++s) {
      const Covector nu = random_covector(rng, 3);
      const Covector q = random_covector(rng, 3);
      const Covector r = random_covector(rng, 3);
      EXPECT_NEAR(cartan_q(f, nu, nu, q, r), -eval(f, nu) * metric_g(f, nu, q, r),
                  1e-10 * (1 + std::abs(metric_g(f, nu, q, r))));
    }
  }
}

TEST(Integrand, PerturbedCartanAgainstOracle) {
  const auto f = Integrand::perturbed(2, 0.05);
  std::mt19937_64 rng(13);
  for (int s = 0; s < 20; ++s) {
    Covector nu = random_covector(rng, 3);
    nu *= 1.0 / eval(f, nu);
    const auto p = hat(f, nu, random_covector(rng, 3));
    const auto q = hat(f, nu, random_covector(rng, 3));
    const auto r = hat(f, nu, random_covector(rng, 3));
    const auto t = std::get<SymTensor3>(fd_oracle(f, nu, 3));
    const double want = t.apply(p, q, r);  // F(nu) = 1
    EXPECT_NEAR(cartan_q(f, nu, p, q, r), want, 1e-3 * std::max(std::abs(want), 1e-2));
  }
}

TEST(Structure, EvenFamiliesPass) {
  for (const auto& f : {Integrand::euclidean(2), ellipsoid_141(), Integrand::perturbed(2, 0.05)}) {
    const auto rep = check_structure(f, 1000, 1, 1e-8);
    EXPECT_TRUE(rep.all_pass()) << f.name();
    EXPECT_EQ(rep.samples, 1000);
    EXPECT_TRUE(satisfies_symmetry(f));
  }
}

TEST(Structure, OddFamilyFailsSymmetryOnly) {
  const auto f = Integrand::odd_perturbed(2, 0.05);
  const auto rep = check_structure(f, 500, 1, 1e-8);
  EXPECT_TRUE(rep.structural_pass());
  EXPECT_FALSE(rep.symmetry_pass);
  EXPECT_GT(rep.symmetry_err, 1e-8);
  EXPECT_FALSE(satisfies_symmetry(f));
}

TEST(Structure, Deterministic) {
  const auto f = Integrand::perturbed(2, 0.05);
  const auto a = check_structure(f, 200, 42, 1e-8);
  const auto b = check_structure(f, 200, 42, 1e-8);
  EXPECT_EQ(a.homogeneity_err, b.homogeneity_err);
  EXPECT_EQ(a.euler3_err, b.euler3_err);
  EXPECT_EQ(a.min_tangent_eigenvalue, b.min_tangent_eigenvalue);
}
