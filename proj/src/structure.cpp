#include "anisoflow/structure.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "anisoflow/errors.hpp"
#include "anisoflow/level_set.hpp"

namespace anisoflow {
namespace {

Covector random_unit(std::mt19937_64& rng, std::size_t m, bool zero_height) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Covector v(m);
  double r = 0.0;
  do {
    for (std::size_t i = 0; i < m; ++i) v[i] = normal(rng);
    if (zero_height) v[0] = 0.0;
    r = v.norm();
  } while (r < 1e-6);
  return (1.0 / r) * v;
}

struct SymmetryResiduals {
  double values = 0.0;
  double identities = 0.0;
};

SymmetryResiduals symmetry_residuals(const Integrand& f, int samples, std::uint64_t seed) {
  const std::size_t m = f.size();
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> radius(0.0, 3.0);
  const Covector e0 = Covector::basis(f.dim(), 0);
  SymmetryResiduals res;
  std::vector<double> g(m), h(m * m), t(m * m * m);
  for (int s = 0; s < samples; ++s) {
    const Covector dir = random_unit(rng, m, true);
    const Covector p = radius(rng) * dir;
    res.values = std::max(res.values, std::abs(eval(f, p + e0) - eval(f, p - e0)));

    f.gradient(dir.coords(), g);
    f.hessian(dir.coords(), h);
    f.third(dir.coords(), t);
    double id = std::abs(g[0]);
    for (std::size_t j = 1; j < m; ++j) {
      id = std::max(id, std::abs(h[j]));
      for (std::size_t k = 1; k < m; ++k) id = std::max(id, std::abs(t[j * m + k]));
    }
    id = std::max(id, std::abs(t[0]));
    res.identities = std::max(res.identities, id);
  }
  return res;
}

}  // namespace

StructureReport check_structure(const Integrand& f, int samples, std::uint64_t seed, double tol) {
  if (samples < 1) throw PreconditionError("check_structure needs at least one sample");
  const std::size_t m = f.size();
  StructureReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.tol = tol;
  rep.min_tangent_eigenvalue = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::vector<double> g(m), gl(m), h(m * m), hl(m * m), t(m * m * m), tl(m * m * m);
  const double lambdas[] = {0.5, 2.0, 10.0};

  for (int s = 0; s < samples; ++s) {
    const Covector v = random_unit(rng, m, false);
    const double fv = eval(f, v);
    f.gradient(v.coords(), g);
    f.hessian(v.coords(), h);
    f.third(v.coords(), t);

    for (double lam : lambdas) {
      const Covector w = lam * v;
      double err = std::abs(eval(f, w) - lam * fv) / (lam * fv);
      f.gradient(w.coords(), gl);
      f.hessian(w.coords(), hl);
      f.third(w.coords(), tl);
      for (std::size_t a = 0; a < m; ++a) err = std::max(err, std::abs(gl[a] - g[a]));
      for (std::size_t a = 0; a < m * m; ++a) err = std::max(err, std::abs(lam * hl[a] - h[a]));
      for (std::size_t a = 0; a < m * m * m; ++a)
        err = std::max(err, std::abs(lam * lam * tl[a] - t[a]));
      rep.homogeneity_err = std::max(rep.homogeneity_err, err);
    }

    double radial = 0.0;
    for (std::size_t a = 0; a < m; ++a) radial += g[a] * v[a];
    rep.euler1_err = std::max(rep.euler1_err, std::abs(radial - fv));

    for (std::size_t a = 0; a < m; ++a) {
      double hv = 0.0;
      for (std::size_t b = 0; b < m; ++b) hv += h[a * m + b] * v[b];
      rep.euler2_err = std::max(rep.euler2_err, std::abs(hv));
    }

    // D(F D^2F)(v, b, c) = DF(v) D^2F(b, c) + F D^3F(v, b, c)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        double tv = 0.0;
        for (std::size_t a = 0; a < m; ++a) tv += t[(a * m + b) * m + c] * v[a];
        rep.euler3_err = std::max(rep.euler3_err, std::abs(radial * h[b * m + c] + fv * tv));
      }

    const Eigen::MatrixXd basis = tangent_basis(f, v);
    const Eigen::MatrixXd gt = metric_in_basis(f, v, basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gt, Eigen::EigenvaluesOnly);
    rep.min_tangent_eigenvalue = std::min(rep.min_tangent_eigenvalue, es.eigenvalues().minCoeff());
  }

  const SymmetryResiduals sym = symmetry_residuals(f, samples, seed);
  rep.symmetry_err = sym.values;
  rep.symmetry_identities_err = sym.identities;

  rep.homogeneity_pass = rep.homogeneity_err <= tol;
  rep.euler1_pass = rep.euler1_err <= tol;
  rep.euler2_pass = rep.euler2_err <= tol;
  rep.euler3_pass = rep.euler3_err <= tol;
  rep.convexity_pass = rep.min_tangent_eigenvalue > tol;
  rep.symmetry_pass = rep.symmetry_err <= tol && rep.symmetry_identities_err <= tol;
  return rep;
}

bool satisfies_symmetry(const Integrand& f, int samples, std::uint64_t seed, double tol) {
  const SymmetryResiduals sym = symmetry_residuals(f, samples, seed);
  return sym.values <= tol && sym.identities <= tol;
}

}  // namespace anisoflow
