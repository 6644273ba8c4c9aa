#pragma once

#include <cstdint>
#include <optional>

#include "anisoflow/integrand.hpp"

namespace anisoflow {

// Discretisation of the infima/suprema that define the constants. Sample
// sets are nested: a larger direction_samples extends the smaller set, so
// sampled suprema never decrease and infima never increase.
struct SearchBudget {
  int direction_samples = 256;
  int s_grid = 256;
  double s_max = 1e3;  // truncation of the ray parameter where no limit value is known
  int refine_iters = 24;
  std::uint64_t seed = 0;

  void validate() const;
};

// Clamps applied when the constant formulas degenerate in the isotropic limit.
inline constexpr double kMinBarrierPower = 1.01;  // q
inline constexpr double kMinMu = 0.05;            // mu_1, mu_2
inline constexpr double kSEpsSafety = 1.25;
inline constexpr double kFloorFactor = 2.0;  // default floor P = 2 F(-phi^0)

struct InteriorParams {
  double R = 0.0;
  double k = 0.0;
  double r = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
};

struct BarrierParams {
  int theorem = 1;
  double A = 0.0;      // heat-equation coefficient of the barrier
  double M = 0.0;      // height bound |u| <= M
  double q = 0.0;      // barrier power, > 1
  double floor = 0.0;  // P (theorems 1, 3) or S (theorem 2)
  double Tprime = 0.0;
  std::optional<InteriorParams> interior;

  // constants the parameters were assembled from, when known
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> epsilon;

  // Throws PreconditionError if an invariant fails.
  void validate(const Integrand& f) const;
};

// Sampled supremum over nu in Sigma_1 and tangent p, q, r of
// |Q_nu(p, q, r)| / sqrt(G(p, p) G(q, q) G(r, r)). Throws IntegrandInvalid
// when G degenerates on a tangent space.
double estimate_c1(const Integrand& f, const SearchBudget& budget);

// Infimum of G|_{p - phi^0}(p, p) over spatial p with F(p - phi^0) >= P,
// the s -> infinity limit G|_p(phi^0, phi^0) included. Requires P > F(-phi^0).
double compute_a_p(const Integrand& f, double P, const SearchBudget& budget);

struct TraceBounds {
  double k_lo = 0.0;
  double k_hi = 0.0;
};

// Range of sum_{i=1..n} G|_{p - phi^0}(phi^i, phi^i) over spatial p,
// including the p -> 0 and |p| -> infinity limits. Requires n > 1.
TraceBounds compute_trace_bounds(const Integrand& f, const SearchBudget& budget);

// Supremum over spatial p, q in Sigma_1 and s >= 0 of
// F(sp - phi^0) G|_{sp - phi^0}(sp, q) / F(q), with the s -> infinity limit
// -D(F^2 D^2F)|_p(phi^0, phi^0, q) / F(q). Requires the symmetry condition.
double compute_c2(const Integrand& f, const SearchBudget& budget);

struct SEpsResult {
  double S = 0.0;        // returned threshold, sampled * safety
  double sampled = 0.0;  // smallest sampled admissible threshold
  double safety = kSEpsSafety;
  int violations = 0;  // sampled (p, s) where the inequality fails
};

// Threshold S such that F(p - phi^0) >= S implies
// |F D(F D^2F)|_{p - phi^0}(p, q^, q^)| <= eps G(p, p)^{1/2} G(q, q)
// at every sampled p and every spatial q. Requires eps > 0 and symmetry.
// Throws UnresolvedConstant when violations persist up to s_max.
SEpsResult compute_s_eps_detailed(const Integrand& f, double eps, const SearchBudget& budget);
double compute_s_eps(const Integrand& f, double eps, const SearchBudget& budget);

// T' for theorems 1-2 (Phi'' >= 0 on |u| <= M) and the additional Phi <= 1
// restriction used by theorem 3.
double barrier_time_limit(double A, double M);
double barrier_unit_time(double A, double M);

// Assembles the barrier parameters of the given theorem (1, 2 or 3).
// Theorem 3 needs `radius`. Throws HypothesisNotMet naming the failed
// condition.
BarrierParams theorem_params(const Integrand& f, double M, int theorem, std::optional<double> radius,
                             const SearchBudget& budget);

}  // namespace anisoflow
