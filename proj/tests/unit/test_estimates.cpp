#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "anisoflow/errors.hpp"
#include "anisoflow/estimates.hpp"
#include "anisoflow/initial_data.hpp"

using namespace anisoflow;

namespace {

BarrierParams plain(int theorem, double A, double M, double q, double floor, double Tprime = 1.0) {
  BarrierParams p;
  p.theorem = theorem;
  p.A = A;
  p.M = M;
  p.q = q;
  p.floor = floor;
  p.Tprime = Tprime;
  return p;
}

SearchBudget small_budget() {
  SearchBudget b;
  b.direction_samples = 64;
  b.s_grid = 64;
  b.refine_iters = 12;
  return b;
}

}  // namespace

TEST(Estimates, PhiHeatValue) {
  EXPECT_NEAR(phi_heat(0.0, 0.5, 0.75, 1.0), std::sqrt(2.0) * std::exp(-1.5), 1e-15);
  EXPECT_NEAR(phi_heat(0.0, 0.5, 0.75, 1.0, BarrierSign::plus), std::sqrt(2.0) * std::exp(-1.5), 1e-15);
  EXPECT_THROW(phi_heat(0.0, 0.0, 0.75, 1.0), DomainError);
}

// The barrier t^{-1/2} exp(-A d^2 / 4t) solves Phi_t = Phi'' / A; the two
// diffusivities agree only at A = 1.
TEST(Estimates, PhiSolvesHeatEquation) {
  const double M = 1.0, h = 1e-4;
  for (double A : {0.6, 1.0}) {
    for (double u : {-0.8, -0.1, 0.3, 0.9}) {
      for (double t : {0.1, 0.3, 0.7}) {
        const double pt = (phi_heat(u, t + h, A, M) - phi_heat(u, t - h, A, M)) / (2 * h);
        const double puu =
            (phi_heat(u + h, t, A, M) - 2 * phi_heat(u, t, A, M) + phi_heat(u - h, t, A, M)) / (h * h);
        EXPECT_NEAR(pt, puu / A, 1e-6 * (1 + std::abs(pt)));
      }
    }
  }
}

TEST(Estimates, Theorem1Bound) {
  const auto p = plain(1, 0.75, 1.0, 2.0, 2.0);
  EXPECT_NEAR(*bound(1, p, 0.0, 0.5), 10.042768461593832, 1e-12);
  EXPECT_DOUBLE_EQ(*bound(1, plain(1, 0.75, 1.0, 2.0, 20.0), 0.0, 0.5), 20.0);
  // near its minimum in t the barrier drops below the floor
  const auto p2 = plain(1, 0.75, 1.0, 1.01, 2.0);
  EXPECT_LT(*barrier_term(1, p2, 0.5, 0.84), 2.0);
  EXPECT_DOUBLE_EQ(*bound(1, p2, 0.5, 0.84), 2.0);
}

TEST(Estimates, BoundIsSharedByTheorems) {
  const auto p1 = plain(1, 0.6, 1.0, 2.0, 1.5);
  const auto p2 = plain(2, 0.6, 1.0, 2.0, 1.5);
  for (double u : {-1.0, 0.0, 0.4})
    for (double t : {0.05, 0.2, 0.6}) EXPECT_NEAR(*bound(2, p2, u, t), *bound(1, p1, u, t), 1e-12 * *bound(1, p1, u, t));
}

TEST(Estimates, BoundDecreasesWithHeight) {
  const auto p = plain(1, 0.75, 1.0, 1.3, 1.0);
  double prev = INFINITY;
  for (double u = 0.0; u <= 1.0; u += 0.125) {
    const double b = *barrier_term(1, p, u, 0.1);
    EXPECT_LT(b, prev);
    EXPECT_DOUBLE_EQ(b, *barrier_term(1, p, -u, 0.1));
    prev = b;
  }
}

TEST(Estimates, OverflowAndTimeChecks) {
  const auto p = plain(1, 0.75, 1.0, 2.0, 2.0);
  EXPECT_TRUE(std::isinf(*bound(1, p, 0.0, 1e-4)));
  EXPECT_THROW(bound(1, p, 0.0, 0.0), DomainError);
  EXPECT_THROW(bound(1, p, 0.0, 1.5), PreconditionError);
}

TEST(Estimates, Theorem3Ball) {
  auto p = plain(3, 0.75, 1.0, 2.0, 2.0);
  p.interior = InteriorParams{1.0, 2.0, 1.0 / 0.95, 0.05, 0.05};
  const double in[2] = {0.1, 0.2};
  const double edge[2] = {0.7, 0.0};  // eta = 1 - 0.4 - 0.49 > 0 at t = 0.1, gone at t = 0.2
  ASSERT_TRUE(bound(3, p, 0.0, 0.1, in).has_value());
  EXPECT_TRUE(bound(3, p, 0.0, 0.1, edge).has_value());
  EXPECT_FALSE(bound(3, p, 0.0, 0.2, edge).has_value());
  // the localiser only raises the bound
  const double eta = 1.0 - 0.4 - 0.05;
  EXPECT_NEAR(*barrier_term(3, p, 0.0, 0.1, in), *barrier_term(1, p, 0.0, 0.1) * std::pow(eta, -p.interior->r),
              1e-12 * *barrier_term(3, p, 0.0, 0.1, in));
}

TEST(Estimates, ShallowSineStaysBelowFloor) {
  const GridSpec g{1, 256, 2.0 * std::numbers::pi};
  InitialSpec s;
  s.kind = InitialKind::sine;
  s.amplitude = 1e-3;
  const auto f = Integrand::euclidean(1);
  const auto params = theorem_params(f, 1.0, 1, std::nullopt, small_budget());
  const auto traj = run(FlowConfig{g, params.Tprime, 0.9, 20}, f, make_initial(s, g));
  const auto rep = verify(traj, f, 1, params, g);
  ASSERT_FALSE(rep.rows.empty());
  EXPECT_GT(rep.min_margin, 0.0);
  EXPECT_FALSE(rep.violated);
  EXPECT_DOUBLE_EQ(rep.t_start, 10 * traj.dt0);
  for (const auto& row : rep.rows) {
    EXPECT_GE(row.t, rep.t_start);
    EXPECT_LE(row.t, params.Tprime * (1 + 1e-12));
    EXPECT_EQ(row.cells_checked, 256u);
  }
}

TEST(Estimates, VerifyIsDeterministic) {
  const GridSpec g{1, 128, 2.0 * std::numbers::pi};
  const auto f = Integrand::perturbed(1, 0.05);
  const auto params = theorem_params(f, 1.0, 1, std::nullopt, small_budget());
  const auto u0 = make_initial(InitialSpec{}, g);
  const auto a = verify(run(FlowConfig{g, params.Tprime, 0.9, 20}, f, u0), f, 1, params, g);
  const auto b = verify(run(FlowConfig{g, params.Tprime, 0.9, 20}, f, u0), f, 1, params, g);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_EQ(a.min_margin, b.min_margin);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].margin, b.rows[i].margin);
    EXPECT_EQ(a.rows[i].cell, b.rows[i].cell);
  }
}

TEST(Estimates, VerifyPreconditions) {
  const GridSpec g{1, 64, 2.0 * std::numbers::pi};
  const auto f = Integrand::euclidean(1);
  const auto traj = run(FlowConfig{g, 0.1, 0.9, 20}, f, make_initial(InitialSpec{}, g));
  // M below the data height
  EXPECT_THROW(verify(traj, f, 1, plain(1, 0.75, 0.5, 1.01, 2.0), g), PreconditionError);
  EXPECT_THROW(verify(traj, f, 2, plain(1, 0.75, 1.0, 1.01, 2.0), g), PreconditionError);

  const auto odd = Integrand::odd_perturbed(1, 0.05);
  const auto t2 = run(FlowConfig{g, 0.1, 0.9, 20}, odd, make_initial(InitialSpec{}, g));
  EXPECT_THROW(verify(t2, odd, 2, plain(2, 0.75, 1.0, 2.0, 2.0), g), HypothesisNotMet);
}
