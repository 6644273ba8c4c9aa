#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anisoflow/errors.hpp"
#include "anisoflow/initial_data.hpp"
#include "anisoflow/solver.hpp"

using namespace anisoflow;

namespace {

GridSpec grid(std::size_t n, std::size_t cells) { return GridSpec{n, cells, 2.0 * std::numbers::pi}; }

GraphState initial(InitialKind kind, const GridSpec& g, double amplitude = 1.0, std::uint64_t seed = 0) {
  InitialSpec s;
  s.kind = kind;
  s.amplitude = amplitude;
  s.seed = seed;
  return make_initial(s, g);
}

double final_at(const GraphState& u0, const Integrand& f, const GridSpec& g, double T) {
  FlowConfig fc{g, T, 0.9, 1000000};
  return run(fc, f, u0).snapshots.back().state.u[0];
}

}  // namespace

TEST(Solver, DifferentialsOfSine) {
  const auto g = grid(1, 128);
  const auto u = initial(InitialKind::sine, g);
  const auto d = differentials(u, g);
  EXPECT_DOUBLE_EQ(d[0].du[0], -1.0);
  EXPECT_NEAR(d[0].du[1], 1.0, 8e-4);
  EXPECT_NEAR(d[32].d2u(0, 0), -1.0, 8e-4);  // x = pi / 2
}

TEST(Solver, MixedDerivativeCross) {
  const auto g = grid(2, 64);
  GraphState u;
  u.u.resize(g.total());
  const double h = g.h();
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) u.u[j * 64 + i] = std::sin(h * i) * std::sin(h * j);
  const auto d = differentials(u, g);
  // at x = y = 0 only the mixed derivative survives: cos 0 cos 0 = 1
  EXPECT_NEAR(d[0].d2u(0, 1), 1.0, 4e-3);  // h^2 / 3
  EXPECT_NEAR(d[0].d2u(0, 0), 0.0, 1e-12);
  const auto grad = gradient_field(u, g);
  EXPECT_NEAR(grad[1][16], std::sin(h * 16), 2e-3);  // h^2 / 6
}

TEST(Solver, IsotropicCoefficients) {
  const auto g = grid(2, 32);
  const auto u = initial(InitialKind::trig, g, 1.0, 4);
  const auto co = flow_coefficients(u, Integrand::euclidean(2), g);
  const auto grad = gradient_field(u, g);
  for (std::size_t c = 0; c < g.total(); ++c) {
    const double ux = grad[0][c], uy = grad[1][c];
    const double d = 1 + ux * ux + uy * uy;
    EXPECT_NEAR(co.a11[c], 1 - ux * ux / d, 1e-12);
    EXPECT_NEAR(co.a12[c], -ux * uy / d, 1e-12);
    EXPECT_NEAR(co.a22[c], 1 - uy * uy / d, 1e-12);
  }
}

TEST(Solver, SellingReconstructsMatrix) {
  const double mats[][3] = {{1, 0, 1}, {1, -0.4, 1}, {1, 0.4, 1}, {4, 3.9, 4}, {0.2, -0.1, 5}, {1, 0.99, 1}, {9, -2.9, 1}};
  for (const auto& m : mats) {
    const auto s = selling_decomposition(m[0], m[1], m[2]);
    double r[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(s.weight[k], -1e-14);
      const auto& e = s.offset[k];
      r[0] += s.weight[k] * e[0] * e[0];
      r[1] += s.weight[k] * e[0] * e[1];
      r[2] += s.weight[k] * e[1] * e[1];
    }
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r[i], m[i], 1e-12 * (1 + std::abs(m[i])));
  }
}

TEST(Solver, ConstantFieldIsStationary) {
  for (std::size_t n : {1u, 2u}) {
    const auto g = grid(n, 32);
    const auto u = initial(InitialKind::constant, g, 0.3);
    const auto f = Integrand::perturbed(n, 0.05);
    const auto next = step(u, f, g, 0.5 * cfl_limit(u, f, g));
    EXPECT_EQ(next.u, u.u);
  }
}

TEST(Solver, OneDimensionalCurveShortening) {
  // u_t = u_xx / (1 + u_x^2)
  const auto g = grid(1, 64);
  const auto u = initial(InitialKind::sine, g, 0.8);
  const auto f = Integrand::euclidean(1);
  const double dt = 0.5 * cfl_limit(u, f, g);
  const auto next = step(u, f, g, dt);
  const auto d = differentials(u, g);
  for (std::size_t i = 0; i < 64; ++i) {
    const double ux = d[i].du[1];
    EXPECT_NEAR(next.u[i], u.u[i] + dt * d[i].d2u(0, 0) / (1 + ux * ux), 1e-14);
  }
  EXPECT_DOUBLE_EQ(next.t, dt);
}

TEST(Solver, StepPreconditions) {
  const auto g = grid(2, 16);
  const auto u = initial(InitialKind::trig, g);
  const auto f = Integrand::euclidean(2);
  const double lim = cfl_limit(u, f, g);
  try {
    step(u, f, g, 1.5 * lim);
    FAIL() << "expected StepRejected";
  } catch (const StepRejected& e) {
    EXPECT_DOUBLE_EQ(e.admissible_dt(), lim);
  }
  EXPECT_THROW(step(u, f, g, 0.0), PreconditionError);
  GraphState bad = u;
  bad.u.pop_back();
  EXPECT_THROW(step(bad, f, g, 0.5 * lim), PreconditionError);
}

TEST(Solver, MaximumPrincipleEveryStep) {
  for (const auto& f : {Integrand::euclidean(2), Integrand::perturbed(2, 0.05)}) {
    const auto g = grid(2, 24);
    auto u = initial(InitialKind::trig, g, 1.0, 21);
    double hi = *std::max_element(u.u.begin(), u.u.end());
    double lo = *std::min_element(u.u.begin(), u.u.end());
    for (int s = 0; s < 10000; ++s) {
      u = step(u, f, g, 0.9 * cfl_limit(u, f, g));
      const double nhi = *std::max_element(u.u.begin(), u.u.end());
      const double nlo = *std::min_element(u.u.begin(), u.u.end());
      ASSERT_LE(nhi, hi + 1e-12) << f.name() << " step " << s;
      ASSERT_GE(nlo, lo - 1e-12) << f.name() << " step " << s;
      hi = nhi;
      lo = nlo;
    }
  }
}

TEST(Solver, ShiftEquivarianceIsExact) {
  const auto g = grid(2, 32);
  const auto f = Integrand::perturbed(2, 0.05);
  const auto u = initial(InitialKind::trig, g, 1.0, 2);
  GraphState v = u;
  const std::size_t sx = 5, sy = 11;
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t i = 0; i < 32; ++i) v.u[((j + sy) % 32) * 32 + (i + sx) % 32] = u.u[j * 32 + i];
  const double dt = 0.9 * cfl_limit(u, f, g);
  const auto a = step(u, f, g, dt);
  const auto b = step(v, f, g, dt);
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t i = 0; i < 32; ++i) ASSERT_EQ(b.u[((j + sy) % 32) * 32 + (i + sx) % 32], a.u[j * 32 + i]);
}

TEST(Solver, VerticalTranslationEquivariance) {
  const auto g = grid(2, 32);
  const auto f = Integrand::euclidean(2);
  const auto u = initial(InitialKind::trig, g, 1.0, 3);
  GraphState v = u;
  for (double& x : v.u) x += 0.75;
  FlowConfig fc{g, 0.05, 0.9, 1000};
  const auto a = run(fc, f, u).snapshots.back().state;
  const auto b = run(fc, f, v).snapshots.back().state;
  for (std::size_t c = 0; c < g.total(); ++c) EXPECT_NEAR(b.u[c], a.u[c] + 0.75, 1e-12);
}

TEST(Solver, LinearisedDecay) {
  const auto g = grid(1, 256);
  const auto u = initial(InitialKind::sine, g, 1e-3);
  FlowConfig fc{g, 1.0, 0.9, 1000000};
  const auto traj = run(fc, Integrand::euclidean(1), u);
  ASSERT_DOUBLE_EQ(traj.snapshots.back().state.t, 1.0);
  const double ratio = traj.snapshots.back().diag.max_u / 1e-3;
  EXPECT_NEAR(ratio / std::exp(-1.0), 1.0, 0.02);
}

TEST(Solver, SelfConvergenceIsSecondOrder) {
  const auto f = Integrand::euclidean(1);
  std::vector<std::vector<double>> sols;
  for (std::size_t cells : {64u, 128u, 256u}) {
    const auto g = grid(1, cells);
    FlowConfig fc{g, 0.5, 0.9, 1000000};
    sols.push_back(run(fc, f, initial(InitialKind::sine, g, 1.0)).snapshots.back().state.u);
  }
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < 64; ++i) e1 = std::max(e1, std::abs(sols[0][i] - sols[1][2 * i]));
  for (std::size_t i = 0; i < 128; ++i) e2 = std::max(e2, std::abs(sols[1][i] - sols[2][2 * i]));
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(Solver, RunSnapshotsAndZeroTime) {
  const auto g = grid(1, 32);
  const auto f = Integrand::euclidean(1);
  const auto u = initial(InitialKind::sawtooth, g);
  FlowConfig zero{g, 0.0, 0.9, 10};
  const auto t0 = run(zero, f, u);
  ASSERT_EQ(t0.snapshots.size(), 1u);
  EXPECT_EQ(t0.snapshots[0].state.u, u.u);

  FlowConfig fc{g, 0.3, 0.9, 10};
  const auto traj = run(fc, f, u);
  EXPECT_DOUBLE_EQ(traj.snapshots.back().state.t, 0.3);
  EXPECT_EQ(traj.snapshots.size(), 1 + (traj.steps + 9) / 10);
  EXPECT_GT(traj.dt0, 0.0);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    EXPECT_GT(traj.snapshots[i].state.t, traj.snapshots[i - 1].state.t);
}

TEST(Solver, GridValidation) {
  EXPECT_THROW((GridSpec{3, 16, 1.0}.validate()), PreconditionError);
  EXPECT_THROW((GridSpec{1, 2, 1.0}.validate()), PreconditionError);
  EXPECT_THROW((GridSpec{1, 16, -1.0}.validate()), PreconditionError);
  EXPECT_THROW((FlowConfig{grid(1, 16), 1.0, 1.5, 10}.validate()), PreconditionError);
}
