#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anisoflow/constants.hpp"
#include "anisoflow/solver.hpp"

namespace anisoflow {

enum class BarrierSign { minus, plus };

// Phi(u, t) = t^{-1/2} exp(-A (u -+ 2M)^2 / (4t)); solves Phi_t = A Phi''.
// Throws DomainError for t <= 0.
double phi_heat(double u, double t, double A, double M, BarrierSign sign = BarrierSign::minus);

// Right-hand side of the gradient estimate of `theorem` at height u and time
// t in (0, T']. For theorem 3, `x` is the position relative to the ball
// centre; nullopt marks a point outside the shrinking ball. Overflow of the
// growing term returns +infinity.
std::optional<double> bound(int theorem, const BarrierParams& params, double u, double t,
                            std::span<const double> x = {});

// The growing (barrier) term alone, before the max with the floor; nullopt
// outside the ball.
std::optional<double> barrier_term(int theorem, const BarrierParams& params, double u, double t,
                                   std::span<const double> x = {});

struct EstimateRow {
  double t = 0.0;
  std::size_t cell = 0;  // worst cell (smallest margin)
  double value = 0.0;    // F(Du - phi^0) at that cell
  double bound = 0.0;
  double margin = 0.0;   // bound - value
  double z_max = 0.0;    // max over cells of F(Du - phi^0) - barrier term
  std::size_t cells_checked = 0;
  double ball_cells = 0.0;  // theorem 3: analytic area of the ball in cells
};

struct EstimateReport {
  int theorem = 1;
  BarrierParams params;
  std::vector<EstimateRow> rows;
  double min_margin = 0.0;
  bool violated = false;
  double t_start = 0.0;  // first admissible time, 10 dt0
};

// Compares F(Du - phi^0) with the theorem bound at every cell of every
// snapshot with max(10 dt0, 0) < t <= T' (inside the shrinking ball centred
// at the grid centre for theorem 3). Throws HypothesisNotMet when the
// integrand violates a hypothesis of the theorem, PreconditionError when the
// trajectory exceeds the height bound M.
EstimateReport verify(const Trajectory& traj, const Integrand& f, int theorem, const BarrierParams& params,
                      const GridSpec& grid);

}  // namespace anisoflow
