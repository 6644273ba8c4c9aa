#include "anisoflow/estimates.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "anisoflow/errors.hpp"
#include "anisoflow/structure.hpp"

namespace anisoflow {
namespace {

constexpr double kMaxLog = 709.0;  // exp overflows beyond this
constexpr double kTimeSlack = 1e-12;
constexpr double kHeightSlack = 1e-12;  // rounding in the maximum principle
constexpr double kVerifyStartSteps = 10.0;

double exp_or_inf(double log_value) {
  return log_value > kMaxLog ? std::numeric_limits<double>::infinity() : std::exp(log_value);
}

void check_time(const BarrierParams& p, double t) {
  if (!(t > 0.0)) throw DomainError("barrier evaluated at t <= 0");
  if (t > p.Tprime * (1.0 + kTimeSlack)) {
    std::ostringstream os;
    os << "time " << t << " exceeds T' = " << p.Tprime;
    throw PreconditionError(os.str());
  }
}

std::optional<double> log_barrier(int theorem, const BarrierParams& p, double u, double t,
                                  std::span<const double> x) {
  check_time(p, t);
  const double d = std::abs(u) - 2.0 * p.M;
  switch (theorem) {
    case 1:
      return 0.5 * p.q * std::log(t) + p.A * p.q * d * d / (4.0 * t);
    case 2:
      return std::log(t) + p.A * d * d / (2.0 * t);
    case 3: {
      if (!p.interior) throw PreconditionError("theorem 3 bound needs interior parameters");
      const InteriorParams& ip = *p.interior;
      double x2 = 0.0;
      for (double xi : x) x2 += xi * xi;
      const double eta = ip.R * ip.R - 2.0 * ip.k * t - x2;
      if (!(eta > 0.0)) return std::nullopt;
      return 0.5 * p.q * std::log(t) + p.A * p.q * d * d / (4.0 * t) - ip.r * std::log(eta);
    }
    default:
      throw PreconditionError("theorem must be 1, 2 or 3");
  }
}

void check_hypotheses(const Integrand& f, int theorem, const BarrierParams& p, const GridSpec& grid) {
  if (p.theorem != theorem) throw PreconditionError("parameters were assembled for a different theorem");
  const double n = static_cast<double>(f.dim());
  if (theorem != 1 && !satisfies_symmetry(f))
    throw HypothesisNotMet("symmetry condition F(p + phi^0) = F(p - phi^0)", "integrand is not even in phi^0");
  if (theorem != 2 && p.c1) {
    const double limit = (theorem == 1 ? 4.0 : 2.0) / std::sqrt(n);
    if (!(*p.c1 * *p.c1 < limit)) {
      std::ostringstream os;
      os << "C1^2 = " << *p.c1 * *p.c1 << " >= " << limit;
      throw HypothesisNotMet("smallness of third derivatives condition", os.str());
    }
  }
  if (theorem == 3) {
    if (grid.n < 2) throw HypothesisNotMet("dimension n > 1", "the interior estimate needs n > 1");
    if (!p.interior) throw PreconditionError("theorem 3 needs interior parameters");
  }
}

}  // namespace

double phi_heat(double u, double t, double A, double M, BarrierSign sign) {
  if (!(t > 0.0)) throw DomainError("phi_heat requires t > 0");
  if (!(A > 0.0)) throw PreconditionError("phi_heat requires A > 0");
  const double d = sign == BarrierSign::minus ? u - 2.0 * M : u + 2.0 * M;
  return std::exp(-A * d * d / (4.0 * t)) / std::sqrt(t);
}

std::optional<double> barrier_term(int theorem, const BarrierParams& params, double u, double t,
                                   std::span<const double> x) {
  const auto lg = log_barrier(theorem, params, u, t, x);
  if (!lg) return std::nullopt;
  return exp_or_inf(*lg);
}

std::optional<double> bound(int theorem, const BarrierParams& params, double u, double t,
                            std::span<const double> x) {
  const auto b = barrier_term(theorem, params, u, t, x);
  if (!b) return std::nullopt;
  return *b > params.floor ? *b : params.floor;
}

EstimateReport verify(const Trajectory& traj, const Integrand& f, int theorem, const BarrierParams& params,
                      const GridSpec& grid) {
  grid.validate();
  if (f.dim() != grid.n) throw PreconditionError("integrand dimension does not match the grid");
  check_hypotheses(f, theorem, params, grid);
  for (const auto& s : traj.snapshots) {
    if (s.diag.max_u > params.M * (1.0 + kHeightSlack) || -s.diag.min_u > params.M * (1.0 + kHeightSlack)) {
      std::ostringstream os;
      os << "trajectory exceeds the height bound M = " << params.M << " at t = " << s.state.t;
      throw PreconditionError(os.str());
    }
  }

  EstimateReport rep;
  rep.theorem = theorem;
  rep.params = params;
  rep.t_start = kVerifyStartSteps * traj.dt0;
  rep.min_margin = std::numeric_limits<double>::infinity();

  const std::size_t cells = grid.cells;
  const double h = grid.h();
  const double centre = 0.5 * grid.L;
  double nu[3] = {-1.0, 0.0, 0.0};
  double x[2] = {0.0, 0.0};

  for (const auto& snap : traj.snapshots) {
    const double t = snap.state.t;
    if (!(t > 0.0) || t < rep.t_start || t > params.Tprime * (1.0 + kTimeSlack)) continue;
    const auto grad = gradient_field(snap.state, grid);
    EstimateRow row;
    row.t = t;
    row.margin = std::numeric_limits<double>::infinity();
    row.z_max = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < grid.total(); ++c) {
      std::span<const double> xs;
      if (theorem == 3) {
        x[0] = h * static_cast<double>(c % cells) - centre;
        x[1] = h * static_cast<double>(c / cells) - centre;
        xs = std::span<const double>(x, 2);
      }
      const auto growth = barrier_term(theorem, params, snap.state.u[c], t, xs);
      if (!growth) continue;
      nu[1] = grad[0][c];
      if (grid.n == 2) nu[2] = grad[1][c];
      const double value = f.value(std::span<const double>(nu, grid.n + 1));
      const double b = *growth > params.floor ? *growth : params.floor;
      const double margin = b - value;
      ++row.cells_checked;
      if (margin < row.margin) {
        row.margin = margin;
        row.cell = c;
        row.value = value;
        row.bound = b;
      }
      const double z = value - *growth;
      if (z > row.z_max) row.z_max = z;
    }
    if (theorem == 3) {
      const auto& ip = *params.interior;
      const double rho2 = ip.R * ip.R - 2.0 * ip.k * t;
      row.ball_cells = rho2 > 0.0 ? std::acos(-1.0) * rho2 / (h * h) : 0.0;
    }
    if (row.cells_checked == 0) continue;
    rep.min_margin = std::min(rep.min_margin, row.margin);
    rep.rows.push_back(row);
  }
  rep.violated = rep.min_margin < 0.0;
  return rep;
}

}  // namespace anisoflow
