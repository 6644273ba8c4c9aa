#include "anisoflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "anisoflow/errors.hpp"
#include "anisoflow/kernels.hpp"

namespace anisoflow {
namespace {

constexpr int kSellingMaxIter = 256;

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

// i + d modulo n for |d| <= n without a division.
std::size_t shift(std::size_t i, int d, std::size_t n) {
  const auto r = static_cast<std::ptrdiff_t>(i) + d;
  const auto m = static_cast<std::ptrdiff_t>(n);
  if (r < 0) return static_cast<std::size_t>(r + m >= 0 ? r + m : wrap(r, n));
  if (r >= m) return static_cast<std::size_t>(r - m < m ? r - m : wrap(r, n));
  return static_cast<std::size_t>(r);
}

void check_state(const GraphState& state, const GridSpec& grid) {
  if (state.u.size() != grid.total()) throw PreconditionError("state size does not match the grid");
}

void fill_coefficients(const GraphState& state, const Integrand& f, const GridSpec& grid, Coefficients& co,
                       std::array<std::vector<double>, 2>& grad) {
  const auto& k = kernels::active();
  const std::size_t total = grid.total();
  const std::size_t nx = grid.cells;
  const std::size_t ny = grid.n == 1 ? 1 : grid.cells;
  const double inv2h = 1.0 / (2.0 * grid.h());
  grad[0].resize(total);
  k.diff_x(state.u.data(), nx, ny, inv2h, grad[0].data());
  co.a11.resize(total);
  const double* uy = nullptr;
  if (grid.n == 2) {
    grad[1].resize(total);
    k.diff_y(state.u.data(), nx, ny, inv2h, grad[1].data());
    uy = grad[1].data();
    co.a12.resize(total);
    co.a22.resize(total);
  } else {
    grad[1].clear();
    co.a12.clear();
    co.a22.clear();
  }
  double* a12 = grid.n == 2 ? co.a12.data() : nullptr;
  double* a22 = grid.n == 2 ? co.a22.data() : nullptr;

  switch (f.family()) {
    case Family::euclidean:
      k.euclid_coeff(grad[0].data(), uy, total, co.a11.data(), a12, a22);
      return;
    case Family::ellipsoid:
      k.quad_coeff(f.matrix().data(), grad[0].data(), uy, total, co.a11.data(), a12, a22);
      return;
    default:
      break;
  }
  double p[2];
  double a[4];
  for (std::size_t c = 0; c < total; ++c) {
    p[0] = grad[0][c];
    if (grid.n == 2) p[1] = grad[1][c];
    f.graph_metric(std::span<const double>(p, grid.n), std::span<double>(a, grid.n * grid.n));
    co.a11[c] = a[0];
    if (grid.n == 2) {
      co.a12[c] = a[1];
      co.a22[c] = a[3];
    }
  }
}

double limit_from(const Coefficients& co, const GridSpec& grid) {
  const double rate = kernels::active().rate_max(co.a11.data(), grid.n == 2 ? co.a12.data() : nullptr,
                                                 grid.n == 2 ? co.a22.data() : nullptr, grid.total());
  const double h = grid.h();
  return h * h / (2.0 * rate);
}

void apply_2d(const GraphState& state, const Coefficients& co, const GridSpec& grid, double c,
              std::vector<double>& out) {
  const std::size_t n = grid.cells;
  const double* u = state.u.data();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = j * n + i;
      const StencilDecomposition sd = selling_decomposition(co.a11[idx], co.a12[idx], co.a22[idx]);
      const double u0 = u[idx];
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        if (sd.weight[k] == 0.0) continue;
        const int dx = sd.offset[k][0], dy = sd.offset[k][1];
        const double up = u[shift(j, dy, n) * n + shift(i, dx, n)];
        const double um = u[shift(j, -dy, n) * n + shift(i, -dx, n)];
        acc += sd.weight[k] * ((up + um) - 2.0 * u0);
      }
      out[idx] = u0 + c * acc;
    }
}

}  // namespace

void GridSpec::validate() const {
  if (n != 1 && n != 2) throw PreconditionError("grid dimension must be 1 or 2");
  if (cells < 8) throw PreconditionError("grid needs at least 8 cells per axis");
  if (!(L > 0.0) || !std::isfinite(L)) throw PreconditionError("grid period L must be positive");
}

void FlowConfig::validate() const {
  grid.validate();
  if (!(T >= 0.0) || !std::isfinite(T)) throw PreconditionError("end time T must be finite and >= 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw PreconditionError("cfl_safety must lie in (0, 1]");
  if (sample_every < 1) throw PreconditionError("sample_every must be >= 1");
}

std::vector<CellDifferentials> differentials(const GraphState& state, const GridSpec& grid) {
  grid.validate();
  check_state(state, grid);
  const std::size_t n = grid.cells;
  const double h = grid.h();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const auto& u = state.u;
  std::vector<CellDifferentials> out(grid.total());
  if (grid.n == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double up = u[wrap(static_cast<std::ptrdiff_t>(i) + 1, n)];
      const double um = u[wrap(static_cast<std::ptrdiff_t>(i) - 1, n)];
      auto& cd = out[i];
      cd.du = Covector{-1.0, (up - um) * inv2h};
      cd.d2u = SymTensor2(1);
      cd.d2u(0, 0) = ((up - 2.0 * u[i]) + um) * invh2;
    }
    return out;
  }
  auto at = [&](std::size_t i, std::size_t j, int di, int dj) {
    return u[wrap(static_cast<std::ptrdiff_t>(j) + dj, n) * n + wrap(static_cast<std::ptrdiff_t>(i) + di, n)];
  };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      auto& cd = out[j * n + i];
      const double u0 = at(i, j, 0, 0);
      cd.du = Covector{-1.0, (at(i, j, 1, 0) - at(i, j, -1, 0)) * inv2h, (at(i, j, 0, 1) - at(i, j, 0, -1)) * inv2h};
      cd.d2u = SymTensor2(2);
      cd.d2u(0, 0) = ((at(i, j, 1, 0) - 2.0 * u0) + at(i, j, -1, 0)) * invh2;
      cd.d2u(1, 1) = ((at(i, j, 0, 1) - 2.0 * u0) + at(i, j, 0, -1)) * invh2;
      cd.d2u(0, 1) =
          ((at(i, j, 1, 1) - at(i, j, 1, -1)) - (at(i, j, -1, 1) - at(i, j, -1, -1))) * (0.25 * invh2);
    }
  return out;
}

std::array<std::vector<double>, 2> gradient_field(const GraphState& state, const GridSpec& grid) {
  grid.validate();
  check_state(state, grid);
  const auto& k = kernels::active();
  const std::size_t nx = grid.cells;
  const std::size_t ny = grid.n == 1 ? 1 : grid.cells;
  const double inv2h = 1.0 / (2.0 * grid.h());
  std::array<std::vector<double>, 2> g;
  g[0].resize(grid.total());
  k.diff_x(state.u.data(), nx, ny, inv2h, g[0].data());
  if (grid.n == 2) {
    g[1].resize(grid.total());
    k.diff_y(state.u.data(), nx, ny, inv2h, g[1].data());
  }
  return g;
}

Coefficients flow_coefficients(const GraphState& state, const Integrand& f, const GridSpec& grid) {
  grid.validate();
  check_state(state, grid);
  if (f.dim() != grid.n) throw PreconditionError("integrand dimension does not match the grid");
  Coefficients co;
  std::array<std::vector<double>, 2> grad;
  fill_coefficients(state, f, grid, co, grad);
  return co;
}

double cfl_limit(const GraphState& state, const Integrand& f, const GridSpec& grid) {
  return limit_from(flow_coefficients(state, f, grid), grid);
}

StencilDecomposition selling_decomposition(double a11, double a12, double a22) {
  using V = std::array<long, 2>;
  auto form = [&](const V& x, const V& y) {
    return (a11 * static_cast<double>(x[0] * y[0]) + a22 * static_cast<double>(x[1] * y[1])) +
           a12 * static_cast<double>(x[0] * y[1] + x[1] * y[0]);
  };
  // diagonally dominant cases end after at most one reduction; these
  // shortcuts return exactly what the loop below would
  if (a12 <= 0.0 && a11 + a12 >= 0.0 && a22 + a12 >= 0.0)
    return StencilDecomposition{{a22 + a12, a11 + a12, -a12}, {{{0, 1}, {-1, 0}, {1, -1}}}};
  if (a12 > 0.0 && a11 - a12 >= 0.0 && a22 - a12 >= 0.0)
    return StencilDecomposition{{a22 - a12, a11 - a12, a12}, {{{0, -1}, {-1, 0}, {1, 1}}}};
  std::array<V, 3> b{V{1, 0}, V{0, 1}, V{-1, -1}};
  for (int it = 0; it < kSellingMaxIter; ++it) {
    bool obtuse = true;
    for (int i = 0; i < 3 && obtuse; ++i)
      for (int j = i + 1; j < 3; ++j) {
        if (form(b[i], b[j]) > 0.0) {
          const int k = 3 - i - j;
          const V bi = b[i];
          b[i] = V{-bi[0], -bi[1]};
          b[k] = V{bi[0] - b[j][0], bi[1] - b[j][1]};
          obtuse = false;
          break;
        }
      }
    if (obtuse) {
      StencilDecomposition sd{};
      for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        sd.weight[k] = -form(b[i], b[j]);
        sd.offset[k] = {static_cast<int>(-b[k][1]), static_cast<int>(b[k][0])};
      }
      return sd;
    }
  }
  std::ostringstream os;
  os << "Selling decomposition did not terminate for a = [" << a11 << ", " << a12 << "; " << a12 << ", " << a22
     << "] (matrix not positive definite)";
  throw BlowUp(os.str(), std::numeric_limits<double>::quiet_NaN());
}

GraphState step(const GraphState& state, const Integrand& f, const GridSpec& grid, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  grid.validate();
  check_state(state, grid);
  if (f.dim() != grid.n) throw PreconditionError("integrand dimension does not match the grid");
  Coefficients co;
  std::array<std::vector<double>, 2> grad;
  fill_coefficients(state, f, grid, co, grad);
  const double limit = limit_from(co, grid);
  if (dt > limit) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the CFL limit " << limit;
    throw StepRejected(os.str(), limit);
  }
  const double h = grid.h();
  const double c = dt / (h * h);
  GraphState next;
  next.u.resize(state.u.size());
  next.t = state.t + dt;
  if (grid.n == 1) kernels::active().apply_1d(state.u.data(), co.a11.data(), grid.cells, c, next.u.data());
  else apply_2d(state, co, grid, c, next.u);
  return next;
}

Diagnostics diagnose(const GraphState& state, const Integrand& f, const GridSpec& grid) {
  Diagnostics d;
  const auto [lo, hi] = std::minmax_element(state.u.begin(), state.u.end());
  d.min_u = *lo;
  d.max_u = *hi;
  const auto g = gradient_field(state, grid);
  double nu[3] = {-1.0, 0.0, 0.0};
  for (std::size_t c = 0; c < grid.total(); ++c) {
    nu[1] = g[0][c];
    if (grid.n == 2) nu[2] = g[1][c];
    d.max_F = std::max(d.max_F, f.value(std::span<const double>(nu, grid.n + 1)));
  }
  return d;
}

Trajectory run(const FlowConfig& config, const Integrand& f, GraphState initial) {
  config.validate();
  const GridSpec& grid = config.grid;
  check_state(initial, grid);
  if (f.dim() != grid.n) throw PreconditionError("integrand dimension does not match the grid");
  for (double v : initial.u)
    if (!std::isfinite(v)) throw PreconditionError("initial data must be finite");

  Trajectory traj;
  initial.t = 0.0;
  traj.snapshots.push_back(Snapshot{initial, diagnose(initial, f, grid)});
  if (config.T == 0.0) return traj;

  const double h = grid.h();
  GraphState cur = std::move(initial);
  GraphState next;
  next.u.resize(cur.u.size());
  Coefficients co;
  std::array<std::vector<double>, 2> grad;
  bool done = false;
  while (!done) {
    fill_coefficients(cur, f, grid, co, grad);
    double dt = config.cfl_safety * limit_from(co, grid);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      std::ostringstream os;
      os << "flow coefficients became degenerate at t = " << cur.t;
      throw BlowUp(os.str(), cur.t);
    }
    double t_next = cur.t + dt;
    if (t_next >= config.T) {
      dt = config.T - cur.t;
      t_next = config.T;
      done = true;
    }
    const double c = dt / (h * h);
    if (grid.n == 1) kernels::active().apply_1d(cur.u.data(), co.a11.data(), grid.cells, c, next.u.data());
    else apply_2d(cur, co, grid, c, next.u);
    next.t = t_next;
    for (double v : next.u)
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite height at t = " << next.t;
        throw BlowUp(os.str(), next.t);
      }
    std::swap(cur, next);
    if (traj.steps == 0) traj.dt0 = dt;
    ++traj.steps;
    if (done || traj.steps % static_cast<std::size_t>(config.sample_every) == 0) {
      Diagnostics d = diagnose(cur, f, grid);
      d.dt = dt;
      traj.snapshots.push_back(Snapshot{cur, d});
    }
  }
  return traj;
}

}  // namespace anisoflow
