#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "anisoflow/integrand.hpp"
#include "anisoflow/tensor.hpp"

namespace anisoflow {

// Periodic grid with `cells` cells of width h = L / cells on each of n axes.
struct GridSpec {
  std::size_t n = 1;  // 1 or 2
  std::size_t cells = 64;
  double L = 6.283185307179586;

  double h() const { return L / static_cast<double>(cells); }
  std::size_t total() const { return n == 1 ? cells : cells * cells; }
  void validate() const;
};

// Height field u on the grid, row-major with x fastest, at time t.
struct GraphState {
  std::vector<double> u;
  double t = 0.0;
};

struct CellDifferentials {
  Covector du;     // (-1, u_1, ..., u_n) = Du - phi^0
  SymTensor2 d2u;  // spatial indices 0..n-1
};

// Central differences with periodic wrap; mixed terms use the 4-point cross.
std::vector<CellDifferentials> differentials(const GraphState& state, const GridSpec& grid);

// Central-difference gradient fields (x and, for n = 2, y components).
std::array<std::vector<double>, 2> gradient_field(const GraphState& state, const GridSpec& grid);

// Per-cell flow coefficients a^{ij} = G(phi^i, phi^j) at Du - phi^0.
struct Coefficients {
  std::vector<double> a11, a12, a22;  // a12, a22 empty in 1D
};
Coefficients flow_coefficients(const GraphState& state, const Integrand& f, const GridSpec& grid);

// Largest dt for which the explicit update is monotone:
// 1 / (2 max_cells (sum_i a^{ii} + sum_{i != j} |a^{ij}|) / h^2).
double cfl_limit(const GraphState& state, const Integrand& f, const GridSpec& grid);

// Selling decomposition of a 2 x 2 positive definite matrix into three
// non-negative weights along integer offsets: A = sum_k w_k e_k e_k^T.
struct StencilDecomposition {
  std::array<double, 3> weight;
  std::array<std::array<int, 2>, 3> offset;
};
StencilDecomposition selling_decomposition(double a11, double a12, double a22);

// One explicit Euler step of u_t = a^{ij} u_ij. Throws StepRejected when dt
// exceeds cfl_limit, PreconditionError when dt <= 0.
GraphState step(const GraphState& state, const Integrand& f, const GridSpec& grid, double dt);

struct FlowConfig {
  GridSpec grid;
  double T = 1.0;
  double cfl_safety = 0.9;
  int sample_every = 50;

  void validate() const;
};

struct Diagnostics {
  double max_u = 0.0;
  double min_u = 0.0;
  double max_F = 0.0;  // max over cells of F(Du - phi^0)
  double dt = 0.0;     // step that produced the snapshot; 0 at t = 0
};

struct Snapshot {
  GraphState state;
  Diagnostics diag;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  double dt0 = 0.0;  // first time step
  std::size_t steps = 0;
};

Diagnostics diagnose(const GraphState& state, const Integrand& f, const GridSpec& grid);

// Steps from the initial state to time T with dt = cfl_safety * cfl_limit,
// the last step clipped to land on T. Snapshots every sample_every steps and
// at the end. Throws BlowUp when the field stops being finite.
Trajectory run(const FlowConfig& config, const Integrand& f, GraphState initial);

}  // namespace anisoflow
