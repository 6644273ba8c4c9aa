#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace anisoflow::kernels {

// Inner loops of the solver. Every backend performs the same floating-point
// operations in the same order (no FMA contraction), so results are
// bit-identical across backends.
//
// Fields are stored row-major with x fastest: u[j * nx + i]. One-dimensional
// grids use ny = 1 and null pointers for the y / mixed arrays.
struct KernelTable {
  const char* name;

  // ux[i] = (u[i+1] - u[i-1]) * inv2h along x, periodic.
  void (*diff_x)(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* ux);
  // uy[j, i] = (u[j+1, i] - u[j-1, i]) * inv2h along y, periodic.
  void (*diff_y)(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* uy);

  // Euclidean flow coefficients a = I - p p^T / (1 + |p|^2), p = (ux, uy).
  void (*euclid_coeff)(const double* ux, const double* uy, std::size_t count, double* a11, double* a12,
                       double* a22);
  // Ellipsoid coefficients a = B_s - w_s w_s^T / (nu^T B nu), w = B nu, nu = (-1, ux, uy);
  // `b` is the row-major (n+1) x (n+1) matrix, n = 1 when uy is null.
  void (*quad_coeff)(const double* b, const double* ux, const double* uy, std::size_t count, double* a11,
                     double* a12, double* a22);

  // max over cells of a11 + a22 + 2|a12| (or a11 alone in 1D).
  double (*rate_max)(const double* a11, const double* a12, const double* a22, std::size_t count);

  // out[i] = u[i] + c * a[i] * (u[i+1] - 2 u[i] + u[i-1]), periodic, c = dt / h^2.
  void (*apply_1d)(const double* u, const double* a, std::size_t nx, double c, double* out);
};

const KernelTable& scalar_table();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

// Backend in use. Picks AVX2 when the CPU supports it, unless the
// ANISOFLOW_KERNELS environment variable names another backend.
const KernelTable& active();

// Names of backends usable on this machine, scalar first.
std::vector<std::string_view> available();

// Switches the active backend; returns false if `name` is unavailable.
bool select(std::string_view name);

}  // namespace anisoflow::kernels
