#include <cmath>

#include "anisoflow/kernels.hpp"
#include "kernels_common.hpp"

namespace anisoflow::kernels {
namespace {

void diff_x(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* ux) {
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = u + j * nx;
    double* out = ux + j * nx;
    for (std::size_t i = 0; i < nx; ++i) out[i] = (row[wrap_next(i, nx)] - row[wrap_prev(i, nx)]) * inv2h;
  }
}

void diff_y(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* uy) {
  for (std::size_t j = 0; j < ny; ++j) {
    const double* up = u + wrap_next(j, ny) * nx;
    const double* dn = u + wrap_prev(j, ny) * nx;
    double* out = uy + j * nx;
    for (std::size_t i = 0; i < nx; ++i) out[i] = (up[i] - dn[i]) * inv2h;
  }
}

void euclid_coeff(const double* ux, const double* uy, std::size_t count, double* a11, double* a12, double* a22) {
  if (uy == nullptr) {
    for (std::size_t c = 0; c < count; ++c) euclid_cell_1d(ux[c], a11[c]);
    return;
  }
  for (std::size_t c = 0; c < count; ++c) euclid_cell_2d(ux[c], uy[c], a11[c], a12[c], a22[c]);
}

void quad_coeff(const double* b, const double* ux, const double* uy, std::size_t count, double* a11, double* a12,
                double* a22) {
  if (uy == nullptr) {
    for (std::size_t c = 0; c < count; ++c) quad_cell_1d(b, ux[c], a11[c]);
    return;
  }
  for (std::size_t c = 0; c < count; ++c) quad_cell_2d(b, ux[c], uy[c], a11[c], a12[c], a22[c]);
}

double rate_max(const double* a11, const double* a12, const double* a22, std::size_t count) {
  double m = 0.0;
  if (a12 == nullptr) {
    for (std::size_t c = 0; c < count; ++c) m = a11[c] > m ? a11[c] : m;
    return m;
  }
  for (std::size_t c = 0; c < count; ++c) {
    const double r = (a11[c] + a22[c]) + 2.0 * std::fabs(a12[c]);
    m = r > m ? r : m;
  }
  return m;
}

void apply_1d(const double* u, const double* a, std::size_t nx, double c, double* out) {
  for (std::size_t i = 0; i < nx; ++i) {
    const double lap = (u[wrap_next(i, nx)] - 2.0 * u[i]) + u[wrap_prev(i, nx)];
    out[i] = u[i] + (c * a[i]) * lap;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", diff_x, diff_y, euclid_coeff, quad_coeff, rate_max, apply_1d};
  return table;
}

}  // namespace anisoflow::kernels
