#pragma once

#include <cstddef>

// Per-cell formulas shared by every backend; the vector backends repeat the
// same operation order lane-wise.
namespace anisoflow::kernels {

inline std::size_t wrap_next(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }
inline std::size_t wrap_prev(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }

inline void euclid_cell_1d(double ux, double& a) {
  const double d = 1.0 + ux * ux;
  a = 1.0 - (ux * ux) / d;
}

inline void euclid_cell_2d(double ux, double uy, double& a11, double& a12, double& a22) {
  const double d = (1.0 + ux * ux) + uy * uy;
  a11 = 1.0 - (ux * ux) / d;
  a12 = -((ux * uy) / d);
  a22 = 1.0 - (uy * uy) / d;
}

// b is row-major 2 x 2
inline void quad_cell_1d(const double* b, double ux, double& a) {
  const double w0 = b[1] * ux - b[0];
  const double w1 = b[3] * ux - b[2];
  const double q = ux * w1 - w0;
  a = b[3] - (w1 * w1) / q;
}

// b is row-major 3 x 3
inline void quad_cell_2d(const double* b, double ux, double uy, double& a11, double& a12, double& a22) {
  const double w0 = (b[1] * ux - b[0]) + b[2] * uy;
  const double w1 = (b[4] * ux - b[3]) + b[5] * uy;
  const double w2 = (b[7] * ux - b[6]) + b[8] * uy;
  const double q = (ux * w1 - w0) + uy * w2;
  a11 = b[4] - (w1 * w1) / q;
  a12 = b[5] - (w1 * w2) / q;
  a22 = b[8] - (w2 * w2) / q;
}

}  // namespace anisoflow::kernels
