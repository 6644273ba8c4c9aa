#include <immintrin.h>

#include <cmath>

#include "anisoflow/kernels.hpp"
#include "kernels_common.hpp"

namespace anisoflow::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d negate(__m256d x) { return _mm256_xor_pd(x, _mm256_set1_pd(-0.0)); }
inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

void diff_x(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* ux) {
  const __m256d s = _mm256_set1_pd(inv2h);
  for (std::size_t j = 0; j < ny; ++j) {
    const double* row = u + j * nx;
    double* out = ux + j * nx;
    out[0] = (row[wrap_next(0, nx)] - row[nx - 1]) * inv2h;
    std::size_t i = 1;
    for (; i + kLanes + 1 <= nx; i += kLanes) {
      const __m256d r = _mm256_loadu_pd(row + i + 1);
      const __m256d l = _mm256_loadu_pd(row + i - 1);
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(r, l), s));
    }
    for (; i < nx; ++i) out[i] = (row[wrap_next(i, nx)] - row[i - 1]) * inv2h;
  }
}

void diff_y(const double* u, std::size_t nx, std::size_t ny, double inv2h, double* uy) {
  const __m256d s = _mm256_set1_pd(inv2h);
  for (std::size_t j = 0; j < ny; ++j) {
    const double* up = u + wrap_next(j, ny) * nx;
    const double* dn = u + wrap_prev(j, ny) * nx;
    double* out = uy + j * nx;
    std::size_t i = 0;
    for (; i + kLanes <= nx; i += kLanes)
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(dn + i)), s));
    for (; i < nx; ++i) out[i] = (up[i] - dn[i]) * inv2h;
  }
}

void euclid_coeff(const double* ux, const double* uy, std::size_t count, double* a11, double* a12, double* a22) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t c = 0;
  if (uy == nullptr) {
    for (; c + kLanes <= count; c += kLanes) {
      const __m256d x = _mm256_loadu_pd(ux + c);
      const __m256d xx = _mm256_mul_pd(x, x);
      const __m256d d = _mm256_add_pd(one, xx);
      _mm256_storeu_pd(a11 + c, _mm256_sub_pd(one, _mm256_div_pd(xx, d)));
    }
    for (; c < count; ++c) euclid_cell_1d(ux[c], a11[c]);
    return;
  }
  for (; c + kLanes <= count; c += kLanes) {
    const __m256d x = _mm256_loadu_pd(ux + c);
    const __m256d y = _mm256_loadu_pd(uy + c);
    const __m256d xx = _mm256_mul_pd(x, x);
    const __m256d yy = _mm256_mul_pd(y, y);
    const __m256d d = _mm256_add_pd(_mm256_add_pd(one, xx), yy);
    _mm256_storeu_pd(a11 + c, _mm256_sub_pd(one, _mm256_div_pd(xx, d)));
    _mm256_storeu_pd(a12 + c, negate(_mm256_div_pd(_mm256_mul_pd(x, y), d)));
    _mm256_storeu_pd(a22 + c, _mm256_sub_pd(one, _mm256_div_pd(yy, d)));
  }
  for (; c < count; ++c) euclid_cell_2d(ux[c], uy[c], a11[c], a12[c], a22[c]);
}

void quad_coeff(const double* b, const double* ux, const double* uy, std::size_t count, double* a11, double* a12,
                double* a22) {
  std::size_t c = 0;
  if (uy == nullptr) {
    const __m256d b0 = _mm256_set1_pd(b[0]), b1 = _mm256_set1_pd(b[1]);
    const __m256d b2 = _mm256_set1_pd(b[2]), b3 = _mm256_set1_pd(b[3]);
    for (; c + kLanes <= count; c += kLanes) {
      const __m256d x = _mm256_loadu_pd(ux + c);
      const __m256d w0 = _mm256_sub_pd(_mm256_mul_pd(b1, x), b0);
      const __m256d w1 = _mm256_sub_pd(_mm256_mul_pd(b3, x), b2);
      const __m256d q = _mm256_sub_pd(_mm256_mul_pd(x, w1), w0);
      _mm256_storeu_pd(a11 + c, _mm256_sub_pd(b3, _mm256_div_pd(_mm256_mul_pd(w1, w1), q)));
    }
    for (; c < count; ++c) quad_cell_1d(b, ux[c], a11[c]);
    return;
  }
  __m256d bb[9];
  for (int k = 0; k < 9; ++k) bb[k] = _mm256_set1_pd(b[k]);
  for (; c + kLanes <= count; c += kLanes) {
    const __m256d x = _mm256_loadu_pd(ux + c);
    const __m256d y = _mm256_loadu_pd(uy + c);
    const __m256d w0 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(bb[1], x), bb[0]), _mm256_mul_pd(bb[2], y));
    const __m256d w1 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(bb[4], x), bb[3]), _mm256_mul_pd(bb[5], y));
    const __m256d w2 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(bb[7], x), bb[6]), _mm256_mul_pd(bb[8], y));
    const __m256d q = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(x, w1), w0), _mm256_mul_pd(y, w2));
    _mm256_storeu_pd(a11 + c, _mm256_sub_pd(bb[4], _mm256_div_pd(_mm256_mul_pd(w1, w1), q)));
    _mm256_storeu_pd(a12 + c, _mm256_sub_pd(bb[5], _mm256_div_pd(_mm256_mul_pd(w1, w2), q)));
    _mm256_storeu_pd(a22 + c, _mm256_sub_pd(bb[8], _mm256_div_pd(_mm256_mul_pd(w2, w2), q)));
  }
  for (; c < count; ++c) quad_cell_2d(b, ux[c], uy[c], a11[c], a12[c], a22[c]);
}

double hmax(__m256d v) {
  alignas(32) double lane[kLanes];
  _mm256_store_pd(lane, v);
  double m = lane[0];
  for (std::size_t k = 1; k < kLanes; ++k) m = lane[k] > m ? lane[k] : m;
  return m;
}

double rate_max(const double* a11, const double* a12, const double* a22, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t c = 0;
  double m = 0.0;
  if (a12 == nullptr) {
    for (; c + kLanes <= count; c += kLanes) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a11 + c));
    m = hmax(acc);
    for (; c < count; ++c) m = a11[c] > m ? a11[c] : m;
    return m;
  }
  const __m256d two = _mm256_set1_pd(2.0);
  for (; c + kLanes <= count; c += kLanes) {
    const __m256d tr = _mm256_add_pd(_mm256_loadu_pd(a11 + c), _mm256_loadu_pd(a22 + c));
    const __m256d r = _mm256_add_pd(tr, _mm256_mul_pd(two, abs_pd(_mm256_loadu_pd(a12 + c))));
    acc = _mm256_max_pd(acc, r);
  }
  m = hmax(acc);
  for (; c < count; ++c) {
    const double r = (a11[c] + a22[c]) + 2.0 * std::fabs(a12[c]);
    m = r > m ? r : m;
  }
  return m;
}

void apply_1d(const double* u, const double* a, std::size_t nx, double c, double* out) {
  auto cell = [&](std::size_t i) {
    const double lap = (u[wrap_next(i, nx)] - 2.0 * u[i]) + u[wrap_prev(i, nx)];
    out[i] = u[i] + (c * a[i]) * lap;
  };
  cell(0);
  const __m256d cc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + kLanes + 1 <= nx; i += kLanes) {
    const __m256d mid = _mm256_loadu_pd(u + i);
    const __m256d lap = _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(u + i + 1), _mm256_mul_pd(two, mid)),
                                      _mm256_loadu_pd(u + i - 1));
    const __m256d w = _mm256_mul_pd(cc, _mm256_loadu_pd(a + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(mid, _mm256_mul_pd(w, lap)));
  }
  for (; i < nx; ++i) cell(i);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", diff_x, diff_y, euclid_coeff, quad_coeff, rate_max, apply_1d};
  return &table;
}

}  // namespace anisoflow::kernels
