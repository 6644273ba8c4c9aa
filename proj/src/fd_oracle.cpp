#include <array>
#include <cmath>
#include <vector>

#include "anisoflow/errors.hpp"
#include "anisoflow/integrand.hpp"

namespace anisoflow {
namespace {

// Composition of central differences along e_{idx[0]}, ..., e_{idx[k-1]} with
// step h: sum over sign patterns s of (prod s) f(v + h sum s_i e_{idx_i}) / (2h)^k.
// Callers pass sorted indices so that every permutation reads the same points
// in the same order.
double composed_difference(const Integrand& f, const Covector& v, std::span<const std::size_t> idx,
                           double h) {
  const std::size_t k = idx.size();
  std::vector<double> p(v.coords().begin(), v.coords().end());
  double acc = 0.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::copy(v.coords().begin(), v.coords().end(), p.begin());
    double sign = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double s = (mask >> i) & 1u ? -1.0 : 1.0;
      sign *= s;
      p[idx[i]] += s * h;
    }
    acc += sign * f.value(p);
  }
  return acc / std::pow(2.0 * h, static_cast<double>(k));
}

double richardson(const Integrand& f, const Covector& v, std::span<const std::size_t> idx, double h) {
  const double coarse = composed_difference(f, v, idx, h);
  const double fine = composed_difference(f, v, idx, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

DerivativeForm fd_oracle(const Integrand& f, const Covector& v, int order, FdOptions opts) {
  const double r = v.norm();
  if (!(r >= kZeroFloor)) throw DomainError("fd_oracle at the zero covector");
  const double h = opts.rel_step * r;
  const std::size_t m = f.size();
  switch (order) {
    case 1: {
      Covector g(m);
      for (std::size_t a = 0; a < m; ++a) {
        const std::array<std::size_t, 1> idx{a};
        g[a] = richardson(f, v, idx, h);
      }
      return g;
    }
    case 2: {
      SymTensor2 t(m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
          const std::array<std::size_t, 2> idx{a, b};
          t(a, b) = richardson(f, v, idx, h);
        }
      return t;
    }
    case 3: {
      SymTensor3 t(m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b)
          for (std::size_t c = b; c < m; ++c) {
            const std::array<std::size_t, 3> idx{a, b, c};
            t(a, b, c) = richardson(f, v, idx, h);
          }
      return t;
    }
    default: throw PreconditionError("fd_oracle order must be 1, 2 or 3");
  }
}

}  // namespace anisoflow
