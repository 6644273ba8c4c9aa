#include "anisoflow/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "anisoflow/errors.hpp"

namespace anisoflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// atan(b sin x / (1 - b cos x)) / asin(b): a 2 pi periodic sawtooth with
// sup norm 1 whose flank steepens as b -> 1.
double sawtooth(double x, double b) {
  return std::atan(b * std::sin(x) / (1.0 - b * std::cos(x))) / std::asin(b);
}

double min_image(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

void InitialSpec::validate() const {
  if (!std::isfinite(amplitude)) throw PreconditionError("initial amplitude must be finite");
  if (kind == InitialKind::sawtooth && !(beta > 0.0 && beta < 1.0))
    throw PreconditionError("sawtooth beta must lie in (0, 1)");
  if (kind == InitialKind::trig && modes < 1) throw PreconditionError("trig modes must be >= 1");
  if (kind == InitialKind::sine && wavenumber < 1) throw PreconditionError("sine wavenumber must be >= 1");
  if (width < 0.0) throw PreconditionError("bump width must be >= 0");
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "sawtooth") return InitialKind::sawtooth;
  if (name == "trig") return InitialKind::trig;
  if (name == "bump") return InitialKind::bump;
  if (name == "sine") return InitialKind::sine;
  if (name == "constant") return InitialKind::constant;
  throw ConfigError("unknown initial data kind '" + name + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::sawtooth: return "sawtooth";
    case InitialKind::trig: return "trig";
    case InitialKind::bump: return "bump";
    case InitialKind::sine: return "sine";
    case InitialKind::constant: return "constant";
  }
  return "unknown";
}

GraphState make_initial(const InitialSpec& spec, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  const std::size_t n = grid.cells;
  const std::size_t ny = grid.n == 1 ? 1 : n;
  const double h = grid.h();
  const double k0 = kTwoPi / grid.L;
  GraphState s;
  s.u.assign(grid.total(), 0.0);
  const double a = spec.amplitude;

  switch (spec.kind) {
    case InitialKind::constant:
      std::fill(s.u.begin(), s.u.end(), a);
      break;
    case InitialKind::sine:
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          const double kx = k0 * spec.wavenumber;
          double v = std::sin(kx * h * static_cast<double>(i));
          if (grid.n == 2) v *= std::sin(kx * h * static_cast<double>(j));
          s.u[j * n + i] = a * v;
        }
      break;
    case InitialKind::sawtooth:
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          double v = sawtooth(k0 * h * static_cast<double>(i), spec.beta);
          if (grid.n == 2) v = 0.5 * (v + sawtooth(k0 * h * static_cast<double>(j), spec.beta));
          s.u[j * n + i] = a * v;
        }
      break;
    case InitialKind::bump: {
      const double w = spec.width > 0.0 ? spec.width : grid.L / 16.0;
      const double c = 0.5 * grid.L;
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          const double dx = min_image(h * static_cast<double>(i) - c, grid.L);
          const double dy = grid.n == 2 ? min_image(h * static_cast<double>(j) - c, grid.L) : 0.0;
          s.u[j * n + i] = a * std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        }
      break;
    }
    case InitialKind::trig: {
      // coefficients ~ N(0, 1) / |k|^2, phases uniform; rescaled afterwards
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> phase(0.0, kTwoPi);
      const int m = spec.modes;
      const int ky_max = grid.n == 2 ? m : 0;
      for (int ky = -ky_max; ky <= ky_max; ++ky)
        for (int kx = 0; kx <= m; ++kx) {
          if (kx == 0 && ky <= 0) continue;
          const double c = normal(rng) / static_cast<double>(kx * kx + ky * ky);
          const double ph = phase(rng);
          for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < n; ++i) {
              const double arg = k0 * h * (kx * static_cast<double>(i) + ky * static_cast<double>(j)) + ph;
              s.u[j * n + i] += c * std::cos(arg);
            }
        }
      double sup = 0.0;
      for (double v : s.u) sup = std::max(sup, std::abs(v));
      if (sup > 0.0)
        for (double& v : s.u) v *= a / sup;
      break;
    }
  }
  return s;
}

}  // namespace anisoflow
