#include "anisoflow/integrand.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <array>
#include <cmath>
#include <sstream>

#include "anisoflow/errors.hpp"

namespace anisoflow {
namespace {

inline double kron(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

double sum_fourth(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += (x * x) * (x * x);
  return s;
}

// Adds scale * D^k|v| (k = order) into the dense output.
void add_norm_derivative(std::span<const double> v, double r, int order, double scale,
                         std::span<double> out) {
  const std::size_t m = v.size();
  if (order == 1) {
    for (std::size_t a = 0; a < m; ++a) out[a] += scale * v[a] / r;
    return;
  }
  const double r3 = r * r * r;
  if (order == 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        out[a * m + b] += scale * (kron(a, b) / r - v[a] * v[b] / r3);
    return;
  }
  const double r5 = r3 * r * r;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const double t = -(kron(a, b) * v[c] + kron(a, c) * v[b] + kron(b, c) * v[a]) / r3 +
                         3.0 * v[a] * v[b] * v[c] / r5;
        out[(a * m + b) * m + c] += scale * t;
      }
}

// Adds scale * D^k (sum_i v_i^4 / |v|^3).
void add_quartic_derivative(std::span<const double> v, double r, int order, double scale,
                            std::span<double> out) {
  const std::size_t m = v.size();
  const double s = sum_fourth(v);
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double r5 = r3 * r2;
  if (order == 1) {
    for (std::size_t a = 0; a < m; ++a) {
      const double va3 = v[a] * v[a] * v[a];
      out[a] += scale * (4.0 * va3 / r3 - 3.0 * s * v[a] / r5);
    }
    return;
  }
  const double r7 = r5 * r2;
  if (order == 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const double va = v[a], vb = v[b];
        const double t = 12.0 * va * va * kron(a, b) / r3 -
                         12.0 * (va * va * va * vb + va * vb * vb * vb) / r5 -
                         3.0 * s * kron(a, b) / r5 + 15.0 * s * va * vb / r7;
        out[a * m + b] += scale * t;
      }
    return;
  }
  const double r9 = r7 * r2;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const double va = v[a], vb = v[b], vc = v[c];
        const double dab = kron(a, b), dac = kron(a, c), dbc = kron(b, c);
        const double abc = dab * dbc;
        double t = 24.0 * va * abc / r3;
        t -= 36.0 * (dab * va * va * vc + dac * va * va * vb + dbc * vb * vb * va) / r5;
        t -= 12.0 * (va * va * va * dbc + vb * vb * vb * dac + vc * vc * vc * dab) / r5;
        t += 60.0 * (va * va * va * vb * vc + va * vb * vb * vb * vc + va * vb * vc * vc * vc) / r7;
        t += 15.0 * s * (dab * vc + dac * vb + dbc * va) / r7;
        t -= 105.0 * s * va * vb * vc / r9;
        out[(a * m + b) * m + c] += scale * t;
      }
}

// Adds scale * D^k (v_0^3 / |v|^2).
void add_odd_derivative(std::span<const double> v, double r, int order, double scale,
                        std::span<double> out) {
  const std::size_t m = v.size();
  const double w = v[0];
  const double r2 = r * r;
  const double r4 = r2 * r2;
  if (order == 1) {
    for (std::size_t a = 0; a < m; ++a)
      out[a] += scale * (3.0 * w * w * kron(a, 0) / r2 - 2.0 * w * w * w * v[a] / r4);
    return;
  }
  const double r6 = r4 * r2;
  if (order == 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const double a0 = kron(a, 0), b0 = kron(b, 0);
        const double t = 6.0 * w * a0 * b0 / r2 - 6.0 * w * w * (a0 * v[b] + b0 * v[a]) / r4 -
                         2.0 * w * w * w * kron(a, b) / r4 + 8.0 * w * w * w * v[a] * v[b] / r6;
        out[a * m + b] += scale * t;
      }
    return;
  }
  const double r8 = r6 * r2;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const double a0 = kron(a, 0), b0 = kron(b, 0), c0 = kron(c, 0);
        const double dab = kron(a, b), dac = kron(a, c), dbc = kron(b, c);
        const double va = v[a], vb = v[b], vc = v[c];
        double t = 6.0 * a0 * b0 * c0 / r2;
        t -= 12.0 * w * (a0 * b0 * vc + a0 * c0 * vb + b0 * c0 * va) / r4;
        t -= 6.0 * w * w * (a0 * dbc + b0 * dac + c0 * dab) / r4;
        t += 24.0 * w * w * (a0 * vb * vc + b0 * va * vc + c0 * va * vb) / r6;
        t += 8.0 * w * w * w * (dab * vc + dac * vb + dbc * va) / r6;
        t -= 48.0 * w * w * w * va * vb * vc / r8;
        out[(a * m + b) * m + c] += scale * t;
      }
}

void add_ellipsoid_derivative(std::span<const double> b_mat, std::span<const double> v, int order,
                              std::span<double> out) {
  const std::size_t m = v.size();
  std::array<double, 16> wbuf{};
  std::vector<double> wheap;
  std::span<double> w;
  if (m <= wbuf.size()) {
    w = std::span<double>(wbuf.data(), m);
  } else {
    wheap.assign(m, 0.0);
    w = wheap;
  }
  double q = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < m; ++b) s += b_mat[a * m + b] * v[b];
    w[a] = s;
    q += v[a] * s;
  }
  const double f = std::sqrt(q);
  if (order == 1) {
    for (std::size_t a = 0; a < m; ++a) out[a] += w[a] / f;
    return;
  }
  const double f3 = f * f * f;
  if (order == 2) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) out[a * m + b] += b_mat[a * m + b] / f - w[a] * w[b] / f3;
    return;
  }
  const double f5 = f3 * f * f;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c) {
        const double t =
            -(b_mat[a * m + b] * w[c] + b_mat[a * m + c] * w[b] + b_mat[b * m + c] * w[a]) / f3 +
            3.0 * w[a] * w[b] * w[c] / f5;
        out[(a * m + b) * m + c] += t;
      }
}

}  // namespace

Integrand::Integrand(Family family, std::size_t n, double delta, std::vector<double> matrix)
    : family_(family), n_(n), delta_(delta), matrix_(std::move(matrix)) {
  if (n_ < 1) throw PreconditionError("integrand dimension n must be >= 1");
}

Integrand Integrand::euclidean(std::size_t n) { return Integrand(Family::euclidean, n, 0.0, {}); }

Integrand Integrand::ellipsoid(std::size_t n, std::vector<double> matrix) {
  const std::size_t m = n + 1;
  if (matrix.size() != m * m)
    throw PreconditionError("ellipsoid matrix must have (n+1)^2 entries");
  Eigen::Map<const Eigen::MatrixXd> b(matrix.data(), static_cast<Eigen::Index>(m),
                                      static_cast<Eigen::Index>(m));
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-14 * b.cwiseAbs().maxCoeff())
    throw PreconditionError("ellipsoid matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw PreconditionError("ellipsoid matrix must be positive definite");
  return Integrand(Family::ellipsoid, n, 0.0, std::move(matrix));
}

Integrand Integrand::perturbed(std::size_t n, double delta, DeltaRange range) {
  const double limit = range == DeltaRange::standard ? 0.1 : 0.25;
  if (!(std::abs(delta) <= limit)) {
    std::ostringstream os;
    os << "perturbation |delta| must be <= " << limit;
    throw PreconditionError(os.str());
  }
  return Integrand(Family::perturbed, n, delta, {});
}

Integrand Integrand::odd_perturbed(std::size_t n, double delta) {
  if (!(std::abs(delta) <= 0.1)) throw PreconditionError("perturbation |delta| must be <= 0.1");
  return Integrand(Family::odd_perturbed, n, delta, {});
}

std::string Integrand::name() const {
  switch (family_) {
    case Family::euclidean: return "euclidean";
    case Family::ellipsoid: return "ellipsoid";
    case Family::perturbed: return "perturbed";
    case Family::odd_perturbed: return "odd_perturbed";
  }
  return "unknown";
}

double Integrand::checked_norm(std::span<const double> v) const {
  if (v.size() != size()) throw PreconditionError("covector dimension does not match integrand");
  double s = 0.0;
  for (double x : v) s += x * x;
  const double r = std::sqrt(s);
  if (!(r >= kZeroFloor)) throw DomainError("integrand evaluated at (or near) the zero covector");
  return r;
}

double Integrand::value(std::span<const double> v) const {
  const double r = checked_norm(v);
  switch (family_) {
    case Family::euclidean: return r;
    case Family::ellipsoid: {
      const std::size_t m = size();
      double q = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < m; ++b) s += matrix_[a * m + b] * v[b];
        q += v[a] * s;
      }
      return std::sqrt(q);
    }
    case Family::perturbed: return r + delta_ * sum_fourth(v) / (r * r * r);
    case Family::odd_perturbed: return r + delta_ * v[0] * v[0] * v[0] / (r * r);
  }
  return r;
}

namespace {

void fill_derivative(const Integrand& f, std::span<const double> v, double r, int order,
                     std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  switch (f.family()) {
    case Family::euclidean: add_norm_derivative(v, r, order, 1.0, out); break;
    case Family::ellipsoid: add_ellipsoid_derivative(f.matrix(), v, order, out); break;
    case Family::perturbed:
      add_norm_derivative(v, r, order, 1.0, out);
      add_quartic_derivative(v, r, order, f.delta(), out);
      break;
    case Family::odd_perturbed:
      add_norm_derivative(v, r, order, 1.0, out);
      add_odd_derivative(v, r, order, f.delta(), out);
      break;
  }
}

}  // namespace

void Integrand::gradient(std::span<const double> v, std::span<double> out) const {
  fill_derivative(*this, v, checked_norm(v), 1, out.first(size()));
}

void Integrand::hessian(std::span<const double> v, std::span<double> out) const {
  fill_derivative(*this, v, checked_norm(v), 2, out.first(size() * size()));
}

void Integrand::third(std::span<const double> v, std::span<double> out) const {
  fill_derivative(*this, v, checked_norm(v), 3, out.first(size() * size() * size()));
}

void Integrand::graph_metric(std::span<const double> grad, std::span<double> out) const {
  const std::size_t m = size();
  if (family_ == Family::perturbed || family_ == Family::odd_perturbed) {
    // spatial block of F D^2F at nu = (-1, grad), with shared reciprocals
    double r2 = 1.0;
    double s4 = 1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double g2 = grad[i] * grad[i];
      r2 += g2;
      s4 += g2 * g2;
    }
    const double r = std::sqrt(r2);
    const double ir = 1.0 / r;
    const double ir2 = ir * ir;
    const double ir3 = ir2 * ir;
    double fv = 0.0, diag = 0.0, outer = 0.0;
    if (family_ == Family::perturbed) {
      const double ir5 = ir3 * ir2;
      fv = r + delta_ * s4 * ir3;
      diag = ir - 3.0 * delta_ * s4 * ir5;
      outer = -ir3 + 15.0 * delta_ * s4 * ir5 * ir2;
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          const double gi = grad[i], gj = grad[j];
          double h = outer * gi * gj - 12.0 * delta_ * (gi * gi * gi * gj + gi * gj * gj * gj) * ir5;
          if (i == j) h += diag + 12.0 * delta_ * gi * gi * ir3;
          out[i * n_ + j] = fv * h;
        }
      return;
    }
    // odd perturbation with v_0 = -1
    const double ir4 = ir2 * ir2;
    fv = r - delta_ * ir2;
    diag = ir + 2.0 * delta_ * ir4;
    outer = -ir3 - 8.0 * delta_ * ir4 * ir2;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        double h = outer * grad[i] * grad[j];
        if (i == j) h += diag;
        out[i * n_ + j] = fv * h;
      }
    return;
  }
  std::array<double, 4> nu_buf{};
  std::array<double, 16> h_buf{};
  std::vector<double> nu_heap, h_heap;
  std::span<double> nu, h;
  if (m <= nu_buf.size()) {
    nu = std::span<double>(nu_buf.data(), m);
    h = std::span<double>(h_buf.data(), m * m);
  } else {
    nu_heap.assign(m, 0.0);
    h_heap.assign(m * m, 0.0);
    nu = nu_heap;
    h = h_heap;
  }
  nu[0] = -1.0;
  for (std::size_t i = 0; i < n_; ++i) nu[i + 1] = grad[i];
  const double fv = value(nu);
  hessian(nu, h);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = fv * h[(i + 1) * m + (j + 1)];
}

double eval(const Integrand& f, const Covector& v) { return f.value(v.coords()); }

Covector first_derivative(const Integrand& f, const Covector& v) {
  Covector g(f.size());
  f.gradient(v.coords(), g.coords());
  return g;
}

SymTensor2 second_derivative(const Integrand& f, const Covector& v) {
  std::vector<double> dense(f.size() * f.size());
  f.hessian(v.coords(), dense);
  return SymTensor2::from_dense(f.size(), dense);
}

SymTensor3 third_derivative(const Integrand& f, const Covector& v) {
  std::vector<double> dense(f.size() * f.size() * f.size());
  f.third(v.coords(), dense);
  return SymTensor3::from_dense(f.size(), dense);
}

DerivativeForm derivative(const Integrand& f, const Covector& v, int order) {
  switch (order) {
    case 1: return first_derivative(f, v);
    case 2: return second_derivative(f, v);
    case 3: return third_derivative(f, v);
    default: throw PreconditionError("derivative order must be 1, 2 or 3");
  }
}

Covector hat(const Integrand& f, const Covector& nu, const Covector& v) {
  const Covector g = first_derivative(f, nu);
  const double ratio = g.dot(v) / eval(f, nu);
  return v - ratio * nu;
}

double metric_g(const Integrand& f, const Covector& nu, const Covector& p, const Covector& q) {
  return eval(f, nu) * second_derivative(f, nu).apply(p, q);
}

double cartan_q(const Integrand& f, const Covector& nu, const Covector& p, const Covector& q,
                const Covector& r) {
  const double fv = eval(f, nu);
  return fv * fv * third_derivative(f, nu).apply(p, q, r);
}

double d_f2_hessian(const Integrand& f, const Covector& at, const Covector& a, const Covector& b,
                    const Covector& c) {
  const double fv = eval(f, at);
  const double da = first_derivative(f, at).dot(a);
  return 2.0 * fv * da * second_derivative(f, at).apply(b, c) +
         fv * fv * third_derivative(f, at).apply(a, b, c);
}

double f_d_metric(const Integrand& f, const Covector& nu, const Covector& a, const Covector& b,
                  const Covector& c) {
  const double fv = eval(f, nu);
  const double da = first_derivative(f, nu).dot(a);
  return fv * da * second_derivative(f, nu).apply(b, c) +
         fv * fv * third_derivative(f, nu).apply(a, b, c);
}

}  // namespace anisoflow
