#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "anisoflow/tensor.hpp"

namespace anisoflow {

// Covectors with Euclidean norm below this are treated as the origin, where
// the integrand is not differentiable.
inline constexpr double kZeroFloor = 1e-12;

enum class Family {
  euclidean,      // F(v) = |v|
  ellipsoid,      // F(v) = sqrt(v^T B v), B symmetric positive definite
  perturbed,      // F(v) = |v| + delta * sum_i v_i^4 / |v|^3  (even in every coordinate)
  odd_perturbed,  // F(v) = |v| + delta * v_0^3 / |v|^2          (odd in v_0)
};

// Admissible perturbation sizes. `standard` keeps |delta| <= 0.1; `extended`
// allows |delta| <= 0.25 for constructing integrands with a large Cartan tensor.
enum class DeltaRange { standard, extended };

// Anisotropic area integrand F : V* -> R, positive and homogeneous of degree
// one, with analytic derivatives up to third order. Immutable after
// construction.
class Integrand {
 public:
  static Integrand euclidean(std::size_t n);
  // `matrix` is row-major (n+1) x (n+1); must be symmetric positive definite.
  static Integrand ellipsoid(std::size_t n, std::vector<double> matrix);
  static Integrand perturbed(std::size_t n, double delta, DeltaRange range = DeltaRange::standard);
  static Integrand odd_perturbed(std::size_t n, double delta);

  Family family() const noexcept { return family_; }
  // Spatial dimension n; covectors have n + 1 coordinates.
  std::size_t dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double delta() const noexcept { return delta_; }
  std::span<const double> matrix() const noexcept { return matrix_; }
  std::string name() const;

  // Allocation-free evaluators. `v` has size() entries; dense outputs are
  // row-major with size()^2 resp. size()^3 entries. Throw DomainError when
  // |v| < kZeroFloor.
  double value(std::span<const double> v) const;
  void gradient(std::span<const double> v, std::span<double> out) const;
  void hessian(std::span<const double> v, std::span<double> out) const;
  void third(std::span<const double> v, std::span<double> out) const;

  // Flow coefficients G(phi^i, phi^j) = F D^2F |_{nu}(phi^i, phi^j), 1 <= i,j <= n,
  // at the graph normal nu = Du - phi^0 = (-1, grad). `out` is dense n x n.
  void graph_metric(std::span<const double> grad, std::span<double> out) const;

 private:
  Integrand(Family family, std::size_t n, double delta, std::vector<double> matrix);
  double checked_norm(std::span<const double> v) const;

  Family family_;
  std::size_t n_;
  double delta_ = 0.0;
  std::vector<double> matrix_;
};

using DerivativeForm = std::variant<Covector, SymTensor2, SymTensor3>;

double eval(const Integrand& f, const Covector& v);

Covector first_derivative(const Integrand& f, const Covector& v);
SymTensor2 second_derivative(const Integrand& f, const Covector& v);
SymTensor3 third_derivative(const Integrand& f, const Covector& v);
// order in {1, 2, 3}; the variant holds Covector, SymTensor2, SymTensor3 respectively.
DerivativeForm derivative(const Integrand& f, const Covector& v, int order);

// Projection of v onto the tangent space of the level set through nu:
// v - (DF|_nu(v) / F(nu)) nu.
Covector hat(const Integrand& f, const Covector& nu, const Covector& v);

// Level-set metric G_nu(p, q) = F(nu) D^2F|_nu(p, q).
double metric_g(const Integrand& f, const Covector& nu, const Covector& p, const Covector& q);

// Cartan tensor Q_nu(p, q, r) = F(nu)^2 D^3F|_nu(p, q, r).
double cartan_q(const Integrand& f, const Covector& nu, const Covector& p, const Covector& q,
                const Covector& r);

// Derivative of the degree-one tensor F^2 D^2F in direction a, applied to (b, c):
// 2 F DF(a) D^2F(b, c) + F^2 D^3F(a, b, c).
double d_f2_hessian(const Integrand& f, const Covector& at, const Covector& a, const Covector& b,
                    const Covector& c);

// F(nu) * D(F D^2F)|_nu(a, b, c) = F DF(a) D^2F(b, c) + F^2 D^3F(a, b, c).
double f_d_metric(const Integrand& f, const Covector& nu, const Covector& a, const Covector& b,
                  const Covector& c);

// Finite-difference approximation of derivative(f, v, order) built only from
// values of f: composed central differences with step h = rel_step * |v|,
// Richardson-extrapolated with h/2.
struct FdOptions {
  double rel_step = 1e-3;
};
DerivativeForm fd_oracle(const Integrand& f, const Covector& v, int order, FdOptions opts = {});

}  // namespace anisoflow
