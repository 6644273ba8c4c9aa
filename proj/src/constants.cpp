#include "anisoflow/constants.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "anisoflow/errors.hpp"
#include "anisoflow/level_set.hpp"
#include "anisoflow/structure.hpp"

namespace anisoflow {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kDegenerateMetric = 1e-12;

// F and its derivatives at one point, with reusable buffers.
class Jet {
 public:
  Jet(const Integrand& f, int order)
      : f_(f),
        m_(static_cast<Eigen::Index>(f.size())),
        order_(order),
        nu_(m_),
        g_(m_),
        h_(m_, m_),
        t_(order >= 3 ? f.size() * f.size() * f.size() : 0) {}

  void at(const Eigen::VectorXd& nu) {
    nu_ = nu;
    const std::span<const double> v(nu_.data(), f_.size());
    value_ = f_.value(v);
    f_.gradient(v, std::span<double>(g_.data(), f_.size()));
    if (order_ >= 2) f_.hessian(v, std::span<double>(h_.data(), f_.size() * f_.size()));
    if (order_ >= 3) f_.third(v, t_);
  }

  double value() const { return value_; }
  const Eigen::VectorXd& grad() const { return g_; }
  const Eigen::MatrixXd& hess() const { return h_; }
  double third(Eigen::Index a, Eigen::Index b, Eigen::Index c) const {
    return t_[static_cast<std::size_t>((a * m_ + b) * m_ + c)];
  }
  // G(a, b) = F D^2F(a, b)
  double metric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return value_ * a.dot(h_ * b);
  }
  // sum_c D^3F(a, b, c) x_c for fixed vector x, as an m x m matrix
  Eigen::MatrixXd third_contract(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m_, m_);
    for (Eigen::Index a = 0; a < m_; ++a)
      for (Eigen::Index b = 0; b < m_; ++b) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < m_; ++c) s += third(a, b, c) * x[c];
        out(a, b) = s;
      }
    return out;
  }

 private:
  const Integrand& f_;
  Eigen::Index m_;
  int order_;
  Eigen::VectorXd nu_;
  double value_ = 0.0;
  Eigen::VectorXd g_;
  Eigen::MatrixXd h_;
  std::vector<double> t_;
};

// nu = s * p - phi^0 for a spatial direction p.
Eigen::VectorXd graph_normal(const Eigen::VectorXd& p, double s) {
  Eigen::VectorXd nu(p.size() + 1);
  nu[0] = -1.0;
  nu.tail(p.size()) = s * p;
  return nu;
}

Eigen::VectorXd embed_spatial(const Eigen::VectorXd& p) {
  Eigen::VectorXd v(p.size() + 1);
  v[0] = 0.0;
  v.tail(p.size()) = p;
  return v;
}

Eigen::MatrixXd sphere_tangents(const Eigen::VectorXd& d) {
  const Eigen::Index k = d.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(d);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  return q.rightCols(k - 1);
}

struct Probe {
  Eigen::VectorXd dir;
  double theta = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

using Objective = std::function<double(const Eigen::VectorXd&, double)>;

// Compass search maximising obj over (dir on the unit sphere, theta in
// [lo, hi]). Each iteration moves to the best improving neighbour or halves
// the step sizes. Deterministic.
Probe compass_maximize(const Objective& obj, Probe start, double lo, double hi, double dir_step,
                       double theta_step, int iters) {
  Probe cur = std::move(start);
  const bool move_dir = cur.dir.size() > 1 && dir_step > 0.0;
  const bool move_theta = hi > lo && theta_step > 0.0;
  for (int it = 0; it < iters; ++it) {
    Probe best = cur;
    if (move_dir) {
      const Eigen::MatrixXd tang = sphere_tangents(cur.dir);
      for (Eigen::Index j = 0; j < tang.cols(); ++j)
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd d = std::cos(dir_step) * cur.dir + std::sin(dir_step) * sgn * tang.col(j);
          d.normalize();
          const double v = obj(d, cur.theta);
          if (v > best.value) best = Probe{d, cur.theta, v};
        }
    }
    if (move_theta) {
      for (double sgn : {1.0, -1.0}) {
        const double th = std::clamp(cur.theta + sgn * theta_step, lo, hi);
        if (th == cur.theta) continue;
        const double v = obj(cur.dir, th);
        if (v > best.value) best = Probe{cur.dir, th, v};
      }
    }
    if (best.value > cur.value) {
      cur = std::move(best);
    } else {
      dir_step *= 0.5;
      theta_step *= 0.5;
    }
  }
  return cur;
}

// Spatial directions used for the outer sampling; n = 1 has only +-1.
std::vector<Eigen::VectorXd> spatial_directions(std::size_t n, const SearchBudget& budget) {
  const int count = n == 1 ? std::min(budget.direction_samples, 2) : budget.direction_samples;
  DirectionSequence seq(n, budget.seed);
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) dirs.push_back(seq.next());
  return dirs;
}

// Angular spacing of N roughly uniform points on S^{k-1}.
double direction_spacing(std::size_t k, int count) {
  if (k <= 1) return 0.0;
  const double area_per_point = 1.0 / std::max(count, 1);
  return std::min(0.5, std::numbers::pi * std::pow(area_per_point, 1.0 / static_cast<double>(k - 1)));
}

double f_at_minus_e0(const Integrand& f) {
  Covector e0 = Covector::basis(f.dim(), 0);
  return eval(f, -e0);
}

// Generic ray sweep: for each sampled direction evaluate obj on the theta
// grid plus the limit value, then refine both by compass search. Returns
// the overall maximum of obj (callers negate for infima).
double sweep_rays(std::size_t n, const SearchBudget& budget, double theta_lo, double theta_hi,
                  const Objective& obj, const std::function<double(const Eigen::VectorXd&)>& limit) {
  const auto dirs = spatial_directions(n, budget);
  const double dstep = direction_spacing(n, static_cast<int>(dirs.size()));
  const double tstep = (theta_hi - theta_lo) / budget.s_grid;
  // grid stops one step short of theta_hi, where the limit value takes over
  const double theta_top = theta_hi - tstep;
  const Objective limit_obj = [&](const Eigen::VectorXd& d, double) { return limit(d); };

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) {
    Probe top{d, theta_lo, -std::numeric_limits<double>::infinity()};
    for (int j = 0; j < budget.s_grid; ++j) {
      const double th = theta_lo + tstep * j;
      const double v = obj(d, th);
      if (v > top.value) top = Probe{d, th, v};
    }
    top = compass_maximize(obj, top, theta_lo, theta_top, dstep, tstep, budget.refine_iters);
    Probe lim{d, theta_hi, limit(d)};
    lim = compass_maximize(limit_obj, lim, theta_hi, theta_hi, dstep, 0.0, budget.refine_iters);
    best = std::max({best, top.value, lim.value});
  }
  return best;
}

void require_symmetry(const Integrand& f, const SearchBudget& budget, const char* who) {
  if (!satisfies_symmetry(f, 256, budget.seed)) {
    std::ostringstream os;
    os << who << " requires the symmetry condition F(p + phi^0) = F(p - phi^0)";
    throw PreconditionError(os.str());
  }
}

// sup over unit x of |c(x)|, c(x) = sum Q_ijk x_i x_j x_k in R^k.
double cubic_form_sup(const std::vector<double>& q, Eigen::Index k, int iters) {
  auto cubic = [&](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        const double xij = x[i] * x[j];
        for (Eigen::Index l = 0; l < k; ++l) s += q[static_cast<std::size_t>((i * k + j) * k + l)] * xij * x[l];
      }
    return std::abs(s);
  };
  if (k == 1) return std::abs(q[0]);

  std::vector<Probe> starts;
  if (k == 2) {
    // |c| is even, so half a circle suffices
    constexpr int kAngles = 64;
    for (int a = 0; a < kAngles; ++a) {
      const double th = std::numbers::pi * a / kAngles;
      Eigen::VectorXd x(2);
      x << std::cos(th), std::sin(th);
      starts.push_back(Probe{x, 0.0, cubic(x)});
    }
  } else {
    DirectionSequence seq(static_cast<std::size_t>(k), 0x51ed270bULL);
    for (int a = 0; a < 32 * static_cast<int>(k); ++a) {
      Eigen::VectorXd x = seq.next();
      starts.push_back(Probe{x, 0.0, cubic(x)});
    }
    for (Eigen::Index a = 0; a < k; ++a) {
      Eigen::VectorXd x = Eigen::VectorXd::Unit(k, a);
      starts.push_back(Probe{x, 0.0, cubic(x)});
    }
  }
  std::sort(starts.begin(), starts.end(), [](const Probe& a, const Probe& b) { return a.value > b.value; });
  const Objective obj = [&](const Eigen::VectorXd& x, double) { return cubic(x); };
  const double step = k == 2 ? std::numbers::pi / 64 : 0.3;
  double best = 0.0;
  const std::size_t refine = std::min<std::size_t>(3, starts.size());
  for (std::size_t i = 0; i < refine; ++i)
    best = std::max(best, compass_maximize(obj, starts[i], 0.0, 0.0, step, 0.0, iters).value);
  return best;
}

// Normalised Cartan bound at nu: sup over G-unit tangent p of |Q(p, p, p)|,
// which equals the sup over independent G-unit p, q, r for a symmetric form.
double cartan_ratio(const Integrand& f, Jet& jet, const Eigen::VectorXd& nu, int iters) {
  jet.at(nu);
  const Covector nu_c(std::vector<double>(nu.data(), nu.data() + nu.size()));
  const Eigen::MatrixXd basis = tangent_basis(f, nu_c);
  const Eigen::MatrixXd gt = jet.value() * basis.transpose() * jet.hess() * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gt);
  const Eigen::VectorXd lam = es.eigenvalues();
  if (!(lam.minCoeff() > kDegenerateMetric * std::max(1.0, lam.maxCoeff())))
    throw IntegrandInvalid("level-set metric degenerates on a tangent space (uniform convexity fails)");
  const Eigen::MatrixXd ortho = basis * es.eigenvectors() * lam.cwiseInverse().cwiseSqrt().asDiagonal();
  const Eigen::Index k = ortho.cols();
  const Eigen::Index m = ortho.rows();
  const double f2 = jet.value() * jet.value();
  std::vector<double> q(static_cast<std::size_t>(k * k * k), 0.0);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j)
      for (Eigen::Index l = j; l < k; ++l) {
        double s = 0.0;
        for (Eigen::Index a = 0; a < m; ++a)
          for (Eigen::Index b = 0; b < m; ++b) {
            const double ab = ortho(a, i) * ortho(b, j);
            if (ab == 0.0) continue;
            for (Eigen::Index c = 0; c < m; ++c) s += jet.third(a, b, c) * ab * ortho(c, l);
          }
        s *= f2;
        const Eigen::Index perm[6][3] = {{i, j, l}, {i, l, j}, {j, i, l}, {j, l, i}, {l, i, j}, {l, j, i}};
        for (const auto& p : perm) q[static_cast<std::size_t>((p[0] * k + p[1]) * k + p[2])] = s;
      }
  return cubic_form_sup(q, k, iters);
}

// sup over spatial unit q of l . q / F(q).
double restricted_dual_norm(const Integrand& f, const Eigen::VectorXd& l, int iters) {
  const Eigen::Index n = l.size();
  auto ratio = [&](const Eigen::VectorXd& q) {
    const Eigen::VectorXd v = embed_spatial(q);
    return l.dot(q) / f.value(std::span<const double>(v.data(), f.size()));
  };
  if (n == 1) {
    Eigen::VectorXd plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    return std::max(ratio(plus), ratio(minus));
  }
  const double ln = l.norm();
  if (ln == 0.0) return 0.0;
  const Objective obj = [&](const Eigen::VectorXd& q, double) { return ratio(q); };
  Probe start{l / ln, 0.0, 0.0};
  start.value = ratio(start.dir);
  return compass_maximize(obj, start, 0.0, 0.0, 0.3, 0.0, iters).value;
}

}  // namespace

void SearchBudget::validate() const {
  if (direction_samples < 1 || s_grid < 1 || refine_iters < 0)
    throw PreconditionError("search budget counts must be >= 1");
  if (!(s_max > 1.0)) throw PreconditionError("search budget s_max must exceed 1");
}

void BarrierParams::validate(const Integrand& f) const {
  if (!(q > 1.0)) throw PreconditionError("barrier power q must exceed 1");
  if (!(floor > f_at_minus_e0(f))) throw PreconditionError("barrier floor must exceed F(-phi^0)");
  if (!(Tprime > 0.0)) throw PreconditionError("T' must be positive");
  if (!(A > 0.0) || !(M > 0.0)) throw PreconditionError("A and M must be positive");
  if (interior) {
    if (!(interior->r > 1.0)) throw PreconditionError("localiser power r must exceed 1");
    if (!(interior->k > 0.0)) throw PreconditionError("trace bound k must be positive");
    if (!(interior->mu1 > 0.0 && interior->mu1 < 1.0 && interior->mu2 > 0.0 && interior->mu2 < 1.0))
      throw PreconditionError("mu_1, mu_2 must lie in (0, 1)");
    if (!(interior->R > 0.0)) throw PreconditionError("ball radius R must be positive");
  }
}

double estimate_c1(const Integrand& f, const SearchBudget& budget) {
  budget.validate();
  const std::size_t m = f.size();
  Jet jet(f, 3);
  DirectionSequence seq(m, budget.seed);
  const int inner_iters = std::max(budget.refine_iters, 20);
  // sample on the Euclidean sphere, evaluate at d / F(d) in Sigma_1
  const Objective obj = [&](const Eigen::VectorXd& d, double) {
    const std::span<const double> dv(d.data(), m);
    const Eigen::VectorXd nu = d / f.value(dv);
    return cartan_ratio(f, jet, nu, inner_iters);
  };
  const double dstep = direction_spacing(m, budget.direction_samples);
  double best = 0.0;
  for (int i = 0; i < budget.direction_samples; ++i) {
    Probe p{seq.next(), 0.0, 0.0};
    p.value = obj(p.dir, 0.0);
    p = compass_maximize(obj, p, 0.0, 0.0, dstep, 0.0, budget.refine_iters);
    best = std::max(best, p.value);
  }
  return best;
}

double compute_a_p(const Integrand& f, double P, const SearchBudget& budget) {
  budget.validate();
  const double f0 = f_at_minus_e0(f);
  if (!(P > f0)) {
    std::ostringstream os;
    os << "compute_a_p requires P > F(-phi^0) = " << f0 << ", got " << P;
    throw PreconditionError(os.str());
  }
  const std::size_t n = f.dim();
  Jet jet(f, 2);
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n + 1), 0);

  // s0(p): the ray s p - phi^0 leaves {F < P} at s0 (F is convex along the ray)
  auto ray_entry = [&](const Eigen::VectorXd& p) {
    auto excess = [&](double s) {
      const Eigen::VectorXd nu = graph_normal(p, s);
      return f.value(std::span<const double>(nu.data(), n + 1)) - P;
    };
    double hi = 1.0;
    while (excess(hi) <= 0.0) hi *= 2.0;
    std::uintmax_t max_iter = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        excess, 0.0, hi, excess(0.0), excess(hi), boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (bracket.first + bracket.second);
  };
  // G_{sp - phi^0}(sp, sp) = G_{sp - phi^0}(phi^0, phi^0) because sp = nu + phi^0
  // and G(nu, .) = 0; the second form stays well conditioned as s grows.
  const Objective neg_b = [&](const Eigen::VectorXd& p, double theta) {
    jet.at(graph_normal(p, ray_entry(p) * std::tan(theta)));
    return -jet.metric(e0, e0);
  };
  const auto neg_limit = [&](const Eigen::VectorXd& p) {
    jet.at(embed_spatial(p));
    return -jet.metric(e0, e0);
  };
  return -sweep_rays(n, budget, 0.25 * std::numbers::pi, kHalfPi, neg_b, neg_limit);
}

TraceBounds compute_trace_bounds(const Integrand& f, const SearchBudget& budget) {
  budget.validate();
  const std::size_t n = f.dim();
  if (n < 2) throw PreconditionError("trace bounds require n > 1");
  Jet jet(f, 2);
  auto spatial_trace = [&]() {
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) s += jet.hess()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    return jet.value() * s;
  };
  const Objective trace = [&](const Eigen::VectorXd& p, double theta) {
    jet.at(graph_normal(p, std::tan(theta)));
    return spatial_trace();
  };
  const auto trace_limit = [&](const Eigen::VectorXd& p) {
    jet.at(embed_spatial(p));
    return spatial_trace();
  };
  const Objective neg_trace = [&](const Eigen::VectorXd& p, double theta) { return -trace(p, theta); };
  const auto neg_limit = [&](const Eigen::VectorXd& p) { return -trace_limit(p); };

  TraceBounds tb;
  tb.k_hi = sweep_rays(n, budget, 0.0, kHalfPi, trace, trace_limit);
  tb.k_lo = -sweep_rays(n, budget, 0.0, kHalfPi, neg_trace, neg_limit);
  return tb;
}

double compute_c2(const Integrand& f, const SearchBudget& budget) {
  budget.validate();
  require_symmetry(f, budget, "compute_c2");
  const std::size_t n = f.dim();
  const auto ni = static_cast<Eigen::Index>(n);
  Jet jet(f, 3);
  const int dual_iters = std::max(budget.refine_iters, 16);

  // F(nu) G_nu(sp, q) = F(nu)^2 D^2F|_nu(phi^0, q) with nu = sp - phi^0
  const Objective ratio = [&](const Eigen::VectorXd& p, double theta) {
    jet.at(graph_normal(p, std::tan(theta)));
    const Eigen::VectorXd l = jet.value() * jet.value() * jet.hess().row(0).tail(ni).transpose();
    return restricted_dual_norm(f, l, dual_iters);
  };
  // -D(F^2 D^2F)|_p(phi^0, phi^0, q) = -(2 F DF(phi^0) D^2F(phi^0, q) + F^2 D^3F(phi^0, phi^0, q))
  const auto limit = [&](const Eigen::VectorXd& p) {
    jet.at(embed_spatial(p));
    const double fv = jet.value();
    Eigen::VectorXd l(ni);
    for (Eigen::Index i = 0; i < ni; ++i)
      l[i] = -(2.0 * fv * jet.grad()[0] * jet.hess()(0, i + 1) + fv * fv * jet.third(0, 0, i + 1));
    return restricted_dual_norm(f, l, dual_iters);
  };
  return std::max(0.0, sweep_rays(n, budget, 0.0, kHalfPi, ratio, limit));
}

SEpsResult compute_s_eps_detailed(const Integrand& f, double eps, const SearchBudget& budget) {
  budget.validate();
  if (!(eps > 0.0)) throw PreconditionError("compute_s_eps requires eps > 0");
  require_symmetry(f, budget, "compute_s_eps");
  const std::size_t n = f.dim();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto m = ni + 1;
  Jet jet(f, 3);

  // worst ratio over spatial q at p = s d:
  // max |T(q^, q^)| / (G(p, p)^{1/2} G(q, q)) as a generalised eigenvalue
  auto worst_ratio = [&](const Eigen::VectorXd& d, double s) {
    const Eigen::VectorXd nu = graph_normal(d, s);
    jet.at(nu);
    const double fv = jet.value();
    const Eigen::VectorXd p = embed_spatial(s * d);
    Eigen::MatrixXd hats(m, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      hats.col(i) = Eigen::VectorXd::Unit(m, i + 1) - (jet.grad()[i + 1] / fv) * nu;
    }
    const Eigen::MatrixXd tp = fv * jet.grad().dot(p) * jet.hess() + fv * fv * jet.third_contract(p);
    const Eigen::MatrixXd t_small = hats.transpose() * tp * hats;
    const Eigen::MatrixXd g_small = fv * hats.transpose() * jet.hess() * hats;
    const double gpp = fv * jet.hess()(0, 0);  // G(p, p) = G(phi^0, phi^0)
    double lam = 0.0;
    if (ni == 1) {
      lam = std::abs(t_small(0, 0) / g_small(0, 0));
    } else {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(t_small, g_small, Eigen::EigenvaluesOnly);
      lam = ges.eigenvalues().cwiseAbs().maxCoeff();
    }
    return lam / std::sqrt(gpp);
  };
  auto f_on_ray = [&](const Eigen::VectorXd& d, double s) {
    const Eigen::VectorXd nu = graph_normal(d, s);
    return f.value(std::span<const double>(nu.data(), n + 1));
  };

  SEpsResult res;
  const double f0 = f_at_minus_e0(f);
  double sampled = f0;
  const double theta_max = std::atan(budget.s_max);
  const double tstep = theta_max / budget.s_grid;
  for (const auto& d : spatial_directions(n, budget)) {
    int last_bad = 0;
    for (int j = 1; j <= budget.s_grid; ++j) {
      if (worst_ratio(d, std::tan(tstep * j)) > eps) {
        ++res.violations;
        last_bad = j;
      }
    }
    if (last_bad == 0) continue;
    if (last_bad == budget.s_grid) {
      const double lb = f_on_ray(d, budget.s_max);
      std::ostringstream os;
      os << "S_eps unresolved: inequality still fails at s_max = " << budget.s_max
         << " (F = " << lb << ")";
      throw UnresolvedConstant(os.str(), lb);
    }
    // bisect the outermost crossing between a failing and a passing grid node
    double bad = tstep * last_bad, good = tstep * (last_bad + 1);
    for (int it = 0; it < budget.refine_iters; ++it) {
      const double mid = 0.5 * (bad + good);
      if (worst_ratio(d, std::tan(mid)) > eps) bad = mid;
      else good = mid;
    }
    sampled = std::max(sampled, f_on_ray(d, std::tan(good)));
  }
  res.sampled = sampled;
  res.S = kSEpsSafety * sampled;
  return res;
}

double compute_s_eps(const Integrand& f, double eps, const SearchBudget& budget) {
  return compute_s_eps_detailed(f, eps, budget).S;
}

double barrier_time_limit(double A, double M) { return 0.5 * A * M * M; }

double barrier_unit_time(double A, double M) {
  const double t_peak = barrier_time_limit(A, M);
  // log of t^{-1/2} exp(-A M^2 / (4t)); increasing on (0, t_peak]
  auto log_phi = [&](double t) { return -0.5 * std::log(t) - A * M * M / (4.0 * t); };
  if (log_phi(t_peak) <= 0.0) return std::numeric_limits<double>::infinity();
  double lo = t_peak;
  while (log_phi(lo) > 0.0) lo *= 0.5;
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      log_phi, lo, t_peak, log_phi(lo), log_phi(t_peak), boost::math::tools::eps_tolerance<double>(52), max_iter);
  return bracket.first;
}

BarrierParams theorem_params(const Integrand& f, double M, int theorem, std::optional<double> radius,
                             const SearchBudget& budget) {
  budget.validate();
  if (!(M > 0.0)) throw PreconditionError("height bound M must be positive");
  if (theorem < 1 || theorem > 3) throw PreconditionError("theorem must be 1, 2 or 3");
  const double n = static_cast<double>(f.dim());
  const double f0 = f_at_minus_e0(f);

  const StructureReport rep = check_structure(f, 256, budget.seed, 1e-8);
  if (!rep.structural_pass())
    throw HypothesisNotMet("integrand structure (homogeneity, uniform convexity)",
                           "check_structure reported a failing structural identity");

  BarrierParams bp;
  bp.theorem = theorem;
  bp.M = M;

  auto require_symmetric = [&]() {
    if (!rep.symmetry_pass) {
      std::ostringstream os;
      os << "max |F(p + phi^0) - F(p - phi^0)| = " << rep.symmetry_err;
      throw HypothesisNotMet("symmetry condition F(p + phi^0) = F(p - phi^0)", os.str());
    }
  };
  auto require_c1 = [&](double c1, double limit, const char* limit_text) {
    if (!(c1 * c1 < limit)) {
      std::ostringstream os;
      os << "C1^2 = " << c1 * c1 << " >= " << limit_text << " = " << limit;
      throw HypothesisNotMet("smallness of third derivatives condition", os.str());
    }
  };

  if (theorem == 1) {
    const double c1 = estimate_c1(f, budget);
    require_c1(c1, 4.0 / std::sqrt(n), "4/sqrt(n)");
    const double eps = c1 * c1 * std::sqrt(n) / 4.0;
    bp.c1 = c1;
    bp.epsilon = eps;
    bp.q = std::max(1.0 / (1.0 - eps), kMinBarrierPower);
    bp.floor = kFloorFactor * f0;
    bp.A = compute_a_p(f, bp.floor, budget);
    bp.Tprime = barrier_time_limit(bp.A, M);
  } else if (theorem == 2) {
    require_symmetric();
    const double eps = std::sqrt(2.0 / n);
    bp.epsilon = eps;
    bp.q = 2.0;
    bp.floor = compute_s_eps(f, eps, budget);
    bp.A = compute_a_p(f, bp.floor, budget);
    bp.Tprime = barrier_time_limit(bp.A, M);
  } else {
    if (f.dim() < 2) throw HypothesisNotMet("dimension n > 1", "the interior estimate needs n > 1");
    if (!radius || !(*radius > 0.0)) throw PreconditionError("theorem 3 needs a positive ball radius R");
    require_symmetric();
    const double c1 = estimate_c1(f, budget);
    require_c1(c1, 2.0 / std::sqrt(n), "2/sqrt(n)");
    const double half = c1 * c1 * std::sqrt(n) / 2.0;
    InteriorParams ip;
    ip.R = *radius;
    ip.mu1 = std::max(half, kMinMu);
    ip.mu2 = std::max(half, kMinMu);
    ip.r = 1.0 / (1.0 - ip.mu2);
    ip.k = compute_trace_bounds(f, budget).k_hi;
    const double c2 = compute_c2(f, budget);
    bp.c1 = c1;
    bp.c2 = c2;
    bp.epsilon = c1 * c1 * std::sqrt(n) / 4.0;
    bp.floor = kFloorFactor * f0;
    bp.A = compute_a_p(f, bp.floor, budget);
    bp.Tprime = std::min(barrier_time_limit(bp.A, M), barrier_unit_time(bp.A, M));
    const double q_third = 1.0 / (1.0 - *bp.epsilon);
    const double q_cross = (1.0 / (1.0 - ip.mu1)) *
                           (1.0 + 2.0 * c1 * c2 * ip.r * std::pow(ip.R, 2.0 * ip.r - 1.0) * bp.Tprime /
                                      (bp.A * bp.A * M));
    bp.q = std::max({q_third, q_cross, kMinBarrierPower});
    bp.interior = ip;
  }
  bp.validate(f);
  return bp;
}

}  // namespace anisoflow
