#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <string>
#include <random>

#include "anisoflow/initial_data.hpp"
#include "anisoflow/kernels.hpp"
#include "anisoflow/solver.hpp"

using namespace anisoflow;

namespace {

std::vector<double> random_field(std::size_t n, std::uint64_t seed, double scale = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    previous = kernels::active().name;
    simd = kernels::avx2_table();
    const auto names = kernels::available();
    if (!simd || std::find(names.begin(), names.end(), "avx2") == names.end())
      GTEST_SKIP() << "no AVX2 backend on this machine";
  }
  void TearDown() override { kernels::select(previous); }

  std::string previous;
  const kernels::KernelTable& ref = kernels::scalar_table();
  const kernels::KernelTable* simd = nullptr;
};

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  const auto names = kernels::available();
  ASSERT_FALSE(names.empty());
  EXPECT_EQ(names.front(), "scalar");
  EXPECT_TRUE(kernels::select("scalar"));
  EXPECT_STREQ(kernels::active().name, "scalar");
  EXPECT_FALSE(kernels::select("neon-or-nothing"));
}

TEST_F(KernelEquivalence, Differences) {
  // odd sizes exercise the vector tails and the periodic seams
  for (std::size_t nx : {8u, 13u, 64u, 67u}) {
    for (std::size_t ny : {1u, 9u, 16u}) {
      const auto u = random_field(nx * ny, nx * 100 + ny);
      std::vector<double> a(nx * ny), b(nx * ny);
      ref.diff_x(u.data(), nx, ny, 0.37, a.data());
      simd->diff_x(u.data(), nx, ny, 0.37, b.data());
      EXPECT_TRUE(bit_equal(a, b)) << nx << "x" << ny;
      if (ny > 1) {
        ref.diff_y(u.data(), nx, ny, 0.37, a.data());
        simd->diff_y(u.data(), nx, ny, 0.37, b.data());
        EXPECT_TRUE(bit_equal(a, b)) << nx << "x" << ny;
      }
    }
  }
}

TEST_F(KernelEquivalence, Coefficients) {
  const double bmat1[4] = {1.3, 0.2, 0.2, 2.1};
  const double bmat2[9] = {1, 0.1, -0.2, 0.1, 4, 0.3, -0.2, 0.3, 1};
  for (std::size_t count : {1u, 3u, 4u, 5u, 257u}) {
    const auto ux = random_field(count, count);
    const auto uy = random_field(count, count + 7);
    std::vector<double> a11(count), a12(count), a22(count), b11(count), b12(count), b22(count);
    ref.euclid_coeff(ux.data(), uy.data(), count, a11.data(), a12.data(), a22.data());
    simd->euclid_coeff(ux.data(), uy.data(), count, b11.data(), b12.data(), b22.data());
    EXPECT_TRUE(bit_equal(a11, b11) && bit_equal(a12, b12) && bit_equal(a22, b22));
    ref.euclid_coeff(ux.data(), nullptr, count, a11.data(), nullptr, nullptr);
    simd->euclid_coeff(ux.data(), nullptr, count, b11.data(), nullptr, nullptr);
    EXPECT_TRUE(bit_equal(a11, b11));

    ref.quad_coeff(bmat2, ux.data(), uy.data(), count, a11.data(), a12.data(), a22.data());
    simd->quad_coeff(bmat2, ux.data(), uy.data(), count, b11.data(), b12.data(), b22.data());
    EXPECT_TRUE(bit_equal(a11, b11) && bit_equal(a12, b12) && bit_equal(a22, b22));
    ref.quad_coeff(bmat1, ux.data(), nullptr, count, a11.data(), nullptr, nullptr);
    simd->quad_coeff(bmat1, ux.data(), nullptr, count, b11.data(), nullptr, nullptr);
    EXPECT_TRUE(bit_equal(a11, b11));

    EXPECT_EQ(ref.rate_max(a11.data(), a12.data(), a22.data(), count),
              simd->rate_max(a11.data(), a12.data(), a22.data(), count));
    EXPECT_EQ(ref.rate_max(a11.data(), nullptr, nullptr, count), simd->rate_max(a11.data(), nullptr, nullptr, count));
  }
}

TEST_F(KernelEquivalence, Apply1d) {
  for (std::size_t nx : {8u, 11u, 256u}) {
    const auto u = random_field(nx, nx);
    auto a = random_field(nx, nx + 1, 0.3);
    for (double& x : a) x = std::abs(x);
    std::vector<double> r(nx), s(nx);
    ref.apply_1d(u.data(), a.data(), nx, 0.4, r.data());
    simd->apply_1d(u.data(), a.data(), nx, 0.4, s.data());
    EXPECT_TRUE(bit_equal(r, s)) << nx;
  }
}

TEST_F(KernelEquivalence, WholeRunsAgree) {
  const GridSpec g{2, 48, 6.283185307179586};
  InitialSpec spec;
  spec.kind = InitialKind::trig;
  spec.seed = 5;
  const auto u0 = make_initial(spec, g);
  for (const auto& f : {Integrand::euclidean(2), Integrand::ellipsoid(2, {1, 0, 0, 0, 4, 0.5, 0, 0.5, 1})}) {
    FlowConfig fc{g, 0.2, 0.9, 25};
    ASSERT_TRUE(kernels::select("scalar"));
    const auto a = run(fc, f, u0);
    ASSERT_TRUE(kernels::select("avx2"));
    const auto b = run(fc, f, u0);
    ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i)
      EXPECT_TRUE(bit_equal(a.snapshots[i].state.u, b.snapshots[i].state.u)) << f.name();
  }
}
