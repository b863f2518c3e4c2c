#include <gtest/gtest.h>

#include <cmath>

#include "fel/error.hpp"
#include "fel/free_conv.hpp"
#include "fel/transforms.hpp"
#include "oracles.hpp"

using namespace fel;

namespace {

// 32 fixed points above the axis, from near the support out to |z| = 50.
std::vector<Complex> probe_points() {
  std::vector<Complex> z;
  for (int i = 0; i < 8; ++i) {
    const double x = -3.5 + i;
    for (double y : {1e-3, 0.05, 0.7, 4.0}) z.emplace_back(x, y);
  }
  return z;
}

void expect_nevanlinna(const CauchyEvaluator& g, const char* label) {
  for (Complex z : probe_points()) {
    const Complex v = g(z);
    EXPECT_LT(v.imag(), 0.0) << label << " at " << z;
    EXPECT_TRUE(std::isfinite(v.real())) << label << " at " << z;
  }
  const Complex far(0.0, 50.0);
  EXPECT_LT(std::abs(far * g(far) - 1.0), 0.02) << label;
}

double integral_of(std::span<const double> v, double step) { return trapezoid(v, step); }

}  // namespace

TEST(CauchyTransform, ClosedFormExamples) {
  EXPECT_LT(std::abs(cauchy_transform(point_mass(0))(Complex(0, 1)) - Complex(0, -1)), 1e-15);
  EXPECT_LT(std::abs(cauchy_transform(bernoulli())(Complex(0, 2)) - Complex(0, -0.4)), 1e-15);
  const Complex g = cauchy_transform(semicircle(1.0))(Complex(0, 2));
  EXPECT_LT(std::abs(g - oracle::semicircle_cauchy({0, 2})), 1e-6);
  EXPECT_NEAR(g.imag(), 1 - std::sqrt(2.0), 1e-6);
}

TEST(CauchyTransform, GridMatchesClosedFormNearAxis) {
  const auto g = cauchy_transform(semicircle(1.0));
  for (Complex z : {Complex(0.5, 0.1), Complex(-1.9, 0.02), Complex(3.0, 0.01), Complex(1.0, 0.005)}) {
    EXPECT_LT(std::abs(g(z) - oracle::semicircle_cauchy(z)), 2e-4) << z;
  }
}

TEST(CauchyTransform, TreeAgreesWithExactCellSum) {
  const Measure mu = shift(uniform(0.7), 0.2);
  const auto g = cauchy_transform(mu);
  std::vector<Complex> z;
  for (int k = 0; k < 40; ++k) z.emplace_back(-2.0 + 0.1 * k, k % 3 == 0 ? 1e-4 : 0.3);
  std::vector<CauchyJet> exact(z.size());
  kernels::cauchy_batch_serial(mu.density(), mu.grid_lo(), mu.step(), z, exact);
  const auto batch = g.evaluate(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_LT(std::abs(batch[i] - exact[i].value), 1e-11) << z[i];
    EXPECT_LT(std::abs(g.jet(z[i]).derivative - exact[i].derivative), 1e-8 * (1 + std::abs(exact[i].derivative)));
  }
}

TEST(CauchyTransform, EvaluatorsAreNevanlinna) {
  expect_nevanlinna(cauchy_transform(semicircle(1.0)), "semicircle");
  expect_nevanlinna(cauchy_transform(uniform(2.0)), "uniform");
  expect_nevanlinna(cauchy_transform(arcsine(1.0)), "arcsine");
  expect_nevanlinna(cauchy_transform(bernoulli()), "bernoulli");
  expect_nevanlinna(cauchy_transform(make_atomic_measure({{-3, 0.1}, {0.5, 0.9}})), "two atoms");
  expect_nevanlinna(CauchyEvaluator::closed_form([](Complex z) { return oracle::semicircle_cauchy(z); }, {-2, 2}),
                    "closed semicircle");
  expect_nevanlinna(free_convolution_transform(bernoulli(), bernoulli()), "bernoulli pair");
  expect_nevanlinna(semicircular_smoothing_transform(uniform(1.0), 0.3), "smoothed uniform");
}

TEST(CauchyTransform, ClosedFormDerivativeByDifferences) {
  const auto g = CauchyEvaluator::closed_form([](Complex z) { return oracle::arcsine_cauchy(z); }, {-2, 2});
  const Complex z(0.4, 0.3);
  // d/dz (z^2 - 4)^(-1/2) = -z (z^2 - 4)^(-3/2)
  const Complex expected = -z * std::pow(oracle::arcsine_cauchy(z), 3);
  EXPECT_LT(std::abs(g.jet(z).derivative - expected), 1e-6);
}

TEST(StieltjesInvert, ClosedFormSemicircle) {
  const auto g = CauchyEvaluator::closed_form([](Complex z) { return oracle::semicircle_cauchy(z); }, {-2, 2});
  const Measure f = stieltjes_invert(g, -2.02, 2.02, 8192);
  EXPECT_NEAR(density_at(f, 0.0), 1 / oracle::kPi, 1e-3);
  EXPECT_NEAR(f.rescale_factor(), 1.0, 0.01);
}

TEST(StieltjesInvert, ClosedFormArcsine) {
  const auto g = CauchyEvaluator::closed_form([](Complex z) { return oracle::arcsine_cauchy(z); }, {-2, 2});
  const Measure f = stieltjes_invert(g, -2.02, 2.02, 8192);
  EXPECT_NEAR(density_at(f, 0.0), 1 / (2 * oracle::kPi), 1e-3);
  EXPECT_NEAR(density_at(f, 1.0), oracle::arcsine_pdf(1.0, 2.0), 1e-3);
}

TEST(StieltjesInvert, PointMassIsRejected) {
  try {
    stieltjes_invert(cauchy_transform(point_mass(0)), -1, 1, 1024);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AtomDetected);
  }
}

TEST(StieltjesInvert, WindowMustCoverSupport) {
  try {
    stieltjes_invert(cauchy_transform(semicircle(1.0)), -1, 1, 1024);
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(StieltjesInvert, RoundTrip) {
  for (const Measure& mu : {semicircle(1.0), uniform(1.0), arcsine(1.0)}) {
    const Measure back = stieltjes_invert(cauchy_transform(mu), mu.grid_lo(), mu.grid_hi(), mu.n_points());
    EXPECT_LT(l1_distance(mu, back), 5e-3);
    EXPECT_NEAR(back.rescale_factor(), 1.0, 0.01);
  }
}

TEST(Hilbert, SemicircleIsLinear) {
  const Measure s = semicircle(1.0);
  const GridFunction h = hilbert_transform(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const double x = h.node(i);
    if (std::abs(x) < 1.9) worst = std::max(worst, std::abs(h.values[i] - x / (2 * oracle::kPi)));
  }
  EXPECT_LT(worst, 1e-4);
  const std::size_t at_one = static_cast<std::size_t>(std::lround((1.0 - h.lo) / h.step));
  EXPECT_NEAR(h.values[at_one], 0.159155, 1e-3);
}

TEST(Hilbert, EvenDensityGivesOddTransform) {
  const GridFunction h = hilbert_transform(uniform(1.0, {8193}));
  const std::size_t n = h.values.size();
  for (std::size_t i = 0; i < n; i += 97) EXPECT_NEAR(h.values[i], -h.values[n - 1 - i], 1e-11);
  EXPECT_NEAR(h.values[n / 2], 0.0, 1e-11);
}

TEST(Hilbert, ArcsineVanishesOnSupport) {
  const Measure a = arcsine(2.0);  // [-2, 2]
  const GridFunction h = hilbert_transform(a);
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    if (std::abs(h.node(i)) < 1.8) EXPECT_LT(std::abs(h.values[i]), 2e-3) << h.node(i);
  }
}

TEST(Hilbert, AgreesWithQuadratureOracle) {
  const Measure g = gaussian_grid(0.6);
  const GridFunction h = hilbert_transform(g);
  const double r = -g.grid_lo();
  for (double x : {-1.2, -0.1, 0.45, 2.0}) {
    const std::size_t i = static_cast<std::size_t>(std::lround((x - h.lo) / h.step));
    const double xi = h.node(i);
    const double expected = oracle::hilbert([](double y) { return oracle::gaussian_pdf(y, 0.6); }, -r, r, xi);
    EXPECT_NEAR(h.values[i], expected, 1e-5) << xi;
  }
}

TEST(Hilbert, FftMatchesReference) {
  const Measure mu = semicircle(1.0, {2048});
  const GridFunction a = hilbert_transform(mu);
  const GridFunction b = hilbert_transform_reference(mu);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
}

TEST(Hilbert, IdentityWithCubeIntegral) {
  const Measure laws[] = {semicircle(1.0), gaussian_grid(1.0), semicircular_smooth(bernoulli(), 0.5),
                          semicircular_smooth(uniform(1.0), 0.2)};
  for (const Measure& mu : laws) {
    const GridFunction h = hilbert_transform(mu);
    const auto f = mu.density();
    std::vector<double> lhs(f.size()), rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      lhs[i] = h.values[i] * h.values[i] * f[i];
      rhs[i] = f[i] * f[i] * f[i] / 3.0;
    }
    const double a = integral_of(lhs, mu.step()), b = integral_of(rhs, mu.step());
    EXPECT_NEAR(a / b, 1.0, 1e-3);
  }
}

TEST(Hilbert, AtomsRejected) {
  EXPECT_THROW(hilbert_transform(bernoulli()), Error);
}
