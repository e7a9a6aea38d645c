#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "concomitant/error.hpp"
#include "concomitant/husler_reiss.hpp"
#include "helpers.hpp"

using namespace concomitant;
using namespace concomitant::hr;

namespace {

Variogram two_point(double gamma) {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 1) = g(1, 0) = gamma;
  return Variogram(g);
}

Variogram from_points(const Matrix& h) {
  const auto d = h.rows();
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = (h.row(i) - h.row(j)).squaredNorm();
  }
  return Variogram(g);
}

// Multivariate normal density computed from scratch with a dense inverse.
double gaussian_density(const Vector& z, const Vector& mean, const Matrix& cov) {
  const Vector r = z - mean;
  const double q = r.dot(cov.inverse() * r);
  const double k = static_cast<double>(z.size());
  return std::exp(-0.5 * q) / std::sqrt(std::pow(2 * std::numbers::pi, k) * cov.determinant());
}

// E f(Z) for Z ~ N(m, s^2) by adaptive Gauss-Kronrod on the whole line.
template <class F>
double normal_expectation(F f, double m, double s) {
  // Truncated at 40 standard deviations, where the Gaussian weight underflows anyway.
  auto integrand = [&](double z) {
    return f(m + s * z) * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -40.0, 40.0, 20, 1e-14);
}

UnitAngle interior(int d, std::mt19937_64& rng) { return testing_helpers::random_angle(d, rng); }

}  // namespace

TEST(ChiFromGamma, Values) {
  EXPECT_DOUBLE_EQ(chi_from_gamma(0.0), 1.0);
  EXPECT_LT(chi_from_gamma(1e10), 1e-15);
  // 2 * Phibar(1/2) = erfc(1 / (2 sqrt 2)); reference from a 30-digit evaluation.
  EXPECT_NEAR(chi_from_gamma(1.0), 0.617075077451974, 1e-14);
  EXPECT_THROW(chi_from_gamma(-1.0), InvalidInput);
}

TEST(Variogram, Validation) {
  EXPECT_THROW(Variogram(Matrix::Zero(1, 1)), InvalidInput);
  Matrix g = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  g(0, 1) = 2.0;
  EXPECT_THROW(Variogram{g}, InvalidInput);
  Matrix diag = Matrix::Ones(2, 2);
  EXPECT_THROW(Variogram{diag}, InvalidInput);
  // Collinear points give a singular covariance.
  Matrix line(3, 1);
  line << 0, 1, 2;
  EXPECT_THROW(from_points(line), InvalidVariogram);
}

TEST(CovFromVariogram, TwoDimensional) {
  const auto p = cov_from_variogram(two_point(1.7), 1);
  EXPECT_DOUBLE_EQ(p.covariance(0, 0), 1.7);
  EXPECT_DOUBLE_EQ(p.mean[0], -0.85);
}

TEST(CovFromVariogram, GramOfCentredPoints) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n01;
  Matrix h(5, 4);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = n01(rng);
  const auto g = from_points(h);
  for (int base = 0; base < 5; ++base) {
    const auto p = cov_from_variogram(g, base);
    Matrix centred(4, 4);
    int r = 0;
    for (int i = 0; i < 5; ++i) {
      if (i != base) centred.row(r++) = h.row(i) - h.row(base);
    }
    EXPECT_NEAR((p.covariance - centred * centred.transpose()).norm(), 0.0, 1e-12);
  }
}

TEST(GenVariogram, SeparatedGroups) {
  const auto gv = gen_variogram(2, 1, 5);
  EXPECT_GE(gv.gamma(0, 1), 1.5e10);
  EXPECT_LT(chi_from_gamma(gv.gamma(0, 1)), 1e-300);
  const auto big = gen_variogram(12, 4, 6);
  EXPECT_EQ(big.truth.faces()[0], FaceSet::range(0, 3, 12));
  EXPECT_EQ(big.truth.faces()[1], FaceSet::range(4, 11, 12));
  for (int base = 0; base < 12; ++base) EXPECT_NO_THROW(cov_from_variogram(big.gamma, base));
  EXPECT_THROW(gen_variogram(5, 0, 1), InvalidInput);
  EXPECT_THROW(gen_variogram(5, 5, 1), InvalidInput);
}

TEST(TTransform, Examples) {
  EXPECT_NEAR(t_transform(UnitAngle::centre(3)).norm(), 0.0, 1e-15);
  const auto x = t_inverse(Vector::Zero(1));
  EXPECT_NEAR(x[0], 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(t_transform(UnitAngle::basis(3, 0)), DomainError);
}

TEST(TTransform, RoundTrip) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    Vector z(4);
    for (int i = 0; i < 4; ++i) z[i] = n01(rng);
    EXPECT_NEAR((t_transform(t_inverse(z)) - z).norm(), 0.0, 1e-10);
  }
}

TEST(TTransform, InverseHandlesExtremeArguments) {
  const auto x = t_inverse(Eigen::Vector3d(700.0, -700.0, 0.0));
  EXPECT_TRUE(x.entries().allFinite());
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  const auto y = t_inverse(Eigen::Vector2d(-800.0, -800.0));
  EXPECT_NEAR(y[2], 1.0, 1e-15);
}

TEST(Jacobian, TwoDimensionalCentre) {
  EXPECT_NEAR(jacobian_det_t(UnitAngle::centre(2)), 2 * std::numbers::sqrt2, 1e-14);
}

TEST(Jacobian, FiniteDifferences) {
  std::mt19937_64 rng(43);
  for (int d : {3, 4}) {
    for (int t = 0; t < 20; ++t) {
      const auto x = interior(d, rng);
      const double h = 1e-5 * x.entries().minCoeff();
      Matrix jac(d - 1, d - 1);
      auto t_of = [&](Vector head) {
        Vector full(d);
        full.head(d - 1) = head;
        full[d - 1] = std::sqrt(1.0 - head.squaredNorm());
        return t_transform(UnitAngle(full));
      };
      for (int j = 0; j < d - 1; ++j) {
        Vector up = x.entries().head(d - 1);
        Vector down = up;
        up[j] += h;
        down[j] -= h;
        jac.col(j) = (t_of(up) - t_of(down)) / (2 * h);
      }
      const double fd = std::abs(jac.determinant());
      EXPECT_NEAR(jacobian_det_t(x) / fd, 1.0, 1e-5);
    }
  }
}

TEST(Jacobian, InvariantUnderPermutingLeadingCoordinates) {
  const auto a = normalize(Eigen::Vector4d(0.2, 0.5, 0.9, 0.3));
  const auto b = normalize(Eigen::Vector4d(0.9, 0.2, 0.5, 0.3));
  EXPECT_NEAR(jacobian_det_t(a), jacobian_det_t(b), 1e-12 * jacobian_det_t(a));
}

TEST(AngularDensity, MatchesChangeOfVariables) {
  std::mt19937_64 rng(44);
  const auto gv = gen_variogram(4, 2, 3, VariogramRecipe{.separation = 1.0});
  const auto p = cov_from_variogram(gv.gamma, 3);
  for (int t = 0; t < 20; ++t) {
    const auto x = interior(4, rng);
    const double g = gaussian_density(t_transform(x), p.mean, p.covariance) * jacobian_det_t(x);
    const double f = angular_density(x, gv.gamma, 0.3);
    EXPECT_NEAR(f / (0.3 * g / x[3]), 1.0, 1e-10);
    EXPECT_NEAR(angular_density(x, gv.gamma, 0.6), 2 * f, 1e-12 * f);
  }
  EXPECT_THROW(angular_density(UnitAngle::basis(4, 0), gv.gamma, 0.3), DomainError);
}

TEST(AngularDensity, TwoDimensionalIntegratesToOne) {
  const double gamma = 1.0;
  const auto g = two_point(gamma);
  // Exact mu = 1 / E(1/W_2) with 1/W_2 = sqrt(1 + e^{2Z}), Z ~ N(-gamma/2, gamma).
  const double inv_mu =
      normal_expectation([](double z) { return std::sqrt(1 + std::exp(2 * z)); }, -gamma / 2, std::sqrt(gamma));
  const double mu = 1 / inv_mu;
  auto integrand = [&](double phi) {
    return angular_density(UnitAngle(Eigen::Vector2d(std::cos(phi), std::sin(phi))), g, mu) * std::sin(phi);
  };
  const double total =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi / 2, 15, 1e-13);
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(EstimateSummary, TwoDimensionalAgainstQuadrature) {
  const double gamma = 1.0;
  const auto s = estimate_summary(two_point(gamma), 40000, 7);
  const double sg = std::sqrt(gamma);
  // W_1 = [1 + exp(-2 sqrt(gamma) Z0 + gamma)]^{-1/2} with Z0 standard normal.
  const double w1 =
      normal_expectation([&](double z0) { return 1 / std::sqrt(1 + std::exp(-2 * sg * z0 + gamma)); }, 0.0, 1.0);
  const double inv_mu = normal_expectation([](double z) { return std::sqrt(1 + std::exp(2 * z)); }, -gamma / 2, sg);
  const double mu = 1 / inv_mu;
  EXPECT_NEAR(s.mu, mu, 4 * s.mu_se + 1e-12);
  EXPECT_NEAR(s.mean_w(0, 1), w1, 1e-3);
  EXPECT_NEAR(s.sigma(0, 1), mu * w1, 4 * s.sigma_se(0, 1) + 1e-12);
  EXPECT_NEAR(s.sigma.trace(), 1.0, 1e-12);
}

TEST(EstimateSummary, BasesAgree) {
  const auto gv = gen_variogram(5, 2, 12, VariogramRecipe{.separation = 1.0});
  const auto s = estimate_summary(gv.gamma, 50000, 8);
  ASSERT_EQ(s.mu_by_base.size(), 5u);
  for (std::size_t b = 0; b < 5; ++b) {
    const double se = std::hypot(s.mu_by_base_se[b], s.mu_se);
    EXPECT_LE(std::abs(s.mu_by_base[b] - s.mu), 3 * se) << "base " << b;
  }
  EXPECT_TRUE(s.sigma.isApprox(s.sigma.transpose(), 0.0));
}

TEST(EstimateSummary, SeparatedBlocksDecouple) {
  const auto gv = gen_variogram(6, 3, 12);
  const auto s = estimate_summary(gv.gamma, 20000, 8);
  for (int i = 0; i < 3; ++i) {
    for (int j = 3; j < 6; ++j) EXPECT_LT(s.sigma(i, j), 1e-6);
  }
  EXPECT_NEAR(s.sigma.trace(), 1.0, 1e-12);
  EXPECT_GT(s.mu, 1.0 / 6);
  EXPECT_LT(s.mu, 1.0 / std::sqrt(6.0));
}

TEST(SampleHr, UnitFrechetMargins) {
  const auto gv = gen_variogram(4, 2, 9);
  const auto sample = sample_hr(gv.gamma, 4000, 10);
  ASSERT_EQ(sample.size(), 4000);
  for (Eigen::Index j = 0; j < 4; ++j) {
    std::vector<double> u(4000);
    for (Eigen::Index r = 0; r < 4000; ++r) u[static_cast<std::size_t>(r)] = std::exp(-1 / sample.rows()(r, j));
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (std::size_t r = 0; r < u.size(); ++r) {
      ks = std::max({ks, (static_cast<double>(r) + 1) / 4000.0 - u[r], u[r] - static_cast<double>(r) / 4000.0});
    }
    EXPECT_LT(ks, 0.035) << "column " << j;
  }
}

TEST(SampleHr, Deterministic) {
  const auto g = two_point(0.8);
  EXPECT_EQ(sample_hr(g, 50, 3).rows(), sample_hr(g, 50, 3).rows());
  EXPECT_NE(sample_hr(g, 50, 3).rows(), sample_hr(g, 50, 4).rows());
}
