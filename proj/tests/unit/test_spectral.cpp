#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "concomitant/error.hpp"
#include "concomitant/spectral.hpp"
#include "helpers.hpp"

using namespace concomitant;

TEST(MomentMatrix, Validation) {
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_THROW(MomentMatrix{asym}, InvalidInput);
  Matrix neg = Matrix::Identity(2, 2);
  neg(0, 1) = neg(1, 0) = -0.1;
  EXPECT_THROW(MomentMatrix{neg}, InvalidInput);
  Matrix indefinite = Matrix::Ones(2, 2);
  indefinite(0, 0) = 0.0;
  EXPECT_THROW(MomentMatrix{indefinite}, InvalidInput);
  EXPECT_THROW(MomentMatrix{Matrix::Ones(2, 3)}, InvalidInput);
}

TEST(PrincipalEigenpair, Diagonal) {
  const auto e = principal_eigenpair(MomentMatrix(Vector::Map(std::vector<double>{2, 1}.data(), 2).asDiagonal()));
  EXPECT_NEAR(e.value, 2.0, 1e-12);
  EXPECT_NEAR(e.vector[0], 1.0, 1e-12);
  EXPECT_TRUE(e.converged);
}

TEST(PrincipalEigenpair, RankOne) {
  const auto e = principal_eigenpair(MomentMatrix(Matrix::Constant(2, 2, 0.5)));
  EXPECT_NEAR(e.value, 1.0, 1e-14);
  EXPECT_NEAR(e.vector[0], 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e.vector[1], 1 / std::sqrt(2.0), 1e-14);
}

TEST(PrincipalEigenpair, ZeroMatrixIsDegenerate) {
  EXPECT_THROW(principal_eigenpair(MomentMatrix(Matrix::Zero(3, 3))), DegenerateMatrix);
}

TEST(PrincipalEigenpair, MatchesDenseSolver) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 7;
    const Matrix m = testing_helpers::random_psd(d, rng);
    const auto e = principal_eigenpair(MomentMatrix(m));
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const double top = es.eigenvalues()[d - 1];
    Vector v = es.eigenvectors().col(d - 1);
    if (v.sum() < 0) v = -v;
    EXPECT_NEAR(e.value, top, 1e-8 * top);
    EXPECT_NEAR((e.vector.entries() - v).norm(), 0.0, 1e-8);
  }
}

TEST(PrincipalEigenpair, MaximizesQuadraticForm) {
  // lambda_1 = max over unit vectors of v'Mv; nonnegative M means the max is on the simplex.
  std::mt19937_64 rng(12);
  const Matrix m = testing_helpers::random_psd(4, rng);
  const auto e = principal_eigenpair(MomentMatrix(m));
  for (int t = 0; t < 10000; ++t) {
    const auto v = testing_helpers::random_angle(4, rng, 0.2);
    EXPECT_LE(v.entries().dot(m * v.entries()), e.value + 1e-12);
  }
}

TEST(TopK, Examples) {
  const Matrix m = Vector::LinSpaced(3, 3, 1).asDiagonal();
  EXPECT_EQ(top_k_eigenvalues(MomentMatrix(m), 2), (std::vector<double>{3, 2}));
  const auto iso = top_k_eigenvalues(MomentMatrix(Matrix::Identity(4, 4) / 4), 4);
  for (double v : iso) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_THROW(top_k_eigenvalues(MomentMatrix(m), 0), InvalidInput);
  EXPECT_THROW(top_k_eigenvalues(MomentMatrix(m), 4), InvalidInput);
}

TEST(TopK, MatchesCharacteristicPolynomialIn2D) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    const Matrix m = testing_helpers::random_psd(2, rng);
    const double tr = m.trace();
    const double det = m.determinant();
    const double disc = std::sqrt(tr * tr / 4 - det);
    const auto ev = top_k_eigenvalues(MomentMatrix(m), 2);
    EXPECT_NEAR(ev[0], tr / 2 + disc, 1e-12);
    EXPECT_NEAR(ev[1], std::max(0.0, tr / 2 - disc), 1e-10);
  }
}

TEST(EqualityConstruction, DiagonalSplit) {
  const Matrix m = Vector::LinSpaced(3, 3, 1).asDiagonal();
  const auto parts = equality_construction(MomentMatrix(m), 2);
  ASSERT_EQ(parts.size(), 2u);
  Matrix m1 = Matrix::Zero(3, 3);
  m1(0, 0) = 3;
  Matrix m2 = Matrix::Zero(3, 3);
  m2(1, 1) = 2;
  m2(2, 2) = 1;
  EXPECT_NEAR((parts[0] - m1).norm(), 0.0, 1e-12);
  EXPECT_NEAR((parts[1] - m2).norm(), 0.0, 1e-12);
}

TEST(EqualityConstruction, IsotropicThirds) {
  const auto parts = equality_construction(MomentMatrix(Matrix::Identity(3, 3) / 3), 3);
  Matrix sum = Matrix::Zero(3, 3);
  for (const auto& p : parts) {
    EXPECT_NEAR(p.trace(), 1.0 / 3, 1e-12);
    const auto ev = top_k_eigenvalues(p, 3);
    EXPECT_NEAR(ev[1], 0.0, 1e-12);
    sum += p;
  }
  EXPECT_NEAR((sum - Matrix::Identity(3, 3) / 3).norm(), 0.0, 1e-12);
}

TEST(EqualityConstruction, PostConditionsOnRandomMatrices) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 30; ++t) {
    const Matrix m = testing_helpers::random_psd(4, rng);
    const auto parts = equality_construction(MomentMatrix(m), 2);
    Matrix sum = Matrix::Zero(4, 4);
    double lead = 0.0;
    for (const auto& p : parts) {
      sum += p;
      const auto ev = top_k_eigenvalues(p, 4);
      EXPECT_GE(ev[3], -1e-10);
      lead += ev[0];
    }
    EXPECT_NEAR((sum - m).norm(), 0.0, 1e-10);
    const auto top = top_k_eigenvalues(MomentMatrix(m), 2);
    EXPECT_NEAR(lead, top[0] + top[1], 1e-10);
  }
}
