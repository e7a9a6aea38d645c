#pragma once

#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/types.hpp"

namespace concomitant {

/// Symmetric, entrywise nonnegative, nonnegative definite matrix of second moments.
class MomentMatrix {
public:
  static constexpr double kSymmetryTolerance = 1e-12;
  static constexpr double kDefinitenessTolerance = 1e-10;

  /// Full validation, including a dense eigenvalue check of definiteness.
  explicit MomentMatrix(Matrix entries);

  /// For matrices that are sums of weighted outer products of nonnegative
  /// vectors and hence PSD by construction: checks shape and sign only.
  static MomentMatrix from_outer_products(Matrix entries);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

private:
  struct Trusted {};
  MomentMatrix(Matrix entries, Trusted);

  Matrix m_;
};

struct Eigenpair {
  double value;
  UnitAngle vector;
  int iterations;
  bool converged;
};

struct PowerIterationOptions {
  double tolerance = 1e-12;
  int max_iterations = 100000;
};

/// Perron eigenpair by power iteration from the normalized row-sum vector.
///
/// The iterates stay nonnegative, so the returned vector lies on the simplex.
/// When the top eigenvalue is repeated the limit of the iteration is returned;
/// which eigenvector that is depends only on the matrix.
Eigenpair principal_eigenpair(const MomentMatrix& m, const PowerIterationOptions& options = {});

/// The k largest eigenvalues in nonincreasing order (dense symmetric solver).
/// Values in [-1e-10, 0) are reported as 0.
std::vector<double> top_k_eigenvalues(const MomentMatrix& m, int k);

/// Same for any symmetric matrix; no sign or definiteness requirement.
std::vector<double> top_k_eigenvalues(const Matrix& symmetric, int k);

/// Splits M = Q diag(lambda) Q' into k PSD parts whose leading eigenvalues sum to
/// lambda_1 + ... + lambda_k: part i < k carries lambda_i alone and the last part
/// carries lambda_k, ..., lambda_d. The parts generally have negative entries.
std::vector<Matrix> equality_construction(const MomentMatrix& m, int k);

}  // namespace concomitant
