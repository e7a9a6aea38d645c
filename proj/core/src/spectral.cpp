#include "concomitant/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "concomitant/error.hpp"

namespace concomitant {

namespace {

void check_shape_and_sign(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw InvalidInput("moment matrix must be square");
  if (!m.allFinite()) throw InvalidInput("moment matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > MomentMatrix::kSymmetryTolerance * scale) {
    throw InvalidInput("moment matrix is not symmetric");
  }
  if (m.minCoeff() < -MomentMatrix::kSymmetryTolerance * scale) {
    throw InvalidInput("moment matrix has negative entries");
  }
}

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  return solver;
}

double clamp_rounding(double lambda) {
  return (lambda < 0.0 && lambda >= -MomentMatrix::kDefinitenessTolerance) ? 0.0 : lambda;
}

}  // namespace

MomentMatrix::MomentMatrix(Matrix entries) : m_(std::move(entries)) {
  check_shape_and_sign(m_);
  m_ = 0.5 * (m_ + m_.transpose()).eval();
  const auto solver = decompose(m_);
  if (solver.eigenvalues()[0] < -kDefinitenessTolerance) {
    throw InvalidInput("moment matrix is not nonnegative definite");
  }
}

MomentMatrix::MomentMatrix(Matrix entries, Trusted) : m_(std::move(entries)) {
  check_shape_and_sign(m_);
  m_ = 0.5 * (m_ + m_.transpose()).eval();
}

MomentMatrix MomentMatrix::from_outer_products(Matrix entries) {
  return MomentMatrix(std::move(entries), Trusted{});
}

Eigenpair principal_eigenpair(const MomentMatrix& mm, const PowerIterationOptions& options) {
  const Matrix& m = mm.matrix();
  if (m.cwiseAbs().maxCoeff() == 0.0) throw DegenerateMatrix("zero matrix has no principal direction");

  Vector v = m.rowwise().sum();
  if (v.norm() == 0.0) v = Vector::Ones(m.rows());
  v.normalize();

  Vector w(m.rows());
  int it = 0;
  bool converged = false;
  while (it < options.max_iterations) {
    w.noalias() = m * v;
    const double norm = w.norm();
    if (norm == 0.0) throw DegenerateMatrix("power iteration collapsed to zero");
    w /= norm;
    ++it;
    const double change = (w - v).norm();
    v.swap(w);
    if (change <= options.tolerance) {
      converged = true;
      break;
    }
  }
  const double lambda = v.dot(m * v);
  return {clamp_rounding(lambda), UnitAngle(std::move(v)), it, converged};
}

std::vector<double> top_k_eigenvalues(const Matrix& symmetric, int k) {
  if (symmetric.rows() == 0 || symmetric.rows() != symmetric.cols()) {
    throw InvalidInput("matrix must be square");
  }
  if (k < 1 || k > symmetric.rows()) throw InvalidInput("k out of range");
  const auto solver = decompose(symmetric);
  const Vector& ev = solver.eigenvalues();  // ascending
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(clamp_rounding(ev[ev.size() - 1 - i]));
  return out;
}

std::vector<double> top_k_eigenvalues(const MomentMatrix& m, int k) {
  return top_k_eigenvalues(m.matrix(), k);
}

std::vector<Matrix> equality_construction(const MomentMatrix& mm, int k) {
  const Matrix& m = mm.matrix();
  const auto d = static_cast<int>(m.rows());
  if (k < 1 || k > d) throw InvalidInput("k out of range");
  const auto solver = decompose(m);
  // Reorder to descending eigenvalues.
  Vector lambda = solver.eigenvalues().reverse();
  const Matrix q = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = std::max(0.0, lambda[i]);

  std::vector<Matrix> parts;
  parts.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k - 1; ++i) {
    parts.push_back(lambda[i] * q.col(i) * q.col(i).transpose());
  }
  const int tail = d - (k - 1);
  const auto qt = q.rightCols(tail);
  parts.push_back(qt * lambda.tail(tail).asDiagonal() * qt.transpose());
  return parts;
}

}  // namespace concomitant
