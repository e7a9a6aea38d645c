#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/types.hpp"

namespace concomitant::hr {

/// Symmetric, zero-diagonal, strictly conditionally negative definite matrix.
/// Construction checks the covariance derived with the last coordinate as base
/// for positive definiteness.
class Variogram {
public:
  explicit Variogram(Matrix gamma);

  const Matrix& matrix() const noexcept { return gamma_; }
  Eigen::Index dim() const noexcept { return gamma_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return gamma_(i, j); }

private:
  Matrix gamma_;
};

/// Pairwise tail dependence coefficients: unit diagonal, symmetric, in [0, 1].
struct DependenceMatrix {
  Matrix chi;
};

struct VariogramRecipe {
  double pareto_shape = 2.5;
  /// Extra coordinate given to the first group; pushes cross-group entries to scale * L^2.
  double separation = 1e5;
  /// Defaults to 3 / d.
  std::optional<double> scale;
};

struct GeneratedVariogram {
  Variogram gamma;
  FacePartition truth;
};

/// Gamma_ij = scale * ||h_i - h_j||^2 for points h_i in R^{d+1}: the first d
/// coordinates iid Pareto(shape) on [1, inf), the last equal to L for the first
/// d1 sites and 0 otherwise. Ground truth is ({1..d1}, {d1+1..d}).
GeneratedVariogram gen_variogram(int d, int d1, std::uint64_t seed, const VariogramRecipe& recipe = {});

/// 2 * (1 - Phi(sqrt(gamma) / 2)).
double chi_from_gamma(double gamma);

DependenceMatrix dependence_matrix(const Variogram& gamma);

/// Gaussian law of log spectral functions normalized at `base`:
/// mean -Gamma_{i,base}/2 and covariance (Gamma_{i,base} + Gamma_{j,base} - Gamma_ij)/2
/// over i, j != base, listed in increasing index order.
struct GaussianParams {
  Matrix covariance;
  Vector mean;
};

/// Throws InvalidVariogram when the covariance is not positive definite.
GaussianParams cov_from_variogram(const Variogram& gamma, int base);

/// n iid max-stable Husler-Reiss vectors with unit Frechet margins, simulated
/// exactly by extremal functions (sequentially over sites, rejecting functions
/// that would already have been extremal at an earlier site).
RawSample sample_hr(const Variogram& gamma, int n, std::uint64_t seed);

/// z_i = log(x_i / x_d), i < d. Requires every entry of x positive.
Vector t_transform(const UnitAngle& x);

/// (e^{z_1}, ..., e^{z_{d-1}}, 1) / norm, evaluated without overflow.
UnitAngle t_inverse(const Vector& z);

/// |det J_t(x)| = 1 / (x_1 ... x_{d-1} x_d^2) for interior x.
double jacobian_det_t(const UnitAngle& x);

/// Density of the first d-1 coordinates of the angle at interior x:
/// mu x_d^{-2} prod_i x_i^{-1} phi(t(x)) with phi the Gaussian from base d.
double angular_density(const UnitAngle& x, const Variogram& gamma, double mu);

struct AngularSummary {
  /// E X_1 = ... = E X_d.
  double mu = 0.0;
  double mu_se = 0.0;
  /// E(X X'), symmetric with unit trace.
  Matrix sigma;
  Matrix sigma_se;
  /// 1 / E(1 / W_b) from the draws at each base, with standard errors.
  std::vector<double> mu_by_base;
  std::vector<double> mu_by_base_se;
  /// Column b holds E(W) for the draws at base b (the base coordinate plays the
  /// role of the last one), so Sigma(:, b) = mu * mean_w.col(b) before symmetrization.
  Matrix mean_w;
};

struct SummaryOptions {
  /// Independent replicate batches used for standard errors.
  int batches = 20;
};

/// Monte Carlo moments of the exact angle. For each base b the Gaussian
/// vectors Z ~ N(-Gamma_{.,b}/2, R_b) are drawn by Latin hypercube sampling and
/// mapped to W = t^{-1}(Z) with coordinate b last. Because trace(Sigma) = 1 and
/// E(X_b^2) = mu E(W_b), mu is estimated as 1 / sum_b E(W_b); the per-base
/// estimates 1 / E(1/W_b) are reported alongside. Standard errors come from the
/// spread of independent batch estimates.
AngularSummary estimate_summary(const Variogram& gamma, int mc_n, std::uint64_t seed,
                                const SummaryOptions& options = {});

}  // namespace concomitant::hr
