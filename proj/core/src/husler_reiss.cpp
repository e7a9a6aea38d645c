#include "concomitant/husler_reiss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "concomitant/error.hpp"
#include "concomitant/parallel.hpp"

namespace concomitant::hr {

namespace {

constexpr double kDefiniteness = 1e-10;

// Cholesky factor; one jitter retry at the numerical margin.
Matrix cholesky(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double jitter = 1e-12 * cov.trace() / static_cast<double>(cov.rows());
  Matrix bumped = cov;
  bumped.diagonal().array() += jitter;
  llt.compute(bumped);
  if (llt.info() != Eigen::Success) throw InvalidVariogram("covariance is not positive definite");
  return llt.matrixL();
}

void check_interior(const UnitAngle& x) {
  if (x.dim() < 2) throw DomainError("transform needs dimension at least 2");
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("point lies on the boundary of the simplex");
  }
}

// W = (e^{z}, 1) / norm with the base coordinate inserted at position `base`.
// Returns 1 / W_base.
double spectral_angle(const Vector& z, Eigen::Index base, Vector& w) {
  const double top = std::max(0.0, z.size() > 0 ? z.maxCoeff() : 0.0);
  Eigen::Index src = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = (i == base) ? std::exp(-top) : std::exp(z[src++] - top);
  }
  const double norm = w.norm();
  w /= norm;
  return norm * std::exp(top);
}

}  // namespace

Variogram::Variogram(Matrix gamma) : gamma_(std::move(gamma)) {
  const Eigen::Index d = gamma_.rows();
  if (d < 2 || gamma_.cols() != d) throw InvalidInput("variogram must be square with d >= 2");
  if (!gamma_.allFinite()) throw InvalidInput("variogram has non-finite entries");
  const double scale = std::max(1.0, gamma_.cwiseAbs().maxCoeff());
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("variogram is not symmetric");
  }
  if (gamma_.diagonal().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput("variogram diagonal must be zero");
  }
  if (gamma_.minCoeff() < 0.0) throw InvalidInput("variogram entries must be nonnegative");
  gamma_ = 0.5 * (gamma_ + gamma_.transpose()).eval();
  gamma_.diagonal().setZero();
  cov_from_variogram(*this, static_cast<int>(d - 1));
}

GeneratedVariogram gen_variogram(int d, int d1, std::uint64_t seed, const VariogramRecipe& recipe) {
  if (d < 2) throw InvalidInput("variogram dimension must be at least 2");
  if (d1 < 1 || d1 > d - 1) throw InvalidInput("first group size must lie in [1, d-1]");
  if (!(recipe.pareto_shape > 0.0)) throw InvalidInput("Pareto shape must be positive");
  const double scale = recipe.scale.value_or(3.0 / d);
  if (!(scale > 0.0)) throw InvalidInput("variogram scale must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix h(d, d + 1);
  for (int i = 0; i < d; ++i) {
    for (int c = 0; c < d; ++c) {
      // 1 - U lies in (0, 1], so the draw is finite and at least 1.
      h(i, c) = std::pow(1.0 - unit(rng), -1.0 / recipe.pareto_shape);
    }
    h(i, d) = i < d1 ? recipe.separation : 0.0;
  }
  Matrix gamma = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      gamma(i, j) = gamma(j, i) = scale * (h.row(i) - h.row(j)).squaredNorm();
    }
  }
  const std::vector<int> sizes{d1, d - d1};
  return {Variogram(std::move(gamma)), FacePartition::contiguous(sizes)};
}

double chi_from_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidInput("variogram entry must be finite and >= 0");
  // 2 * Phibar(x) = erfc(x / sqrt 2)
  return std::erfc(std::sqrt(gamma) / 2.0 / std::numbers::sqrt2);
}

DependenceMatrix dependence_matrix(const Variogram& gamma) {
  const Eigen::Index d = gamma.dim();
  Matrix chi(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) chi(i, j) = chi_from_gamma(gamma(i, j));
  }
  return {chi};
}

GaussianParams cov_from_variogram(const Variogram& gamma, int base) {
  const Eigen::Index d = gamma.dim();
  if (base < 0 || base >= d) throw InvalidInput("base index out of range");
  const Matrix& g = gamma.matrix();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i != base) idx.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  GaussianParams out{Matrix(m, m), Vector(m)};
  for (Eigen::Index a = 0; a < m; ++a) {
    out.mean[a] = -0.5 * g(idx[a], base);
    for (Eigen::Index b = 0; b < m; ++b) {
      out.covariance(a, b) = 0.5 * (g(idx[a], base) + g(idx[b], base) - g(idx[a], idx[b]));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(out.covariance, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success || solver.eigenvalues()[0] <= kDefiniteness) {
    throw InvalidVariogram("variogram is not strictly conditionally negative definite");
  }
  return out;
}

RawSample sample_hr(const Variogram& gamma, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample size must be positive");
  const Eigen::Index d = gamma.dim();

  struct Site {
    Matrix chol;
    Vector mean;
  };
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    auto params = cov_from_variogram(gamma, static_cast<int>(j));
    sites.push_back({cholesky(params.covariance), std::move(params.mean)});
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> arrival(1.0);

  RowMatrix out(n, d);
  Vector maxima(d), xi(d - 1), logy(d - 1), y(d);
  for (int s = 0; s < n; ++s) {
    maxima.setZero();
    for (Eigen::Index j = 0; j < d; ++j) {
      const Site& site = sites[static_cast<std::size_t>(j)];
      double gamma_sum = arrival(rng);
      // Poisson points zeta = 1 / gamma_sum in decreasing order; only those above
      // the current maximum at site j can still matter there.
      while (1.0 / gamma_sum > maxima[j]) {
        const double zeta = 1.0 / gamma_sum;
        for (Eigen::Index c = 0; c < d - 1; ++c) xi[c] = normal(rng);
        logy.noalias() = site.mean;
        logy.noalias() += site.chol.triangularView<Eigen::Lower>() * xi;
        for (Eigen::Index i = 0, src = 0; i < d; ++i) {
          y[i] = (i == j) ? 1.0 : std::exp(logy[src++]);
        }
        bool extremal_here = true;
        for (Eigen::Index i = 0; i < j; ++i) {
          if (zeta * y[i] > maxima[i]) {
            extremal_here = false;
            break;
          }
        }
        if (extremal_here) maxima = maxima.cwiseMax(zeta * y);
        gamma_sum += arrival(rng);
      }
    }
    out.row(s) = maxima.transpose();
  }
  return RawSample(std::move(out));
}

Vector t_transform(const UnitAngle& x) {
  check_interior(x);
  const Eigen::Index d = x.dim();
  Vector z(d - 1);
  for (Eigen::Index i = 0; i < d - 1; ++i) z[i] = std::log(x[i] / x[d - 1]);
  return z;
}

UnitAngle t_inverse(const Vector& z) {
  if (!z.allFinite()) throw InvalidInput("t_inverse needs finite input");
  Vector w(z.size() + 1);
  spectral_angle(z, z.size(), w);
  return UnitAngle(std::move(w));
}

double jacobian_det_t(const UnitAngle& x) {
  check_interior(x);
  const Eigen::Index d = x.dim();
  double log_det = -2.0 * std::log(x[d - 1]);
  for (Eigen::Index i = 0; i < d - 1; ++i) log_det -= std::log(x[i]);
  return std::exp(log_det);
}

double angular_density(const UnitAngle& x, const Variogram& gamma, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidInput("mu must be positive");
  if (x.dim() != gamma.dim()) throw InvalidInput("angle and variogram dimension mismatch");
  const Vector z = t_transform(x);
  const Eigen::Index d = x.dim();
  const auto params = cov_from_variogram(gamma, static_cast<int>(d - 1));
  const Matrix chol = cholesky(params.covariance);
  const Vector centred = z - params.mean;
  const Vector white = chol.triangularView<Eigen::Lower>().solve(centred);
  const double log_phi = -0.5 * white.squaredNorm() -
                         0.5 * static_cast<double>(d - 1) * std::log(2.0 * std::numbers::pi) -
                         chol.diagonal().array().log().sum();
  double log_f = std::log(mu) + log_phi - 2.0 * std::log(x[d - 1]);
  for (Eigen::Index i = 0; i < d; ++i) log_f -= std::log(x[i]);
  return std::exp(log_f);
}

AngularSummary estimate_summary(const Variogram& gamma, int mc_n, std::uint64_t seed,
                                const SummaryOptions& options) {
  if (mc_n < 1) throw InvalidInput("Monte Carlo size must be positive");
  if (options.batches < 1) throw InvalidInput("at least one batch is required");
  const Eigen::Index d = gamma.dim();
  const int batches = std::min(options.batches, mc_n);
  const boost::math::normal standard;

  // Per batch: column b = sum of W over draws at base b; inv(b) = sum of 1/W_b.
  std::vector<Matrix> sum_w(static_cast<std::size_t>(batches), Matrix::Zero(d, d));
  std::vector<Vector> sum_inv(static_cast<std::size_t>(batches), Vector::Zero(d));
  std::vector<int> batch_size(static_cast<std::size_t>(batches), mc_n / batches);
  for (int t = 0; t < mc_n % batches; ++t) ++batch_size[static_cast<std::size_t>(t)];

  for (Eigen::Index b = 0; b < d; ++b) {
    const auto params = cov_from_variogram(gamma, static_cast<int>(b));
    const Matrix chol = cholesky(params.covariance);
    const Eigen::Index m = d - 1;
    for (int t = 0; t < batches; ++t) {
      const int size = batch_size[static_cast<std::size_t>(t)];
      std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(b) * static_cast<std::uint64_t>(batches) + static_cast<std::uint64_t>(t)));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      // Latin hypercube: each coordinate visits every one of `size` strata once.
      Matrix xi(m, size);
      std::vector<int> strata(static_cast<std::size_t>(size));
      for (Eigen::Index c = 0; c < m; ++c) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (int s = 0; s < size; ++s) {
          double u = (strata[static_cast<std::size_t>(s)] + unit(rng)) / size;
          u = std::clamp(u, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
          xi(c, s) = boost::math::quantile(standard, u);
        }
      }
      Matrix z = chol.triangularView<Eigen::Lower>() * xi;
      z.colwise() += params.mean;
      Vector w(d);
      auto& col = sum_w[static_cast<std::size_t>(t)];
      for (int s = 0; s < size; ++s) {
        const double inv = spectral_angle(z.col(s), b, w);
        col.col(b) += w;
        sum_inv[static_cast<std::size_t>(t)][b] += inv;
      }
    }
  }

  struct Estimate {
    double mu;
    Matrix sigma;
    Vector mu_by_base;
    Matrix mean_w;
  };
  auto estimate = [&](const Matrix& sw, const Vector& si, double count) {
    Estimate e;
    e.mean_w = sw / count;
    e.mu = 1.0 / e.mean_w.diagonal().sum();
    const Matrix raw = e.mu * e.mean_w;
    e.sigma = 0.5 * (raw + raw.transpose());
    e.mu_by_base = (si / count).cwiseInverse();
    return e;
  };

  Matrix total_w = Matrix::Zero(d, d);
  Vector total_inv = Vector::Zero(d);
  std::vector<Estimate> per_batch;
  for (int t = 0; t < batches; ++t) {
    total_w += sum_w[static_cast<std::size_t>(t)];
    total_inv += sum_inv[static_cast<std::size_t>(t)];
    per_batch.push_back(estimate(sum_w[static_cast<std::size_t>(t)], sum_inv[static_cast<std::size_t>(t)],
                                 batch_size[static_cast<std::size_t>(t)]));
  }
  const Estimate pooled = estimate(total_w, total_inv, mc_n);

  AngularSummary out;
  out.mu = pooled.mu;
  out.sigma = pooled.sigma;
  out.mean_w = pooled.mean_w;
  out.mu_by_base.assign(pooled.mu_by_base.data(), pooled.mu_by_base.data() + d);
  out.sigma_se = Matrix::Constant(d, d, std::numeric_limits<double>::infinity());
  out.mu_se = std::numeric_limits<double>::infinity();
  out.mu_by_base_se.assign(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  if (batches > 1) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(batches) * (batches - 1));
    double mu_ss = 0.0;
    Matrix sigma_ss = Matrix::Zero(d, d);
    Vector base_ss = Vector::Zero(d);
    for (const auto& e : per_batch) {
      mu_ss += (e.mu - pooled.mu) * (e.mu - pooled.mu);
      sigma_ss += (e.sigma - pooled.sigma).cwiseAbs2();
      base_ss += (e.mu_by_base - pooled.mu_by_base).cwiseAbs2();
    }
    out.mu_se = std::sqrt(mu_ss) * norm;
    out.sigma_se = sigma_ss.cwiseSqrt() * norm;
    for (Eigen::Index b = 0; b < d; ++b) out.mu_by_base_se[static_cast<std::size_t>(b)] = std::sqrt(base_ss[b]) * norm;
  }
  return out;
}

}  // namespace concomitant::hr
