#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/types.hpp"

namespace concomitant {

/// Unit angles with probability weights: the empirical law of a sample (equal
/// weights) or a discrete angular law. All clustering routines work on this.
class WeightedSample {
public:
  /// Equal weights 1/n. Implicit so that an AngularSample can be passed directly.
  WeightedSample(const AngularSample& sample);  // NOLINT(google-explicit-constructor)
  /// Weights must be positive and sum to one within 1e-12.
  WeightedSample(RowMatrix points, Vector weights);

  Eigen::Index size() const noexcept { return points_.rows(); }
  Eigen::Index dim() const noexcept { return points_.cols(); }
  const RowMatrix& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }

private:
  RowMatrix points_;
  Vector weights_;
};

enum class Method { kmeans, kpc };

/// Reward exponent p: 1 for k-means, 2 for k-principal-components.
int reward_exponent(Method method);
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

using Centroids = std::vector<UnitAngle>;

/// Zero-based cluster label per point.
struct Assignment {
  std::vector<int> labels;
  int k = 0;
};

/// Label of each point is the smallest index attaining max_i theta'x_i.
Assignment assign(const WeightedSample& sample, const Centroids& centroids);

/// Normalized cluster means; an empty cluster keeps its old centroid.
Centroids kmeans_update(const WeightedSample& sample, const Assignment& assignment,
                        const Centroids& old_centroids);

/// Perron eigenvectors of the per-cluster second-moment matrices
/// sum_u w_u theta_u theta_u' 1{g_u = i}; an empty cluster keeps its old centroid.
Centroids kpc_update(const WeightedSample& sample, const Assignment& assignment,
                     const Centroids& old_centroids);

/// Reward sum_u w_u max_i (theta_u' x_i)^p; the clustering objective is one minus this.
double cost(const WeightedSample& sample, const Centroids& centroids, int p);

struct FitOptions {
  int restarts = 100;
  std::uint64_t seed = 0;
  int max_iter = 300;
  /// Stop once the reward improves by less than this.
  double tol = 1e-10;
  int threads = 1;
  /// Keep the reward sequence of every restart (for diagnostics and tests).
  bool keep_all_traces = false;
};

struct ClusterModel {
  Centroids centroids;
  Assignment assignment;
  /// Reward of the centroids above.
  double cost_value = 0.0;
  Method method = Method::kmeans;
  int iterations = 0;
  bool converged = false;
  /// Index of the restart that produced this model.
  int restart = 0;
  /// Reward before the first update and after every update of the winning run.
  std::vector<double> reward_trace;
  /// Populated only with FitOptions::keep_all_traces.
  std::vector<std::vector<double>> all_traces;
};

/// Alternates assignment and centroid updates from `restarts` random starts
/// (k distinct sample points each) and keeps the run with the largest reward.
///
/// Every restart draws from its own generator seeded by (seed, restart index), so
/// the result does not depend on `threads`. Ties go to the lowest restart index.
/// Clusters are reported in order of their lowest-index member; empty clusters last.
ClusterModel fit(const WeightedSample& sample, int k, Method method, const FitOptions& options);

struct OracleResult {
  double reward = 0.0;
  Centroids centroids;
  Assignment partition;
};

/// Maximizes the partition-space reward by enumerating every split of the
/// distinct atoms into nonempty clusters: sum ||cluster mass vector|| for p = 1,
/// sum lambda_1(cluster second moments) for p = 2. Block eigenvalues come from a
/// dense solver; centroids are the normalized means or Perron vectors of the best split.
OracleResult exhaustive_oracle(const WeightedSample& sample, int k, int p);

/// Largest number of distinct atoms exhaustive_oracle accepts.
inline constexpr int kMaxOracleAtoms = 12;

}  // namespace concomitant
