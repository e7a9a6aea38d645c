#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/clustering.hpp"
#include "concomitant/spectral.hpp"

namespace concomitant::theory {

/// Finitely many distinct unit angles with probabilities summing to one (within 1e-12).
class DiscreteAngularLaw {
public:
  DiscreteAngularLaw(std::vector<UnitAngle> atoms, std::vector<double> weights);

  const std::vector<UnitAngle>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  Eigen::Index dim() const noexcept { return atoms_.front().dim(); }

  WeightedSample as_weighted() const;

private:
  std::vector<UnitAngle> atoms_;
  std::vector<double> weights_;
};

/// Atom entries outside a face may not exceed this in absolute value.
inline constexpr double kSupportTolerance = 1e-12;
/// Coordinate means within this of each other count as balanced.
inline constexpr double kBalanceTolerance = 1e-10;

struct LawMoments {
  Vector mean;
  MomentMatrix sigma;
  /// Common coordinate mean, present when the law is balanced.
  std::optional<double> mu;
};

LawMoments law_moments(const DiscreteAngularLaw& law);

enum class MuBound { none, lower, upper };

struct MuBoundsReport {
  double mu = 0.0;
  double lower = 0.0;  // 1 / d
  double upper = 0.0;  // 1 / sqrt(d)
  bool within = false;
  MuBound attained = MuBound::none;
  /// Lower bound attained exactly when every atom is a basis vector; upper
  /// exactly when the law is a single atom.
  bool characterization_holds = false;
  /// min(mu - lower, upper - mu); negative on violation.
  double slack = 0.0;
};

/// Throws PreconditionError for unbalanced laws.
MuBoundsReport check_mu_bounds(const DiscreteAngularLaw& law);

struct Lambda1Report {
  double lambda1 = 0.0;
  double mu = 0.0;
  bool holds = false;  // lambda1 >= mu - 1e-12
};

/// Throws PreconditionError for unbalanced laws.
Lambda1Report check_lambda1_bound(const DiscreteAngularLaw& law);

struct FaceSpectrum {
  double probability = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;  // zero for one-dimensional faces
  /// Common within-face coordinate mean mu / p_I; present for balanced laws.
  std::optional<double> mu_face;
  /// Perron vector of the face's second-moment matrix, embedded in R^d.
  UnitAngle centroid;
};

struct SufficientConditionReport {
  std::vector<FaceSpectrum> faces;
  /// min_I p_I lambda_1(Sigma_I) - max_I p_I lambda_2(Sigma_I).
  double minmax_slack = 0.0;
  bool minmax_holds = false;
  /// lambda_2(Sigma_I) <= mu_I for every face; only for balanced laws.
  std::optional<bool> lambda2_holds;
  /// sum_I p_I lambda_1(Sigma_I): the reward of the on-face centroids.
  double on_face_reward = 0.0;
  /// Exhaustive optimum (p = 2) with as many clusters as faces; absent when
  /// the law has more than kMaxOracleAtoms atoms.
  std::optional<OracleResult> oracle;
  /// On-face centroids attain the oracle reward within 1e-12.
  std::optional<bool> on_face_optimal;
  /// Largest face_angle from an oracle centroid to its nearest true face.
  std::optional<double> oracle_face_angle;
};

/// Throws PreconditionError unless every atom lies on one face of the partition
/// and every face carries positive mass.
SufficientConditionReport check_sufficient_condition(const DiscreteAngularLaw& law,
                                                     const FacePartition& partition);

struct KmeansBalanceReport {
  std::vector<int> sizes;
  /// sum_I sqrt(|I|) and its maximum over compositions of d into as many parts.
  double sqrt_size_sum = 0.0;
  double best_sqrt_size_sum = 0.0;
  bool sizes_optimal = false;
  /// sum_I ||E(X 1{X in F_I})||, equal to mu * sum_I sqrt(|I|) for balanced laws.
  double on_face_reward = 0.0;
  std::optional<OracleResult> oracle;
  std::optional<bool> on_face_optimal;
  /// For suboptimal sizes: the equal-mass basis law on the same partition,
  /// whose oracle reward beats the on-face value.
  std::optional<double> construction_on_face;
  std::optional<double> construction_oracle;
  std::optional<bool> can_fail;
};

/// Throws PreconditionError for unbalanced laws or support violations.
KmeansBalanceReport check_kmeans_balance(const DiscreteAngularLaw& law, const FacePartition& partition);

/// max over compositions of d into k nonnegative parts of sum sqrt(part).
double best_sqrt_composition(int d, int k);

struct SymmetricModelReport {
  double cross_moment = 0.0;
  double lambda1 = 0.0;
  double expected_lambda1 = 0.0;  // 1/d + (d-1) c
  double expected_rest = 0.0;     // 1/d - c
  double max_error = 0.0;
  bool holds = false;  // max_error <= 1e-10
};

/// Throws PreconditionError unless the law is balanced with permutation-invariant
/// second moments (within 1e-10).
SymmetricModelReport check_symmetric_model(const DiscreteAngularLaw& law);

/// max{sqrt((a+b)^2+c^2)+d, c+sqrt((a+b)^2+d^2)} > sqrt(a^2+c^2)+sqrt(b^2+d^2).
/// Requires a, b > 0, c, d >= 0 and c + d > 0.
bool check_triangle_inequality(double a, double b, double c, double d);

struct SweepReport {
  int trials = 0;
  int violations = 0;
  /// Smallest observed margin in favour of the property (negative on violation).
  double worst_slack = 0.0;
};

/// sum_i lambda_1(M_i) <= sum_{i<=k} lambda_i(sum_i M_i) for random tuples of
/// entrywise nonnegative PSD matrices (d <= 8), tolerance 1e-8.
SweepReport eigenvalue_sum_sweep(int trials, std::uint64_t seed);

/// equality_construction reproduces M and attains the bound within 1e-8.
/// worst_slack is the negated largest gap.
SweepReport equality_sweep(int trials, std::uint64_t seed);

/// check_triangle_inequality on random admissible tuples.
SweepReport triangle_sweep(int trials, std::uint64_t seed);

/// Random nonnegative PSD matrix: a weighted sum of outer products of sparse
/// nonnegative vectors.
Matrix random_moment_matrix(int d, std::mt19937_64& rng);

namespace fixtures {

/// Mass 1/d on each basis vector.
DiscreteAngularLaw case_i(int d);
/// Point mass at the centre of the simplex.
DiscreteAngularLaw case_ii(int d);
/// alpha * case_i + (1 - alpha) * case_ii.
DiscreteAngularLaw mixture(int d, double alpha);
/// Uniform law on the distinct coordinate permutations of one random atom,
/// mixed with the centre; balanced with exchangeable second moments.
DiscreteAngularLaw exchangeable(int d, std::uint64_t seed);

/// Three blocks {1}, {2,3}, {4,5} in d = 5: e_1 and the centres of the two pairs,
/// balanced. With k = 2 and grouping {1}, {2..5} the sufficient condition fails
/// and the pairs-apart grouping wins by (sqrt(2) - 1) mu.
DiscreteAngularLaw three_blocks();
FacePartition three_blocks_grouping();

/// case_i(4) with eps mass moved to the centre of face {2,3,4}, rebalanced.
DiscreteAngularLaw perturbed_case_i(double eps);
/// Faces {1}, {2,3,4}.
FacePartition perturbed_case_i_faces();

struct TwoFaceLaw {
  DiscreteAngularLaw law;
  FacePartition partition;
};

/// Random balanced law on two contiguous faces (sizes from {1,2,3}, not both 1):
/// each face carries the permutation orbit of one random atom, with face
/// probabilities proportional to 1 / mu_I. At most 12 atoms.
TwoFaceLaw random_two_face(std::uint64_t seed);

}  // namespace fixtures

}  // namespace concomitant::theory
