#pragma once

#include <optional>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/clustering.hpp"

namespace concomitant {

/// {i : x_i > eps}; empty (nullopt) when no entry exceeds eps.
std::optional<FaceSet> detect_entrywise(const UnitAngle& x, double eps);

/// Smallest face with face_angle(x, I) < eps, grown from the largest entries.
/// Never empty: the full index set has angle zero.
FaceSet detect_angular(const UnitAngle& x, double eps);

struct ThresholdPoint {
  int dim;
  double angle;
};

/// Smallest angle from x to any face of each dimension 1..d; ends at zero.
std::vector<ThresholdPoint> threshold_curve(const UnitAngle& x);

enum class MatchRule { fixed, best_permutation };

struct Detection {
  std::optional<FaceSet> face;
  int added = 0;
  int removed = 0;
};

struct FaceReport {
  int centroid = 0;
  std::size_t true_face = 0;  // position in the truth partition
  double angle_to_true = 0.0;
  double max_outside_entry = 0.0;
  Detection angular;
  Detection entrywise;
  bool angle_exceeds = false;
  bool entry_exceeds = false;
  /// Both the angle and the largest entry outside the true face exceed eps_angle.
  bool error = false;
};

struct ScoreSummary {
  int errors = 0;
  int angle_exceeds = 0;
  int entry_exceeds = 0;
  int added_angular = 0;
  int removed_angular = 0;
  int added_entrywise = 0;
  int removed_entrywise = 0;
  /// matching[c] = index of the true face paired with centroid c.
  std::vector<std::size_t> matching;
};

struct ScoreResult {
  std::vector<FaceReport> reports;
  ScoreSummary summary;
};

/// Pairs centroids with true faces and counts detection errors.
///
/// MatchRule::fixed pairs centroid i with face i. MatchRule::best_permutation
/// picks the pairing with the fewest errors and, among those, the smallest total
/// angle; exhaustive up to kMaxExhaustiveMatch faces, greedy by angle beyond that
/// (falling back to the fixed pairing if greedy does worse).
ScoreResult score(const Centroids& centroids, const FacePartition& truth, double eps_angle,
                  double eps_entry, MatchRule rule);

inline constexpr std::size_t kMaxExhaustiveMatch = 8;

}  // namespace concomitant
