#include "concomitant/faces.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "concomitant/error.hpp"

namespace concomitant {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("threshold must lie in (0, 1)");
}

// Coordinates sorted by decreasing entry, smaller index first on ties.
std::vector<int> entry_order(const UnitAngle& x) {
  std::vector<int> order(static_cast<std::size_t>(x.dim()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });
  return order;
}

FaceSet leading_face(const std::vector<int>& order, std::size_t m, int d) {
  std::vector<int> idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(idx.begin(), idx.end());
  return FaceSet(std::move(idx), d);
}

Detection compare(std::optional<FaceSet> detected, const FaceSet& truth) {
  Detection out;
  if (detected) {
    for (int i : detected->indices()) out.added += truth.contains(i) ? 0 : 1;
    for (int i : truth.indices()) out.removed += detected->contains(i) ? 0 : 1;
  } else {
    out.removed = static_cast<int>(truth.size());
  }
  out.face = std::move(detected);
  return out;
}

double max_outside(const UnitAngle& x, const FaceSet& face) {
  double top = 0.0;
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    if (!face.contains(static_cast<int>(i))) top = std::max(top, x[i]);
  }
  return top;
}

struct PairStats {
  double angle;
  bool error;
};

}  // namespace

std::optional<FaceSet> detect_entrywise(const UnitAngle& x, double eps) {
  check_eps(eps);
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    if (x[i] > eps) idx.push_back(static_cast<int>(i));
  }
  if (idx.empty()) return std::nullopt;
  return FaceSet(std::move(idx), static_cast<int>(x.dim()));
}

FaceSet detect_angular(const UnitAngle& x, double eps) {
  check_eps(eps);
  const auto d = static_cast<int>(x.dim());
  const auto order = entry_order(x);
  for (std::size_t m = 1; m < order.size(); ++m) {
    FaceSet candidate = leading_face(order, m, d);
    if (face_angle(x, candidate) < eps) return candidate;
  }
  return FaceSet::range(0, d - 1, d);
}

std::vector<ThresholdPoint> threshold_curve(const UnitAngle& x) {
  const auto d = static_cast<int>(x.dim());
  const auto order = entry_order(x);
  std::vector<ThresholdPoint> curve;
  curve.reserve(order.size());
  for (std::size_t m = 1; m <= order.size(); ++m) {
    curve.push_back({static_cast<int>(m), face_angle(x, leading_face(order, m, d))});
  }
  return curve;
}

ScoreResult score(const Centroids& centroids, const FacePartition& truth, double eps_angle,
                  double eps_entry, MatchRule rule) {
  check_eps(eps_angle);
  check_eps(eps_entry);
  const std::size_t k = centroids.size();
  if (k != truth.size()) throw InvalidInput("number of centroids must equal number of true faces");
  for (const auto& c : centroids) {
    if (c.dim() != truth.ambient_dim()) throw InvalidInput("centroid dimension does not match truth");
  }

  // stats[c][f]: angle to face f and whether pairing c with f is an error.
  std::vector<std::vector<PairStats>> stats(k, std::vector<PairStats>(k));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t f = 0; f < k; ++f) {
      const FaceSet& face = truth.faces()[f];
      const double angle = face_angle(centroids[c], face);
      stats[c][f] = {angle, angle > eps_angle && max_outside(centroids[c], face) > eps_angle};
    }
  }
  auto tally = [&](const std::vector<std::size_t>& match) {
    int errors = 0;
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      errors += stats[c][match[c]].error ? 1 : 0;
      total += stats[c][match[c]].angle;
    }
    return std::pair{errors, total};
  };

  std::vector<std::size_t> match(k);
  std::iota(match.begin(), match.end(), std::size_t{0});
  if (rule == MatchRule::best_permutation) {
    const auto fixed = match;
    if (k <= kMaxExhaustiveMatch) {
      std::vector<std::size_t> perm = match;
      auto best = tally(perm);
      while (std::next_permutation(perm.begin(), perm.end())) {
        const auto t = tally(perm);
        if (t.first < best.first || (t.first == best.first && t.second < best.second)) {
          best = t;
          match = perm;
        }
      }
    } else {
      std::vector<bool> taken(k, false);
      for (std::size_t c = 0; c < k; ++c) {
        std::size_t pick = k;
        for (std::size_t f = 0; f < k; ++f) {
          if (!taken[f] && (pick == k || stats[c][f].angle < stats[c][pick].angle)) pick = f;
        }
        taken[pick] = true;
        match[c] = pick;
      }
      if (tally(match).first > tally(fixed).first) match = fixed;
    }
  }

  ScoreResult result;
  result.summary.matching = match;
  for (std::size_t c = 0; c < k; ++c) {
    const UnitAngle& x = centroids[c];
    const FaceSet& face = truth.faces()[match[c]];
    FaceReport r;
    r.centroid = static_cast<int>(c);
    r.true_face = match[c];
    r.angle_to_true = stats[c][match[c]].angle;
    r.max_outside_entry = max_outside(x, face);
    r.angular = compare(detect_angular(x, eps_angle), face);
    r.entrywise = compare(detect_entrywise(x, eps_entry), face);
    r.angle_exceeds = r.angle_to_true > eps_angle;
    r.entry_exceeds = r.max_outside_entry > eps_angle;
    r.error = r.angle_exceeds && r.entry_exceeds;

    auto& s = result.summary;
    s.errors += r.error ? 1 : 0;
    s.angle_exceeds += r.angle_exceeds ? 1 : 0;
    s.entry_exceeds += r.entry_exceeds ? 1 : 0;
    s.added_angular += r.angular.added;
    s.removed_angular += r.angular.removed;
    s.added_entrywise += r.entrywise.added;
    s.removed_entrywise += r.entrywise.removed;
    result.reports.push_back(std::move(r));
  }
  return result;
}

}  // namespace concomitant
