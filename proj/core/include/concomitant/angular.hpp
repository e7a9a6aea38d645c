#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "concomitant/types.hpp"

namespace concomitant {

/// Nonnegative direction of unit Euclidean norm, a point of the positive unit sphere.
///
/// Construction renormalizes inputs whose norm is within 1e-9 of one (so that
/// values read back from text files stay valid) and rejects anything further
/// off. Entries in [-1e-12, 0) are treated as rounding noise and set to zero.
class UnitAngle {
public:
  static constexpr double kNormTolerance = 1e-9;

  explicit UnitAngle(Vector entries);

  static UnitAngle basis(Eigen::Index dim, Eigen::Index index);
  /// (1, ..., 1) / sqrt(dim), the centre of the simplex.
  static UnitAngle centre(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return v_.size(); }
  const Vector& entries() const noexcept { return v_; }
  double operator[](Eigen::Index i) const { return v_[i]; }
  double dot(const UnitAngle& other) const;

private:
  Vector v_;
};

/// Observations on the unit-Frechet scale, one per row; every entry strictly positive.
class RawSample {
public:
  explicit RawSample(RowMatrix rows);

  Eigen::Index size() const noexcept { return rows_.rows(); }
  Eigen::Index dim() const noexcept { return rows_.cols(); }
  const RowMatrix& rows() const noexcept { return rows_; }

private:
  RowMatrix rows_;
};

struct SampleMeta {
  double retained_fraction = 1.0;
  std::optional<double> threshold_norm;
  std::optional<std::uint64_t> seed;
};

/// Ordered collection of unit angles sharing one dimension.
class AngularSample {
public:
  /// Each row is validated with the UnitAngle rules.
  explicit AngularSample(RowMatrix angles, SampleMeta meta = {});
  explicit AngularSample(const std::vector<UnitAngle>& angles, SampleMeta meta = {});

  Eigen::Index size() const noexcept { return angles_.rows(); }
  Eigen::Index dim() const noexcept { return angles_.cols(); }
  const RowMatrix& rows() const noexcept { return angles_; }
  UnitAngle angle(Eigen::Index i) const;
  const SampleMeta& meta() const noexcept { return meta_; }

private:
  RowMatrix angles_;
  SampleMeta meta_;
};

/// Nonempty, strictly increasing set of zero-based coordinate indices.
class FaceSet {
public:
  FaceSet(std::vector<int> indices, int ambient_dim);

  /// {first, ..., last} inclusive, zero-based.
  static FaceSet range(int first, int last, int ambient_dim);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool contains(int index) const;

  /// One-based indices joined by ';', the notation used in CSV output.
  std::string to_string() const;

  friend bool operator==(const FaceSet&, const FaceSet&) = default;

private:
  std::vector<int> indices_;
  int ambient_dim_;
};

/// Disjoint faces covering {0, ..., d-1}, with every index of face u below every
/// index of face v for u < v. Optional weights are the face probabilities.
class FacePartition {
public:
  explicit FacePartition(std::vector<FaceSet> faces, std::vector<double> weights = {});

  /// Consecutive blocks of the given sizes.
  static FacePartition contiguous(std::span<const int> sizes, std::vector<double> weights = {});

  const std::vector<FaceSet>& faces() const noexcept { return faces_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return faces_.size(); }
  int ambient_dim() const noexcept { return faces_.front().ambient_dim(); }
  /// Face containing the given coordinate.
  std::size_t face_of(int index) const;

private:
  std::vector<FaceSet> faces_;
  std::vector<double> weights_;
};

/// y / ||y||. Entries must be finite and nonnegative with at least one positive.
UnitAngle normalize(const Vector& y);

/// Keeps the ceil(fraction * n) rows of largest Euclidean norm (earlier rows win
/// ties), normalizes them and records the smallest kept norm. Kept rows retain
/// their original relative order. fraction must lie in the open interval (0, 1).
AngularSample extract_angles(const RawSample& data, double retained_fraction);

enum class Dissimilarity { sqrt_euclid, angular, c1, c2 };

/// Dissimilarities of the form 1 - r(x'y) plus the angular distance; all in [0, 1].
double dissimilarity(const UnitAngle& x, const UnitAngle& y, Dissimilarity kind);

/// Angle (as a fraction of pi/2) between x and the face spanned by I.
double face_angle(const UnitAngle& x, const FaceSet& face);

/// The m coordinates carrying the largest entries of x (smaller index wins ties).
/// This face minimizes face_angle among all faces with m coordinates.
FaceSet nearest_face_of_dim(const UnitAngle& x, int m);

}  // namespace concomitant
