#include "concomitant/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "concomitant/error.hpp"

namespace concomitant {

namespace {

constexpr double kNegativeNoise = 1e-12;

// Validates and renormalizes in place; shared by UnitAngle and AngularSample rows.
template <class Row>
void make_unit(Row&& v) {
  if (v.size() == 0) throw InvalidInput("unit angle must have at least one entry");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw InvalidInput("unit angle has a non-finite entry");
    if (v[i] < 0.0) {
      if (v[i] < -kNegativeNoise) throw InvalidInput("unit angle has a negative entry");
      v[i] = 0.0;
    }
  }
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > UnitAngle::kNormTolerance) {
    std::ostringstream msg;
    msg << "unit angle norm " << norm << " deviates from 1 by more than "
        << UnitAngle::kNormTolerance;
    throw InvalidInput(msg.str());
  }
  v /= norm;
}

}  // namespace

UnitAngle::UnitAngle(Vector entries) : v_(std::move(entries)) { make_unit(v_); }

UnitAngle UnitAngle::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw InvalidInput("basis index out of range");
  Vector e = Vector::Zero(dim);
  e[index] = 1.0;
  return UnitAngle(std::move(e));
}

UnitAngle UnitAngle::centre(Eigen::Index dim) {
  if (dim < 1) throw InvalidInput("dimension must be positive");
  return UnitAngle(Vector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
}

double UnitAngle::dot(const UnitAngle& other) const {
  if (other.dim() != dim()) throw InvalidInput("unit angle dimension mismatch");
  return v_.dot(other.v_);
}

RawSample::RawSample(RowMatrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1) throw InvalidInput("raw sample is empty");
  if (rows_.cols() < 2) throw InvalidInput("raw sample needs dimension at least 2");
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
      const double y = rows_(i, j);
      if (!std::isfinite(y) || y <= 0.0) {
        throw InvalidInput("raw sample entries must be finite and strictly positive (row " +
                           std::to_string(i + 1) + ")");
      }
    }
  }
}

AngularSample::AngularSample(RowMatrix angles, SampleMeta meta)
    : angles_(std::move(angles)), meta_(meta) {
  if (angles_.cols() < 1) throw InvalidInput("angular sample needs dimension at least 1");
  for (Eigen::Index i = 0; i < angles_.rows(); ++i) make_unit(angles_.row(i));
}

AngularSample::AngularSample(const std::vector<UnitAngle>& angles, SampleMeta meta)
    : meta_(meta) {
  if (angles.empty()) {
    angles_.resize(0, 1);
    return;
  }
  const Eigen::Index d = angles.front().dim();
  angles_.resize(static_cast<Eigen::Index>(angles.size()), d);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (angles[i].dim() != d) throw InvalidInput("angles must share one dimension");
    angles_.row(static_cast<Eigen::Index>(i)) = angles[i].entries().transpose();
  }
}

UnitAngle AngularSample::angle(Eigen::Index i) const {
  return UnitAngle(angles_.row(i).transpose());
}

FaceSet::FaceSet(std::vector<int> indices, int ambient_dim)
    : indices_(std::move(indices)), ambient_dim_(ambient_dim) {
  if (indices_.empty()) throw InvalidInput("face index set must be nonempty");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= ambient_dim_) {
      throw InvalidInput("face index out of range");
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw InvalidInput("face indices must be strictly increasing");
    }
  }
}

FaceSet FaceSet::range(int first, int last, int ambient_dim) {
  if (last < first) throw InvalidInput("empty face range");
  std::vector<int> idx(static_cast<std::size_t>(last - first + 1));
  std::iota(idx.begin(), idx.end(), first);
  return FaceSet(std::move(idx), ambient_dim);
}

bool FaceSet::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::string FaceSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(indices_[i] + 1);
  }
  return out;
}

FacePartition::FacePartition(std::vector<FaceSet> faces, std::vector<double> weights)
    : faces_(std::move(faces)), weights_(std::move(weights)) {
  if (faces_.empty()) throw InvalidInput("face partition must contain at least one face");
  const int d = faces_.front().ambient_dim();
  int expected = 0;
  for (const auto& face : faces_) {
    if (face.ambient_dim() != d) throw InvalidInput("faces must share the ambient dimension");
    // Blocks must be consecutive and in increasing order, which also gives
    // disjointness and coverage in one pass.
    for (int idx : face.indices()) {
      if (idx != expected) {
        throw InvalidInput(
            "faces must be disjoint, cover all coordinates, and list lower indices first");
      }
      ++expected;
    }
  }
  if (expected != d) throw InvalidInput("faces do not cover every coordinate");
  if (!weights_.empty()) {
    if (weights_.size() != faces_.size()) throw InvalidInput("one weight per face required");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("face weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("face weights must sum to one");
  }
}

FacePartition FacePartition::contiguous(std::span<const int> sizes, std::vector<double> weights) {
  int d = 0;
  for (int s : sizes) {
    if (s < 1) throw InvalidInput("face sizes must be positive");
    d += s;
  }
  std::vector<FaceSet> faces;
  int first = 0;
  for (int s : sizes) {
    faces.push_back(FaceSet::range(first, first + s - 1, d));
    first += s;
  }
  return FacePartition(std::move(faces), std::move(weights));
}

std::size_t FacePartition::face_of(int index) const {
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (faces_[f].contains(index)) return f;
  }
  throw InvalidInput("coordinate not covered by partition");
}

UnitAngle normalize(const Vector& y) {
  if (y.size() == 0) throw InvalidInput("cannot normalize an empty vector");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw InvalidInput("cannot normalize a non-finite vector");
    if (y[i] < 0.0) throw InvalidInput("cannot normalize a vector with negative entries");
  }
  // Scale by the max entry first so that huge or tiny inputs do not overflow.
  const double peak = y.maxCoeff();
  if (peak <= 0.0) throw InvalidInput("cannot normalize the zero vector");
  Vector scaled = y / peak;
  scaled /= scaled.norm();
  return UnitAngle(std::move(scaled));
}

AngularSample extract_angles(const RawSample& data, double retained_fraction) {
  if (!(retained_fraction > 0.0 && retained_fraction < 1.0)) {
    throw InvalidInput("retained fraction must lie in the open interval (0, 1)");
  }
  const Eigen::Index n = data.size();
  const auto keep = static_cast<Eigen::Index>(
      std::ceil(retained_fraction * static_cast<double>(n)));
  if (keep < 1 || keep > n) throw InvalidInput("retained count out of range");

  const Vector norms = data.rows().rowwise().norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms[a] > norms[b]; });
  order.resize(static_cast<std::size_t>(keep));
  const double threshold = norms[order.back()];
  std::sort(order.begin(), order.end());

  RowMatrix angles(keep, data.dim());
  for (Eigen::Index r = 0; r < keep; ++r) {
    const Eigen::Index src = order[static_cast<std::size_t>(r)];
    angles.row(r) = normalize(data.rows().row(src).transpose()).entries().transpose();
  }
  SampleMeta meta;
  meta.retained_fraction = retained_fraction;
  meta.threshold_norm = threshold;
  return AngularSample(std::move(angles), meta);
}

double dissimilarity(const UnitAngle& x, const UnitAngle& y, Dissimilarity kind) {
  const double c = std::clamp(x.dot(y), 0.0, 1.0);
  switch (kind) {
    case Dissimilarity::sqrt_euclid:
      return std::sqrt(1.0 - c);
    case Dissimilarity::angular:
      return 2.0 / std::numbers::pi * std::acos(c);
    case Dissimilarity::c1:
      return 1.0 - c;
    case Dissimilarity::c2:
      return 1.0 - c * c;
  }
  throw InvalidInput("unknown dissimilarity kind");
}

double face_angle(const UnitAngle& x, const FaceSet& face) {
  if (face.ambient_dim() != x.dim()) throw InvalidInput("face and angle dimension mismatch");
  double mass = 0.0;
  for (int i : face.indices()) mass += x[i] * x[i];
  return 2.0 / std::numbers::pi * std::acos(std::sqrt(std::clamp(mass, 0.0, 1.0)));
}

FaceSet nearest_face_of_dim(const UnitAngle& x, int m) {
  const auto d = static_cast<int>(x.dim());
  if (m < 1 || m > d) throw InvalidInput("face dimension out of range");
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());
  return FaceSet(std::move(order), d);
}

}  // namespace concomitant
