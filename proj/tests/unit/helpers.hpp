#pragma once

#include <random>

#include "concomitant/angular.hpp"
#include "concomitant/types.hpp"

namespace testing_helpers {

inline concomitant::UnitAngle random_angle(int d, std::mt19937_64& rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  concomitant::Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng) < zero_prob ? 0.0 : u(rng) + 1e-3;
  if (v.maxCoeff() == 0.0) v[0] = 1.0;
  return concomitant::normalize(v);
}

inline concomitant::RowMatrix random_angles(int n, int d, std::mt19937_64& rng, double zero_prob = 0.0) {
  concomitant::RowMatrix m(n, d);
  for (int r = 0; r < n; ++r) m.row(r) = random_angle(d, rng, zero_prob).entries().transpose();
  return m;
}

// Random symmetric PSD matrix with nonnegative entries, built from outer products.
inline concomitant::Matrix random_psd(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  concomitant::Matrix m = concomitant::Matrix::Zero(d, d);
  for (int t = 0; t < d + 1; ++t) {
    concomitant::Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = u(rng);
    m += u(rng) * v * v.transpose();
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace testing_helpers
