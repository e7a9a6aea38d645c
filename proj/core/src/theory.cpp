#include "concomitant/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "concomitant/error.hpp"

namespace concomitant::theory {

namespace {

constexpr double kSlack = 1e-12;

struct FaceBlock {
  double probability = 0.0;
  Vector mass;   // E(X 1{X in F_I}) in R^d
  Matrix block;  // E(X_I X_I' 1{X in F_I}), |I| x |I|
};

std::vector<FaceBlock> face_blocks(const DiscreteAngularLaw& law, const FacePartition& partition) {
  const Eigen::Index d = law.dim();
  if (partition.ambient_dim() != d) throw InvalidInput("partition dimension does not match law");
  std::vector<FaceBlock> blocks(partition.size());
  for (std::size_t f = 0; f < partition.size(); ++f) {
    const auto n = static_cast<Eigen::Index>(partition.faces()[f].size());
    blocks[f].mass = Vector::Zero(d);
    blocks[f].block = Matrix::Zero(n, n);
  }
  for (std::size_t a = 0; a < law.size(); ++a) {
    const UnitAngle& x = law.atoms()[a];
    Eigen::Index top = 0;
    x.entries().maxCoeff(&top);
    const std::size_t f = partition.face_of(static_cast<int>(top));
    const FaceSet& face = partition.faces()[f];
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!face.contains(static_cast<int>(i)) && std::abs(x[i]) > kSupportTolerance) {
        throw PreconditionError("atom " + std::to_string(a + 1) + " does not lie on a single face");
      }
    }
    const double w = law.weights()[a];
    Vector local(static_cast<Eigen::Index>(face.size()));
    for (std::size_t j = 0; j < face.size(); ++j) local[static_cast<Eigen::Index>(j)] = x[face.indices()[j]];
    blocks[f].probability += w;
    blocks[f].mass += w * x.entries();
    blocks[f].block.selfadjointView<Eigen::Lower>().rankUpdate(local, w);
  }
  for (auto& b : blocks) {
    if (!(b.probability > 0.0)) throw PreconditionError("every face must carry positive mass");
    b.block = b.block.selfadjointView<Eigen::Lower>();
  }
  return blocks;
}

double require_balanced(const DiscreteAngularLaw& law) {
  const auto m = law_moments(law);
  if (!m.mu) throw PreconditionError("law is not balanced");
  return *m.mu;
}

UnitAngle embed(const Vector& local, const FaceSet& face) {
  Vector x = Vector::Zero(face.ambient_dim());
  for (std::size_t j = 0; j < face.size(); ++j) x[face.indices()[j]] = local[static_cast<Eigen::Index>(j)];
  return UnitAngle(std::move(x));
}

// Smallest achievable maximum angle when centroids are matched one-to-one with faces.
double matched_face_angle(const Centroids& centroids, const FacePartition& partition) {
  const std::size_t k = partition.size();
  std::vector<std::vector<double>> angle(centroids.size(), std::vector<double>(k));
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    for (std::size_t f = 0; f < k; ++f) angle[c][f] = face_angle(centroids[c], partition.faces()[f]);
  }
  if (centroids.size() != k || k > 8) {
    double worst = 0.0;
    for (const auto& row : angle) worst = std::max(worst, *std::min_element(row.begin(), row.end()));
    return worst;
  }
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) worst = std::max(worst, angle[c][perm[c]]);
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<UnitAngle> orbit(Vector atom) {
  std::vector<double> entries(atom.data(), atom.data() + atom.size());
  std::sort(entries.begin(), entries.end());
  std::vector<UnitAngle> out;
  do {
    out.emplace_back(Eigen::Map<const Vector>(entries.data(), atom.size()));
  } while (std::next_permutation(entries.begin(), entries.end()));
  return out;
}

template <class Check>
SweepReport sweep(int trials, Check&& check) {
  if (trials < 1) throw InvalidInput("trial count must be positive");
  SweepReport r;
  r.trials = trials;
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const auto [slack, ok] = check();
    r.worst_slack = std::min(r.worst_slack, slack);
    r.violations += ok ? 0 : 1;
  }
  return r;
}

}  // namespace

DiscreteAngularLaw::DiscreteAngularLaw(std::vector<UnitAngle> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw InvalidInput("law needs at least one atom");
  if (atoms_.size() != weights_.size()) throw InvalidInput("one weight per atom is required");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("weights must sum to 1");
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    if (atoms_[a].dim() != atoms_.front().dim()) throw InvalidInput("atoms differ in dimension");
    for (std::size_t b = 0; b < a; ++b) {
      if (atoms_[a].entries() == atoms_[b].entries()) throw InvalidInput("atoms must be pairwise distinct");
    }
  }
}

WeightedSample DiscreteAngularLaw::as_weighted() const {
  RowMatrix points(static_cast<Eigen::Index>(atoms_.size()), dim());
  for (std::size_t a = 0; a < atoms_.size(); ++a) points.row(static_cast<Eigen::Index>(a)) = atoms_[a].entries();
  return WeightedSample(std::move(points), Eigen::Map<const Vector>(weights_.data(), static_cast<Eigen::Index>(weights_.size())));
}

LawMoments law_moments(const DiscreteAngularLaw& law) {
  const Eigen::Index d = law.dim();
  Vector mean = Vector::Zero(d);
  Matrix sigma = Matrix::Zero(d, d);
  for (std::size_t a = 0; a < law.size(); ++a) {
    mean += law.weights()[a] * law.atoms()[a].entries();
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(law.atoms()[a].entries(), law.weights()[a]);
  }
  sigma = sigma.selfadjointView<Eigen::Lower>();
  std::optional<double> mu;
  if (mean.maxCoeff() - mean.minCoeff() <= kBalanceTolerance) mu = mean.mean();
  return {std::move(mean), MomentMatrix::from_outer_products(std::move(sigma)), mu};
}

MuBoundsReport check_mu_bounds(const DiscreteAngularLaw& law) {
  MuBoundsReport r;
  r.mu = require_balanced(law);
  const auto d = static_cast<double>(law.dim());
  r.lower = 1.0 / d;
  r.upper = 1.0 / std::sqrt(d);
  r.slack = std::min(r.mu - r.lower, r.upper - r.mu);
  r.within = r.slack >= -kSlack;
  if (std::abs(r.mu - r.lower) <= kSlack) {
    r.attained = MuBound::lower;
  } else if (std::abs(r.mu - r.upper) <= kSlack) {
    r.attained = MuBound::upper;
  }
  const bool all_basis = std::all_of(law.atoms().begin(), law.atoms().end(), [](const UnitAngle& x) {
    return std::abs(x.entries().maxCoeff() - 1.0) <= kSlack;
  });
  const bool single = law.size() == 1;
  r.characterization_holds = (r.attained == MuBound::lower) == all_basis &&
                             (r.attained == MuBound::upper) == single;
  return r;
}

Lambda1Report check_lambda1_bound(const DiscreteAngularLaw& law) {
  Lambda1Report r;
  const auto m = law_moments(law);
  if (!m.mu) throw PreconditionError("law is not balanced");
  r.mu = *m.mu;
  r.lambda1 = top_k_eigenvalues(m.sigma, 1).front();
  r.holds = r.lambda1 >= r.mu - kSlack;
  return r;
}

SufficientConditionReport check_sufficient_condition(const DiscreteAngularLaw& law,
                                                     const FacePartition& partition) {
  const auto blocks = face_blocks(law, partition);
  const auto moments = law_moments(law);
  SufficientConditionReport r;
  double min_top = std::numeric_limits<double>::infinity();
  double max_second = 0.0;
  for (std::size_t f = 0; f < blocks.size(); ++f) {
    const FaceBlock& b = blocks[f];
    const Matrix conditional = b.block / b.probability;
    const auto values = top_k_eigenvalues(conditional, std::min<int>(2, static_cast<int>(conditional.rows())));
    const auto pair = principal_eigenpair(MomentMatrix::from_outer_products(b.block));
    FaceSpectrum s{b.probability, values[0], values.size() > 1 ? values[1] : 0.0, std::nullopt,
                   embed(pair.vector.entries(), partition.faces()[f])};
    if (moments.mu) s.mu_face = *moments.mu / b.probability;
    min_top = std::min(min_top, s.probability * s.lambda1);
    max_second = std::max(max_second, s.probability * s.lambda2);
    r.on_face_reward += s.probability * s.lambda1;
    r.faces.push_back(std::move(s));
  }
  r.minmax_slack = min_top - max_second;
  r.minmax_holds = r.minmax_slack >= -kSlack;
  if (moments.mu) {
    r.lambda2_holds = std::all_of(r.faces.begin(), r.faces.end(),
                                  [](const FaceSpectrum& s) { return s.lambda2 <= *s.mu_face + kSlack; });
  }
  if (law.size() <= static_cast<std::size_t>(kMaxOracleAtoms)) {
    r.oracle = exhaustive_oracle(law.as_weighted(), static_cast<int>(partition.size()), 2);
    r.on_face_optimal = r.on_face_reward >= r.oracle->reward - kSlack;
    r.oracle_face_angle = matched_face_angle(r.oracle->centroids, partition);
  }
  return r;
}

double best_sqrt_composition(int d, int k) {
  if (d < 1 || k < 1) throw InvalidInput("composition needs positive d and k");
  const int q = d / k;
  const int rem = d % k;
  return rem * std::sqrt(q + 1.0) + (k - rem) * std::sqrt(static_cast<double>(q));
}

KmeansBalanceReport check_kmeans_balance(const DiscreteAngularLaw& law, const FacePartition& partition) {
  require_balanced(law);
  const auto blocks = face_blocks(law, partition);
  const auto d = static_cast<int>(law.dim());
  const auto k = static_cast<int>(partition.size());
  KmeansBalanceReport r;
  for (std::size_t f = 0; f < blocks.size(); ++f) {
    const auto size = static_cast<int>(partition.faces()[f].size());
    r.sizes.push_back(size);
    r.sqrt_size_sum += std::sqrt(static_cast<double>(size));
    r.on_face_reward += blocks[f].mass.norm();
  }
  r.best_sqrt_size_sum = best_sqrt_composition(d, k);
  r.sizes_optimal = r.sqrt_size_sum >= r.best_sqrt_size_sum - kSlack;
  if (law.size() <= static_cast<std::size_t>(kMaxOracleAtoms)) {
    r.oracle = exhaustive_oracle(law.as_weighted(), k, 1);
    r.on_face_optimal = r.on_face_reward >= r.oracle->reward - kSlack;
  }
  if (!r.sizes_optimal) {
    // Equal mass on the basis vectors: on faces this yields sqrt_size_sum / d.
    r.construction_on_face = r.sqrt_size_sum / d;
    if (d <= kMaxOracleAtoms) {
      r.construction_oracle = exhaustive_oracle(fixtures::case_i(d).as_weighted(), k, 1).reward;
    } else {
      r.construction_oracle = r.best_sqrt_size_sum / d;
    }
    r.can_fail = *r.construction_oracle > *r.construction_on_face + kSlack;
  }
  return r;
}

SymmetricModelReport check_symmetric_model(const DiscreteAngularLaw& law) {
  const auto m = law_moments(law);
  if (!m.mu) throw PreconditionError("law is not balanced");
  const Matrix& s = m.sigma.matrix();
  const Eigen::Index d = s.rows();
  double off_min = std::numeric_limits<double>::infinity();
  double off_max = -off_min;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      off_min = std::min(off_min, s(i, j));
      off_max = std::max(off_max, s(i, j));
    }
  }
  const double diag_spread = s.diagonal().maxCoeff() - s.diagonal().minCoeff();
  if (off_max - off_min > kBalanceTolerance || diag_spread > kBalanceTolerance) {
    throw PreconditionError("second moments are not permutation invariant");
  }
  SymmetricModelReport r;
  const auto dd = static_cast<double>(d);
  r.cross_moment = 0.5 * (off_min + off_max);
  r.expected_lambda1 = 1.0 / dd + (dd - 1.0) * r.cross_moment;
  r.expected_rest = 1.0 / dd - r.cross_moment;
  const auto values = top_k_eigenvalues(s, static_cast<int>(d));
  r.lambda1 = values.front();
  r.max_error = std::abs(values.front() - r.expected_lambda1);
  for (std::size_t i = 1; i < values.size(); ++i) {
    r.max_error = std::max(r.max_error, std::abs(values[i] - r.expected_rest));
  }
  r.holds = r.max_error <= kBalanceTolerance;
  return r;
}

bool check_triangle_inequality(double a, double b, double c, double d) {
  if (!(a > 0.0) || !(b > 0.0) || !(c >= 0.0) || !(d >= 0.0) || !(c + d > 0.0) ||
      !std::isfinite(a + b + c + d)) {
    throw InvalidInput("need a, b > 0, c, d >= 0 and c + d > 0");
  }
  const double lhs = std::max(std::hypot(a + b, c) + d, c + std::hypot(a + b, d));
  return lhs > std::hypot(a, c) + std::hypot(b, d);
}

Matrix random_moment_matrix(int d, std::mt19937_64& rng) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> rank(1, d);
  Matrix m = Matrix::Zero(d, d);
  const int terms = rank(rng);
  for (int t = 0; t < terms; ++t) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = unit(rng) < 0.4 ? 0.0 : unit(rng);
    if (v.maxCoeff() == 0.0) v[rank(rng) - 1] = 1.0;
    m.selfadjointView<Eigen::Lower>().rankUpdate(v, unit(rng) + 1e-3);
  }
  m = m.selfadjointView<Eigen::Lower>();
  return m / m.trace();
}

SweepReport eigenvalue_sum_sweep(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sweep(trials, [&] {
    const int d = std::uniform_int_distribution<int>(2, 8)(rng);
    const int k = std::uniform_int_distribution<int>(1, d)(rng);
    Matrix total = Matrix::Zero(d, d);
    double lhs = 0.0;
    for (int i = 0; i < k; ++i) {
      const Matrix m = random_moment_matrix(d, rng);
      total += m;
      lhs += top_k_eigenvalues(m, 1).front();
    }
    const auto values = top_k_eigenvalues(total, k);
    const double slack = std::accumulate(values.begin(), values.end(), 0.0) - lhs;
    return std::pair{slack, slack >= -1e-8};
  });
}

SweepReport equality_sweep(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sweep(trials, [&] {
    const int d = std::uniform_int_distribution<int>(2, 8)(rng);
    const int k = std::uniform_int_distribution<int>(1, d)(rng);
    const MomentMatrix m(random_moment_matrix(d, rng));
    const auto parts = equality_construction(m, k);
    Matrix total = Matrix::Zero(d, d);
    double lhs = 0.0;
    for (const auto& p : parts) {
      total += p;
      lhs += top_k_eigenvalues(p, 1).front();
    }
    const auto values = top_k_eigenvalues(m, k);
    const double gap = std::max(std::abs(std::accumulate(values.begin(), values.end(), 0.0) - lhs),
                                (total - m.matrix()).cwiseAbs().maxCoeff());
    return std::pair{-gap, gap <= 1e-8};
  });
}

SweepReport triangle_sweep(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Magnitudes spread over several decades; c or d is zero a quarter of the time.
  auto positive = [&] { return std::pow(10.0, 4.0 * unit(rng) - 2.0); };
  return sweep(trials, [&] {
    const double a = positive();
    const double b = positive();
    double c = positive();
    double d = positive();
    const double roll = unit(rng);
    if (roll < 0.125) {
      c = 0.0;
    } else if (roll < 0.25) {
      d = 0.0;
    }
    const double lhs = std::max(std::hypot(a + b, c) + d, c + std::hypot(a + b, d));
    const double slack = lhs - std::hypot(a, c) - std::hypot(b, d);
    return std::pair{slack, check_triangle_inequality(a, b, c, d)};
  });
}

namespace fixtures {

DiscreteAngularLaw case_i(int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  std::vector<UnitAngle> atoms;
  for (int i = 0; i < d; ++i) atoms.push_back(UnitAngle::basis(d, i));
  return {std::move(atoms), std::vector<double>(static_cast<std::size_t>(d), 1.0 / d)};
}

DiscreteAngularLaw case_ii(int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  return {{UnitAngle::centre(d)}, {1.0}};
}

DiscreteAngularLaw mixture(int d, double alpha) {
  if (d < 2) throw InvalidInput("mixture needs d >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  std::vector<UnitAngle> atoms;
  std::vector<double> weights;
  for (int i = 0; i < d; ++i) {
    atoms.push_back(UnitAngle::basis(d, i));
    weights.push_back(alpha / d);
  }
  atoms.push_back(UnitAngle::centre(d));
  weights.push_back(1.0 - alpha);
  return {std::move(atoms), std::move(weights)};
}

DiscreteAngularLaw exchangeable(int d, std::uint64_t seed) {
  if (d < 2 || d > 6) throw InvalidInput("exchangeable fixture supports 2 <= d <= 6");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(0.05, 1.0);
  Vector a(d);
  for (int i = 0; i < d; ++i) a[i] = entry(rng);
  auto atoms = orbit(a / a.norm());
  std::vector<double> weights(atoms.size(), 0.5 / static_cast<double>(atoms.size()));
  atoms.push_back(UnitAngle::centre(d));
  weights.push_back(0.5);
  return {std::move(atoms), std::move(weights)};
}

DiscreteAngularLaw three_blocks() {
  const double p1 = 1.0 / (1.0 + 2.0 * std::numbers::sqrt2);
  const double p2 = std::numbers::sqrt2 * p1;
  Vector pair_a = Vector::Zero(5);
  pair_a << 0, 1, 1, 0, 0;
  Vector pair_b = Vector::Zero(5);
  pair_b << 0, 0, 0, 1, 1;
  return {{UnitAngle::basis(5, 0), normalize(pair_a), normalize(pair_b)}, {p1, p2, p2}};
}

FacePartition three_blocks_grouping() {
  const std::vector<int> sizes{1, 4};
  return FacePartition::contiguous(sizes);
}

DiscreteAngularLaw perturbed_case_i(double eps) {
  const double root3 = std::sqrt(3.0);
  if (!(eps > 0.0) || 1.0 - eps - eps / root3 <= 0.0) throw InvalidInput("eps too large");
  const double w = (1.0 - eps - eps / root3) / 4.0;
  Vector v(4);
  v << 0, 1, 1, 1;
  return {{UnitAngle::basis(4, 0), UnitAngle::basis(4, 1), UnitAngle::basis(4, 2), UnitAngle::basis(4, 3),
           normalize(v)},
          {w + eps / root3, w, w, w, eps}};
}

FacePartition perturbed_case_i_faces() {
  const std::vector<int> sizes{1, 3};
  return FacePartition::contiguous(sizes);
}

TwoFaceLaw random_two_face(std::uint64_t seed) {
  static constexpr int kSizes[][2] = {{1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {3, 3}};
  std::mt19937_64 rng(seed);
  const auto& sizes = kSizes[std::uniform_int_distribution<int>(0, 7)(rng)];
  const int d = sizes[0] + sizes[1];
  std::uniform_real_distribution<double> entry(0.05, 1.0);

  std::vector<std::vector<UnitAngle>> orbits;
  std::vector<double> inverse_mu;
  int offset = 0;
  for (int s : sizes) {
    Vector a(s);
    for (int i = 0; i < s; ++i) a[i] = entry(rng);
    a /= a.norm();
    inverse_mu.push_back(s / a.sum());
    std::vector<UnitAngle> embedded;
    for (const auto& local : orbit(a)) {
      Vector x = Vector::Zero(d);
      x.segment(offset, s) = local.entries();
      embedded.emplace_back(std::move(x));
    }
    orbits.push_back(std::move(embedded));
    offset += s;
  }
  const double total = inverse_mu[0] + inverse_mu[1];
  std::vector<UnitAngle> atoms;
  std::vector<double> weights;
  for (std::size_t f = 0; f < 2; ++f) {
    const double p = inverse_mu[f] / total;
    for (auto& x : orbits[f]) {
      atoms.push_back(std::move(x));
      weights.push_back(p / static_cast<double>(orbits[f].size()));
    }
  }
  const std::vector<int> sz{sizes[0], sizes[1]};
  return {DiscreteAngularLaw(std::move(atoms), std::move(weights)), FacePartition::contiguous(sz)};
}

}  // namespace fixtures

}  // namespace concomitant::theory
