#include "concomitant/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "concomitant/error.hpp"
#include "concomitant/parallel.hpp"
#include "concomitant/spectral.hpp"

namespace concomitant {

namespace {

Matrix centroid_matrix(const Centroids& centroids, Eigen::Index d) {
  if (centroids.empty()) throw InvalidInput("at least one centroid is required");
  Matrix c(d, static_cast<Eigen::Index>(centroids.size()));
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    if (centroids[i].dim() != d) throw InvalidInput("centroid dimension does not match sample");
    c.col(static_cast<Eigen::Index>(i)) = centroids[i].entries();
  }
  return c;
}

void check_assignment(const WeightedSample& sample, const Assignment& a, std::size_t k) {
  if (a.labels.size() != static_cast<std::size_t>(sample.size())) {
    throw InvalidInput("assignment size does not match sample");
  }
  if (static_cast<std::size_t>(a.k) != k) throw InvalidInput("assignment k does not match centroids");
  for (int g : a.labels) {
    if (g < 0 || g >= a.k) throw InvalidInput("cluster label out of range");
  }
}

// One pass over the n x k dot-product matrix: labels and reward together.
struct Evaluation {
  std::vector<int> labels;
  double reward = 0.0;
};

Evaluation evaluate(const WeightedSample& sample, const Matrix& c, int p) {
  const Matrix dots = sample.points() * c;
  Evaluation ev;
  ev.labels.resize(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index u = 0; u < dots.rows(); ++u) {
    Eigen::Index best = 0;
    double top = dots(u, 0);
    for (Eigen::Index i = 1; i < dots.cols(); ++i) {
      if (dots(u, i) > top) {
        top = dots(u, i);
        best = i;
      }
    }
    ev.labels[static_cast<std::size_t>(u)] = static_cast<int>(best);
    top = std::clamp(top, 0.0, 1.0);
    ev.reward += sample.weights()[u] * (p == 1 ? top : top * top);
  }
  return ev;
}

void check_exponent(int p) {
  if (p != 1 && p != 2) throw InvalidInput("reward exponent must be 1 or 2");
}

Centroids update(const WeightedSample& sample, const Assignment& a, const Centroids& old,
                 Method method) {
  return method == Method::kmeans ? kmeans_update(sample, a, old) : kpc_update(sample, a, old);
}

// Clusters ordered by lowest-index member, empty clusters last in prior order.
void canonicalize(ClusterModel& model) {
  const auto k = static_cast<std::size_t>(model.assignment.k);
  std::vector<std::size_t> first(k, model.assignment.labels.size());
  for (std::size_t u = 0; u < model.assignment.labels.size(); ++u) {
    auto& f = first[static_cast<std::size_t>(model.assignment.labels[u])];
    f = std::min(f, u);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
  std::vector<int> relabel(k);
  Centroids sorted;
  sorted.reserve(k);
  for (std::size_t pos = 0; pos < k; ++pos) {
    relabel[order[pos]] = static_cast<int>(pos);
    sorted.push_back(model.centroids[order[pos]]);
  }
  for (int& g : model.assignment.labels) g = relabel[static_cast<std::size_t>(g)];
  model.centroids = std::move(sorted);
}

struct Run {
  Centroids centroids;
  double reward = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

Run single_run(const WeightedSample& sample, int k, Method method, const FitOptions& options,
               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto n = static_cast<int>(sample.size());
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  // Partial Fisher-Yates: the first k entries are a uniform draw without replacement.
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  Run run;
  for (int i = 0; i < k; ++i) {
    run.centroids.emplace_back(sample.points().row(pool[static_cast<std::size_t>(i)]).transpose());
  }

  const int p = reward_exponent(method);
  const Eigen::Index d = sample.dim();
  Evaluation ev = evaluate(sample, centroid_matrix(run.centroids, d), p);
  run.reward = ev.reward;
  run.trace.push_back(ev.reward);
  while (run.iterations < options.max_iter) {
    Centroids next = update(sample, Assignment{std::move(ev.labels), k}, run.centroids, method);
    ev = evaluate(sample, centroid_matrix(next, d), p);
    ++run.iterations;
    run.trace.push_back(ev.reward);
    const double gain = ev.reward - run.reward;
    run.centroids = std::move(next);
    run.reward = ev.reward;
    if (gain < options.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

WeightedSample::WeightedSample(const AngularSample& sample)
    : points_(sample.rows()),
      weights_(Vector::Constant(sample.size(), sample.size() > 0 ? 1.0 / static_cast<double>(sample.size()) : 0.0)) {}

WeightedSample::WeightedSample(RowMatrix points, Vector weights)
    : points_(AngularSample(std::move(points)).rows()), weights_(std::move(weights)) {
  if (weights_.size() != points_.rows()) throw InvalidInput("one weight per point required");
  if (!weights_.allFinite() || (weights_.array() <= 0.0).any()) {
    throw InvalidInput("weights must be positive and finite");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) throw InvalidInput("weights must sum to one");
}

int reward_exponent(Method method) { return method == Method::kmeans ? 1 : 2; }

std::string_view to_string(Method method) { return method == Method::kmeans ? "kmeans" : "kpc"; }

Method parse_method(std::string_view name) {
  if (name == "kmeans") return Method::kmeans;
  if (name == "kpc") return Method::kpc;
  throw InvalidInput("unknown clustering method '" + std::string(name) + "'");
}

Assignment assign(const WeightedSample& sample, const Centroids& centroids) {
  const Matrix c = centroid_matrix(centroids, sample.dim());
  return {evaluate(sample, c, 1).labels, static_cast<int>(centroids.size())};
}

Centroids kmeans_update(const WeightedSample& sample, const Assignment& assignment,
                        const Centroids& old_centroids) {
  check_assignment(sample, assignment, old_centroids.size());
  Matrix sums = Matrix::Zero(sample.dim(), assignment.k);
  std::vector<bool> occupied(static_cast<std::size_t>(assignment.k), false);
  for (Eigen::Index u = 0; u < sample.size(); ++u) {
    const int g = assignment.labels[static_cast<std::size_t>(u)];
    sums.col(g) += sample.weights()[u] * sample.points().row(u).transpose();
    occupied[static_cast<std::size_t>(g)] = true;
  }
  Centroids out;
  out.reserve(old_centroids.size());
  for (int i = 0; i < assignment.k; ++i) {
    if (!occupied[static_cast<std::size_t>(i)]) {
      out.push_back(old_centroids[static_cast<std::size_t>(i)]);
    } else {
      out.push_back(normalize(sums.col(i)));
    }
  }
  return out;
}

Centroids kpc_update(const WeightedSample& sample, const Assignment& assignment,
                     const Centroids& old_centroids) {
  check_assignment(sample, assignment, old_centroids.size());
  const Eigen::Index d = sample.dim();
  std::vector<Matrix> moments(static_cast<std::size_t>(assignment.k), Matrix::Zero(d, d));
  std::vector<bool> occupied(static_cast<std::size_t>(assignment.k), false);
  for (Eigen::Index u = 0; u < sample.size(); ++u) {
    const auto g = static_cast<std::size_t>(assignment.labels[static_cast<std::size_t>(u)]);
    const auto theta = sample.points().row(u);
    moments[g].selfadjointView<Eigen::Lower>().rankUpdate(theta.transpose(), sample.weights()[u]);
    occupied[g] = true;
  }
  Centroids out;
  out.reserve(old_centroids.size());
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (!occupied[i]) {
      out.push_back(old_centroids[i]);
      continue;
    }
    Matrix full = moments[i].selfadjointView<Eigen::Lower>();
    out.push_back(principal_eigenpair(MomentMatrix::from_outer_products(std::move(full))).vector);
  }
  return out;
}

double cost(const WeightedSample& sample, const Centroids& centroids, int p) {
  check_exponent(p);
  return evaluate(sample, centroid_matrix(centroids, sample.dim()), p).reward;
}

ClusterModel fit(const WeightedSample& sample, int k, Method method, const FitOptions& options) {
  if (k < 1) throw InvalidInput("k must be positive");
  if (k > sample.size()) throw InvalidInput("k exceeds the number of points");
  if (options.restarts < 1) throw InvalidInput("at least one restart is required");
  if (options.max_iter < 0) throw InvalidInput("max_iter must be nonnegative");

  std::vector<Run> runs(static_cast<std::size_t>(options.restarts));
  parallel_for(runs.size(), options.threads, [&](std::size_t r) {
    runs[r] = single_run(sample, k, method, options, substream_seed(options.seed, r));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].reward > runs[best].reward) best = r;
  }

  ClusterModel model;
  model.method = method;
  model.restart = static_cast<int>(best);
  model.iterations = runs[best].iterations;
  model.converged = runs[best].converged;
  model.centroids = runs[best].centroids;
  model.reward_trace = runs[best].trace;
  const Evaluation ev =
      evaluate(sample, centroid_matrix(model.centroids, sample.dim()), reward_exponent(method));
  model.assignment = Assignment{ev.labels, k};
  model.cost_value = ev.reward;
  if (options.keep_all_traces) {
    for (auto& run : runs) model.all_traces.push_back(std::move(run.trace));
  }
  canonicalize(model);
  return model;
}

OracleResult exhaustive_oracle(const WeightedSample& sample, int k, int p) {
  check_exponent(p);
  if (k < 1) throw InvalidInput("k must be positive");
  const Eigen::Index d = sample.dim();

  // Collapse identical points into weighted atoms, ordered by first occurrence.
  std::vector<Vector> atoms;
  std::vector<double> mass;
  std::vector<int> atom_of(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index u = 0; u < sample.size(); ++u) {
    const Vector theta = sample.points().row(u).transpose();
    std::size_t a = 0;
    while (a < atoms.size() && atoms[a] != theta) ++a;
    if (a == atoms.size()) {
      if (static_cast<int>(atoms.size()) == kMaxOracleAtoms) {
        throw Infeasible("exhaustive oracle supports at most " + std::to_string(kMaxOracleAtoms) +
                         " distinct atoms");
      }
      atoms.push_back(theta);
      mass.push_back(0.0);
    }
    mass[a] += sample.weights()[u];
    atom_of[static_cast<std::size_t>(u)] = static_cast<int>(a);
  }
  const auto m = static_cast<int>(atoms.size());
  const int blocks = std::min(k, m);

  auto block_reward = [&](const std::vector<int>& rgs, int b) {
    if (p == 1) {
      Vector sum = Vector::Zero(d);
      for (int a = 0; a < m; ++a) {
        if (rgs[static_cast<std::size_t>(a)] == b) sum += mass[static_cast<std::size_t>(a)] * atoms[static_cast<std::size_t>(a)];
      }
      return sum.norm();
    }
    Matrix sigma = Matrix::Zero(d, d);
    for (int a = 0; a < m; ++a) {
      if (rgs[static_cast<std::size_t>(a)] == b) {
        const Vector& x = atoms[static_cast<std::size_t>(a)];
        sigma.noalias() += mass[static_cast<std::size_t>(a)] * x * x.transpose();
      }
    }
    return top_k_eigenvalues(sigma, 1).front();
  };

  // Restricted growth strings with exactly `blocks` distinct values.
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  std::vector<int> best_rgs;
  double best = -1.0;
  auto visit = [&]() {
    double total = 0.0;
    for (int b = 0; b < blocks; ++b) total += block_reward(rgs, b);
    if (total > best) {
      best = total;
      best_rgs = rgs;
    }
  };
  auto recurse = [&](auto&& self, int pos, int used) -> void {
    if (pos == m) {
      if (used == blocks) visit();
      return;
    }
    // Not enough atoms left to open the remaining blocks.
    if (used + (m - pos) < blocks) return;
    for (int b = 0; b < std::min(used + 1, blocks); ++b) {
      rgs[static_cast<std::size_t>(pos)] = b;
      self(self, pos + 1, std::max(used, b + 1));
    }
  };
  if (m > 0) recurse(recurse, 0, 0);

  OracleResult result;
  result.reward = std::max(best, 0.0);
  result.partition.k = k;
  result.partition.labels.resize(static_cast<std::size_t>(sample.size()));
  for (std::size_t u = 0; u < atom_of.size(); ++u) {
    result.partition.labels[u] = best_rgs[static_cast<std::size_t>(atom_of[u])];
  }
  for (int b = 0; b < k; ++b) {
    if (b >= blocks) {
      result.centroids.push_back(UnitAngle::centre(d));
      continue;
    }
    Vector sum = Vector::Zero(d);
    Matrix sigma = Matrix::Zero(d, d);
    for (int a = 0; a < m; ++a) {
      if (best_rgs[static_cast<std::size_t>(a)] != b) continue;
      const Vector& x = atoms[static_cast<std::size_t>(a)];
      sum += mass[static_cast<std::size_t>(a)] * x;
      sigma.noalias() += mass[static_cast<std::size_t>(a)] * x * x.transpose();
    }
    if (p == 1) {
      result.centroids.push_back(normalize(sum));
    } else {
      result.centroids.push_back(
          principal_eigenpair(MomentMatrix::from_outer_products(std::move(sigma))).vector);
    }
  }
  return result;
}

}  // namespace concomitant
