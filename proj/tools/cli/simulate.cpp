#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "commands.hpp"
#include "concomitant/csv.hpp"
#include "concomitant/error.hpp"
#include "concomitant/faces.hpp"
#include "concomitant/husler_reiss.hpp"
#include "concomitant/parallel.hpp"
#include "svg.hpp"

namespace concomitant::cli {

namespace {

constexpr std::array<Method, 2> kMethods{Method::kmeans, Method::kpc};

struct MethodOutcome {
  ClusterModel model;
  std::vector<ScoreResult> by_angle;  // one per eps_angle
  std::vector<ScoreResult> by_entry;  // one per eps_entry
};

struct Replication {
  int d1 = 0;
  Eigen::Index angles = 0;
  double threshold_norm = 0.0;
  FacePartition truth;
  std::array<MethodOutcome, 2> outcomes;
};

void check_thresholds(const std::vector<double>& eps, const char* name) {
  if (eps.empty()) throw InvalidInput(std::string(name) + " needs at least one value");
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput(std::string(name) + " values must lie in (0, 1)");
  }
}

Replication replicate(const SimulateConfig& c, std::size_t r) {
  const std::uint64_t base = substream_seed(c.seed, r);
  std::mt19937_64 rng(substream_seed(base, 0));
  const int d1 = std::uniform_int_distribution<int>(c.d1_min, c.d1_max)(rng);
  auto generated = hr::gen_variogram(c.d, d1, substream_seed(base, 1));
  const RawSample raw = hr::sample_hr(generated.gamma, c.n, substream_seed(base, 2));
  const AngularSample angles = extract_angles(raw, c.fraction);

  Replication rep{d1, angles.size(), angles.meta().threshold_norm.value_or(0.0), generated.truth, {}};
  FitOptions options;
  options.restarts = c.restarts;
  options.seed = substream_seed(base, 3);
  options.threads = 1;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    auto& out = rep.outcomes[m];
    out.model = fit(angles, c.k, kMethods[m], options);
    for (double e : c.eps_angle) {
      out.by_angle.push_back(score(out.model.centroids, rep.truth, e, c.eps_entry.front(), MatchRule::best_permutation));
    }
    for (double e : c.eps_entry) {
      out.by_entry.push_back(score(out.model.centroids, rep.truth, c.eps_angle.front(), e, MatchRule::best_permutation));
    }
  }
  return rep;
}

std::vector<double> sorted_desc(const UnitAngle& x) {
  std::vector<double> v(x.entries().data(), x.entries().data() + x.dim());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::vector<double> one_to(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
  return v;
}

void write_plots(const SimulateConfig& c, const std::vector<Replication>& reps) {
  const auto& first = reps.front();
  Plot curves{"Smallest angle to a face of each dimension (replication 1)", "face dimension", "angle", {}, {}};
  Plot entries{"Sorted centroid entries (replication 1)", "rank", "entry", {}, {}};
  for (const auto& f : first.truth.faces()) curves.guides.push_back(static_cast<double>(f.size()));
  entries.guides = curves.guides;
  std::size_t colour = 0;
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    for (std::size_t i = 0; i < first.outcomes[m].model.centroids.size(); ++i, ++colour) {
      const auto& x = first.outcomes[m].model.centroids[i];
      const std::string label = std::string(to_string(kMethods[m])) + " centroid " + std::to_string(i + 1);
      Series s{label, {}, {}, palette(i), m == 1, false};
      for (const auto& p : threshold_curve(x)) {
        s.x.push_back(p.dim);
        s.y.push_back(p.angle);
      }
      curves.series.push_back(s);
      entries.series.push_back({label, one_to(static_cast<std::size_t>(x.dim())), sorted_desc(x), palette(i), m == 1, false});
    }
  }
  write_svg(c.out / "threshold_curves.svg", curves);
  write_svg(c.out / "sorted_entries.svg", entries);

  Plot added{"Added indices summed over replications", "threshold", "added indices", {}, {}};
  Plot compare{"Angle to the true face against largest entry outside it", "angle to true face",
               "max entry outside", {}, {}};
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    const std::string name(to_string(kMethods[m]));
    Series angular{name + " angular", c.eps_angle, {}, palette(0), m == 1, false};
    Series entrywise{name + " entry-wise", c.eps_entry, {}, palette(1), m == 1, false};
    for (std::size_t e = 0; e < c.eps_angle.size(); ++e) {
      int total = 0;
      for (const auto& r : reps) total += r.outcomes[m].by_angle[e].summary.added_angular;
      angular.y.push_back(total);
    }
    for (std::size_t e = 0; e < c.eps_entry.size(); ++e) {
      int total = 0;
      for (const auto& r : reps) total += r.outcomes[m].by_entry[e].summary.added_entrywise;
      entrywise.y.push_back(total);
    }
    added.series.push_back(std::move(angular));
    added.series.push_back(std::move(entrywise));
    Series points{name, {}, {}, palette(m), false, true};
    for (const auto& r : reps) {
      for (const auto& report : r.outcomes[m].by_angle.front().reports) {
        points.x.push_back(report.angle_to_true);
        points.y.push_back(report.max_outside_entry);
      }
    }
    compare.series.push_back(std::move(points));
  }
  write_svg(c.out / "added_counts.svg", added);
  write_svg(c.out / "angle_vs_outside.svg", compare);
}

}  // namespace

void validate(const SimulateConfig& c) {
  if (c.d < 2) throw InvalidInput("--d must be at least 2");
  if (c.d1_min < 1 || c.d1_min > c.d1_max || c.d1_max > c.d - 1) {
    throw InvalidInput("d1 must satisfy 1 <= d1 < d");
  }
  if (c.n < 1 || c.restarts < 1 || c.replications < 1 || c.threads < 1) {
    throw InvalidInput("counts must be positive");
  }
  if (!(c.fraction > 0.0 && c.fraction < 1.0)) throw InvalidInput("--fraction must lie in (0, 1)");
  if (c.k != 2) throw InvalidInput("the simulated model has two faces; --k must be 2");
  if (std::ceil(c.fraction * c.n) < c.k) throw InvalidInput("too few retained angles for k clusters");
  check_thresholds(c.eps_angle, "--eps-angle");
  check_thresholds(c.eps_entry, "--eps-entry");
}

SimulateResult run_simulate(const SimulateConfig& c) {
  validate(c);
  std::filesystem::create_directories(c.out);

  const auto count = static_cast<std::size_t>(c.replications);
  std::vector<std::optional<Replication>> slots(count);
  parallel_for(count, c.threads, [&](std::size_t r) { slots[r] = replicate(c, r); });
  std::vector<Replication> reps;
  reps.reserve(count);
  for (auto& s : slots) reps.push_back(std::move(*s));

  csv::Writer replications(c.out / "replications.csv");
  replications.header({"replication", "d1", "angles", "threshold_norm", "method", "centroid", "true_face",
                       "angle_to_true", "max_outside_entry", "reward", "restart", "iterations"});
  csv::Writer centroids(c.out / "centroids.csv");
  {
    auto names = csv::numbered("x", c.d);
    names.insert(names.begin(), {"replication", "method", "centroid"});
    centroids.header(names);
  }
  csv::Writer errors(c.out / "errors.csv");
  errors.header({"replication", "method", "eps_angle", "errors", "angle_exceeds", "entry_exceeds", "added",
                 "removed"});
  csv::Writer entrywise(c.out / "entrywise.csv");
  entrywise.header({"replication", "method", "eps_entry", "added", "removed"});

  for (std::size_t r = 0; r < reps.size(); ++r) {
    const auto& rep = reps[r];
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      const auto& out = rep.outcomes[m];
      const std::string name(to_string(kMethods[m]));
      for (const auto& report : out.by_angle.front().reports) {
        replications.cell(r + 1).cell(rep.d1).cell(static_cast<std::size_t>(rep.angles)).cell(rep.threshold_norm);
        replications.cell(name).cell(report.centroid + 1).cell(report.true_face + 1);
        replications.cell(report.angle_to_true).cell(report.max_outside_entry).cell(out.model.cost_value);
        replications.cell(out.model.restart + 1).cell(out.model.iterations);
        replications.end_row();
      }
      for (std::size_t i = 0; i < out.model.centroids.size(); ++i) {
        centroids.cell(r + 1).cell(name).cell(i + 1);
        for (Eigen::Index j = 0; j < out.model.centroids[i].dim(); ++j) centroids.cell(out.model.centroids[i][j]);
        centroids.end_row();
      }
      for (std::size_t e = 0; e < c.eps_angle.size(); ++e) {
        const auto& s = out.by_angle[e].summary;
        errors.cell(r + 1).cell(name).cell(c.eps_angle[e]).cell(s.errors).cell(s.angle_exceeds);
        errors.cell(s.entry_exceeds).cell(s.added_angular).cell(s.removed_angular);
        errors.end_row();
      }
      for (std::size_t e = 0; e < c.eps_entry.size(); ++e) {
        const auto& s = out.by_entry[e].summary;
        entrywise.cell(r + 1).cell(name).cell(c.eps_entry[e]).cell(s.added_entrywise).cell(s.removed_entrywise);
        entrywise.end_row();
      }
    }
  }

  SimulateResult result;
  csv::Writer summary(c.out / "summary.csv");
  summary.header({"method", "eps_angle", "errors", "trials", "error_rate"});
  for (std::size_t m = 0; m < kMethods.size(); ++m) {
    for (std::size_t e = 0; e < c.eps_angle.size(); ++e) {
      MethodTotals t{kMethods[m], c.eps_angle[e], 0, 0};
      for (const auto& rep : reps) {
        t.errors += rep.outcomes[m].by_angle[e].summary.errors;
        t.trials += c.k;
      }
      summary.cell(to_string(t.method)).cell(t.eps_angle).cell(t.errors).cell(t.trials).cell(t.error_rate());
      summary.end_row();
      result.totals.push_back(t);
    }
  }
  if (c.plots) write_plots(c, reps);
  return result;
}

}  // namespace concomitant::cli
