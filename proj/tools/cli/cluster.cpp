#include <algorithm>
#include <cmath>
#include <numeric>

#include "commands.hpp"
#include "concomitant/csv.hpp"
#include "concomitant/error.hpp"
#include "concomitant/faces.hpp"
#include "svg.hpp"

namespace concomitant::cli {

namespace {

AngularSample load(const ClusterConfig& c) {
  if (!c.raw) {
    if (c.fraction || c.rank_transform) throw InvalidInput("--fraction and --rank-transform need --raw");
    return csv::read_angles(c.input);
  }
  RawSample data = csv::read_raw(c.input);
  if (c.rank_transform) data = rank_transform(data.rows());
  if (c.fraction) return extract_angles(data, *c.fraction);
  std::vector<UnitAngle> all;
  for (Eigen::Index r = 0; r < data.size(); ++r) all.push_back(normalize(data.rows().row(r).transpose()));
  return AngularSample(all);
}

std::string tag(Method m, int k) { return std::string(to_string(m)) + "_k" + std::to_string(k); }

}  // namespace

RawSample rank_transform(const RowMatrix& data) {
  const Eigen::Index n = data.rows();
  RowMatrix out(n, data.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return data(a, c) < data(b, c); });
    for (Eigen::Index r = 0; r < n; ++r) {
      const double u = static_cast<double>(r + 1) / static_cast<double>(n + 1);
      out(order[static_cast<std::size_t>(r)], c) = -1.0 / std::log(u);
    }
  }
  return RawSample(std::move(out));
}

double reduced_dimension(const std::vector<int>& face_dims) {
  double params = 0.0;
  for (int d : face_dims) params += 0.5 * d * (d - 1.0);
  return 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * params));
}

void run_cluster(const ClusterConfig& c) {
  if (c.k_min < 1 || c.k_min > c.k_max) throw InvalidInput("k range must satisfy 1 <= a <= b");
  if (c.restarts < 1 || c.threads < 1) throw InvalidInput("counts must be positive");
  if (c.methods.empty()) throw InvalidInput("no clustering method selected");
  for (double e : c.eps_angle) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput("thresholds must lie in (0, 1)");
  }
  const AngularSample sample = load(c);
  if (sample.size() < c.k_max) throw InvalidInput("fewer angles than clusters");
  std::filesystem::create_directories(c.out);

  csv::Writer models(c.out / "models.csv");
  models.header({"method", "k", "reward", "cost", "restart", "iterations", "converged"});
  csv::Writer stats(c.out / "k_statistics.csv");
  stats.header({"method", "k", "eps_angle", "max_face_dim", "reduced_dim"});

  // plots[method][eps] -> (k, statistic)
  Plot max_dim{"Largest detected face", "k", "max face dimension", {}, {}};
  Plot reduced{"Reduced dimension", "k", "reduced dimension", {}, {}};

  for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
    const Method m = c.methods[mi];
    std::vector<Series> max_series, reduced_series;
    for (std::size_t e = 0; e < c.eps_angle.size(); ++e) {
      const std::string label = std::string(to_string(m)) + " eps " + short_number(c.eps_angle[e]);
      max_series.push_back({label, {}, {}, palette(e), mi == 1, false});
      reduced_series.push_back({label, {}, {}, palette(e), mi == 1, false});
    }
    for (int k = c.k_min; k <= c.k_max; ++k) {
      FitOptions options;
      options.restarts = c.restarts;
      options.seed = c.seed;
      options.threads = c.threads;
      const ClusterModel model = fit(sample, k, m, options);

      csv::write_centroids(c.out / ("centroids_" + tag(m, k) + ".csv"), model.centroids);
      csv::Writer labels(c.out / ("labels_" + tag(m, k) + ".csv"));
      labels.header({"row", "label"});
      for (std::size_t u = 0; u < model.assignment.labels.size(); ++u) {
        labels.cell(u + 1).cell(model.assignment.labels[u] + 1);
        labels.end_row();
      }
      models.cell(to_string(m)).cell(k).cell(model.cost_value).cell(1.0 - model.cost_value);
      models.cell(model.restart + 1).cell(model.iterations).cell(model.converged ? "true" : "false");
      models.end_row();

      for (std::size_t e = 0; e < c.eps_angle.size(); ++e) {
        std::vector<int> dims;
        for (const auto& x : model.centroids) dims.push_back(static_cast<int>(detect_angular(x, c.eps_angle[e]).size()));
        const int top = *std::max_element(dims.begin(), dims.end());
        const double red = reduced_dimension(dims);
        stats.cell(to_string(m)).cell(k).cell(c.eps_angle[e]).cell(top).cell(red);
        stats.end_row();
        max_series[e].x.push_back(k);
        max_series[e].y.push_back(top);
        reduced_series[e].x.push_back(k);
        reduced_series[e].y.push_back(red);
      }
    }
    for (auto& s : max_series) max_dim.series.push_back(std::move(s));
    for (auto& s : reduced_series) reduced.series.push_back(std::move(s));
  }
  if (c.k_max > c.k_min) {
    write_svg(c.out / "max_face_dim.svg", max_dim);
    write_svg(c.out / "reduced_dim.svg", reduced);
  }
}

}  // namespace concomitant::cli
