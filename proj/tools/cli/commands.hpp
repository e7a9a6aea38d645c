#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/clustering.hpp"

namespace concomitant::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kInputError = 2 };

struct SimulateConfig {
  int d = 20;
  /// d1 drawn uniformly from [d1_min, d1_max] per replication.
  int d1_min = 3;
  int d1_max = 10;
  int n = 2000;
  double fraction = 0.1;
  int k = 2;
  int restarts = 100;
  int replications = 30;
  std::vector<double> eps_angle{0.1, 0.2};
  std::vector<double> eps_entry{0.03, 0.1};
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out = "simulate_out";
  bool plots = true;
};

void validate(const SimulateConfig& config);

struct MethodTotals {
  Method method = Method::kmeans;
  double eps_angle = 0.0;
  int errors = 0;
  int trials = 0;
  double error_rate() const { return trials > 0 ? static_cast<double>(errors) / trials : 0.0; }
};

struct SimulateResult {
  /// One entry per method and eps_angle, in that nesting order.
  std::vector<MethodTotals> totals;
};

/// Runs the replicated experiment and writes its tables and plots under config.out.
SimulateResult run_simulate(const SimulateConfig& config);

struct ClusterConfig {
  std::filesystem::path input;
  bool raw = false;
  std::optional<double> fraction;
  bool rank_transform = false;
  int k_min = 2;
  int k_max = 2;
  std::vector<Method> methods{Method::kmeans, Method::kpc};
  int restarts = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Angular thresholds used for the per-k face statistics.
  std::vector<double> eps_angle{0.2, 0.25, 1.0 / 3.0};
  std::filesystem::path out = "cluster_out";
};

void run_cluster(const ClusterConfig& config);

/// Marginal ranks mapped to the unit-Frechet scale: -1 / log(r / (n + 1)),
/// r the within-column rank (ties broken by row order).
RawSample rank_transform(const RowMatrix& data);

/// f^{-1}(sum_i f(d_i)) with f(d) = d(d - 1) / 2.
double reduced_dimension(const std::vector<int>& face_dims);

struct FacesConfig {
  std::filesystem::path centroids;
  std::vector<double> eps_angle{0.1};
  std::vector<double> eps_entry{0.03};
  std::optional<std::filesystem::path> truth;
  std::filesystem::path out = "faces_out";
};

void run_faces(const FacesConfig& config);

struct CheckConfig {
  std::string suite = "all";
  int trials = 1000;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> law;
  std::optional<std::filesystem::path> out;
};

/// Prints one row per check; returns kSuccess or kCheckFailed.
int run_check(const CheckConfig& config, std::ostream& os);

/// Shortest decimal that round-trips, used in file names.
std::string short_number(double value);

}  // namespace concomitant::cli
