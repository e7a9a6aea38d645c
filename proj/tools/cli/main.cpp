#include <charconv>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "concomitant/error.hpp"

namespace {

using concomitant::InvalidInput;
namespace cli = concomitant::cli;

std::pair<int, int> parse_range(const std::string& text, const char* flag) {
  const auto colon = text.find(':');
  int a = 0;
  int b = 0;
  auto whole = [](std::string_view s, int& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
  };
  if (colon == std::string::npos || !whole(std::string_view(text).substr(0, colon), a) ||
      !whole(std::string_view(text).substr(colon + 1), b)) {
    throw InvalidInput(std::string(flag) + " expects a:b");
  }
  return {a, b};
}

void shared(CLI::App* app, std::uint64_t& seed, std::string& out, int& threads) {
  app->add_option("--seed", seed, "master seed");
  app->add_option("--out", out, "output directory");
  app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering of concomitant extremes on the simplex"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;

  cli::SimulateConfig sim;
  std::optional<int> d1;
  std::string d1_range;
  auto* simulate = app.add_subcommand("simulate", "replicated Husler-Reiss experiment");
  shared(simulate, seed, out, threads);
  simulate->add_option("--d", sim.d, "dimension");
  simulate->add_option("--d1", d1, "size of the first face");
  simulate->add_option("--d1-range", d1_range, "first-face size drawn uniformly from a:b");
  simulate->add_option("--n", sim.n, "samples per replication");
  simulate->add_option("--fraction", sim.fraction, "retained fraction of largest norms");
  simulate->add_option("--k", sim.k, "clusters");
  simulate->add_option("--restarts", sim.restarts, "random restarts per fit");
  simulate->add_option("--replications", sim.replications, "replications");
  simulate->add_option("--eps-angle", sim.eps_angle, "angular thresholds (repeatable)");
  simulate->add_option("--eps-entry", sim.eps_entry, "entry-wise thresholds (repeatable)");
  simulate->add_flag("!--no-plots", sim.plots, "skip SVG output");

  cli::ClusterConfig clu;
  std::string input;
  std::optional<int> k;
  std::string k_range;
  std::string method = "both";
  std::optional<double> fraction;
  auto* cluster = app.add_subcommand("cluster", "cluster an angle or raw-data CSV");
  shared(cluster, seed, out, threads);
  cluster->add_option("input", input, "CSV file")->required();
  cluster->add_option("--k", k, "clusters");
  cluster->add_option("--k-range", k_range, "cluster counts a:b");
  cluster->add_option("--method", method, "kmeans, kpc or both");
  cluster->add_option("--restarts", clu.restarts, "random restarts");
  cluster->add_flag("--raw", clu.raw, "input holds raw positive observations");
  cluster->add_option("--fraction", fraction, "with --raw: retained fraction of largest norms");
  cluster->add_flag("--rank-transform", clu.rank_transform, "with --raw: rank-standardize margins first");
  cluster->add_option("--eps-angle", clu.eps_angle, "angular thresholds for the per-k statistics");

  cli::FacesConfig fac;
  std::string centroids;
  std::string truth;
  auto* faces = app.add_subcommand("faces", "detect faces from a centroid CSV");
  shared(faces, seed, out, threads);
  faces->add_option("centroids", centroids, "centroid CSV")->required();
  faces->add_option("--eps-angle", fac.eps_angle, "angular thresholds (repeatable)");
  faces->add_option("--eps-entry", fac.eps_entry, "entry-wise thresholds (repeatable)");
  faces->add_option("--truth", truth, "true faces CSV (face,indices)");

  cli::CheckConfig chk;
  std::string law;
  auto* check = app.add_subcommand("check", "numerical theory checks");
  shared(check, seed, out, threads);
  check->add_option("--suite", chk.suite, "eigen, bounds, conditions or all");
  check->add_option("--trials", chk.trials, "trials per sweep");
  check->add_option("--law", law, "discrete law CSV (weight,x1..xd) to check as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kInputError;
  }

  try {
    if (*simulate) {
      if (d1 && !d1_range.empty()) throw InvalidInput("give --d1 or --d1-range, not both");
      if (d1) {
        sim.d1_min = sim.d1_max = *d1;
      } else if (!d1_range.empty()) {
        std::tie(sim.d1_min, sim.d1_max) = parse_range(d1_range, "--d1-range");
      }
      sim.seed = seed;
      sim.threads = threads;
      if (!out.empty()) sim.out = out;
      const auto result = cli::run_simulate(sim);
      std::cout << "method,eps_angle,errors,trials,error_rate\n";
      for (const auto& t : result.totals) {
        std::cout << concomitant::to_string(t.method) << ',' << t.eps_angle << ',' << t.errors << ','
                  << t.trials << ',' << t.error_rate() << '\n';
      }
    } else if (*cluster) {
      if (k && !k_range.empty()) throw InvalidInput("give --k or --k-range, not both");
      if (k) {
        clu.k_min = clu.k_max = *k;
      } else if (!k_range.empty()) {
        std::tie(clu.k_min, clu.k_max) = parse_range(k_range, "--k-range");
      }
      if (method == "both") {
        clu.methods = {concomitant::Method::kmeans, concomitant::Method::kpc};
      } else {
        clu.methods = {concomitant::parse_method(method)};
      }
      clu.input = input;
      clu.fraction = fraction;
      clu.seed = seed;
      clu.threads = threads;
      if (!out.empty()) clu.out = out;
      cli::run_cluster(clu);
    } else if (*faces) {
      fac.centroids = centroids;
      if (!truth.empty()) fac.truth = truth;
      if (!out.empty()) fac.out = out;
      cli::run_faces(fac);
    } else if (*check) {
      chk.seed = seed;
      if (!law.empty()) chk.law = law;
      if (!out.empty()) chk.out = out;
      return cli::run_check(chk, std::cout);
    }
  } catch (const concomitant::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  }
  return cli::kSuccess;
}
