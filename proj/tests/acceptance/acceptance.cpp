// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "commands.hpp"
#include "concomitant/clustering.hpp"
#include "concomitant/faces.hpp"
#include "concomitant/husler_reiss.hpp"
#include "concomitant/parallel.hpp"
#include "concomitant/theory.hpp"

using namespace concomitant;
namespace fs = std::filesystem;
namespace th = concomitant::theory;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared across criteria 1 and 2: every reward trace produced by fit().
struct TraceLedger {
  long traces = 0;
  long steps = 0;
  long violations = 0;

  void add(const ClusterModel& m) {
    for (const auto& t : m.all_traces) {
      ++traces;
      for (std::size_t i = 1; i < t.size(); ++i) {
        ++steps;
        if (t[i] < t[i - 1] - 1e-12) ++violations;
      }
    }
  }
} ledger;

UnitAngle random_angle(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = u(rng) < 0.3 ? 0.0 : u(rng);
  } while (v.maxCoeff() <= 0.0);
  return normalize(v);
}

WeightedSample random_law(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 4);
  std::uniform_int_distribution<int> atoms(2, 6);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int d = dim(rng);
  const int n = atoms(rng);
  RowMatrix pts(n, d);
  Vector w(n);
  for (int i = 0; i < n; ++i) {
    pts.row(i) = random_angle(d, rng).entries().transpose();
    w[i] = u(rng);
  }
  return WeightedSample(pts, w / w.sum());
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240101);
  int match[2] = {0, 0};
  double worst[2] = {0.0, 0.0};
  for (int law = 0; law < 100; ++law) {
    const auto s = random_law(rng);
    for (int p = 1; p <= 2; ++p) {
      const Method m = p == 1 ? Method::kmeans : Method::kpc;
      FitOptions opt;
      opt.restarts = 50;
      opt.seed = static_cast<std::uint64_t>(law);
      opt.keep_all_traces = true;
      const auto model = fit(s, 2, m, opt);
      ledger.add(model);
      const double gap = exhaustive_oracle(s, 2, p).reward - model.cost_value;
      worst[p - 1] = std::max(worst[p - 1], std::abs(gap));
      if (std::abs(gap) <= 1e-9) ++match[p - 1];
    }
  }
  const double secs = seconds_since(t0);
  return {match[0] >= 95 && match[1] >= 95 && secs < 60,
          fmt("p=1 %d/100, p=2 %d/100 laws within 1e-9 (largest gap %.3g, %.3g); %.1f s", match[0], match[1],
              worst[0], worst[1], secs)};
}

Outcome criterion2() {
  // Add fits on sampled angular data with more clusters and iterations.
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto gv = hr::gen_variogram(12, 3 + t % 6, substream_seed(7, static_cast<std::uint64_t>(t)));
    const auto raw = hr::sample_hr(gv.gamma, 2000, substream_seed(8, static_cast<std::uint64_t>(t)));
    const auto angles = extract_angles(raw, 0.1);
    for (auto m : {Method::kmeans, Method::kpc}) {
      FitOptions opt;
      opt.restarts = 20;
      opt.seed = static_cast<std::uint64_t>(t);
      opt.keep_all_traces = true;
      ledger.add(fit(angles, 2 + t % 4, m, opt));
    }
  }
  return {ledger.violations == 0 && ledger.steps > 0,
          fmt("%ld violations over %ld traces, %ld update steps", ledger.violations, ledger.traces, ledger.steps)};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  const auto sum = th::eigenvalue_sum_sweep(1000, 33);
  const auto eq = th::equality_sweep(100, 34);
  const double secs = seconds_since(t0);
  return {sum.violations == 0 && eq.violations == 0 && secs < 30,
          fmt("inequality %d/%d violations (worst slack %.3g); equality %d/%d violations (largest gap %.3g); %.1f s",
              sum.violations, sum.trials, sum.worst_slack, eq.violations, eq.trials, -eq.worst_slack, secs)};
}

Outcome criterion4() {
  int ok = 0;
  double worst_angle = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = th::fixtures::random_two_face(substream_seed(44, s));
    const auto report = th::check_sufficient_condition(f.law, f.partition);
    const auto oracle = exhaustive_oracle(f.law.as_weighted(), 2, 2);
    // Each true face must be matched by a distinct oracle centroid lying on it.
    double best = std::numeric_limits<double>::infinity();
    for (int perm = 0; perm < 2; ++perm) {
      double a = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        a = std::max(a, face_angle(oracle.centroids[c], f.partition.faces()[(c + perm) % 2]));
      }
      best = std::min(best, a);
    }
    worst_angle = std::max(worst_angle, best);
    if (report.minmax_holds && best < 1e-8) ++ok;
  }
  const auto law = th::fixtures::three_blocks();
  const auto grouping = th::fixtures::three_blocks_grouping();
  const auto r = th::check_sufficient_condition(law, grouping);
  const double margin = exhaustive_oracle(law.as_weighted(), 2, 2).reward - r.on_face_reward;
  return {ok == 50 && !r.minmax_holds && margin > 1e-6,
          fmt("%d/50 two-face laws with condition and on-face oracle (worst angle %.3g); three blocks: condition %s, "
              "oracle margin %.6g",
              ok, worst_angle, r.minmax_holds ? "holds" : "fails", margin)};
}

Outcome criterion5() {
  const auto s = th::fixtures::case_i(4).as_weighted();
  const double p1 = exhaustive_oracle(s, 2, 1).reward;
  const Centroids odd{UnitAngle::basis(4, 0), normalize(Eigen::Vector4d(0, 1, 1, 1))};
  const double odd_value = cost(s, odd, 1);
  // Every nonempty split of the four basis atoms, scored by sum of top eigenvalues.
  double p2_min = 1.0;
  double p2_max = 0.0;
  for (unsigned mask = 1; mask < 15; ++mask) {
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      Matrix m = Matrix::Zero(4, 4);
      for (int i = 0; i < 4; ++i) {
        if (((mask >> i) & 1u) == static_cast<unsigned>(side)) m(i, i) = 0.25;
      }
      total += Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().maxCoeff();
    }
    p2_min = std::min(p2_min, total);
    p2_max = std::max(p2_max, total);
  }
  const double p2_oracle = exhaustive_oracle(s, 2, 2).reward;
  const bool pass = std::abs(p1 - std::sqrt(2.0) / 2) <= 1e-12 && p1 > odd_value &&
                    std::abs(p2_min - 0.5) <= 1e-12 && std::abs(p2_max - 0.5) <= 1e-12 &&
                    std::abs(p2_oracle - 0.5) <= 1e-12;
  return {pass, fmt("p=1 oracle %.15f vs sizes (1,3) on-face %.6f; p=2 oracle %.15f, splits in [%.15f, %.15f]", p1,
                    odd_value, p2_oracle, p2_min, p2_max)};
}

double ks_unit_frechet(std::vector<double> y) {
  for (auto& v : y) v = std::exp(-1 / v);
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(y.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ks = std::max({ks, (static_cast<double>(i) + 1) / n - y[i], y[i] - static_cast<double>(i) / n});
  }
  return ks;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (double gamma : {0.5, 1.0, 2.0}) {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 1) = g(1, 0) = gamma;
    const auto sample = hr::sample_hr(hr::Variogram(g), 200000, substream_seed(66, static_cast<std::uint64_t>(gamma * 10)));
    // Joint exceedances of the marginal 95% order statistics over exceedances of the first.
    std::vector<double> a(200000);
    std::vector<double> b(200000);
    for (Eigen::Index r = 0; r < sample.size(); ++r) {
      a[static_cast<std::size_t>(r)] = sample.rows()(r, 0);
      b[static_cast<std::size_t>(r)] = sample.rows()(r, 1);
    }
    auto qa = a;
    auto qb = b;
    const std::size_t cut = 200000 - 10000;
    std::nth_element(qa.begin(), qa.begin() + cut, qa.end());
    std::nth_element(qb.begin(), qb.begin() + cut, qb.end());
    int first = 0;
    int both = 0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (a[r] > qa[cut]) {
        ++first;
        if (b[r] > qb[cut]) ++both;
      }
    }
    const double chi_hat = static_cast<double>(both) / first;
    const double chi = hr::chi_from_gamma(gamma);
    pass = pass && std::abs(chi_hat - chi) <= 0.05;
    detail += fmt("gamma %.1f: chi_hat %.4f vs %.4f; ", gamma, chi_hat, chi);
  }
  const auto gv = hr::gen_variogram(5, 2, 67, hr::VariogramRecipe{.separation = 1.0});
  const auto sample = hr::sample_hr(gv.gamma, 10000, 68);
  double worst_ks = 0.0;
  for (Eigen::Index j = 0; j < sample.dim(); ++j) {
    std::vector<double> col(static_cast<std::size_t>(sample.size()));
    for (Eigen::Index r = 0; r < sample.size(); ++r) col[static_cast<std::size_t>(r)] = sample.rows()(r, j);
    worst_ks = std::max(worst_ks, ks_unit_frechet(col));
  }
  const double secs = seconds_since(t0);
  pass = pass && worst_ks < 0.02 && secs < 120;
  return {pass, detail + fmt("max KS over 5 margins at n=10^4 %.4f; %.1f s", worst_ks, secs)};
}

Outcome criterion7() {
  // (a) closed-form Jacobian determinant against central differences of t.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  double worst_rel = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int d = t < 25 ? 3 : 4;
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = u(rng);
    const auto x = normalize(v);
    auto t_of = [&](const Vector& head) {
      Vector full(d);
      full.head(d - 1) = head;
      full[d - 1] = std::sqrt(1.0 - head.squaredNorm());
      return hr::t_transform(UnitAngle(full));
    };
    Matrix jac(d - 1, d - 1);
    const double h = 1e-6;
    for (int j = 0; j < d - 1; ++j) {
      Vector up = x.entries().head(d - 1);
      Vector down = up;
      up[j] += h;
      down[j] -= h;
      jac.col(j) = (t_of(up) - t_of(down)) / (2 * h);
    }
    worst_rel = std::max(worst_rel, std::abs(hr::jacobian_det_t(x) / std::abs(jac.determinant()) - 1.0));
  }

  // (b) per-base mu estimates against the pooled one.
  const auto gv = hr::gen_variogram(5, 2, 78, hr::VariogramRecipe{.separation = 1.0});
  const auto summary = hr::estimate_summary(gv.gamma, 100000, 79);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < summary.mu_by_base.size(); ++i) {
    for (std::size_t j = i + 1; j < summary.mu_by_base.size(); ++j) {
      const double se = std::hypot(summary.mu_by_base_se[i], summary.mu_by_base_se[j]);
      worst_z = std::max(worst_z, std::abs(summary.mu_by_base[i] - summary.mu_by_base[j]) / se);
    }
  }

  // (c) d = 2 density over the quarter circle, with the Monte Carlo mu.
  Matrix g2 = Matrix::Zero(2, 2);
  g2(0, 1) = g2(1, 0) = 1.0;
  const hr::Variogram gamma2(g2);
  const double mu = hr::estimate_summary(gamma2, 1000000, 80).mu;
  auto integrand = [&](double phi) {
    return hr::angular_density(UnitAngle(Eigen::Vector2d(std::cos(phi), std::sin(phi))), gamma2, mu) *
           std::sin(phi);
  };
  const double mass =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi / 2, 15, 1e-13);

  const bool pass = worst_rel <= 1e-5 && worst_z <= 3.0 && std::abs(mass - 1.0) <= 1e-6;
  return {pass, fmt("jacobian worst relative error %.3g; mu across bases worst |z| %.3f; d=2 density mass %.10f",
                    worst_rel, worst_z, mass)};
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  double sum = 0.0;
  long below = 0;
  long count = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto gv = hr::gen_variogram(100, 30, s);
    for (int i = 0; i < 100; ++i) {
      for (int j = i + 1; j < 100; ++j) {
        if ((i < 30) != (j < 30)) continue;
        const double chi = hr::chi_from_gamma(gv.gamma(i, j));
        sum += chi;
        below += chi < 0.1;
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double frac = static_cast<double>(below) / static_cast<double>(count);
  const double secs = seconds_since(t0);
  return {std::abs(mean - 0.2) <= 0.03 && std::abs(frac - 0.23) <= 0.05 && secs < 60,
          fmt("within-group chi mean %.4f, P(chi < 0.1) %.4f over %ld pairs; %.1f s", mean, frac, count, secs)};
}

Outcome criterion9(const fs::path& work) {
  const auto t0 = Clock::now();
  cli::SimulateConfig c;
  c.d = 20;
  c.d1_min = 3;
  c.d1_max = 10;
  c.n = 2000;
  c.fraction = 0.1;
  c.restarts = 100;
  c.replications = 30;
  c.eps_angle = {0.1};
  c.seed = 1;
  c.plots = false;
  c.out = work / "criterion9";
  const auto r = cli::run_simulate(c);
  const cli::MethodTotals* km = nullptr;
  const cli::MethodTotals* kpc = nullptr;
  for (const auto& t : r.totals) (t.method == Method::kmeans ? km : kpc) = &t;
  const double secs = seconds_since(t0);
  return {kpc->errors < km->errors && kpc->error_rate() <= 0.2 && secs < 600,
          fmt("k-means %d/%d errors (%.1f%%), k-pc %d/%d errors (%.1f%%); %.1f s", km->errors, km->trials,
              100 * km->error_rate(), kpc->errors, kpc->trials, 100 * kpc->error_rate(), secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion10(const fs::path& work) {
  cli::SimulateConfig c;
  c.d = 12;
  c.d1_min = 2;
  c.d1_max = 6;
  c.n = 1000;
  c.restarts = 20;
  c.replications = 6;
  c.seed = 10;
  const std::vector<std::pair<std::string, int>> runs{{"run_a", 1}, {"run_b", 1}, {"run_c", 8}};
  for (const auto& [name, threads] : runs) {
    c.threads = threads;
    c.out = work / "criterion10" / name;
    fs::remove_all(c.out);
    cli::run_simulate(c);
  }
  int files = 0;
  int differ = 0;
  for (const auto& entry : fs::directory_iterator(work / "criterion10" / "run_a")) {
    const auto name = entry.path().filename();
    ++files;
    const auto ref = slurp(entry.path());
    for (const char* other : {"run_b", "run_c"}) {
      if (slurp(work / "criterion10" / other / name) != ref) ++differ;
    }
  }
  return {files > 0 && differ == 0,
          fmt("%d output files compared across two single-thread runs and one 8-thread run; %d differ", files,
              differ)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "concomitant_acceptance";
  fs::create_directories(work);
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8,
      [&] { return criterion9(work); }, [&] { return criterion10(work); }};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
