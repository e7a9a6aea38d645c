#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "commands.hpp"
#include "concomitant/csv.hpp"
#include "concomitant/error.hpp"
#include "concomitant/parallel.hpp"
#include "concomitant/theory.hpp"

namespace concomitant::cli {

namespace {

namespace th = theory;

struct Row {
  std::string name;
  bool pass;
  double slack;
  std::string detail;
};

class Table {
public:
  void add(std::string name, bool pass, double slack, std::string detail = {}) {
    rows_.push_back({std::move(name), pass, slack, std::move(detail)});
  }
  void add(const std::string& name, const th::SweepReport& r) {
    add(name, r.violations == 0, r.worst_slack,
        std::to_string(r.trials) + " trials; " + std::to_string(r.violations) + " violations");
  }
  const std::vector<Row>& rows() const { return rows_; }

private:
  std::vector<Row> rows_;
};

std::vector<std::pair<std::string, th::DiscreteAngularLaw>> balanced_fixtures() {
  std::vector<std::pair<std::string, th::DiscreteAngularLaw>> out;
  for (int d = 2; d <= 6; ++d) {
    out.emplace_back("case_i_d" + std::to_string(d), th::fixtures::case_i(d));
    out.emplace_back("case_ii_d" + std::to_string(d), th::fixtures::case_ii(d));
  }
  out.emplace_back("mixture_d2", th::fixtures::mixture(2, 0.5));
  out.emplace_back("mixture_d5", th::fixtures::mixture(5, 0.3));
  for (int d = 3; d <= 5; ++d) out.emplace_back("exchangeable_d" + std::to_string(d), th::fixtures::exchangeable(d, 7));
  out.emplace_back("three_blocks", th::fixtures::three_blocks());
  out.emplace_back("perturbed_case_i", th::fixtures::perturbed_case_i(0.01));
  return out;
}

void bounds_on(Table& t, const std::string& name, const th::DiscreteAngularLaw& law) {
  const auto mu = th::check_mu_bounds(law);
  t.add("mu_bounds/" + name, mu.within && mu.characterization_holds, mu.slack);
  const auto l1 = th::check_lambda1_bound(law);
  t.add("lambda1_ge_mu/" + name, l1.holds, l1.lambda1 - l1.mu);
}

void eigen_suite(Table& t, const CheckConfig& c) {
  t.add("eigenvalue_sum", th::eigenvalue_sum_sweep(c.trials, substream_seed(c.seed, 1)));
  t.add("equality_construction", th::equality_sweep(std::max(1, c.trials / 10), substream_seed(c.seed, 2)));
}

void bounds_suite(Table& t, const CheckConfig& c) {
  for (const auto& [name, law] : balanced_fixtures()) bounds_on(t, name, law);
  t.add("triangle_inequality", th::triangle_sweep(c.trials * 100, substream_seed(c.seed, 3)));
}

void conditions_suite(Table& t, const CheckConfig& c) {
  {
    const std::vector<int> sizes{2, 2};
    const auto r = th::check_sufficient_condition(th::fixtures::case_i(4), FacePartition::contiguous(sizes));
    t.add("sufficient/case_i_d4", r.minmax_holds && r.on_face_optimal.value_or(false), r.minmax_slack);
  }
  {
    const int laws = std::max(1, c.trials / 20);
    bool pass = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < laws; ++i) {
      const auto f = th::fixtures::random_two_face(substream_seed(c.seed, 100 + static_cast<std::uint64_t>(i)));
      const auto r = th::check_sufficient_condition(f.law, f.partition);
      pass = pass && r.minmax_holds && r.on_face_optimal.value_or(false) && r.oracle_face_angle.value_or(1.0) < 1e-8;
      worst = std::min(worst, r.minmax_slack);
    }
    t.add("sufficient/random_two_face", pass, worst, std::to_string(laws) + " laws");
  }
  {
    const auto r = th::check_sufficient_condition(th::fixtures::three_blocks(), th::fixtures::three_blocks_grouping());
    const double margin = r.oracle->reward - r.on_face_reward;
    t.add("counterexample/three_blocks", !r.minmax_holds && margin > 1e-6, margin, "oracle margin over grouping");
  }
  {
    const std::vector<int> even{2, 2};
    const std::vector<int> odd{1, 3};
    const auto a = th::check_kmeans_balance(th::fixtures::case_i(4), FacePartition::contiguous(even));
    t.add("kmeans_balance/sizes_2_2", a.sizes_optimal && a.on_face_optimal.value_or(false),
          a.on_face_reward - a.oracle->reward);
    const auto b = th::check_kmeans_balance(th::fixtures::case_i(4), FacePartition::contiguous(odd));
    t.add("kmeans_balance/sizes_1_3", !b.sizes_optimal && b.can_fail.value_or(false),
          b.construction_oracle.value_or(0.0) - b.construction_on_face.value_or(0.0), "k-means can fail");
  }
  for (const auto& [name, law] :
       {std::pair{std::string("case_i_d4"), th::fixtures::case_i(4)}, std::pair{std::string("case_ii_d4"), th::fixtures::case_ii(4)},
        std::pair{std::string("exchangeable_d4"), th::fixtures::exchangeable(4, 11)}}) {
    const auto r = th::check_symmetric_model(law);
    t.add("symmetric/" + name, r.holds, -r.max_error);
  }
  {
    const auto law = th::fixtures::perturbed_case_i(0.01);
    const auto faces = th::fixtures::perturbed_case_i_faces();
    const auto km = th::check_kmeans_balance(law, faces);
    const auto kpc = th::check_sufficient_condition(law, faces);
    const bool pass = !km.on_face_optimal.value_or(true) && kpc.on_face_optimal.value_or(false);
    t.add("robustness/perturbed_case_i", pass, km.oracle->reward - km.on_face_reward,
          "k-means leaves the faces; k-pc stays");
  }
}

}  // namespace

int run_check(const CheckConfig& c, std::ostream& os) {
  if (c.trials < 1) throw InvalidInput("--trials must be positive");
  const bool all = c.suite == "all";
  if (!all && c.suite != "eigen" && c.suite != "bounds" && c.suite != "conditions") {
    throw InvalidInput("unknown suite '" + c.suite + "'");
  }
  Table t;
  if (c.law) {
    const auto law = csv::read_law(*c.law);
    bounds_on(t, c.law->filename().string(), law);
  }
  if (all || c.suite == "eigen") eigen_suite(t, c);
  if (all || c.suite == "bounds") bounds_suite(t, c);
  if (all || c.suite == "conditions") conditions_suite(t, c);

  bool ok = true;
  os << "check,result,worst_slack,detail\n";
  for (const auto& r : t.rows()) {
    os << r.name << ',' << (r.pass ? "PASS" : "FAIL") << ',' << csv::format(r.slack) << ',' << r.detail << '\n';
    ok = ok && r.pass;
  }
  if (c.out) {
    std::filesystem::create_directories(*c.out);
    csv::Writer w(*c.out / "check_report.csv");
    w.header({"check", "result", "worst_slack", "detail"});
    for (const auto& r : t.rows()) {
      w.cell(r.name).cell(r.pass ? "PASS" : "FAIL").cell(r.slack).cell(r.detail);
      w.end_row();
    }
  }
  return ok ? kSuccess : kCheckFailed;
}

}  // namespace concomitant::cli
