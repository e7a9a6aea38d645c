#include <algorithm>
#include <array>
#include <charconv>

#include "commands.hpp"
#include "concomitant/csv.hpp"
#include "concomitant/error.hpp"
#include "concomitant/faces.hpp"
#include "svg.hpp"

namespace concomitant::cli {

namespace {

enum class Rule { angular, entrywise };

void write_report(const std::filesystem::path& path, const Centroids& centroids,
                  const std::optional<FacePartition>& truth, double eps, Rule rule) {
  csv::Writer w(path);
  w.header({"centroid_id", "detected_indices", "angle_to_true", "max_outside_entry", "added", "removed",
            "error_flag"});
  std::optional<ScoreResult> scored;
  if (truth) scored = score(centroids, *truth, eps, eps, MatchRule::best_permutation);
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    std::optional<FaceSet> face;
    if (rule == Rule::angular) {
      face = detect_angular(centroids[i], eps);
    } else {
      face = detect_entrywise(centroids[i], eps);
    }
    w.cell(i + 1).cell(face ? face->to_string() : std::string());
    if (scored) {
      const FaceReport& r = scored->reports[i];
      const Detection& det = rule == Rule::angular ? r.angular : r.entrywise;
      w.cell(r.angle_to_true).cell(r.max_outside_entry).cell(det.added).cell(det.removed).cell(r.error ? 1 : 0);
    } else {
      w.cell("").cell("").cell("").cell("").cell("");
    }
    w.end_row();
  }
}

}  // namespace

std::string short_number(double value) {
  std::array<char, 40> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void run_faces(const FacesConfig& c) {
  if (c.eps_angle.empty() && c.eps_entry.empty()) throw InvalidInput("no thresholds given");
  for (double e : c.eps_angle) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput("--eps-angle values must lie in (0, 1)");
  }
  for (double e : c.eps_entry) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput("--eps-entry values must lie in (0, 1)");
  }
  const Centroids centroids = csv::read_centroids(c.centroids);
  const auto d = static_cast<int>(centroids.front().dim());
  for (const auto& x : centroids) {
    if (x.dim() != d) throw InvalidInput("centroids differ in dimension");
  }
  std::optional<FacePartition> truth;
  if (c.truth) {
    truth = csv::read_truth(*c.truth, d);
    if (truth->size() != centroids.size()) throw InvalidInput("truth must list one face per centroid");
  }
  std::filesystem::create_directories(c.out);

  for (double e : c.eps_angle) {
    write_report(c.out / ("face_report_angular_" + short_number(e) + ".csv"), centroids, truth, e, Rule::angular);
  }
  for (double e : c.eps_entry) {
    write_report(c.out / ("face_report_entrywise_" + short_number(e) + ".csv"), centroids, truth, e,
                 Rule::entrywise);
  }
  if (truth) {
    csv::Writer s(c.out / "faces_summary.csv");
    s.header({"rule", "eps", "errors", "added", "removed"});
    for (double e : c.eps_angle) {
      const auto r = score(centroids, *truth, e, e, MatchRule::best_permutation).summary;
      s.cell("angular").cell(e).cell(r.errors).cell(r.added_angular).cell(r.removed_angular);
      s.end_row();
    }
    for (double e : c.eps_entry) {
      const auto r = score(centroids, *truth, e, e, MatchRule::best_permutation).summary;
      s.cell("entrywise").cell(e).cell(r.errors).cell(r.added_entrywise).cell(r.removed_entrywise);
      s.end_row();
    }
  }

  csv::Writer curves(c.out / "threshold_curves.csv");
  curves.header({"centroid_id", "dim", "angle", "sorted_entry"});
  Plot angle_plot{"Smallest angle to a face of each dimension", "face dimension", "angle", {}, {}};
  Plot entry_plot{"Sorted centroid entries", "rank", "entry", {}, {}};
  if (truth) {
    for (const auto& f : truth->faces()) angle_plot.guides.push_back(static_cast<double>(f.size()));
    entry_plot.guides = angle_plot.guides;
  }
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const auto& x = centroids[i];
    std::vector<double> entries(x.entries().data(), x.entries().data() + x.dim());
    std::sort(entries.begin(), entries.end(), std::greater<>());
    const std::string label = "centroid " + std::to_string(i + 1);
    Series a{label, {}, {}, palette(i), false, false};
    Series s{label, {}, {}, palette(i), false, false};
    const auto curve = threshold_curve(x);
    for (std::size_t j = 0; j < curve.size(); ++j) {
      curves.cell(i + 1).cell(curve[j].dim).cell(curve[j].angle).cell(entries[j]);
      curves.end_row();
      a.x.push_back(curve[j].dim);
      a.y.push_back(curve[j].angle);
      s.x.push_back(static_cast<double>(j + 1));
      s.y.push_back(entries[j]);
    }
    angle_plot.series.push_back(std::move(a));
    entry_plot.series.push_back(std::move(s));
  }
  write_svg(c.out / "threshold_curves.svg", angle_plot);
  write_svg(c.out / "sorted_entries.svg", entry_plot);
}

}  // namespace concomitant::cli
