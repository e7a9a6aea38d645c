#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "concomitant/angular.hpp"
#include "concomitant/clustering.hpp"
#include "concomitant/husler_reiss.hpp"
#include "concomitant/theory.hpp"

namespace concomitant::csv {

/// Shortest round-trip form is not used; always 17 significant digits.
std::string format(double value);

/// Numeric table. A first line that does not parse as numbers is taken as the header.
struct Table {
  std::vector<std::string> header;
  RowMatrix values;
  /// Source line of each row, for error messages.
  std::vector<std::size_t> lines;
};

/// Throws ParseError (with the file name and line) on ragged rows or bad numbers.
Table read_table(const std::filesystem::path& path);

/// Header x1..xd.
AngularSample read_angles(const std::filesystem::path& path);
/// Header y1..yd, positive entries.
RawSample read_raw(const std::filesystem::path& path);
/// d x d matrix without header.
hr::Variogram read_variogram(const std::filesystem::path& path);
/// Columns weight, x1..xd.
theory::DiscreteAngularLaw read_law(const std::filesystem::path& path);
/// Columns centroid, x1..xd.
Centroids read_centroids(const std::filesystem::path& path);
/// Columns face, indices with one-based indices joined by ';'.
FacePartition read_truth(const std::filesystem::path& path, int dim);

/// Line-oriented writer; throws InvalidInput naming the file if it cannot be opened.
class Writer {
public:
  explicit Writer(const std::filesystem::path& path);

  Writer& header(const std::vector<std::string>& names);
  Writer& cell(std::string_view text);
  Writer& cell(double value);
  Writer& cell(int value);
  Writer& cell(std::size_t value);
  void end_row();

private:
  std::ofstream out_;
  std::filesystem::path path_;
  bool first_ = true;
};

/// "x1", ..., "x<d>" (or another prefix).
std::vector<std::string> numbered(std::string_view prefix, Eigen::Index d);

void write_angles(const std::filesystem::path& path, const AngularSample& sample);
void write_raw(const std::filesystem::path& path, const RawSample& sample);
void write_centroids(const std::filesystem::path& path, const Centroids& centroids);
void write_variogram(const std::filesystem::path& path, const hr::Variogram& gamma);
void write_truth(const std::filesystem::path& path, const FacePartition& truth);

}  // namespace concomitant::csv
