#include "concomitant/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "concomitant/error.hpp"

namespace concomitant::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return in;
}

void check_columns(const Table& t, const std::filesystem::path& path, Eigen::Index min_cols) {
  if (t.values.rows() == 0) throw ParseError(path.string(), t.header.empty() ? 1 : 2, "no data rows");
  if (t.values.cols() < min_cols) {
    throw ParseError(path.string(), t.lines.front(), "expected at least " + std::to_string(min_cols) + " columns");
  }
}

// Converts a library validation error on one row into a ParseError at that row.
template <class F>
auto at_row(const Table& t, const std::filesystem::path& path, Eigen::Index row, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path.string(), t.lines[static_cast<std::size_t>(row)], e.what());
  }
}

}  // namespace

std::string format(double value) {
  std::array<char, 40> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), ptr);
}

Table read_table(const std::filesystem::path& path) {
  auto in = open(path);
  Table t;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text, ',');
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], row[i]);
    if (!numeric) {
      if (rows.empty() && t.header.empty()) {
        for (auto f : fields) t.header.emplace_back(f);
        continue;
      }
      throw ParseError(path.string(), number, "malformed number");
    }
    const std::size_t width = !rows.empty() ? rows.front().size() : (t.header.empty() ? row.size() : t.header.size());
    if (row.size() != width) {
      throw ParseError(path.string(), number,
                       "expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
    t.lines.push_back(number);
  }
  const auto cols = rows.empty() ? static_cast<Eigen::Index>(t.header.size()) : static_cast<Eigen::Index>(rows.front().size());
  t.values.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) t.values(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return t;
}

AngularSample read_angles(const std::filesystem::path& path) {
  const Table t = read_table(path);
  check_columns(t, path, 2);
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    at_row(t, path, r, [&] { return UnitAngle(t.values.row(r).transpose()); });
  }
  return AngularSample(t.values);
}

RawSample read_raw(const std::filesystem::path& path) {
  const Table t = read_table(path);
  check_columns(t, path, 2);
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
      if (!(t.values(r, c) > 0.0) || !std::isfinite(t.values(r, c))) {
        throw ParseError(path.string(), t.lines[static_cast<std::size_t>(r)], "raw entries must be positive and finite");
      }
    }
  }
  return RawSample(t.values);
}

hr::Variogram read_variogram(const std::filesystem::path& path) {
  const Table t = read_table(path);
  if (!t.header.empty()) throw ParseError(path.string(), 1, "variogram file has no header");
  check_columns(t, path, 2);
  if (t.values.rows() != t.values.cols()) {
    throw ParseError(path.string(), t.lines.back(), "variogram must be square");
  }
  return hr::Variogram(Matrix(t.values));
}

theory::DiscreteAngularLaw read_law(const std::filesystem::path& path) {
  const Table t = read_table(path);
  check_columns(t, path, 3);
  std::vector<UnitAngle> atoms;
  std::vector<double> weights;
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    weights.push_back(t.values(r, 0));
    atoms.push_back(at_row(t, path, r, [&] { return UnitAngle(t.values.row(r).tail(t.values.cols() - 1).transpose()); }));
  }
  return theory::DiscreteAngularLaw(std::move(atoms), std::move(weights));
}

Centroids read_centroids(const std::filesystem::path& path) {
  const Table t = read_table(path);
  check_columns(t, path, 3);
  Centroids out;
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    out.push_back(at_row(t, path, r, [&] { return UnitAngle(t.values.row(r).tail(t.values.cols() - 1).transpose()); }));
  }
  return out;
}

FacePartition read_truth(const std::filesystem::path& path, int dim) {
  auto in = open(path);
  std::string line;
  std::size_t number = 0;
  std::vector<FaceSet> faces;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text, ',');
    if (fields.size() != 2) throw ParseError(path.string(), number, "expected columns face,indices");
    double id = 0.0;
    if (!parse_double(fields[0], id)) {
      if (number == 1) continue;
      throw ParseError(path.string(), number, "malformed face id");
    }
    std::vector<int> idx;
    for (auto part : split(fields[1], ';')) {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
      if (ec != std::errc{} || ptr != part.data() + part.size() || value < 1 || value > dim) {
        throw ParseError(path.string(), number, "index out of range 1.." + std::to_string(dim));
      }
      idx.push_back(value - 1);
    }
    try {
      faces.emplace_back(std::move(idx), dim);
    } catch (const Error& e) {
      throw ParseError(path.string(), number, e.what());
    }
  }
  if (faces.empty()) throw ParseError(path.string(), number, "no faces");
  try {
    return FacePartition(std::move(faces));
  } catch (const Error& e) {
    throw ParseError(path.string(), number, e.what());
  }
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw InvalidInput("cannot write " + path.string());
}

Writer& Writer::header(const std::vector<std::string>& names) {
  for (const auto& n : names) cell(n);
  end_row();
  return *this;
}

Writer& Writer::cell(std::string_view text) {
  if (!first_) out_ << ',';
  out_ << text;
  first_ = false;
  return *this;
}

Writer& Writer::cell(double value) { return cell(format(value)); }
Writer& Writer::cell(int value) { return cell(std::to_string(value)); }
Writer& Writer::cell(std::size_t value) { return cell(std::to_string(value)); }

void Writer::end_row() {
  out_ << '\n';
  first_ = true;
  if (!out_) throw InvalidInput("write failed for " + path_.string());
}

std::vector<std::string> numbered(std::string_view prefix, Eigen::Index d) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= d; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

namespace {

void write_rows(const std::filesystem::path& path, const RowMatrix& m, std::string_view prefix) {
  Writer w(path);
  w.header(numbered(prefix, m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.cell(m(r, c));
    w.end_row();
  }
}

}  // namespace

void write_angles(const std::filesystem::path& path, const AngularSample& sample) {
  write_rows(path, sample.rows(), "x");
}

void write_raw(const std::filesystem::path& path, const RawSample& sample) { write_rows(path, sample.rows(), "y"); }

void write_centroids(const std::filesystem::path& path, const Centroids& centroids) {
  if (centroids.empty()) throw InvalidInput("no centroids to write");
  Writer w(path);
  auto names = numbered("x", centroids.front().dim());
  names.insert(names.begin(), "centroid");
  w.header(names);
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    w.cell(static_cast<int>(c + 1));
    for (Eigen::Index i = 0; i < centroids[c].dim(); ++i) w.cell(centroids[c][i]);
    w.end_row();
  }
}

void write_variogram(const std::filesystem::path& path, const hr::Variogram& gamma) {
  Writer w(path);
  for (Eigen::Index r = 0; r < gamma.dim(); ++r) {
    for (Eigen::Index c = 0; c < gamma.dim(); ++c) w.cell(gamma(r, c));
    w.end_row();
  }
}

void write_truth(const std::filesystem::path& path, const FacePartition& truth) {
  Writer w(path);
  w.header({"face", "indices"});
  for (std::size_t f = 0; f < truth.size(); ++f) {
    w.cell(static_cast<int>(f + 1)).cell(truth.faces()[f].to_string());
    w.end_row();
  }
}

}  // namespace concomitant::csv
