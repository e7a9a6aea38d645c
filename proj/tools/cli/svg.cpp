#include "svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "concomitant/error.hpp"

namespace concomitant::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 55;

std::string fixed(double v, int digits = 2) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  return std::string(buf.data(), ptr);
}

std::string tick_label(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
  return std::string(buf.data(), ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string palette(std::size_t i) {
  static constexpr std::array<const char*, 6> colours{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return colours[i % colours.size()];
}

void write_svg(const std::filesystem::path& path, const Plot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  for (double g : plot.guides) xr.add(g);
  xr.settle();
  yr.settle();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double v) { return kTop + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    out << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << fixed(kTop + ph + 16)
        << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 12) << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << fixed(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(plot.y_label) << "</text>\n";
  for (double g : plot.guides) {
    out << "<line x1=\"" << fixed(sx(g)) << "\" y1=\"" << kTop << "\" x2=\"" << fixed(sx(g)) << "\" y2=\""
        << fixed(kTop + ph) << "\" stroke=\"#999999\"/>\n";
  }
  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
        out << "<circle cx=\"" << fixed(sx(s.x[j])) << "\" cy=\"" << fixed(sy(s.y[j])) << "\" r=\"3\" fill=\""
            << s.colour << "\" fill-opacity=\"0.7\"/>\n";
      }
    } else if (n > 0) {
      out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\"";
      if (s.dashed) out << " stroke-dasharray=\"5,3\"";
      out << " points=\"";
      for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) out << ' ';
        out << fixed(sx(s.x[j])) << ',' << fixed(sy(s.y[j]));
      }
      out << "\"/>\n";
    }
    const double ly = kTop + 14 + 14.0 * static_cast<double>(i);
    out << "<text x=\"" << fixed(kLeft + pw - 8) << "\" y=\"" << fixed(ly) << "\" text-anchor=\"end\" fill=\""
        << s.colour << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw InvalidInput("write failed for " + path.string());
}

}  // namespace concomitant::cli
