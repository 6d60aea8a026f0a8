#include "swarmform/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace swarmform {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_histogram(
    const std::vector<std::pair<std::string, std::vector<double>>>& series,
    const std::string& title, const std::string& x_label) {
  const double width = 720, height = 440;
  const double left = 60, right = 20, top = 44, bottom = 56;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double lo = 0.0, hi = 1.0;
  bool any = false;
  for (const auto& [label, values] : series) {
    for (double v : values) {
      if (!any) {
        lo = hi = v;
        any = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!any) hi = lo + 1.0;
  if (hi <= lo) hi = lo + 1.0;

  const int bins = 24;
  const double bin_w = (hi - lo) / bins;
  std::vector<std::vector<int>> counts(series.size(), std::vector<int>(bins, 0));
  int max_count = 1;
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (double v : series[s].second) {
      int b = std::min(bins - 1, std::max(0, static_cast<int>((v - lo) / bin_w)));
      max_count = std::max(max_count, ++counts[s][b]);
    }
  }

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";

  // Axes.
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left << "\" y=\"" << height - 18
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << num(lo)
      << "</text>\n";
  out << "<text x=\"" << left + plot_w << "\" y=\"" << height - 18
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
      << num(hi) << "</text>\n";
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << top + 4
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << max_count
      << "</text>\n";

  const double slot_w = plot_w / bins;
  const double bar_w =
      slot_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    for (int b = 0; b < bins; ++b) {
      if (counts[s][b] == 0) continue;
      double h = plot_h * counts[s][b] / max_count;
      double x = left + b * slot_w + s * bar_w;
      double y = top + plot_h - h;
      out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
          << num(bar_w) << "\" height=\"" << num(h) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.8\"/>\n";
    }
    // Legend swatch and label.
    double ly = top + 16.0 * static_cast<double>(s);
    out << "<rect x=\"" << left + plot_w - 150 << "\" y=\"" << ly
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << left + plot_w - 132 << "\" y=\"" << ly + 10
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(series[s].first) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_trajectories(const std::vector<TrajectorySample>& samples,
                             const std::string& title) {
  const double width = 640, height = 640;
  const double margin = 50;

  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  bool any = false;
  for (const TrajectorySample& s : samples) {
    if (!any) {
      lo_x = hi_x = s.position.x;
      lo_y = hi_y = s.position.y;
      any = true;
    } else {
      lo_x = std::min(lo_x, s.position.x);
      hi_x = std::max(hi_x, s.position.x);
      lo_y = std::min(lo_y, s.position.y);
      hi_y = std::max(hi_y, s.position.y);
    }
  }
  double span = std::max(hi_x - lo_x, hi_y - lo_y);
  if (span <= 0) span = 1.0;
  double scale = (width - 2 * margin) / span;
  auto px = [&](double x) { return margin + (x - lo_x) * scale; };
  auto py = [&](double y) { return height - margin - (y - lo_y) * scale; };

  std::map<int, std::vector<const TrajectorySample*>> per_agent;
  for (const TrajectorySample& s : samples) per_agent[s.agent].push_back(&s);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";

  for (const auto& [agent, points] : per_agent) {
    const char* color = kPalette[agent % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\" points=\"";
    for (const TrajectorySample* s : points) {
      out << num(px(s->position.x)) << ',' << num(py(s->position.y)) << ' ';
    }
    out << "\"/>\n";
    if (!points.empty()) {
      const TrajectorySample* last = points.back();
      out << "<circle cx=\"" << num(px(last->position.x)) << "\" cy=\""
          << num(py(last->position.y)) << "\" r=\"5\" fill=\"" << color
          << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace swarmform
