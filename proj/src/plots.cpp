#include "lawn/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "lawn/errors.hpp"
#include "lawn/harness.hpp"

namespace lawn {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 80.0, kRight = 250.0, kTop = 40.0, kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Multiples of a 1/2/5 x 10^k step inside [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double k = std::ceil(lo / step); k * step <= hi + 1e-9 * step; k += 1.0)
    out.push_back(std::abs(k) < 0.5 ? 0.0 : k * step);
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range padded(double lo, double hi, bool include_zero) {
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (!(hi > lo)) {
    const double d = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
    lo -= d;
    hi += d;
  }
  const double pad = 0.05 * (hi - lo);
  return {include_zero && lo == 0.0 ? 0.0 : lo - pad, hi + pad};
}

class Chart {
 public:
  Chart(std::string title, std::string xlabel, std::string ylabel, Range x, Range y)
      : x_(x), y_(y) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    os_ << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
        << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : nice_ticks(y_.lo, y_.hi)) {
      os_ << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(v) + 4)
          << "\" text-anchor=\"end\">" << label(v) << "</text>\n";
      os_ << "<line x1=\"" << num(x0) << "\" x2=\"" << num(x1) << "\" y1=\"" << num(py(v))
          << "\" y2=\"" << num(py(v)) << "\" stroke=\"#ddd\"/>\n";
    }
    os_ << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18)
        << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os_ << "<text transform=\"translate(18," << num((y0 + y1) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel) << "</text>\n";
  }

  double px(double v) const {
    return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kRight - kLeft);
  }
  double py(double v) const {
    return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kBottom - kTop);
  }

  void x_tick(double v, const std::string& text) {
    os_ << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\">" << escape(text) << "</text>\n";
  }
  void x_ticks_numeric() {
    for (double v : nice_ticks(x_.lo, x_.hi)) x_tick(v, label(v));
  }

  void bar(double center, double half_width, double value, const std::string& color) {
    const double base = py(std::clamp(0.0, y_.lo, y_.hi));
    const double top = py(value);
    os_ << "<rect x=\"" << num(px(center - half_width)) << "\" y=\"" << num(std::min(base, top))
        << "\" width=\"" << num(px(center + half_width) - px(center - half_width))
        << "\" height=\"" << num(std::abs(base - top)) << "\" fill=\"" << color << "\"/>\n";
  }
  void error_bar(double x, double lo, double hi) {
    os_ << "<line x1=\"" << num(px(x)) << "\" x2=\"" << num(px(x)) << "\" y1=\"" << num(py(lo))
        << "\" y2=\"" << num(py(hi)) << "\" stroke=\"black\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                bool closed = false, const std::string& dash = "") {
    os_ << "<" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"" << (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"")
        << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      os_ << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(pts[i].second));
    os_ << "\"/>\n";
  }
  void dot(double x, double y, const std::string& color, double r = 3.0) {
    os_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << num(r)
        << "\" fill=\"" << color << "\"/>\n";
  }
  void square(double x, double y, const std::string& color) {
    os_ << "<rect x=\"" << num(px(x) - 6) << "\" y=\"" << num(py(y) - 6)
        << "\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
  }
  void cross(double x, double y, const std::string& color) {
    const double cx = px(x), cy = py(y);
    os_ << "<path d=\"M" << num(cx - 6) << ' ' << num(cy - 6) << " L" << num(cx + 6) << ' '
        << num(cy + 6) << " M" << num(cx - 6) << ' ' << num(cy + 6) << " L" << num(cx + 6) << ' '
        << num(cy - 6) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }

  enum class Glyph { Line, Dot, Square, Cross, Box };
  void legend(const std::string& text, const std::string& color, Glyph g) {
    const double x = kWidth - kRight + 14;
    const double y = kTop + 10 + 20.0 * legend_++;
    os_ << "<g class=\"legend-entry\">";
    switch (g) {
      case Glyph::Line:
        os_ << "<line x1=\"" << num(x) << "\" x2=\"" << num(x + 18) << "\" y1=\"" << num(y)
            << "\" y2=\"" << num(y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        break;
      case Glyph::Dot:
        os_ << "<circle cx=\"" << num(x + 9) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\""
            << color << "\"/>";
        break;
      case Glyph::Square:
        os_ << "<rect x=\"" << num(x + 3) << "\" y=\"" << num(y - 6)
            << "\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"" << color << "\"/>";
        break;
      case Glyph::Cross:
        os_ << "<path d=\"M" << num(x + 3) << ' ' << num(y - 6) << " L" << num(x + 15) << ' '
            << num(y + 6) << " M" << num(x + 3) << ' ' << num(y + 6) << " L" << num(x + 15)
            << ' ' << num(y - 6) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        break;
      case Glyph::Box:
        os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 6)
            << "\" width=\"18\" height=\"12\" fill=\"" << color << "\"/>";
        break;
    }
    os_ << "<text x=\"" << num(x + 24) << "\" y=\"" << num(y + 4) << "\">" << escape(text)
        << "</text></g>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
  Range x_, y_;
  int legend_ = 0;
};

const std::vector<std::string> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b"};

// method -> values of column, methods in first-appearance order
std::vector<std::pair<std::string, std::vector<double>>> grouped(const ResultTable& t,
                                                                 const std::string& column) {
  const auto methods = t.string_column("method");
  const auto values = t.numeric_column(column);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (std::size_t r = 0; r < methods.size(); ++r) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == methods[r]; });
    if (it == out.end()) {
      out.push_back({methods[r], {}});
      it = out.end() - 1;
    }
    if (std::isfinite(values[r])) it->second.push_back(values[r]);
  }
  return out;
}

double mean_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq;
  for (double x : v) sq.push_back((x - mean) * (x - mean));
  std::sort(sq.begin(), sq.end());
  return std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(v.size() - 1));
}

/// Mean +- one standard deviation per method.
std::string bar_chart(const ResultTable& t, const std::string& column, const std::string& title,
                      const std::string& ylabel) {
  auto groups = grouped(t, column);
  std::erase_if(groups, [](const auto& g) { return g.second.empty(); });
  double lo = 0.0, hi = 0.0;
  bool first = true;
  std::vector<std::tuple<double, double>> ms;
  for (const auto& g : groups) {
    const double m = mean_of(g.second), s = std_of(g.second, m);
    ms.emplace_back(m, s);
    lo = first ? m - s : std::min(lo, m - s);
    hi = first ? m + s : std::max(hi, m + s);
    first = false;
  }
  const bool all_negative = !groups.empty() && hi < 0.0;
  Chart c(title, "method", ylabel, {-0.5, std::max<double>(groups.size(), 1) - 0.5},
          padded(lo, hi, !all_negative));
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto [m, s] = ms[i];
    const std::string& color = kPalette[i % kPalette.size()];
    if (all_negative) c.dot(static_cast<double>(i), m, color, 5.0);
    else c.bar(static_cast<double>(i), 0.3, m, color);
    c.error_bar(static_cast<double>(i), m - s, m + s);
    c.x_tick(static_cast<double>(i), groups[i].first);
    c.legend(groups[i].first + " (n=" + std::to_string(groups[i].second.size()) + ")", color,
             Chart::Glyph::Box);
  }
  return c.finish();
}

/// Sorted per-seed values per method as empirical CDF-style curves.
std::string distribution_chart(const ResultTable& t, const std::string& column,
                               const std::string& title, const std::string& xlabel) {
  auto groups = grouped(t, column);
  std::erase_if(groups, [](const auto& g) { return g.second.empty(); });
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& g : groups)
    for (double v : g.second) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  Chart c(title, xlabel, "fraction of seeds", padded(lo, hi, false), {0.0, 1.0});
  c.x_ticks_numeric();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto v = groups[i].second;
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double f0 = static_cast<double>(k) / static_cast<double>(v.size());
      const double f1 = static_cast<double>(k + 1) / static_cast<double>(v.size());
      pts.emplace_back(v[k], f0);
      pts.emplace_back(v[k], f1);
    }
    const std::string& color = kPalette[i % kPalette.size()];
    static const char* dashes[] = {"", "8 4", "2 3", "12 3 2 3"};
    c.polyline(pts, color, false, dashes[i % 4]);
    c.legend(groups[i].first, color, Chart::Glyph::Line);
  }
  return c.finish();
}

std::string ext_error_chart(const ResultTable& t) {
  auto v = t.numeric_column("rel_mean_err");
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  std::sort(v.begin(), v.end());
  const double hi = v.empty() ? 0.2 : std::max(v.back(), 0.1);
  Chart c("Contour error per seed (sorted)", "seed rank", "mean radial error / mean radius",
          {0.0, std::max<double>(static_cast<double>(v.size()) - 1.0, 1.0)}, padded(0.0, hi, true));
  c.x_ticks_numeric();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < v.size(); ++k) pts.emplace_back(static_cast<double>(k), v[k]);
  if (!pts.empty()) {
    c.polyline(pts, kPalette[0]);
    c.legend("relative error", kPalette[0], Chart::Glyph::Line);
  }
  c.polyline({{0.0, 0.1}, {std::max<double>(static_cast<double>(v.size()) - 1.0, 1.0), 0.1}},
             "#d62728", false, "6 4");
  c.legend("10% bound", "#d62728", Chart::Glyph::Line);
  return c.finish();
}

std::vector<std::pair<double, double>> points_of(const Json& j, const char* key) {
  std::vector<std::pair<double, double>> out;
  if (!j.contains(key)) return out;
  for (const Json& p : j.at(key)) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

}  // namespace

std::string render_contour_svg(const Json& contour) {
  const auto truth = points_of(contour, "true_contour");
  const auto est = points_of(contour, "estimated_contour");
  const auto refl = points_of(contour, "reflection_points");
  std::vector<std::pair<double, double>> tc, ec;
  if (contour.contains("true_center"))
    tc.emplace_back(contour["true_center"][0].get<double>(), contour["true_center"][1].get<double>());
  if (contour.contains("estimated_center"))
    ec.emplace_back(contour["estimated_center"][0].get<double>(),
                    contour["estimated_center"][1].get<double>());

  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  bool first = true;
  using Pts = std::vector<std::pair<double, double>>;
  for (const Pts* set : std::initializer_list<const Pts*>{&truth, &est, &refl, &tc, &ec})
    for (auto [x, y] : *set) {
      xlo = first ? x : std::min(xlo, x);
      xhi = first ? x : std::max(xhi, x);
      ylo = first ? y : std::min(ylo, y);
      yhi = first ? y : std::max(yhi, y);
      first = false;
    }
  // Equal scale on both axes.
  const double span = std::max(xhi - xlo, yhi - ylo) * 1.15 + 1e-9;
  const double cx = 0.5 * (xlo + xhi), cy = 0.5 * (ylo + yhi);
  const double aspect = (kWidth - kLeft - kRight) / (kHeight - kTop - kBottom);
  Chart c("Extended target contour", "x (m)", "y (m)",
          {cx - 0.5 * span * aspect, cx + 0.5 * span * aspect}, {cy - 0.5 * span, cy + 0.5 * span});
  c.x_ticks_numeric();
  if (!truth.empty()) {
    c.polyline(truth, "#2ca02c", true);
    c.legend("true contour", "#2ca02c", Chart::Glyph::Line);
  }
  if (!est.empty()) {
    c.polyline(est, "#1f77b4", true);
    c.legend("estimated contour", "#1f77b4", Chart::Glyph::Line);
  }
  if (!refl.empty()) {
    for (auto [x, y] : refl) c.dot(x, y, "#d62728");
    c.legend("estimated reflection points", "#d62728", Chart::Glyph::Dot);
  }
  if (!tc.empty()) {
    c.square(tc[0].first, tc[0].second, "#2ca02c");
    c.legend("true center", "#2ca02c", Chart::Glyph::Square);
  }
  if (!ec.empty()) {
    c.cross(ec[0].first, ec[0].second, "black");
    c.legend("estimated center", "black", Chart::Glyph::Cross);
  }
  return c.finish();
}

std::vector<SvgFile> render_plots(const ResultTable& table, const Json* contour) {
  std::vector<SvgFile> out;
  switch (detect_case(table)) {
    case ExperimentCase::Selection:
      out.push_back({"selection_sum_se.svg",
                     bar_chart(table, "sum_se", "Sum spectral efficiency", "bits/s/Hz")});
      out.push_back({"selection_sensing_sinr.svg",
                     bar_chart(table, "sensing_sinr_db", "Sensing SINR (outages excluded)", "dB")});
      out.push_back({"selection_wpt_energy.svg",
                     bar_chart(table, "wpt_energy_j", "Energy at charging users", "J")});
      break;
    case ExperimentCase::Delivery:
      out.push_back({"delivery_delay.svg", distribution_chart(table, "mean_delay_ms",
                                                              "Mean delay per seed", "ms")});
      out.push_back({"delivery_success_rate.svg",
                     bar_chart(table, "success_rate", "Delivery success rate", "fraction")});
      break;
    case ExperimentCase::ExtTarget:
      out.push_back({"ext_target_error.svg", ext_error_chart(table)});
      if (contour) out.push_back({"ext_target_contour.svg", render_contour_svg(*contour)});
      break;
  }
  return out;
}

void write_plots(const std::filesystem::path& dir, const ResultTable& table, const Json* contour) {
  for (const SvgFile& f : render_plots(table, contour)) {
    std::ofstream out(dir / f.name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / f.name).string());
    out << f.content;
  }
}

}  // namespace lawn
