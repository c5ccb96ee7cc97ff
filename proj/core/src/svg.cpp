#include "hurl/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <locale>
#include <sstream>

#include "hurl/io.hpp"

namespace hurl::svg {
namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed-precision label so the output does not depend on locale.
std::string tick_label(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(3);
  ss << v;
  return ss.str();
}

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void finish() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_line_chart(const Chart& chart) {
  Extent xs;
  Extent ys;
  for (const Series& s : chart.series) {
    for (double v : s.x) xs.add(v);
    for (double v : s.y) ys.add(v);
    for (double v : s.band_lo) ys.add(v);
    for (double v : s.band_hi) ys.add(v);
  }
  xs.finish();
  ys.finish();
  const double pad_y = 0.05 * (ys.hi - ys.lo);
  ys.lo -= pad_y;
  ys.hi += pad_y;

  const double left = 70.0;
  const double right = static_cast<double>(chart.width) - 170.0;
  const double top = 40.0;
  const double bottom = static_cast<double>(chart.height) - 50.0;
  const auto px = [&](double x) { return left + (x - xs.lo) / (xs.hi - xs.lo) * (right - left); };
  const auto py = [&](double y) { return bottom - (y - ys.lo) / (ys.hi - ys.lo) * (bottom - top); };
  const auto num = [](double v) { return io::format_number(std::round(v * 100.0) / 100.0); };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << chart.width
      << "\" height=\"" << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num((left + right) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";

  out << "<g stroke=\"#333\" fill=\"none\">\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(right)
      << "\" y2=\"" << num(bottom) << "\"/>\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(bottom) << "\"/>\n</g>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xs.lo + (xs.hi - xs.lo) * i / kTicks;
    const double fy = ys.lo + (ys.hi - ys.lo) * i / kTicks;
    out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(bottom + 16)
        << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(fy) + 4)
        << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(fy)) << "\" x2=\"" << num(right)
        << "\" y2=\"" << num(py(fy)) << "\" stroke=\"#ddd\"/>\n";
  }
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 38)
      << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(16," << num((top + bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* color = kPalette[k % kPalette.size()];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.band_lo.size() == n && s.band_hi.size() == n && n > 0) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < n; ++i) out << num(px(s.x[i])) << ',' << num(py(s.band_hi[i])) << ' ';
      for (std::size_t i = n; i-- > 0;) out << num(px(s.x[i])) << ',' << num(py(s.band_lo[i])) << ' ';
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    out << "\"/>\n";

    const double ly = top + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << num(right + 14) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(right + 38)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(right + 44) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hurl::svg
