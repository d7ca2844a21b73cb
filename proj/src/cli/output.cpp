#include "tcsim/cli/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tcsim/core/errors.hpp"

namespace tcsim::cli {
namespace {

std::string escape_xml(const std::string& text) {
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

void check_field(const std::string& text) {
  require(text.find_first_of(",\n\r") == std::string::npos, "CsvTable: field contains a separator");
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(0.5, std::abs(hi) * 0.1);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

// Piecewise-linear approximation of viridis.
std::string color_for(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

struct Frame {
  double width = 640, height = 420;
  double left = 70, right = 30, top = 40, bottom = 55;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostringstream& s, const Frame& f, const std::string& title) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
    << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title) << "</text>\n";
}

void axis_labels(std::ostringstream& s, const Frame& f, const std::string& x_label, const std::string& y_label) {
  s << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 12 << "\" text-anchor=\"middle\">"
    << escape_xml(x_label) << "</text>\n";
  s << "<text transform=\"translate(16," << f.top + f.plot_h() / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape_xml(y_label) << "</text>\n";
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  require(!header_.empty(), "CsvTable: empty header");
  for (const auto& h : header_) check_field(h);
}

void CsvTable::add_row(std::vector<Cell> row) {
  require(row.size() == header_.size(), "CsvTable: row width does not match the header");
  for (const auto& cell : row)
    if (const auto* s = std::get_if<std::string>(&cell)) check_field(*s);
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::string& text) { out += text; };
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    emit(header_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              emit(format_number(v));
            else if constexpr (std::is_same_v<T, long long>)
              emit(std::to_string(v));
            else if constexpr (std::is_same_v<T, bool>)
              emit(v ? "true" : "false");
            else
              emit(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string svg_line_plot(const std::vector<LineSeries>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  const Frame f;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& line : series) {
    require(line.x.size() == line.y.size(), "svg_line_plot: x and y differ in length");
    for (std::size_t i = 0; i < line.x.size(); ++i) {
      if (!std::isfinite(line.x[i]) || !std::isfinite(line.y[i])) continue;
      x_lo = std::min(x_lo, line.x[i]);
      x_hi = std::max(x_hi, line.x[i]);
      y_lo = std::min(y_lo, line.y[i]);
      y_hi = std::max(y_hi, line.y[i]);
    }
  }
  std::tie(x_lo, x_hi) = padded_range(x_lo, x_hi);
  std::tie(y_lo, y_hi) = padded_range(y_lo, y_hi);
  auto px = [&](double x) { return f.left + (x - x_lo) / (x_hi - x_lo) * f.plot_w(); };
  auto py = [&](double y) { return f.top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * f.plot_h(); };

  std::ostringstream s;
  open_svg(s, f, title);
  s << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w() << "\" height=\"" << f.plot_h()
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0, yv = y_lo + (y_hi - y_lo) * k / 4.0;
    const double xp = px(xv), yp = py(yv);
    s << "<line x1=\"" << fixed(xp) << "\" y1=\"" << f.top + f.plot_h() << "\" x2=\"" << fixed(xp) << "\" y2=\""
      << f.top + f.plot_h() + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << fixed(xp) << "\" y=\"" << f.top + f.plot_h() + 18 << "\" text-anchor=\"middle\">" << tick_label(xv)
      << "</text>\n";
    s << "<line x1=\"" << f.left - 5 << "\" y1=\"" << fixed(yp) << "\" x2=\"" << f.left << "\" y2=\"" << fixed(yp)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << f.left - 8 << "\" y=\"" << fixed(yp + 4) << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  if (y_lo < 0.0 && y_hi > 0.0)
    s << "<line x1=\"" << f.left << "\" y1=\"" << fixed(py(0)) << "\" x2=\"" << f.left + f.plot_w() << "\" y2=\""
      << fixed(py(0)) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& line = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < line.x.size(); ++i) {
      if (!std::isfinite(line.x[i]) || !std::isfinite(line.y[i])) {
        flush();
        continue;
      }
      points += (points.empty() ? "" : " ") + fixed(px(line.x[i])) + "," + fixed(py(line.y[i]));
    }
    flush();
    if (!line.label.empty()) {
      const double ly = f.top + 14 + 16.0 * static_cast<double>(k);
      const double lx = f.left + f.plot_w() - 150;
      s << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly - 4 << "\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
      s << "<text x=\"" << lx + 26 << "\" y=\"" << ly << "\">" << escape_xml(line.label) << "</text>\n";
    }
  }
  axis_labels(s, f, x_label, y_label);
  s << "</svg>\n";
  return s.str();
}

std::string svg_heat_map(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
                         const std::string& title, const std::string& x_label, const std::string& y_label) {
  require(!x.empty() && !y.empty(), "svg_heat_map: empty axis");
  require(values.size() == x.size() * y.size(), "svg_heat_map: values must be |y| x |x|");
  Frame f;
  f.right = 110;
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) lo = 0.0, hi = 1.0;
  const double span = hi > lo ? hi - lo : 1.0;
  const double cw = f.plot_w() / static_cast<double>(x.size());
  const double ch = f.plot_h() / static_cast<double>(y.size());

  std::ostringstream s;
  open_svg(s, f, title);
  for (std::size_t j = 0; j < y.size(); ++j)
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = values[j * x.size() + i];
      const std::string fill = std::isfinite(v) ? color_for((v - lo) / span) : "#999999";
      // Row 0 at the bottom.
      const double top = f.top + f.plot_h() - ch * static_cast<double>(j + 1);
      s << "<rect x=\"" << fixed(f.left + cw * static_cast<double>(i)) << "\" y=\"" << fixed(top) << "\" width=\""
        << fixed(cw + 0.01) << "\" height=\"" << fixed(ch + 0.01) << "\" fill=\"" << fill << "\"><title>"
        << tick_label(x[i]) << ", " << tick_label(y[j]) << ": " << format_number(v) << "</title></rect>\n";
    }
  s << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w() << "\" height=\"" << f.plot_h()
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::size_t x_every = std::max<std::size_t>(1, x.size() / 8), y_every = std::max<std::size_t>(1, y.size() / 8);
  for (std::size_t i = 0; i < x.size(); i += x_every)
    s << "<text x=\"" << fixed(f.left + cw * (static_cast<double>(i) + 0.5)) << "\" y=\"" << f.top + f.plot_h() + 18
      << "\" text-anchor=\"middle\">" << tick_label(x[i]) << "</text>\n";
  for (std::size_t j = 0; j < y.size(); j += y_every)
    s << "<text x=\"" << f.left - 8 << "\" y=\"" << fixed(f.top + f.plot_h() - ch * (static_cast<double>(j) + 0.5) + 4)
      << "\" text-anchor=\"end\">" << tick_label(y[j]) << "</text>\n";

  const double bar_x = f.left + f.plot_w() + 25;
  for (int k = 0; k < 50; ++k) {
    const double top = f.top + f.plot_h() * (1.0 - (k + 1) / 50.0);
    s << "<rect x=\"" << bar_x << "\" y=\"" << fixed(top) << "\" width=\"18\" height=\"" << fixed(f.plot_h() / 50.0 + 0.5)
      << "\" fill=\"" << color_for((k + 0.5) / 50.0) << "\"/>\n";
  }
  s << "<text x=\"" << bar_x + 24 << "\" y=\"" << f.top + 10 << "\">" << tick_label(hi) << "</text>\n";
  s << "<text x=\"" << bar_x + 24 << "\" y=\"" << f.top + f.plot_h() << "\">" << tick_label(lo) << "</text>\n";
  axis_labels(s, f, x_label, y_label);
  s << "</svg>\n";
  return s.str();
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "sha256_file: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

}  // namespace tcsim::cli
