#include "anosov/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace anosov {

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::logic_error("csv row has " + std::to_string(row.size()) + " cells, schema has " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string csv_text(const CsvTable& t) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + csv_cell(cells[i]);
    s += "\n";
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, csv_text(t)); }

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

std::string svg_text(const Plot& p) {
  const double W = 640, H = 420, ml = 70, mr = 150, mt = 40, mb = 50;
  auto tx = [&](double v) { return p.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return p.logy ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!p.logx || x > 0) && (!p.logy || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  for (double h : p.hlines)
    if (!p.logy || h > 0) {
      y0 = std::min(y0, ty(h));
      y1 = std::max(y1, ty(h));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(p.title) << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  // axis ticks at the range ends
  auto tick = [&](double v, bool log) { return log ? "1e" + fmt_num(std::round(v * 100) / 100) : fmt_num(std::round(v * 1000) / 1000); };
  o << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\">" << tick(x0, p.logx) << "</text>\n";
  o << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"end\">" << tick(x1, p.logx) << "</text>\n";
  o << "<text x=\"" << ml - 4 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">" << tick(y0, p.logy) << "</text>\n";
  o << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\">" << tick(y1, p.logy) << "</text>\n";
  o << "<text x=\"" << (W - mr + ml) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(p.xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (H - mb + mt) / 2 << "\" transform=\"rotate(-90 16 " << (H - mb + mt) / 2
    << ")\" text-anchor=\"middle\">" << xml_escape(p.ylabel) << "</text>\n";
  for (double h : p.hlines) {
    if (p.logy && h <= 0) continue;
    o << "<line x1=\"" << ml << "\" x2=\"" << W - mr << "\" y1=\"" << py(h) << "\" y2=\"" << py(h)
      << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* c = colors[k % 7];
    if (s.line) {
      o << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (usable(s.x[i], s.y[i])) o << px(s.x[i]) << "," << py(s.y[i]) << " ";
      o << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (usable(s.x[i], s.y[i]))
          o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    }
    o << "<rect x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 * k << "\" width=\"10\" height=\"10\" fill=\"" << c << "\"/>\n";
    o << "<text x=\"" << W - mr + 24 << "\" y=\"" << mt + 16 * k + 9 << "\">" << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::filesystem::path& path, const Plot& p) { write_text(path, svg_text(p)); }

}  // namespace anosov
