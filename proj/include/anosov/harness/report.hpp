#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace anosov {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed column schema; cells are formatted by the caller (fmt_num for numbers).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row);
};

std::string fmt_num(double v);  // %.17g, "nan"/"inf" spelled out
std::string csv_text(const CsvTable& t);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& t);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
// Creates the directory if needed and checks it is writable.
void ensure_output_dir(const std::filesystem::path& dir);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  bool line = false;  // polyline instead of markers
};

struct Plot {
  std::string title, xlabel, ylabel;
  bool logx = true, logy = true;
  std::vector<PlotSeries> series;
  std::vector<double> hlines;  // horizontal reference lines in data units
};

std::string svg_text(const Plot& p);
void write_svg(const std::filesystem::path& path, const Plot& p);

}  // namespace anosov
