#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace geoamp::lab {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// RFC-4180 field quoting.
std::string csv_field(std::string_view s);
// Shortest round-trip text for a double.
std::string format_double(double v);

// Header row first; finish() appends the manifest reference line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& fields);
  void finish(std::string_view manifest_name, std::string_view config_hash);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

struct PlotSeries {
  std::vector<double> x, y;
  std::string label;
  bool line = false;  // polyline instead of markers
};

// Log-log scatter/line plot; non-positive points are skipped.
void write_loglog_svg(const std::filesystem::path& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace geoamp::lab
