#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/basis.hpp"
#include "bsq/field.hpp"

namespace bsq {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Values are written with %.17g so that they read back bit-exactly.
std::string format_csv_row(const std::vector<double>& row);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Versioned little-endian snapshot of a state and the config that produced it.
struct Checkpoint {
  static constexpr std::uint32_t version = 1;
  std::uint64_t config_hash = 0;
  double time = 0.0;
  std::int64_t step = 0;
  double window = 0.0;  // window length carried into the next solve
  VelocityCoeffs xi;
  int nx = 0, ny = 0;
  std::vector<double> theta;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

struct PlotSeries {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<double> x;
  std::vector<double> y;
  bool log_y = false;
  std::string annotation;
};

/// Standalone SVG line plot.
std::string render_svg(const PlotSeries& s);

}  // namespace bsq
