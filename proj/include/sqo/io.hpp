#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sqo {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the canonical config serialization; stable across runs.
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

void write_file(const std::filesystem::path& path, const std::string& body);

// CSV with a provenance comment header; 17 significant digits.
std::string csv_provenance(const std::string& config_hash);
std::string format_double(double v);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

// Minimal static SVG line plot (log10 y optional).
std::string svg_line_plot(const std::vector<Series>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel,
                          bool log_y, const std::string& config_hash);

// Minimal SVG heat map over [-extent, extent]^2; diverging palette when the
// data crosses zero.
std::string svg_heatmap(const Eigen::MatrixXd& values, double extent,
                        const std::string& title, const std::string& config_hash);

}  // namespace sqo
