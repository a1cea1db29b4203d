#include "sqo/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sqo/errors.hpp"

namespace sqo {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << body;
}

std::string csv_provenance(const std::string& config_hash) {
  return "# config_hash=" + config_hash + " tool_version=" + kToolVersion + "\n";
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

namespace {

struct Extent {
  double lo, hi;
};

Extent find_extent(const std::vector<double>& v) {
  Extent e{v.empty() ? 0.0 : v[0], v.empty() ? 1.0 : v[0]};
  for (double x : v) {
    e.lo = std::min(e.lo, x);
    e.hi = std::max(e.hi, x);
  }
  if (e.hi == e.lo) e.hi = e.lo + 1.0;
  return e;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel,
                          bool log_y, const std::string& config_hash) {
  const int W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  std::vector<double> xs, ys;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (log_y) {
        if (y <= 0) continue;
        y = std::log10(y);
      }
      xs.push_back(s.x[i]);
      ys.push_back(y);
    }
  const Extent ex = find_extent(xs), ey = find_extent(ys);
  auto px = [&](double x) { return ml + (x - ex.lo) / (ex.hi - ex.lo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ey.lo) / (ey.hi - ey.lo) * (H - mt - mb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\">\n<!-- config_hash=" << config_hash << " tool_version=" << kToolVersion
     << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << H / 2 << ")\">" << (log_y ? "log10 " : "")
     << ylabel << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  // axis end labels
  os.precision(5);
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" font-size=\"11\">" << ex.lo
     << "</text>\n<text x=\"" << W - mr << "\" y=\"" << H - mb + 16
     << "\" text-anchor=\"end\" font-size=\"11\">" << ex.hi << "</text>\n";
  os << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb
     << "\" text-anchor=\"end\" font-size=\"11\">" << ey.lo << "</text>\n<text x=\""
     << ml - 6 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
     << ey.hi << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[ci % 6]
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (log_y) {
        if (y <= 0) continue;
        y = std::log10(y);
      }
      os << px(s.x[i]) << "," << py(y) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 + 14 * ci
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kPalette[ci % 6] << "\">"
       << s.name << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const Eigen::MatrixXd& values, double extent,
                        const std::string& title, const std::string& config_hash) {
  const int n = static_cast<int>(values.rows());
  const int W = 520, H = 560, m = 50;
  const double cell = static_cast<double>(W - 2 * m) / n;
  const double vmax = std::max(std::abs(values.maxCoeff()), std::abs(values.minCoeff()));
  const bool diverging = values.minCoeff() < 0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\">\n<!-- config_hash=" << config_hash << " tool_version=" << kToolVersion
     << " -->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = vmax > 0 ? values(i, j) / vmax : 0.0;
      int r, g, b;
      if (diverging) {
        // blue (negative) .. white .. red (positive)
        if (v >= 0) {
          r = 255;
          g = b = static_cast<int>(255 * (1.0 - v));
        } else {
          b = 255;
          r = g = static_cast<int>(255 * (1.0 + v));
        }
      } else {
        r = static_cast<int>(255 * v);
        g = static_cast<int>(80 + 120 * v);
        b = static_cast<int>(255 * (1.0 - v));
      }
      os << "<rect x=\"" << m + i * cell << "\" y=\""
         << m + (n - 1 - j) * cell + 20 << "\" width=\"" << cell + 0.5
         << "\" height=\"" << cell + 0.5 << "\" fill=\"rgb(" << r << "," << g << "," << b
         << ")\"/>\n";
    }
  os.precision(4);
  os << "<text x=\"" << m << "\" y=\"" << H - 12 << "\" font-size=\"11\">[" << -extent
     << ", " << extent << "]^2</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace sqo
