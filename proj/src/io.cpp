#include "dwlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwlab/errors.hpp"

namespace dwlab::io {

namespace fs = std::filesystem;

void write_csv(const std::string& path, const std::vector<Column>& columns) {
  if (columns.empty()) throw ConfigError("io", "csv needs columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != rows)
      throw ConfigError("io", "csv column length mismatch");

  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) os << ',';
    os << columns[c].name;
  }
  os << '\n';
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) os << ',';
      std::snprintf(buf, sizeof buf, "%.17g", columns[c].values[r]);
      os << buf;
    }
    os << '\n';
  }
  write_text(path, os.str());
}

std::vector<Column> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("io", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("io", "empty csv " + path);
  std::vector<Column> cols;
  {
    std::stringstream hs(line);
    std::string name;
    while (std::getline(hs, name, ',')) cols.push_back({name, {}});
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= cols.size())
        throw ConfigError("io", "ragged csv row in " + path);
      cols[c++].values.push_back(std::stod(cell));
    }
    if (c != cols.size()) throw ConfigError("io", "short csv row in " + path);
  }
  return cols;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("io", "cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("io", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool file_exists(const std::string& path) { return fs::exists(path); }

void ensure_dir(const std::string& path) {
  fs::path p(path);
  if (fs::exists(p)) {
    if (!fs::is_directory(p))
      throw ConfigError("io", path + " exists and is not a directory");
    return;
  }
  const fs::path parent = p.parent_path();
  if (!parent.empty() && !fs::exists(parent))
    throw ConfigError("io", "parent of output directory missing: " +
                                parent.string());
  std::error_code ec;
  fs::create_directory(p, ec);
  if (ec) throw ConfigError("io", "cannot create " + path + ": " + ec.message());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string hash_file(const std::string& path) {
  return fnv1a64_hex(read_text(path));
}

namespace {

constexpr double kW = 720.0, kH = 480.0;
constexpr double kL = 80.0, kR = 30.0, kT = 50.0, kB = 60.0;

double map_x(double lx, double lx0, double lx1) {
  return kL + (lx - lx0) / (lx1 - lx0) * (kW - kL - kR);
}
double map_y(double ly, double ly0, double ly1) {
  return kH - kB - (ly - ly0) / (ly1 - ly0) * (kH - kT - kB);
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

}  // namespace

void svg_loglog(const std::string& path, const std::string& title,
                const std::string& xlabel, const std::string& ylabel,
                const std::vector<Series>& series) {
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!(s.x[j] > 0.0) || !(s.y[j] > 0.0)) continue;
      lx0 = std::min(lx0, std::log10(s.x[j]));
      lx1 = std::max(lx1, std::log10(s.x[j]));
      ly0 = std::min(ly0, std::log10(s.y[j]));
      ly1 = std::max(ly1, std::log10(s.y[j]));
    }
  }
  if (lx0 > lx1 || ly0 > ly1) {
    lx0 = ly0 = 0.0;
    lx1 = ly1 = 1.0;
  }
  if (lx1 - lx0 < 1e-12) lx1 = lx0 + 1.0;
  if (ly1 - ly0 < 1e-12) ly1 = ly0 + 1.0;

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW
     << "' height='" << kH << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << kW / 2 << "' y='24' text-anchor='middle' "
     << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";

  // frame
  os << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR
     << "' height='" << kH - kT - kB
     << "' fill='none' stroke='#333' stroke-width='1'/>\n";

  // decade grid + tick labels
  for (int d = static_cast<int>(std::ceil(lx0)); d <= std::floor(lx1); ++d) {
    const double px = map_x(d, lx0, lx1);
    os << "<line x1='" << px << "' y1='" << kT << "' x2='" << px << "' y2='"
       << kH - kB << "' stroke='#ddd'/>\n";
    os << "<text x='" << px << "' y='" << kH - kB + 18
       << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
       << "1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ly0)); d <= std::floor(ly1); ++d) {
    const double py = map_y(d, ly0, ly1);
    os << "<line x1='" << kL << "' y1='" << py << "' x2='" << kW - kR
       << "' y2='" << py << "' stroke='#ddd'/>\n";
    os << "<text x='" << kL - 6 << "' y='" << py + 4
       << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
       << "1e" << d << "</text>\n";
  }
  os << "<text x='" << kW / 2 << "' y='" << kH - 16
     << "' text-anchor='middle' font-family='sans-serif' font-size='13'>"
     << xlabel << "</text>\n";
  os << "<text x='18' y='" << kH / 2
     << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
     << "transform='rotate(-90 18 " << kH / 2 << ")'>" << ylabel
     << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    os << "<polyline fill='none' stroke='" << color
       << "' stroke-width='1.6' points='";
    for (std::size_t j = 0; j < series[s].x.size(); ++j) {
      if (!(series[s].x[j] > 0.0) || !(series[s].y[j] > 0.0)) continue;
      os << map_x(std::log10(series[s].x[j]), lx0, lx1) << ','
         << map_y(std::log10(series[s].y[j]), ly0, ly1) << ' ';
    }
    os << "'/>\n";
    os << "<text x='" << kW - kR - 8 << "' y='" << kT + 18 + 16 * s
       << "' text-anchor='end' font-family='sans-serif' font-size='12' "
       << "fill='" << color << "'>" << series[s].name << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

}  // namespace dwlab::io
