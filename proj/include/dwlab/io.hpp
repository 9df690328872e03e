#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dwlab::io {

/// One CSV column: name + values. Doubles print as %.17g so identical
/// configs produce byte-identical files.
struct Column {
  std::string name;
  std::vector<double> values;
};

void write_csv(const std::string& path, const std::vector<Column>& columns);

/// Reads a simple numeric CSV with a header row. Returns columns in file
/// order; throws ConfigError on shape problems.
std::vector<Column> read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);  // creates one level if needed

/// FNV-1a 64-bit content hash, hex-encoded (manifest integrity, not crypto).
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG log-log line plot (axes, decade ticks, legend).
void svg_loglog(const std::string& path, const std::string& title,
                const std::string& xlabel, const std::string& ylabel,
                const std::vector<Series>& series);

}  // namespace dwlab::io
