#pragma once

// File formats: round-trip-precision CSV, the wgqed-timetags v1 stream
// format, and the flat sectioned key-value config. All writes go through
// a temp-file + rename so partial outputs never land under a final name.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wgqed/correlation.hpp"
#include "wgqed/errors.hpp"
#include "wgqed/photon_statistics.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

struct CsvTable {
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns; // column-major

  std::size_t rows() const {
    return columns.empty() ? 0 : columns.front().size();
  }
  const std::vector<double> &column(const std::string &header) const;
};

// Writes with max round-trip precision (%.17g equivalent), atomically.
void write_csv(const std::filesystem::path &path, const CsvTable &table);

// Header must match the expected schema exactly; malformed rows are
// rejected with their line number.
CsvTable ingest_csv(const std::filesystem::path &path,
                    const std::vector<std::string> &expected_headers);
// Any-header variant.
CsvTable ingest_csv(const std::filesystem::path &path);

void write_spectrum_csv(const std::filesystem::path &path, const Spectrum &s);
Spectrum read_spectrum_csv(const std::filesystem::path &path);

// columns tau_ns, g2, counts
void write_correlation_csv(const std::filesystem::path &path,
                           const CorrelationFunction &cf);

// "# wgqed-timetags v1, detector=<id>, duration_ns=<d>, seed=<s>" then one
// ascending decimal ns value per line. seed records provenance only.
void write_timetags(const std::filesystem::path &path,
                    const TimeTagStream &stream, std::uint64_t seed);
TimeTagStream read_timetags(const std::filesystem::path &path);

// Flat sectioned key-value config:
//   [section]
//   key_with_units = value
class Config {
public:
  static Config parse_file(const std::filesystem::path &path);
  static Config parse_string(const std::string &text);

  bool has(const std::string &section, const std::string &key) const;
  std::string get(const std::string &section, const std::string &key) const;
  double get_double(const std::string &section, const std::string &key) const;
  double get_double(const std::string &section, const std::string &key,
                    double fallback) const;
  std::int64_t get_int(const std::string &section,
                       const std::string &key) const;
  std::int64_t get_int(const std::string &section, const std::string &key,
                       std::int64_t fallback) const;
  std::string get(const std::string &section, const std::string &key,
                  const std::string &fallback) const;

  const std::map<std::string, std::map<std::string, std::string>> &sections()
      const {
    return data_;
  }

private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

// temp + rename in the destination directory
void atomic_write_text(const std::filesystem::path &path,
                       const std::string &content);

std::string format_full_precision(double v);

} // namespace wgqed
