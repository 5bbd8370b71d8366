#include "wgqed/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wgqed {

namespace fs = std::filesystem;

std::string format_full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_text(const fs::path &path, const std::string &content) {
  fs::path dir = path.parent_path();
  if (!dir.empty())
    fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out)
      throw IngestionError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out)
      throw IngestionError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

const std::vector<double> &CsvTable::column(const std::string &header) const {
  for (std::size_t i = 0; i < headers.size(); ++i)
    if (headers[i] == header)
      return columns[i];
  throw IngestionError("no such column: " + header);
}

void write_csv(const fs::path &path, const CsvTable &table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.headers.size(); ++i)
    out << (i ? "," : "") << table.headers[i];
  out << "\n";
  const std::size_t n = table.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << format_full_precision(table.columns[c][r]);
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_or_throw(const std::string &s, int line_no) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw IngestionError("malformed numeric value '" + t + "' at line " +
                         std::to_string(line_no));
  return v;
}

} // namespace

CsvTable ingest_csv(const fs::path &path) {
  return ingest_csv(path, {});
}

CsvTable ingest_csv(const fs::path &path,
                    const std::vector<std::string> &expected_headers) {
  std::ifstream in(path);
  if (!in)
    throw IngestionError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IngestionError("empty file: " + path.string());
  CsvTable table;
  for (const std::string &h : split_csv_line(line))
    table.headers.push_back(trim(h));
  if (!expected_headers.empty() && table.headers != expected_headers) {
    std::string exp, got;
    for (const auto &h : expected_headers)
      exp += (exp.empty() ? "" : ",") + h;
    for (const auto &h : table.headers)
      got += (got.empty() ? "" : ",") + h;
    throw IngestionError("header mismatch: expected [" + exp + "], found [" +
                         got + "]");
  }
  table.columns.resize(table.headers.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto fields = split_csv_line(line);
    if (fields.size() != table.headers.size())
      throw IngestionError("wrong field count at line " +
                           std::to_string(line_no));
    for (std::size_t c = 0; c < fields.size(); ++c)
      table.columns[c].push_back(parse_double_or_throw(fields[c], line_no));
  }
  return table;
}

void write_spectrum_csv(const fs::path &path, const Spectrum &s) {
  CsvTable t;
  t.headers = {s.x_label, s.y_label};
  t.columns = {s.x, s.y};
  write_csv(path, t);
}

Spectrum read_spectrum_csv(const fs::path &path) {
  CsvTable t = ingest_csv(path);
  if (t.headers.size() != 2)
    throw IngestionError("spectrum CSV must have exactly two columns");
  Spectrum s;
  s.x_label = t.headers[0];
  s.y_label = t.headers[1];
  s.x = t.columns[0];
  s.y = t.columns[1];
  return s;
}

void write_correlation_csv(const fs::path &path,
                           const CorrelationFunction &cf) {
  CsvTable t;
  t.headers = {"tau_ns", "g2", "counts"};
  std::vector<double> counts = cf.counts;
  if (counts.empty())
    counts.assign(cf.g2.size(), 0.0);
  t.columns = {cf.taus_ns, cf.g2, counts};
  write_csv(path, t);
}

void write_timetags(const fs::path &path, const TimeTagStream &stream,
                    std::uint64_t seed) {
  std::ostringstream out;
  out << "# wgqed-timetags v1, detector=" << stream.detector_id
      << ", duration_ns=" << format_full_precision(stream.duration_ns)
      << ", seed=" << seed << "\n";
  for (double t : stream.tags_ns)
    out << format_full_precision(t) << "\n";
  atomic_write_text(path, out.str());
}

TimeTagStream read_timetags(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IngestionError("cannot open: " + path.string());
  std::string header;
  if (!std::getline(in, header) ||
      header.rfind("# wgqed-timetags v1", 0) != 0)
    throw IngestionError("not a wgqed-timetags v1 file: " + path.string());
  TimeTagStream s;
  auto field = [&](const std::string &key) -> std::string {
    const std::string needle = key + "=";
    auto pos = header.find(needle);
    if (pos == std::string::npos)
      throw IngestionError("missing header field " + key);
    auto end = header.find(',', pos);
    return trim(header.substr(pos + needle.size(),
                              end == std::string::npos ? std::string::npos
                                                       : end - pos -
                                                             needle.size()));
  };
  s.detector_id = std::stoi(field("detector"));
  s.duration_ns = std::stod(field("duration_ns"));
  std::string line;
  int line_no = 1;
  double prev = -1.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const double t = parse_double_or_throw(line, line_no);
    if (t < prev)
      throw IngestionError("tags out of order at line " +
                           std::to_string(line_no));
    if (t < 0.0 || t > s.duration_ns)
      throw IngestionError("tag outside [0, duration] at line " +
                           std::to_string(line_no));
    s.tags_ns.push_back(t);
    prev = t;
  }
  return s;
}

Config Config::parse_file(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IngestionError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string &text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';')
      continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ValidationError("bad section header at line " +
                              std::to_string(line_no));
      section = trim(t.substr(1, t.size() - 2));
      cfg.data_[section];
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("expected key = value at line " +
                            std::to_string(line_no));
    cfg.data_[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return cfg;
}

bool Config::has(const std::string &section, const std::string &key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string &section,
                        const std::string &key) const {
  auto s = data_.find(section);
  if (s == data_.end() || !s->second.count(key))
    throw ValidationError("missing config key [" + section + "] " + key);
  return s->second.at(key);
}

std::string Config::get(const std::string &section, const std::string &key,
                        const std::string &fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string &section,
                          const std::string &key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size())
      throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw ValidationError("config key [" + section + "] " + key +
                          " is not a number: '" + v + "'");
  }
}

double Config::get_double(const std::string &section, const std::string &key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t Config::get_int(const std::string &section,
                             const std::string &key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    long long i = std::stoll(v, &used);
    if (used != v.size())
      throw std::invalid_argument(v);
    return i;
  } catch (const std::exception &) {
    throw ValidationError("config key [" + section + "] " + key +
                          " is not an integer: '" + v + "'");
  }
}

std::int64_t Config::get_int(const std::string &section,
                             const std::string &key,
                             std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

} // namespace wgqed
